// Copyright 2026 The qksvm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qksvm/experiment.hpp"
#include "qksvm/model_io.hpp"

using namespace qksvm;
namespace fs = std::filesystem;

namespace {

/// Unique scratch directory, removed when the test section ends.
struct TempDir {
    fs::path path;

    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("qksvm_test_" + tag + "_" + std::to_string(++counter));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

/// Strips the run-to-run varying parts of a report: stage wall times and the
/// echoed output directory.
OrderedJson normalized(OrderedJson report) {
    report.erase("stages");
    report["config_echo"]["output"]["dir"] = "";
    return report;
}

ExperimentConfig tiny_blobs_config(const fs::path& out_dir) {
    ExperimentConfig config = config_from_ini_text("");
    config.dataset_source = "synthetic-blobs";
    config.n_positive = 12;
    config.n_negative = 8;
    config.dimension = 2;
    config.reps = 1;
    config.cv_k = 4;
    config.roster_names = {"proposed-linear", "classical-rbf", "decision-tree"};
    config.out_dir = out_dir.string();
    return config;
}

void check_metric_values_in_range(const OrderedJson& metrics) {
    for (const auto& [name, metric] : metrics.items()) {
        CAPTURE(name);
        REQUIRE(metric.contains("defined"));
        if (metric.at("defined").get<bool>()) {
            const double v = metric.at("value").get<double>();
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        } else {
            CHECK(metric.at("value").is_null());
        }
    }
}

}  // namespace

TEST_CASE("evaluate runs cross-validation and writes the full file set") {
    TempDir dir("evaluate");
    const ExperimentConfig config = tiny_blobs_config(dir.path);
    const OrderedJson report = run_evaluate(config);

    CHECK(report.at("tool") == "qksvm");
    CHECK(report.at("verb") == "evaluate");
    CHECK(report.at("master_seed") == 42);
    CHECK(report.at("dataset").at("n") == 20);
    CHECK(report.at("dataset").at("dimension") == 2);
    CHECK(report.at("dataset").at("n_positive") == 12);
    REQUIRE(report.at("models").size() == 3);
    for (const auto& model : report.at("models")) {
        REQUIRE(model.at("folds").size() == 4);
        for (const auto& fold : model.at("folds")) {
            check_metric_values_in_range(fold.at("metrics"));
        }
        REQUIRE(model.contains("aggregate"));
    }
    // proposed-full is not on this roster, so no comparison block.
    CHECK_FALSE(report.contains("comparison"));

    CHECK(fs::exists(dir.path / "report.json"));
    CHECK(fs::exists(dir.path / "metrics.csv"));
    CHECK(fs::exists(dir.path / "roc.csv"));
    CHECK(fs::exists(dir.path / "gram_proposed-linear.csv"));
    CHECK(fs::exists(dir.path / "gram_classical-rbf.csv"));
    CHECK_FALSE(fs::exists(dir.path / "gram_decision-tree.csv"));

    // metrics.csv: header plus (4 folds + mean + stddev) per model.
    const auto rows = csv::parse(slurp(dir.path / "metrics.csv"));
    REQUIRE(rows.size() == 1 + 3 * 6);
    REQUIRE(rows[0].size() == 11);
    CHECK(rows[0][0] == "model");
    CHECK(rows[0][1] == "fold");
    CHECK(rows[0][2] == "accuracy");
    CHECK(rows[5][1] == "mean");
    CHECK(rows[6][1] == "stddev");
    for (std::size_t r = 1; r < rows.size(); ++r) {
        REQUIRE(rows[r].size() == 11);
        for (std::size_t c = 2; c < rows[r].size(); ++c) {
            if (!rows[r][c].empty() && rows[r][1] != "stddev") {
                const double v = csv::parse_double(rows[r][c]);
                CHECK(v >= 0.0);
                CHECK(v <= 1.0);
            }
        }
    }

    // roc.csv concatenates per-model representative curves.
    const auto roc_rows = csv::parse(slurp(dir.path / "roc.csv"));
    REQUIRE(roc_rows.size() >= 2);
    CHECK(roc_rows[0] == std::vector<std::string>{"model", "fpr", "tpr", "threshold"});

    const std::string saved_report = slurp(dir.path / "report.json");
    CHECK(normalized(OrderedJson::parse(saved_report)) == normalized(report));
}

TEST_CASE("evaluate reruns byte-identically and reuses exported grams") {
    TempDir dir_a("rerun_a");
    TempDir dir_b("rerun_b");
    const OrderedJson report_a = run_evaluate(tiny_blobs_config(dir_a.path));
    const OrderedJson report_b = run_evaluate(tiny_blobs_config(dir_b.path));

    CHECK(slurp(dir_a.path / "metrics.csv") == slurp(dir_b.path / "metrics.csv"));
    CHECK(slurp(dir_a.path / "roc.csv") == slurp(dir_b.path / "roc.csv"));
    CHECK(slurp(dir_a.path / "gram_proposed-linear.csv") ==
          slurp(dir_b.path / "gram_proposed-linear.csv"));
    CHECK(normalized(report_a) == normalized(report_b));
    for (const auto& model : report_a.at("models")) {
        if (model.contains("gram_source")) {
            CHECK(model.at("gram_source") == "computed");
        }
    }

    // A second run into the same directory picks up the exported grams.
    const OrderedJson report_c = run_evaluate(tiny_blobs_config(dir_a.path));
    for (const auto& model : report_c.at("models")) {
        if (model.contains("gram_source")) {
            CHECK(model.at("gram_source") == "file");
        }
    }
    // Identical numbers either way; only the recorded gram provenance differs.
    const auto strip_gram_source = [](OrderedJson report) {
        for (auto& model : report.at("models")) {
            model.erase("gram_source");
        }
        return normalized(report);
    };
    CHECK(strip_gram_source(report_c) == strip_gram_source(report_a));
}

TEST_CASE("evaluate supports the stratified holdout protocol") {
    TempDir dir("holdout");
    ExperimentConfig config = tiny_blobs_config(dir.path);
    config.protocol = "holdout";
    config.test_fraction = 0.25;
    config.roster_names = {"classical-rbf", "decision-tree"};
    const OrderedJson report = run_evaluate(config);

    for (const auto& model : report.at("models")) {
        REQUIRE(model.at("folds").size() == 1);
        CHECK(model.at("folds")[0].at("fold") == "holdout");
        CHECK_FALSE(model.contains("aggregate"));
    }
    const auto rows = csv::parse(slurp(dir.path / "metrics.csv"));
    CHECK(rows.size() == 1 + 2);  // header + one holdout row per model
}

TEST_CASE("the comparison block appears when proposed-full is rostered") {
    TempDir dir("compare");
    ExperimentConfig config = tiny_blobs_config(dir.path);
    config.roster_names = {"proposed-full", "decision-tree"};
    const OrderedJson report = run_evaluate(config);
    REQUIRE(report.contains("comparison"));
    const auto& comparison = report.at("comparison");
    CHECK(comparison.at("metric") == "accuracy");
    CHECK(comparison.contains("proposed_full"));
    CHECK(comparison.contains("proposed_full_geq_all"));
    CHECK(comparison.at("best_other_model") == "decision-tree");
}

TEST_CASE("preprocess writes an L2-normalized document-term matrix") {
    TempDir dir("preprocess");
    ExperimentConfig config = config_from_ini_text("");
    config.dataset_source = "synthetic-corpus";
    config.n_positive = 6;
    config.n_negative = 5;
    config.out_dir = dir.path.string();
    const OrderedJson report = run_preprocess(config);

    CHECK(report.at("verb") == "preprocess");
    CHECK(report.at("dataset").at("n") == 11);
    CHECK(report.at("dataset").contains("empty_documents"));
    const std::string hash = report.at("dataset").at("stopword_list_fnv1a");
    CHECK(hash.size() == 16);

    const auto rows = csv::parse(slurp(dir.path / "dtm.csv"));
    REQUIRE(rows.size() == 1 + 11);
    const std::size_t cols = rows[0].size();
    REQUIRE(cols >= 2);
    CHECK(rows[0].back() == "label");
    for (std::size_t r = 1; r < rows.size(); ++r) {
        REQUIRE(rows[r].size() == cols);
        const std::string& label = rows[r].back();
        CHECK((label == "0" || label == "1"));
        double norm_sq = 0.0;
        for (std::size_t c = 0; c + 1 < cols; ++c) {
            const double v = csv::parse_double(rows[r][c]);
            CHECK(v >= 0.0);
            norm_sq += v * v;
        }
        // Rows are unit length unless the document cleaned down to nothing.
        if (norm_sq > 0.0) {
            CHECK(norm_sq == Catch::Approx(1.0).margin(1e-9));
        }
    }

    // Numeric datasets have no text stage to run.
    ExperimentConfig numeric = tiny_blobs_config(dir.path);
    try {
        run_preprocess(numeric);
        FAIL("expected StageError");
    } catch (const StageError& e) {
        CHECK(e.stage() == "textpipe");
    }
}

TEST_CASE("select ranks features and writes selection.csv") {
    TempDir dir("select");
    ExperimentConfig config = tiny_blobs_config(dir.path);
    config.dimension = 4;
    config.k = 2;
    config.lambda_grid = {0.1, 1.0};
    const OrderedJson report = run_select(config);

    CHECK(report.at("verb") == "select");
    REQUIRE(report.contains("selection"));
    CHECK(report.at("selection").at("reference_k") == 2);
    REQUIRE(report.at("selection").at("features").size() == 4);
    CHECK(report.at("selection").at("lambda_grid").size() == 2);
    // The reduced dataset keeps exactly k features.
    CHECK(report.at("dataset").at("dimension") == 2);

    const auto rows = csv::parse(slurp(dir.path / "selection.csv"));
    REQUIRE(rows.size() == 1 + 4);
    CHECK(rows[0] ==
          std::vector<std::string>{"feature", "rfe_mask", "rfe_rank", "lasso_coeff",
                                   "selected_k"});
    // Selected rows carry the reference k; the rest carry 0.
    std::size_t selected = 0;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        REQUIRE((rows[r][4] == "2" || rows[r][4] == "0"));
        selected += rows[r][4] == "2" ? 1 : 0;
    }
    CHECK(selected == 2);

    ExperimentConfig no_k = tiny_blobs_config(dir.path);
    try {
        run_select(no_k);
        FAIL("expected StageError");
    } catch (const StageError& e) {
        CHECK(e.stage() == "featselect");
    }
}

TEST_CASE("kernel exports one gram per kernel-based model") {
    TempDir dir("kernel");
    ExperimentConfig config = tiny_blobs_config(dir.path);
    config.n_positive = 6;
    config.n_negative = 4;
    config.roster_names = {"proposed-linear", "iqp-full", "classical-rbf",
                           "decision-tree"};
    const OrderedJson report = run_kernel(config);

    CHECK(report.at("verb") == "kernel");
    REQUIRE(report.at("grams").size() == 3);  // decision-tree exports nothing
    for (const auto& entry : report.at("grams")) {
        CHECK(entry.at("n") == 10);
        CHECK(entry.at("min_eigenvalue").get<double>() >= -1e-9);
        const std::string name = entry.at("name");
        const fs::path gram_path = dir.path / ("gram_" + name + ".csv");
        REQUIRE(fs::exists(gram_path));
        const RealMatrix gram = gram_from_csv(slurp(gram_path));
        CHECK(gram.rows() == 10);
        CHECK(gram.cols() == 10);
        if (name == "classical-rbf") {
            CHECK(entry.at("gamma").get<double>() > 0.0);
        }
    }
    CHECK_FALSE(fs::exists(dir.path / "gram_decision-tree.csv"));
}

TEST_CASE("train serializes kernel models and reuses exported grams") {
    TempDir dir("train");
    ExperimentConfig config = tiny_blobs_config(dir.path);
    config.n_positive = 6;
    config.n_negative = 4;
    config.roster_names = {"proposed-linear", "classical-rbf", "decision-tree"};

    const OrderedJson kernel_report = run_kernel(config);
    REQUIRE(kernel_report.at("grams").size() == 2);

    const OrderedJson report = run_train(config);
    CHECK(report.at("verb") == "train");
    REQUIRE(report.at("trained").size() == 2);
    for (const auto& entry : report.at("trained")) {
        CHECK(entry.at("gram_source") == "file");  // exported by run_kernel above
        CHECK(entry.at("support_vectors").get<std::size_t>() >= 1);
        const std::string name = entry.at("name");
        const fs::path model_path = dir.path / ("model_" + name + ".json");
        REQUIRE(fs::exists(model_path));
        const SvmModel model = model_from_json(nlohmann::json::parse(slurp(model_path)));
        CHECK(model.alphas.size() == 10);
        CHECK(model.labels.size() == 10);
    }
    CHECK_FALSE(fs::exists(dir.path / "model_decision-tree.json"));

    // Without exported grams the train verb computes them itself.
    TempDir fresh("train_fresh");
    ExperimentConfig fresh_config = config;
    fresh_config.out_dir = fresh.path.string();
    const OrderedJson fresh_report = run_train(fresh_config);
    for (const auto& entry : fresh_report.at("trained")) {
        CHECK(entry.at("gram_source") == "computed");
    }
}

TEST_CASE("sweep tabulates positive-class precision over the k range") {
    TempDir dir("sweep");
    ExperimentConfig config = tiny_blobs_config(dir.path);
    config.dimension = 4;
    config.k_min = 2;
    config.k_max = 3;
    config.protocol = "holdout";
    config.roster_names = {"classical-linear", "decision-tree"};
    const OrderedJson report = run_sweep(config);

    CHECK(report.at("verb") == "sweep");
    REQUIRE(report.at("sweep").size() == 2);
    for (const auto& k_entry : report.at("sweep")) {
        const std::size_t k = k_entry.at("k").get<std::size_t>();
        CHECK((k == 2 || k == 3));
        CHECK(k_entry.at("features").size() == k);
        REQUIRE(k_entry.at("models").size() == 2);
        for (const auto& model : k_entry.at("models")) {
            check_metric_values_in_range(model.at("metrics"));
        }
    }

    const auto rows = csv::parse(slurp(dir.path / "metrics.csv"));
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] ==
          std::vector<std::string>{"k", "classical-linear", "decision-tree"});
    CHECK(rows[1][0] == "2");
    CHECK(rows[2][0] == "3");
    for (std::size_t r = 1; r < rows.size(); ++r) {
        for (std::size_t c = 1; c < rows[r].size(); ++c) {
            if (!rows[r][c].empty()) {
                const double v = csv::parse_double(rows[r][c]);
                CHECK(v >= 0.0);
                CHECK(v <= 1.0);
            }
        }
    }
    CHECK(fs::exists(dir.path / "selection.csv"));

    // Determinism: the sweep table reproduces byte-for-byte.
    TempDir dir_b("sweep_b");
    ExperimentConfig config_b = config;
    config_b.out_dir = dir_b.path.string();
    run_sweep(config_b);
    CHECK(slurp(dir.path / "metrics.csv") == slurp(dir_b.path / "metrics.csv"));
}

TEST_CASE("sweep validates its k range against the dataset") {
    TempDir dir("sweep_bad");
    ExperimentConfig config = tiny_blobs_config(dir.path);
    config.roster_names = {"decision-tree"};

    try {
        run_sweep(config);  // no k range configured
        FAIL("expected StageError");
    } catch (const StageError& e) {
        CHECK(e.stage() == "featselect");
    }

    config.k_min = 2;
    config.k_max = 10;  // only 2 features exist
    try {
        run_sweep(config);
        FAIL("expected StageError");
    } catch (const StageError& e) {
        CHECK(e.stage() == "featselect");
    }
}

TEST_CASE("stage failures carry the stage that raised them") {
    TempDir dir("stage_tag");
    ExperimentConfig config = tiny_blobs_config(dir.path);
    config.dataset_source = dir.path.string() + "/does_not_exist.csv";
    try {
        run_evaluate(config);
        FAIL("expected StageError");
    } catch (const StageError& e) {
        CHECK(e.stage() == "load");
        CHECK(std::string(e.what()).find("[load]") == 0);
    }

    ExperimentConfig bad_k = tiny_blobs_config(dir.path);
    bad_k.selection_method = "rfe-lasso";
    bad_k.k = 7;  // exceeds dimension 2
    try {
        run_evaluate(bad_k);
        FAIL("expected StageError");
    } catch (const StageError& e) {
        CHECK(e.stage() == "featselect");
    }
}

TEST_CASE("sampled-mode evaluation is deterministic and in range") {
    TempDir dir_a("sampled_a");
    TempDir dir_b("sampled_b");
    ExperimentConfig config = tiny_blobs_config(dir_a.path);
    config.n_positive = 6;
    config.n_negative = 4;
    config.cv_k = 2;
    config.mode = "sampled";
    config.shots = 512;
    config.roster_names = {"proposed-linear"};
    run_evaluate(config);
    ExperimentConfig config_b = config;
    config_b.out_dir = dir_b.path.string();
    run_evaluate(config_b);
    CHECK(slurp(dir_a.path / "gram_proposed-linear.csv") ==
          slurp(dir_b.path / "gram_proposed-linear.csv"));
    CHECK(slurp(dir_a.path / "metrics.csv") == slurp(dir_b.path / "metrics.csv"));

    const RealMatrix gram = gram_from_csv(slurp(dir_a.path / "gram_proposed-linear.csv"));
    for (std::size_t i = 0; i < gram.rows(); ++i) {
        for (std::size_t j = 0; j < gram.cols(); ++j) {
            CHECK(gram(i, j) >= 0.0);
            CHECK(gram(i, j) <= 1.0);
        }
    }
}

TEST_CASE("loading a dataset from a CSV file routes by content") {
    TempDir dir("file_load");
    // Numeric CSV -> numeric loader.
    const fs::path numeric_path = dir.path / "numeric.csv";
    csv::write_file(numeric_path.string(),
                    "f0,f1,label\n0.1,0.9,1\n0.8,0.2,0\n0.2,0.7,1\n0.9,0.1,0\n");
    ExperimentConfig config = tiny_blobs_config(dir.path);
    config.dataset_source = numeric_path.string();
    config.protocol = "holdout";
    config.test_fraction = 0.5;
    config.roster_names = {"decision-tree"};
    const OrderedJson report = run_evaluate(config);
    CHECK(report.at("dataset").at("n") == 4);
    CHECK(report.at("dataset").at("dimension") == 2);
    CHECK(report.at("dataset").at("feature_names") ==
          OrderedJson::array({"f0", "f1"}));

    // Text CSV -> text pipeline (vocabulary becomes the feature set).
    const fs::path text_path = dir.path / "corpus.csv";
    const TextDataset corpus = make_synthetic_corpus(4, 4, 3);
    csv::write_file(text_path.string(), corpus_to_csv(corpus));
    ExperimentConfig text_config = config;
    text_config.dataset_source = text_path.string();
    const OrderedJson text_report = run_evaluate(text_config);
    CHECK(text_report.at("dataset").at("n") == 8);
    CHECK(text_report.at("dataset").contains("stopword_list_fnv1a"));
}
