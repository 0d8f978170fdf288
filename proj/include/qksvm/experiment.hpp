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

/**
 * @file
 * Experiment orchestration: pipeline staging (load -> [textpipe] ->
 * normalize -> [featselect] -> per-model Gram -> train -> evaluate), the
 * cross-validation and holdout protocols, the feature-count sweep, and all
 * report/CSV writers.
 *
 * Every stage is timed and error-tagged; any failure surfaces as a
 * StageError carrying the stage name. Output files are deterministic
 * functions of (config, seed); only the wall-time fields of report.json
 * vary between identical reruns.
 */

#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qksvm/config.hpp"
#include "qksvm/csv.hpp"
#include "qksvm/datasets.hpp"
#include "qksvm/evaluation.hpp"
#include "qksvm/featselect.hpp"
#include "qksvm/kernel.hpp"
#include "qksvm/matrix.hpp"
#include "qksvm/model_io.hpp"
#include "qksvm/svm.hpp"
#include "qksvm/textpipe.hpp"
#include "qksvm/trees.hpp"
#include "qksvm/util.hpp"
#include "qksvm/version.hpp"

namespace qksvm {

class StageError : public std::runtime_error {
  public:
    StageError(const std::string& stage, const std::string& message)
        : std::runtime_error("[" + stage + "] " + message), stage_(stage) {}

    const std::string& stage() const { return stage_; }

  private:
    std::string stage_;
};

struct StageTime {
    std::string name;
    double wall_ms = 0.0;
};

namespace detail {

template <typename Fn>
auto run_stage(std::vector<StageTime>& stages, const std::string& name, Fn&& fn) {
    const auto start = std::chrono::steady_clock::now();
    const auto record = [&stages, &name, start]() {
        const auto end = std::chrono::steady_clock::now();
        stages.push_back(
            {name, std::chrono::duration<double, std::milli>(end - start).count()});
    };
    try {
        if constexpr (std::is_void_v<decltype(fn())>) {
            fn();
            record();
        } else {
            auto result = fn();
            record();
            return result;
        }
    } catch (const StageError&) {
        throw;  // keep the innermost stage tag
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream stream(path, std::ios::binary);
    if (!stream) {
        throw std::runtime_error("cannot open file: " + path.string());
    }
    std::ostringstream out;
    out << stream.rdbuf();
    return out.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream stream(path, std::ios::binary);
    if (!stream) {
        throw std::runtime_error("cannot write file: " + path.string());
    }
    stream << content;
    if (!stream) {
        throw std::runtime_error("write failed: " + path.string());
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Pipeline: load -> [textpipe] -> normalize -> [featselect]
// ---------------------------------------------------------------------------

struct LambdaGridEntry {
    double lambda = 0.0;
    std::size_t support_size = 0;
    double l1_norm = 0.0;
};

struct Pipeline {
    ExperimentConfig config;
    Dataset data;            // after scaling and (when run) selection
    Dataset pre_selection;   // after scaling, before selection (sweep re-selects per k)
    Dataset loaded;          // after load/textpipe, before scaling
    std::vector<StageTime> stages;

    bool text_ran = false;
    std::size_t empty_documents = 0;
    std::uint64_t stopword_hash = 0;

    bool selection_ran = false;
    SelectionReport selection;
    std::vector<LambdaGridEntry> lambda_grid_fits;
};

namespace detail {

inline Dataset dataset_from_text(const TextDataset& corpus, const CleanOptions& options,
                                 std::size_t* empty_documents) {
    const auto tokenized = preprocess_corpus(corpus.docs, options);
    std::size_t empty = 0;
    for (const auto& doc : tokenized) {
        if (doc.empty()) {
            ++empty;
        }
    }
    if (empty_documents != nullptr) {
        *empty_documents = empty;
    }
    auto [vocab, counts] = vectorize(tokenized);
    Dataset data;
    data.x = l2_normalize(counts);
    data.feature_names = vocab.tokens;
    data.y.reserve(corpus.labels.size());
    for (const int label : corpus.labels) {
        data.y.push_back(label == 1 ? 1 : -1);
    }
    return data;
}

inline bool looks_like_text_csv(const std::string& content) {
    const auto records = csv::parse(content);
    if (records.empty()) {
        return false;
    }
    for (const auto& field : records.front()) {
        if (field == "text") {
            return true;
        }
    }
    return false;
}

inline CleanOptions resolve_clean_options(const ExperimentConfig& config) {
    CleanOptions options = config.clean;
    options.stopword_list.clear();
    if (!config.stopword_file.empty()) {
        const std::string content = read_text_file(config.stopword_file);
        std::istringstream stream(content);
        std::string word;
        while (std::getline(stream, word)) {
            word = trim(word);
            if (!word.empty()) {
                options.stopword_list.insert(word);
            }
        }
    } else {
        options.stopword_list.insert(builtin_stopwords().begin(), builtin_stopwords().end());
    }
    return options;
}

}  // namespace detail

/// Runs load -> [textpipe] -> normalize -> [featselect] per the config.
/// `for_sweep` keeps the pre-selection matrix and uses k_max as the
/// selection report's reference k.
inline Pipeline prepare_pipeline(const ExperimentConfig& config, bool for_sweep = false) {
    Pipeline p;
    p.config = config;

    const CleanOptions clean = detail::resolve_clean_options(config);
    p.stopword_hash = stopword_list_hash(clean.stopword_list);

    // --- load (and textpipe for text sources) ---
    p.data = detail::run_stage(p.stages, "load", [&]() -> Dataset {
        if (config.dataset_source == "synthetic-blobs") {
            return make_synthetic_blobs(config.n_positive, config.n_negative, config.dimension,
                                        derive_seed(config.seed, 1, 0));
        }
        if (config.dataset_source == "synthetic-corpus") {
            p.text_ran = true;
            const TextDataset corpus = make_synthetic_corpus(
                config.n_positive, config.n_negative, derive_seed(config.seed, 1, 1));
            return detail::run_stage(p.stages, "textpipe", [&]() {
                return detail::dataset_from_text(corpus, clean, &p.empty_documents);
            });
        }
        if (config.dataset_source == "iris") {
            return load_iris_pair(config.iris_positive, config.iris_negative);
        }
        const std::string content = detail::read_text_file(config.dataset_source);
        if (detail::looks_like_text_csv(content)) {
            p.text_ran = true;
            const TextDataset corpus = corpus_from_csv(content);
            return detail::run_stage(p.stages, "textpipe", [&]() {
                return detail::dataset_from_text(corpus, clean, &p.empty_documents);
            });
        }
        return load_dataset_csv(content);
    });

    p.loaded = p.data;

    // --- normalize (angle scaling) ---
    detail::run_stage(p.stages, "normalize", [&]() {
        if (config.scaling == "minmax-pi") {
            MinMaxPiScaler scaler;
            scaler.fit(p.data.x);
            p.data.x = scaler.transform(p.data.x);
        }
    });
    p.pre_selection = p.data;

    // --- featselect ---
    const bool selection_requested =
        config.selection_method == "rfe-lasso" && (config.k > 0 || for_sweep);
    if (selection_requested) {
        detail::run_stage(p.stages, "featselect", [&]() {
            const std::size_t d = p.data.dimension();
            const std::size_t reference_k = for_sweep ? config.k_max : config.k;
            if (reference_k < 1 || reference_k > d) {
                throw std::invalid_argument("requested k=" + std::to_string(reference_k) +
                                            " exceeds available features (" +
                                            std::to_string(d) + ")");
            }
            ForestConfig forest = config.forest;
            forest.tree.seed = derive_seed(config.seed, 4, 0);
            const ImportanceProvider estimator = [&forest](const RealMatrix& x,
                                                           const std::vector<int>& y) {
                return forest_importance(x, y, forest);
            };
            const std::vector<std::size_t> ranks =
                rfe_rank(p.data.x, p.data.y, estimator, config.rfe_step);

            std::vector<double> targets(p.data.y.size());
            for (std::size_t i = 0; i < targets.size(); ++i) {
                targets[i] = static_cast<double>(p.data.y[i]);
            }
            LassoConfig lasso;
            lasso.lambda = config.lambda;
            const std::vector<double> weights = lasso_fit(p.data.x, targets, lasso);

            for (const double grid_lambda : config.lambda_grid) {
                LassoConfig grid_config = lasso;
                grid_config.lambda = grid_lambda;
                const std::vector<double> w = lasso_fit(p.data.x, targets, grid_config);
                LambdaGridEntry entry;
                entry.lambda = grid_lambda;
                for (const double v : w) {
                    if (v != 0.0) {
                        ++entry.support_size;
                    }
                    entry.l1_norm += std::abs(v);
                }
                p.lambda_grid_fits.push_back(entry);
            }

            p.selection =
                make_selection_report(p.data.feature_names, ranks, weights, reference_k);
            p.selection_ran = true;

            if (!for_sweep) {
                const std::vector<std::size_t> keep = select_features(p.selection, config.k);
                Dataset reduced;
                reduced.x = p.data.x.select_columns(keep);
                reduced.y = p.data.y;
                for (const std::size_t j : keep) {
                    reduced.feature_names.push_back(p.data.feature_names[j]);
                }
                p.data = std::move(reduced);
            }
        });
    }
    return p;
}

// ---------------------------------------------------------------------------
// Per-model evaluation
// ---------------------------------------------------------------------------

struct ModelOutcome {
    ModelSpec spec;
    double resolved_gamma = 0.0;  // classical RBF only

    bool has_gram = false;
    RealMatrix gram;           // raw full-dataset kernel
    std::string gram_source;   // "computed" | "file"

    std::vector<std::string> fold_names;         // "0".."k-1" or "holdout"
    std::vector<MetricsReport> fold_metrics;
    bool has_aggregate = false;
    AggregateReport aggregate;

    bool has_roc = false;
    std::string roc_fold;
    RocCurve roc;
};

namespace detail {

inline KernelMatrix as_kernel(RealMatrix m) {
    KernelMatrix k;
    k.entries = std::move(m);
    return k;
}

/// Builds the raw full-dataset Gram for a kernel model, reusing
/// `reuse_path` when it holds a matching matrix.
inline std::pair<RealMatrix, std::string> full_gram_for(
    const ModelSpec& spec, const std::vector<FeatureVector>& rows, const EstimationMode& mode,
    double gamma, const std::filesystem::path& reuse_path) {
    if (!reuse_path.empty() && std::filesystem::exists(reuse_path)) {
        const RealMatrix loaded = gram_from_csv(read_text_file(reuse_path));
        if (loaded.rows() == rows.size() && loaded.cols() == rows.size()) {
            return {loaded, "file"};
        }
    }
    if (spec.kind == ModelSpec::Kind::Quantum) {
        return {gram_matrix(spec.feature_map, rows, mode).entries, "computed"};
    }
    ClassicalKernelKind kind = spec.classical;
    if (kind.family == ClassicalKernelFamily::Rbf) {
        kind.gamma = gamma;
    }
    return {classical_gram(rows, kind).entries, "computed"};
}

/// Scores one train/test split of a kernel model from the (floored) full
/// Gram: train on the train x train block, score the test x train block.
inline std::vector<double> kernel_fold_scores(const RealMatrix& floored_gram,
                                              const std::vector<int>& y,
                                              const SvmTrainConfig& svm_config,
                                              const std::vector<std::size_t>& train_idx,
                                              const std::vector<std::size_t>& test_idx) {
    const KernelMatrix k_train = as_kernel(floored_gram.submatrix(train_idx, train_idx));
    std::vector<int> y_train;
    y_train.reserve(train_idx.size());
    for (const std::size_t i : train_idx) {
        y_train.push_back(y[i]);
    }
    const SvmModel model = train_smo(k_train, y_train, svm_config);
    const RealMatrix cross = floored_gram.submatrix(test_idx, train_idx);
    std::vector<double> scores;
    scores.reserve(test_idx.size());
    for (const auto& prediction : predict_scores(model, cross)) {
        scores.push_back(prediction.score);
    }
    return scores;
}

inline std::vector<double> tree_fold_scores(const RealMatrix& x, const std::vector<int>& y,
                                            const TreeConfig& tree_config,
                                            const std::vector<std::size_t>& train_idx,
                                            const std::vector<std::size_t>& test_idx) {
    const RealMatrix x_train = x.select_rows(train_idx);
    std::vector<int> y_train;
    y_train.reserve(train_idx.size());
    for (const std::size_t i : train_idx) {
        y_train.push_back(y[i]);
    }
    const DecisionTree tree = cart_train(x_train, y_train, tree_config);
    std::vector<double> scores;
    scores.reserve(test_idx.size());
    for (const std::size_t i : test_idx) {
        scores.push_back(static_cast<double>(cart_predict_row(tree, x.row(i))));
    }
    return scores;
}

}  // namespace detail

/// Evaluates one model over the configured protocol. For kernel models the
/// full-dataset Gram is computed once (or reused from `reuse_path`) and
/// sub-indexed per split; psd_floor guards training against sampling noise.
inline ModelOutcome evaluate_model(const ModelSpec& spec, const Dataset& data,
                                   const ExperimentConfig& config, const EstimationMode& mode,
                                   const FoldSplit* folds, const HoldoutSplit* holdout,
                                   const std::filesystem::path& reuse_path = {}) {
    ModelOutcome outcome;
    outcome.spec = spec;

    const bool kernel_model = spec.kind != ModelSpec::Kind::DecisionTree;
    RealMatrix floored;
    if (kernel_model) {
        const std::vector<FeatureVector> rows = rows_of(data.x);
        if (spec.kind == ModelSpec::Kind::ClassicalSvm &&
            spec.classical.family == ClassicalKernelFamily::Rbf) {
            outcome.resolved_gamma =
                config.rbf_gamma > 0.0 ? config.rbf_gamma : rbf_gamma_scale(rows);
        }
        auto [gram, source] =
            detail::full_gram_for(spec, rows, mode, outcome.resolved_gamma, reuse_path);
        outcome.gram = std::move(gram);
        outcome.gram_source = source;
        outcome.has_gram = true;
        floored = psd_floor(detail::as_kernel(outcome.gram), 1e-9).entries;
    }

    const auto fold_scores = [&](const std::vector<std::size_t>& train_idx,
                                 const std::vector<std::size_t>& test_idx) {
        if (kernel_model) {
            return detail::kernel_fold_scores(floored, data.y, config.svm, train_idx, test_idx);
        }
        TreeConfig tree_config;  // defaults; CART itself draws no randomness
        return detail::tree_fold_scores(data.x, data.y, tree_config, train_idx, test_idx);
    };

    if (folds != nullptr) {
        std::vector<std::vector<double>> fold_score_store;
        const CrossValidationResult cv = cross_validate(
            data.y, *folds,
            [&](const std::vector<std::size_t>& train_idx,
                const std::vector<std::size_t>& test_idx) {
                auto scores = fold_scores(train_idx, test_idx);
                fold_score_store.push_back(scores);
                return scores;
            });
        outcome.fold_metrics = cv.per_fold;
        outcome.aggregate = cv.aggregate;
        outcome.has_aggregate = true;
        for (std::size_t f = 0; f < folds->k; ++f) {
            outcome.fold_names.push_back(std::to_string(f));
        }
        // Representative ROC curve: the best-AUC fold (ties -> lowest index).
        std::size_t best_fold = folds->k;
        double best_auc = -1.0;
        for (std::size_t f = 0; f < folds->k; ++f) {
            if (outcome.fold_metrics[f].auc.defined &&
                outcome.fold_metrics[f].auc.value > best_auc) {
                best_auc = outcome.fold_metrics[f].auc.value;
                best_fold = f;
            }
        }
        if (best_fold < folds->k) {
            std::vector<int> y_test;
            for (const std::size_t i : folds->test_indices[best_fold]) {
                y_test.push_back(data.y[i]);
            }
            outcome.roc = roc_auc(fold_score_store[best_fold], y_test);
            outcome.has_roc = true;
            outcome.roc_fold = std::to_string(best_fold);
        }
    } else if (holdout != nullptr) {
        const std::vector<double> scores =
            fold_scores(holdout->train_indices, holdout->test_indices);
        std::vector<int> y_test;
        std::vector<int> y_pred;
        for (std::size_t t = 0; t < holdout->test_indices.size(); ++t) {
            y_test.push_back(data.y[holdout->test_indices[t]]);
            y_pred.push_back(scores[t] >= 0.0 ? 1 : -1);
        }
        auto [cm, metrics] = confusion_and_metrics(y_test, y_pred);
        const bool has_pos = std::find(y_test.begin(), y_test.end(), 1) != y_test.end();
        const bool has_neg = std::find(y_test.begin(), y_test.end(), -1) != y_test.end();
        if (has_pos && has_neg) {
            const RocCurve curve = roc_auc(scores, y_test);
            metrics.auc = Metric::of(curve.auc);
            outcome.roc = curve;
            outcome.has_roc = true;
            outcome.roc_fold = "holdout";
        }
        outcome.fold_metrics.push_back(metrics);
        outcome.fold_names.push_back("holdout");
    } else {
        throw std::invalid_argument("evaluate_model: no protocol split given");
    }
    return outcome;
}

// ---------------------------------------------------------------------------
// Report assembly and writers
// ---------------------------------------------------------------------------

using OrderedJson = nlohmann::ordered_json;

namespace detail {

inline OrderedJson metric_to_json(const Metric& m) {
    OrderedJson j;
    j["defined"] = m.defined;
    if (m.defined) {
        j["value"] = m.value;
    } else {
        j["value"] = nullptr;
    }
    return j;
}

inline OrderedJson metrics_report_to_json(const MetricsReport& report) {
    OrderedJson j;
    for (const auto& [name, member] : metric_fields()) {
        j[name] = metric_to_json(report.*member);
    }
    return j;
}

inline OrderedJson aggregate_to_json(const AggregateReport& agg) {
    OrderedJson j;
    const auto& fields = metric_fields();
    for (std::size_t f = 0; f < fields.size(); ++f) {
        OrderedJson entry;
        entry["mean"] = metric_to_json(agg.mean.*(fields[f].second));
        entry["stddev"] = metric_to_json(agg.stddev.*(fields[f].second));
        entry["defined_folds"] = agg.defined_counts[f];
        j[fields[f].first] = entry;
    }
    return j;
}

inline OrderedJson config_echo_json(const ExperimentConfig& config) {
    OrderedJson echo;
    for (const auto& [section, entries] : config_to_ini(config)) {
        OrderedJson sec;
        for (const auto& [key, value] : entries) {
            sec[key] = value;
        }
        echo[section] = sec;
    }
    return echo;
}

inline OrderedJson selection_json(const Pipeline& p) {
    OrderedJson j;
    j["reference_k"] = p.selection.reference_k;
    OrderedJson features = OrderedJson::array();
    for (const auto& f : p.selection.features) {
        OrderedJson record;
        record["name"] = f.name;
        record["rfe_mask"] = f.rfe_mask;
        record["rfe_rank"] = f.rfe_rank;
        record["lasso_coeff"] = f.lasso_coeff;
        features.push_back(record);
    }
    j["features"] = features;
    OrderedJson grid = OrderedJson::array();
    for (const auto& entry : p.lambda_grid_fits) {
        OrderedJson record;
        record["lambda"] = entry.lambda;
        record["support_size"] = entry.support_size;
        record["l1_norm"] = entry.l1_norm;
        grid.push_back(record);
    }
    j["lambda_grid"] = grid;
    return j;
}

inline OrderedJson model_spec_json(const ModelOutcome& outcome) {
    OrderedJson j;
    j["name"] = outcome.spec.name;
    switch (outcome.spec.kind) {
        case ModelSpec::Kind::Quantum: {
            j["kind"] = "quantum";
            const auto& fm = outcome.spec.feature_map;
            j["family"] = to_string(fm.family);
            j["topology"] = to_string(fm.topology);
            j["reps"] = fm.reps;
            j["rx_angle"] = fm.rx_angle;
            j["angle_scale"] = fm.angle_scale;
            break;
        }
        case ModelSpec::Kind::ClassicalSvm:
            j["kind"] = "classical-svm";
            j["kernel"] = outcome.spec.classical.family == ClassicalKernelFamily::Rbf
                              ? "rbf"
                              : (outcome.spec.classical.family == ClassicalKernelFamily::Linear
                                     ? "linear"
                                     : "poly");
            if (outcome.spec.classical.family == ClassicalKernelFamily::Rbf) {
                j["gamma"] = outcome.resolved_gamma;
            }
            break;
        case ModelSpec::Kind::DecisionTree:
            j["kind"] = "decision-tree";
            j["max_depth"] = TreeConfig{}.max_depth;
            j["min_samples_split"] = TreeConfig{}.min_samples_split;
            break;
    }
    if (outcome.has_gram) {
        j["gram_source"] = outcome.gram_source;
    }
    return j;
}

}  // namespace detail

struct RunReport {
    OrderedJson json;
    std::map<std::string, std::string> files;  // filename -> content, written with report.json
};

/// metrics.csv for protocol runs: one row per (model, fold) plus mean and
/// stddev rows under cross-validation. Undefined metrics are empty fields.
inline std::string metrics_to_csv(const std::vector<ModelOutcome>& outcomes) {
    std::string out = "model,fold";
    for (const auto& [name, member] : metric_fields()) {
        (void)member;
        out += ",";
        out += name;
    }
    out += "\n";
    const auto metric_row = [](const MetricsReport& report) {
        std::string row;
        for (const auto& [name, member] : metric_fields()) {
            (void)name;
            const Metric& m = report.*member;
            row += ",";
            if (m.defined) {
                row += csv::format_double(m.value);
            }
        }
        return row;
    };
    for (const auto& outcome : outcomes) {
        for (std::size_t f = 0; f < outcome.fold_metrics.size(); ++f) {
            out += csv::quote_field(outcome.spec.name) + "," + outcome.fold_names[f];
            out += metric_row(outcome.fold_metrics[f]);
            out += "\n";
        }
        if (outcome.has_aggregate) {
            out += csv::quote_field(outcome.spec.name) + ",mean";
            out += metric_row(outcome.aggregate.mean);
            out += "\n";
            out += csv::quote_field(outcome.spec.name) + ",stddev";
            out += metric_row(outcome.aggregate.stddev);
            out += "\n";
        }
    }
    return out;
}

/// roc.csv: each model's representative curve, concatenated, with a model
/// column ahead of the (fpr, tpr, threshold) columns.
inline std::string roc_to_csv(const std::vector<ModelOutcome>& outcomes) {
    std::string out = "model,fpr,tpr,threshold\n";
    for (const auto& outcome : outcomes) {
        if (!outcome.has_roc) {
            continue;
        }
        for (const auto& point : outcome.roc.points) {
            out += csv::join_row({outcome.spec.name, csv::format_double(point.fpr),
                                  csv::format_double(point.tpr),
                                  csv::format_double(point.threshold)});
            out += "\n";
        }
    }
    return out;
}

/// The sweep's k x model table of positive-class precision; undefined cells
/// are empty.
inline std::string sweep_to_csv(const std::vector<std::size_t>& k_values,
                                const std::vector<std::string>& model_names,
                                const std::vector<std::vector<Metric>>& precision) {
    std::string out = "k";
    for (const auto& name : model_names) {
        out += ",";
        out += csv::quote_field(name);
    }
    out += "\n";
    for (std::size_t r = 0; r < k_values.size(); ++r) {
        out += std::to_string(k_values[r]);
        for (std::size_t c = 0; c < model_names.size(); ++c) {
            out += ",";
            if (precision[r][c].defined) {
                out += csv::format_double(precision[r][c].value);
            }
        }
        out += "\n";
    }
    return out;
}

namespace detail {

inline OrderedJson base_report(const ExperimentConfig& config, const std::string& verb) {
    OrderedJson j;
    j["tool"] = "qksvm";
    j["tool_version"] = kVersion;
    j["verb"] = verb;
    j["master_seed"] = config.seed;
    j["config_echo"] = config_echo_json(config);
    return j;
}

inline void attach_pipeline(OrderedJson& report, const Pipeline& p) {
    OrderedJson dataset;
    dataset["n"] = p.data.size();
    dataset["dimension"] = p.data.dimension();
    std::size_t n_pos = 0;
    for (const int label : p.data.y) {
        n_pos += label == 1 ? 1 : 0;
    }
    dataset["n_positive"] = n_pos;
    dataset["n_negative"] = p.data.size() - n_pos;
    OrderedJson names = OrderedJson::array();
    for (const auto& name : p.data.feature_names) {
        names.push_back(name);
    }
    dataset["feature_names"] = names;
    if (p.text_ran) {
        dataset["empty_documents"] = p.empty_documents;
        char hash_hex[32];
        std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                      static_cast<unsigned long long>(p.stopword_hash));
        dataset["stopword_list_fnv1a"] = hash_hex;
    }
    report["dataset"] = dataset;
    if (p.selection_ran) {
        report["selection"] = selection_json(p);
    }
}

inline void attach_stages(OrderedJson& report, const std::vector<StageTime>& stages) {
    OrderedJson list = OrderedJson::array();
    for (const auto& stage : stages) {
        OrderedJson entry;
        entry["name"] = stage.name;
        entry["wall_ms"] = stage.wall_ms;
        list.push_back(entry);
    }
    report["stages"] = list;
}

inline void attach_models(OrderedJson& report, const std::vector<ModelOutcome>& outcomes) {
    OrderedJson models = OrderedJson::array();
    for (const auto& outcome : outcomes) {
        OrderedJson entry = model_spec_json(outcome);
        OrderedJson folds = OrderedJson::array();
        for (std::size_t f = 0; f < outcome.fold_metrics.size(); ++f) {
            OrderedJson fold;
            fold["fold"] = outcome.fold_names[f];
            fold["metrics"] = metrics_report_to_json(outcome.fold_metrics[f]);
            folds.push_back(fold);
        }
        entry["folds"] = folds;
        if (outcome.has_aggregate) {
            entry["aggregate"] = aggregate_to_json(outcome.aggregate);
        }
        if (outcome.has_roc) {
            entry["roc_fold"] = outcome.roc_fold;
            entry["roc_auc"] = outcome.roc.auc;
        }
        models.push_back(entry);
    }
    report["models"] = models;
}

/// Criterion-style qualitative comparison: is proposed-full's accuracy >=
/// every other rostered model's? Recorded, never asserted.
inline void attach_comparison(OrderedJson& report, const std::vector<ModelOutcome>& outcomes) {
    const auto accuracy_of = [](const ModelOutcome& outcome) -> Metric {
        if (outcome.has_aggregate) {
            return outcome.aggregate.mean.accuracy;
        }
        if (!outcome.fold_metrics.empty()) {
            return outcome.fold_metrics.front().accuracy;
        }
        return Metric::undefined();
    };
    const ModelOutcome* proposed_full = nullptr;
    for (const auto& outcome : outcomes) {
        if (outcome.spec.name == "proposed-full") {
            proposed_full = &outcome;
        }
    }
    if (proposed_full == nullptr) {
        return;
    }
    const Metric own = accuracy_of(*proposed_full);
    if (!own.defined) {
        return;
    }
    bool geq_all = true;
    std::string best_other;
    double best_other_value = -1.0;
    for (const auto& outcome : outcomes) {
        if (outcome.spec.name == "proposed-full") {
            continue;
        }
        const Metric other = accuracy_of(outcome);
        if (!other.defined) {
            continue;
        }
        if (other.value > own.value) {
            geq_all = false;
        }
        if (other.value > best_other_value) {
            best_other_value = other.value;
            best_other = outcome.spec.name;
        }
    }
    OrderedJson comparison;
    comparison["metric"] = "accuracy";
    comparison["proposed_full"] = own.value;
    if (!best_other.empty()) {
        comparison["best_other_model"] = best_other;
        comparison["best_other_value"] = best_other_value;
    }
    comparison["proposed_full_geq_all"] = geq_all;
    report["comparison"] = comparison;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Verb drivers
// ---------------------------------------------------------------------------

namespace detail {

inline EstimationMode resolve_mode(const ExperimentConfig& config) {
    if (config.mode == "sampled") {
        return EstimationMode::sampled(config.shots, derive_seed(config.seed, 5, 0));
    }
    return EstimationMode::exact();
}

inline std::vector<ModelOutcome> run_protocol(const ExperimentConfig& config,
                                              const Dataset& data,
                                              std::vector<StageTime>& stages,
                                              const std::filesystem::path& out_dir,
                                              bool allow_gram_reuse) {
    const EstimationMode base_mode = resolve_mode(config);
    FoldSplit folds;
    HoldoutSplit holdout;
    const bool use_cv = config.protocol == "cv";
    if (use_cv) {
        folds = stratified_folds(data.y, config.cv_k, derive_seed(config.seed, 2, 0));
    } else {
        holdout = stratified_holdout(data.y, config.test_fraction, derive_seed(config.seed, 3, 0));
    }

    std::vector<ModelOutcome> outcomes;
    for (std::size_t m = 0; m < config.roster_names.size(); ++m) {
        const ModelSpec spec = resolve_model(config.roster_names[m], config);
        EstimationMode mode = base_mode;
        if (mode.kind == EstimationMode::Kind::Sampled) {
            mode.seed = derive_seed(config.seed, 5, m + 1);
        }
        const std::filesystem::path reuse_path =
            allow_gram_reuse && spec.kind != ModelSpec::Kind::DecisionTree
                ? out_dir / ("gram_" + spec.name + ".csv")
                : std::filesystem::path{};
        outcomes.push_back(run_stage(stages, "model:" + spec.name, [&]() {
            return evaluate_model(spec, data, config, mode, use_cv ? &folds : nullptr,
                                  use_cv ? nullptr : &holdout, reuse_path);
        }));
    }
    return outcomes;
}

inline void write_outputs(const std::filesystem::path& out_dir,
                          const std::map<std::string, std::string>& files,
                          OrderedJson& report, std::vector<StageTime>& stages) {
    run_stage(stages, "write", [&]() {
        std::filesystem::create_directories(out_dir);
        for (const auto& [name, content] : files) {
            write_text_file(out_dir / name, content);
        }
    });
    attach_stages(report, stages);
    write_text_file(out_dir / "report.json", report.dump(2) + "\n");
}

}  // namespace detail

/// `evaluate`: the full protocol (CV or holdout) over the configured roster.
/// Writes report.json, metrics.csv, roc.csv, gram_<model>.csv and, when
/// selection ran, selection.csv.
inline OrderedJson run_evaluate(const ExperimentConfig& config) {
    Pipeline p = prepare_pipeline(config);
    const std::filesystem::path out_dir = config.out_dir;
    const std::vector<ModelOutcome> outcomes =
        detail::run_protocol(config, p.data, p.stages, out_dir, /*allow_gram_reuse=*/true);

    OrderedJson report = detail::base_report(config, "evaluate");
    detail::attach_pipeline(report, p);
    detail::attach_models(report, outcomes);
    detail::attach_comparison(report, outcomes);

    std::map<std::string, std::string> files;
    files["metrics.csv"] = metrics_to_csv(outcomes);
    files["roc.csv"] = roc_to_csv(outcomes);
    for (const auto& outcome : outcomes) {
        if (outcome.has_gram) {
            files["gram_" + outcome.spec.name + ".csv"] = gram_to_csv(outcome.gram);
        }
    }
    if (p.selection_ran) {
        files["selection.csv"] = selection_to_csv(p.selection);
    }
    detail::write_outputs(out_dir, files, report, p.stages);
    return report;
}

/// `sweep`: for each k in [k_min, k_max], select the top-k features and
/// evaluate the roster on the stratified holdout, recording positive-class
/// precision. Writes report.json, metrics.csv (the k x model table) and
/// selection.csv.
inline OrderedJson run_sweep(const ExperimentConfig& config) {
    if (config.k_min < 1 || config.k_max < config.k_min) {
        throw StageError("featselect", "sweep requires a k-range (selection.k_min/k_max)");
    }
    ExperimentConfig sweep_config = config;
    if (sweep_config.selection_method == "none") {
        sweep_config.selection_method = "rfe-lasso";
    }
    Pipeline p = prepare_pipeline(sweep_config, /*for_sweep=*/true);
    const std::filesystem::path out_dir = config.out_dir;
    if (config.k_max > p.pre_selection.dimension()) {
        throw StageError("featselect",
                         "k_max=" + std::to_string(config.k_max) + " exceeds available features (" +
                             std::to_string(p.pre_selection.dimension()) + ")");
    }

    const HoldoutSplit holdout =
        stratified_holdout(p.pre_selection.y, config.test_fraction, derive_seed(config.seed, 3, 0));
    const EstimationMode base_mode = detail::resolve_mode(config);

    std::vector<std::size_t> k_values;
    for (std::size_t k = config.k_min; k <= config.k_max; ++k) {
        k_values.push_back(k);
    }
    std::vector<std::vector<Metric>> precision(
        k_values.size(), std::vector<Metric>(config.roster_names.size()));
    OrderedJson sweep_detail = OrderedJson::array();

    for (std::size_t r = 0; r < k_values.size(); ++r) {
        const std::size_t k = k_values[r];
        const std::vector<std::size_t> keep = select_features(p.selection, k);
        Dataset reduced;
        reduced.x = p.pre_selection.x.select_columns(keep);
        reduced.y = p.pre_selection.y;
        for (const std::size_t j : keep) {
            reduced.feature_names.push_back(p.pre_selection.feature_names[j]);
        }

        OrderedJson k_entry;
        k_entry["k"] = k;
        OrderedJson k_features = OrderedJson::array();
        for (const auto& name : reduced.feature_names) {
            k_features.push_back(name);
        }
        k_entry["features"] = k_features;
        OrderedJson k_models = OrderedJson::array();

        for (std::size_t m = 0; m < config.roster_names.size(); ++m) {
            const ModelSpec spec = resolve_model(config.roster_names[m], config);
            EstimationMode mode = base_mode;
            if (mode.kind == EstimationMode::Kind::Sampled) {
                mode.seed = derive_seed(config.seed, 5, (k << 8) | (m + 1));
            }
            const ModelOutcome outcome = detail::run_stage(
                p.stages, "sweep:k=" + std::to_string(k) + ":" + spec.name, [&]() {
                    return evaluate_model(spec, reduced, config, mode, nullptr, &holdout);
                });
            precision[r][m] = outcome.fold_metrics.front().precision_pos;
            OrderedJson model_entry;
            model_entry["name"] = spec.name;
            model_entry["metrics"] =
                detail::metrics_report_to_json(outcome.fold_metrics.front());
            k_models.push_back(model_entry);
        }
        k_entry["models"] = k_models;
        sweep_detail.push_back(k_entry);
    }

    OrderedJson report = detail::base_report(config, "sweep");
    detail::attach_pipeline(report, p);
    report["sweep"] = sweep_detail;

    std::map<std::string, std::string> files;
    files["metrics.csv"] = sweep_to_csv(k_values, config.roster_names, precision);
    files["selection.csv"] = selection_to_csv(p.selection);
    detail::write_outputs(out_dir, files, report, p.stages);
    return report;
}

/// `preprocess`: text pipeline only; writes the document-term matrix
/// (header = vocabulary + label, rows L2-normalized) and report.json.
inline OrderedJson run_preprocess(const ExperimentConfig& config) {
    Pipeline p = prepare_pipeline(config);
    if (!p.text_ran) {
        throw StageError("textpipe", "preprocess requires a text dataset "
                                     "(synthetic-corpus or a CSV with a 'text' column)");
    }
    const std::filesystem::path out_dir = config.out_dir;

    std::string dtm;
    {
        std::vector<std::string> header = p.loaded.feature_names;
        header.push_back("label");
        dtm = csv::join_row(header) + "\n";
        const Dataset& d = p.loaded;  // textpipe output, before angle scaling
        std::vector<std::string> fields(d.dimension() + 1);
        for (std::size_t i = 0; i < d.size(); ++i) {
            for (std::size_t j = 0; j < d.dimension(); ++j) {
                fields[j] = csv::format_double(d.x(i, j));
            }
            fields[d.dimension()] = d.y[i] == 1 ? "1" : "0";
            dtm += csv::join_row(fields) + "\n";
        }
    }

    OrderedJson report = detail::base_report(config, "preprocess");
    detail::attach_pipeline(report, p);
    std::map<std::string, std::string> files;
    files["dtm.csv"] = dtm;
    detail::write_outputs(out_dir, files, report, p.stages);
    return report;
}

/// `select`: pipeline through feature selection; writes selection.csv and
/// report.json.
inline OrderedJson run_select(const ExperimentConfig& config) {
    ExperimentConfig select_config = config;
    if (select_config.selection_method == "none") {
        select_config.selection_method = "rfe-lasso";
    }
    if (select_config.k == 0) {
        throw StageError("featselect", "select requires selection.k");
    }
    Pipeline p = prepare_pipeline(select_config);
    const std::filesystem::path out_dir = config.out_dir;

    OrderedJson report = detail::base_report(select_config, "select");
    detail::attach_pipeline(report, p);
    std::map<std::string, std::string> files;
    files["selection.csv"] = selection_to_csv(p.selection);
    detail::write_outputs(out_dir, files, report, p.stages);
    return report;
}

/// `kernel`: pipeline through Gram computation; writes gram_<model>.csv per
/// kernel-based roster model and report.json.
inline OrderedJson run_kernel(const ExperimentConfig& config) {
    Pipeline p = prepare_pipeline(config);
    const std::filesystem::path out_dir = config.out_dir;
    const EstimationMode base_mode = detail::resolve_mode(config);
    const std::vector<FeatureVector> rows = rows_of(p.data.x);

    OrderedJson report = detail::base_report(config, "kernel");
    detail::attach_pipeline(report, p);
    OrderedJson models = OrderedJson::array();
    std::map<std::string, std::string> files;

    for (std::size_t m = 0; m < config.roster_names.size(); ++m) {
        const ModelSpec spec = resolve_model(config.roster_names[m], config);
        if (spec.kind == ModelSpec::Kind::DecisionTree) {
            continue;
        }
        EstimationMode mode = base_mode;
        if (mode.kind == EstimationMode::Kind::Sampled) {
            mode.seed = derive_seed(config.seed, 5, m + 1);
        }
        double gamma = 0.0;
        if (spec.kind == ModelSpec::Kind::ClassicalSvm &&
            spec.classical.family == ClassicalKernelFamily::Rbf) {
            gamma = config.rbf_gamma > 0.0 ? config.rbf_gamma : rbf_gamma_scale(rows);
        }
        const auto [gram, source] = detail::run_stage(
            p.stages, "gram:" + spec.name,
            [&]() { return detail::full_gram_for(spec, rows, mode, gamma, {}); });
        files["gram_" + spec.name + ".csv"] = gram_to_csv(gram);
        OrderedJson entry;
        entry["name"] = spec.name;
        entry["n"] = gram.rows();
        entry["min_eigenvalue"] = min_eigenvalue(gram);
        if (gamma > 0.0) {
            entry["gamma"] = gamma;
        }
        models.push_back(entry);
    }
    report["grams"] = models;
    detail::write_outputs(out_dir, files, report, p.stages);
    return report;
}

/// `train`: trains each kernel-based roster model on the full dataset
/// (reusing exported Grams when present) and writes model_<name>.json.
inline OrderedJson run_train(const ExperimentConfig& config) {
    Pipeline p = prepare_pipeline(config);
    const std::filesystem::path out_dir = config.out_dir;
    const EstimationMode base_mode = detail::resolve_mode(config);
    const std::vector<FeatureVector> rows = rows_of(p.data.x);

    OrderedJson report = detail::base_report(config, "train");
    detail::attach_pipeline(report, p);
    OrderedJson models = OrderedJson::array();
    std::map<std::string, std::string> files;

    for (std::size_t m = 0; m < config.roster_names.size(); ++m) {
        const ModelSpec spec = resolve_model(config.roster_names[m], config);
        if (spec.kind == ModelSpec::Kind::DecisionTree) {
            continue;  // tree baseline has no kernel model to serialize
        }
        EstimationMode mode = base_mode;
        if (mode.kind == EstimationMode::Kind::Sampled) {
            mode.seed = derive_seed(config.seed, 5, m + 1);
        }
        double gamma = 0.0;
        if (spec.kind == ModelSpec::Kind::ClassicalSvm &&
            spec.classical.family == ClassicalKernelFamily::Rbf) {
            gamma = config.rbf_gamma > 0.0 ? config.rbf_gamma : rbf_gamma_scale(rows);
        }
        OrderedJson entry = detail::run_stage(p.stages, "train:" + spec.name, [&]() {
            const auto [gram, source] = detail::full_gram_for(
                spec, rows, mode, gamma, out_dir / ("gram_" + spec.name + ".csv"));
            const KernelMatrix floored = psd_floor(detail::as_kernel(gram), 1e-9);
            const SvmModel model = train_smo(floored, p.data.y, config.svm);
            files["model_" + spec.name + ".json"] =
                model_to_json(model, config.svm).dump(2) + "\n";
            OrderedJson info;
            info["name"] = spec.name;
            info["gram_source"] = source;
            info["support_vectors"] = model.support_indices.size();
            info["bias"] = model.bias;
            return info;
        });
        models.push_back(entry);
    }
    report["trained"] = models;
    detail::write_outputs(out_dir, files, report, p.stages);
    return report;
}

}  // namespace qksvm
