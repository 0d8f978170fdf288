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

#include <string>
#include <vector>

#include "qksvm/config.hpp"
#include "qksvm/util.hpp"

using namespace qksvm;
using Catch::Matchers::ContainsSubstring;

TEST_CASE("parse_ini handles sections, comments, and whitespace") {
    const std::string text =
        "# leading comment\n"
        "[dataset]\n"
        "  source = iris   ; trailing comment\n"
        "\n"
        "dimension=4\r\n"
        "[kernel]  # another comment\n"
        "mode = sampled\n";
    const IniData ini = parse_ini(text);
    REQUIRE(ini.count("dataset") == 1);
    REQUIRE(ini.count("kernel") == 1);
    CHECK(ini.at("dataset").at("source") == "iris");
    CHECK(ini.at("dataset").at("dimension") == "4");
    CHECK(ini.at("kernel").at("mode") == "sampled");
}

TEST_CASE("parse_ini reports malformed lines with their line numbers") {
    CHECK_THROWS_WITH(parse_ini("[dataset]\nsource iris\n"),
                      ContainsSubstring("line 2"));
    CHECK_THROWS_WITH(parse_ini("[dataset\n"), ContainsSubstring("line 1"));
    CHECK_THROWS_WITH(parse_ini("[dataset]\n= 5\n"), ContainsSubstring("line 2"));
    CHECK_THROWS_AS(parse_ini("ok = 1\n[oops\n"), std::invalid_argument);
}

TEST_CASE("an empty config materializes every documented default") {
    const ExperimentConfig config = config_from_ini_text("");
    CHECK(config.dataset_source == "synthetic-blobs");
    CHECK(config.iris_positive == "setosa");
    CHECK(config.iris_negative == "versicolor");
    CHECK(config.n_positive == 90);
    CHECK(config.n_negative == 60);
    CHECK(config.dimension == 5);
    CHECK(config.scaling == "minmax-pi");
    CHECK(config.clean.lowercase);
    CHECK(config.clean.strip_markup);
    CHECK(config.clean.strip_punctuation);
    CHECK(config.clean.remove_stopwords);
    CHECK(config.stopword_file.empty());
    CHECK(config.selection_method == "none");
    CHECK(config.k == 0);
    CHECK(config.k_min == 0);
    CHECK(config.k_max == 0);
    CHECK(config.lambda == 1.0);
    CHECK(config.lambda_grid.empty());
    CHECK(config.rfe_step == 1);
    CHECK(config.roster_names == default_roster());
    CHECK(config.reps == 2);
    CHECK(config.rx_angle == kPi / 2.0);
    CHECK(config.angle_scale == 1.0);
    CHECK(config.rbf_gamma == 0.0);
    CHECK(config.svm.C == 1.0);
    CHECK(config.mode == "exact");
    CHECK(config.shots == 8192);
    CHECK(config.protocol == "cv");
    CHECK(config.cv_k == 10);
    CHECK(config.test_fraction == 0.25);
    CHECK(config.seed == 42);
    CHECK(config.out_dir == "out");
}

TEST_CASE("the default roster lists all eight models in order") {
    CHECK(default_roster() ==
          std::vector<std::string>{"proposed-linear", "proposed-full", "iqp-linear",
                                   "iqp-full", "heisenberg-linear", "heisenberg-full",
                                   "classical-rbf", "decision-tree"});
}

TEST_CASE("a fully specified config overrides every default") {
    const std::string text =
        "[dataset]\n"
        "source = iris\n"
        "iris_positive = versicolor\n"
        "iris_negative = virginica\n"
        "n_positive = 10\n"
        "n_negative = 12\n"
        "dimension = 3\n"
        "scaling = none\n"
        "[textpipe]\n"
        "lowercase = false\n"
        "strip_markup = no\n"
        "strip_punctuation = 0\n"
        "remove_stopwords = off\n"
        "stopword_file = data/stopwords_en.txt\n"
        "[selection]\n"
        "method = rfe-lasso\n"
        "k = 3\n"
        "k_min = 5\n"
        "k_max = 13\n"
        "lambda = 0.5\n"
        "lambda_grid = 0.1, 0.5, 1.0\n"
        "rfe_step = 2\n"
        "n_trees = 17\n"
        "tree_max_depth = 4\n"
        "tree_min_samples_split = 5\n"
        "[models]\n"
        "roster = proposed-full, classical-linear\n"
        "reps = 3\n"
        "rx_angle = 0.25\n"
        "angle_scale = 2.0\n"
        "rbf_gamma = 0.75\n"
        "[svm]\n"
        "C = 10\n"
        "tol = 1e-5\n"
        "max_passes = 500\n"
        "[kernel]\n"
        "mode = sampled\n"
        "shots = 1024\n"
        "[protocol]\n"
        "method = holdout\n"
        "cv_k = 5\n"
        "test_fraction = 0.3\n"
        "seed = 7\n"
        "[output]\n"
        "dir = results/run1\n";
    const ExperimentConfig config = config_from_ini_text(text);
    CHECK(config.dataset_source == "iris");
    CHECK(config.iris_positive == "versicolor");
    CHECK(config.iris_negative == "virginica");
    CHECK(config.n_positive == 10);
    CHECK(config.n_negative == 12);
    CHECK(config.dimension == 3);
    CHECK(config.scaling == "none");
    CHECK_FALSE(config.clean.lowercase);
    CHECK_FALSE(config.clean.strip_markup);
    CHECK_FALSE(config.clean.strip_punctuation);
    CHECK_FALSE(config.clean.remove_stopwords);
    CHECK(config.stopword_file == "data/stopwords_en.txt");
    CHECK(config.selection_method == "rfe-lasso");
    CHECK(config.k == 3);
    CHECK(config.k_min == 5);
    CHECK(config.k_max == 13);
    CHECK(config.lambda == 0.5);
    CHECK(config.lambda_grid == std::vector<double>{0.1, 0.5, 1.0});
    CHECK(config.rfe_step == 2);
    CHECK(config.forest.n_trees == 17);
    CHECK(config.forest.tree.max_depth == 4);
    CHECK(config.forest.tree.min_samples_split == 5);
    CHECK(config.roster_names ==
          std::vector<std::string>{"proposed-full", "classical-linear"});
    CHECK(config.reps == 3);
    CHECK(config.rx_angle == 0.25);
    CHECK(config.angle_scale == 2.0);
    CHECK(config.rbf_gamma == 0.75);
    CHECK(config.svm.C == 10.0);
    CHECK(config.svm.tol == 1e-5);
    CHECK(config.svm.max_passes == 500);
    CHECK(config.mode == "sampled");
    CHECK(config.shots == 1024);
    CHECK(config.protocol == "holdout");
    CHECK(config.cv_k == 5);
    CHECK(config.test_fraction == 0.3);
    CHECK(config.seed == 7);
    CHECK(config.out_dir == "results/run1");
}

TEST_CASE("unknown sections and keys are rejected by name") {
    CHECK_THROWS_WITH(config_from_ini_text("[mystery]\nx = 1\n"),
                      ContainsSubstring("mystery"));
    CHECK_THROWS_WITH(config_from_ini_text("[dataset]\ncolour = red\n"),
                      ContainsSubstring("dataset.colour"));
    CHECK_THROWS_WITH(config_from_ini_text("[svm]\nshots = 100\n"),
                      ContainsSubstring("svm.shots"));
}

TEST_CASE("config values are validated when materialized") {
    CHECK_THROWS_AS(config_from_ini_text("[dataset]\nscaling = standard\n"),
                    std::invalid_argument);
    CHECK_THROWS_AS(config_from_ini_text("[dataset]\nn_positive = -3\n"),
                    std::invalid_argument);
    CHECK_THROWS_AS(config_from_ini_text("[dataset]\nn_positive = 3.5\n"),
                    std::invalid_argument);
    CHECK_THROWS_AS(config_from_ini_text("[textpipe]\nlowercase = maybe\n"),
                    std::invalid_argument);
    CHECK_THROWS_AS(config_from_ini_text("[selection]\nmethod = pca\n"),
                    std::invalid_argument);
    CHECK_THROWS_AS(config_from_ini_text("[selection]\nlambda = abc\n"),
                    std::invalid_argument);
    CHECK_THROWS_AS(config_from_ini_text("[models]\nroster = \n"),
                    std::invalid_argument);
    CHECK_THROWS_AS(config_from_ini_text("[models]\nroster = quantum-magic\n"),
                    std::invalid_argument);
    CHECK_THROWS_AS(config_from_ini_text("[models]\nreps = 0\n"), std::invalid_argument);
    CHECK_THROWS_AS(config_from_ini_text("[kernel]\nmode = noisy\n"),
                    std::invalid_argument);
    CHECK_THROWS_AS(config_from_ini_text("[kernel]\nshots = 0\n"), std::invalid_argument);
    CHECK_THROWS_AS(config_from_ini_text("[protocol]\nmethod = bootstrap\n"),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        config_from_ini_text("[selection]\nk_min = 0\nk_max = 4\n"),
        std::invalid_argument);
    CHECK_THROWS_AS(
        config_from_ini_text("[selection]\nk_min = 6\nk_max = 4\n"),
        std::invalid_argument);
    CHECK_THROWS_AS(
        config_from_ini_text("[selection]\nk_min = 5\nk_max = 25\n"),
        std::invalid_argument);
    CHECK_NOTHROW(config_from_ini_text("[selection]\nk_min = 5\nk_max = 13\n"));
}

TEST_CASE("resolve_model maps roster names to model specifications") {
    ExperimentConfig config;
    config.reps = 3;
    config.rx_angle = 0.4;
    config.angle_scale = 1.5;

    const ModelSpec pf = resolve_model("proposed-full", config);
    CHECK(pf.kind == ModelSpec::Kind::Quantum);
    CHECK(pf.feature_map.family == FeatureMapFamily::Proposed);
    CHECK(pf.feature_map.topology == EntanglementTopology::Full);
    CHECK(pf.feature_map.reps == 3);
    CHECK(pf.feature_map.rx_angle == 0.4);
    CHECK(pf.feature_map.angle_scale == 1.5);

    CHECK(resolve_model("proposed-linear", config).feature_map.topology ==
          EntanglementTopology::Linear);
    CHECK(resolve_model("iqp-linear", config).feature_map.family ==
          FeatureMapFamily::Iqp);
    CHECK(resolve_model("iqp-full", config).feature_map.topology ==
          EntanglementTopology::Full);
    CHECK(resolve_model("heisenberg-linear", config).feature_map.family ==
          FeatureMapFamily::Heisenberg);
    CHECK(resolve_model("heisenberg-full", config).feature_map.family ==
          FeatureMapFamily::Heisenberg);

    const ModelSpec rbf = resolve_model("classical-rbf", config);
    CHECK(rbf.kind == ModelSpec::Kind::ClassicalSvm);
    CHECK(rbf.classical.family == ClassicalKernelFamily::Rbf);

    const ModelSpec lin = resolve_model("classical-linear", config);
    CHECK(lin.kind == ModelSpec::Kind::ClassicalSvm);
    CHECK(lin.classical.family == ClassicalKernelFamily::Linear);

    CHECK(resolve_model("decision-tree", config).kind == ModelSpec::Kind::DecisionTree);

    CHECK_THROWS_WITH(resolve_model("quantum-magic", config),
                      ContainsSubstring("quantum-magic"));
}

TEST_CASE("configs round-trip through the INI echo byte-for-byte") {
    ExperimentConfig config = config_from_ini_text(
        "[models]\nroster = proposed-full, iqp-linear\nrx_angle = 0.125\n"
        "[selection]\nlambda_grid = 0.1, 1, 10\n"
        "[protocol]\nseed = 99\n");
    const std::string echoed = serialize_ini(config_to_ini(config));
    const ExperimentConfig back = config_from_ini_text(echoed);
    CHECK(back.roster_names == config.roster_names);
    CHECK(back.rx_angle == config.rx_angle);
    CHECK(back.lambda_grid == config.lambda_grid);
    CHECK(back.seed == config.seed);
    CHECK(back.shots == config.shots);
    CHECK(back.clean.lowercase == config.clean.lowercase);
    CHECK(back.svm.C == config.svm.C);
    CHECK(back.svm.tol == config.svm.tol);
    // The echo of the echo is byte-identical: every field is materialized.
    CHECK(serialize_ini(config_to_ini(back)) == echoed);
}

TEST_CASE("the echoed INI covers every known section") {
    const IniData ini = config_to_ini(ExperimentConfig{});
    for (const std::string section :
         {"dataset", "textpipe", "selection", "models", "svm", "kernel", "protocol",
          "output"}) {
        CAPTURE(section);
        CHECK(ini.count(section) == 1);
    }
    CHECK(ini.at("kernel").at("shots") == "8192");
    CHECK(ini.at("protocol").at("cv_k") == "10");
    CHECK(ini.at("protocol").at("seed") == "42");
}
