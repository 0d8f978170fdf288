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

// qksvm command-line front end.
//
//   qksvm <verb> --config FILE [--seed N] [--out DIR] [--mode exact|sampled]
//                [--shots N]
//
// Verbs: preprocess, select, kernel, train, evaluate, sweep. Every verb
// reads one INI config, applies the flag overrides, runs the corresponding
// pipeline and writes its outputs (always including report.json) under the
// output directory. Failures print "[stage] message" to stderr and exit
// nonzero.

#include <cstdio>
#include <exception>
#include <iostream>
#include <iterator>
#include <string>

#include <CLI11.hpp>

#include "qksvm/config.hpp"
#include "qksvm/experiment.hpp"
#include "qksvm/version.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    std::string mode;
    std::uint64_t seed = 0;
    std::size_t shots = 0;
    bool seed_set = false;
    bool out_set = false;
    bool mode_set = false;
    bool shots_set = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags* flags) {
    cmd->add_option("--config", flags->config_path, "INI experiment configuration")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", flags->seed, "Master seed override")
        ->each([flags](const std::string&) { flags->seed_set = true; });
    cmd->add_option("--out", flags->out_dir, "Output directory override")
        ->each([flags](const std::string&) { flags->out_set = true; });
    cmd->add_option("--mode", flags->mode, "Kernel estimation mode override")
        ->check(CLI::IsMember({"exact", "sampled"}))
        ->each([flags](const std::string&) { flags->mode_set = true; });
    cmd->add_option("--shots", flags->shots, "Shots per kernel entry (sampled mode)")
        ->check(CLI::PositiveNumber)
        ->each([flags](const std::string&) { flags->shots_set = true; });
}

qksvm::ExperimentConfig load_config(const CommonFlags& flags) {
    const std::string content = qksvm::detail::read_text_file(flags.config_path);
    qksvm::ExperimentConfig config = qksvm::config_from_ini_text(content);
    if (flags.seed_set) {
        config.seed = flags.seed;
    }
    if (flags.out_set) {
        config.out_dir = flags.out_dir;
    }
    if (flags.mode_set) {
        config.mode = flags.mode;
    }
    if (flags.shots_set) {
        config.shots = flags.shots;
    }
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qksvm: quantum-kernel SVM classification toolkit"};
    app.set_version_flag("--version", std::string("qksvm ") + qksvm::kVersion);
    app.require_subcommand(1);

    struct Verb {
        const char* name;
        const char* help;
        qksvm::OrderedJson (*run)(const qksvm::ExperimentConfig&);
    };
    const Verb verbs[] = {
        {"preprocess", "Clean and vectorize a text corpus into a document-term matrix",
         &qksvm::run_preprocess},
        {"select", "Rank features (RFE + LASSO) and export selection.csv",
         &qksvm::run_select},
        {"kernel", "Compute full-dataset Gram matrices for the model roster",
         &qksvm::run_kernel},
        {"train", "Train SVMs on the full dataset and serialize the models",
         &qksvm::run_train},
        {"evaluate", "Run the evaluation protocol (cross-validation or holdout)",
         &qksvm::run_evaluate},
        {"sweep", "Evaluate the roster across a feature-count range", &qksvm::run_sweep},
    };

    CommonFlags flags[std::size(verbs)];
    for (std::size_t v = 0; v < std::size(verbs); ++v) {
        CLI::App* cmd = app.add_subcommand(verbs[v].name, verbs[v].help);
        add_common_flags(cmd, &flags[v]);
    }

    CLI11_PARSE(app, argc, argv);

    for (std::size_t v = 0; v < std::size(verbs); ++v) {
        if (!app.got_subcommand(verbs[v].name)) {
            continue;
        }
        try {
            const qksvm::OrderedJson report = verbs[v].run(load_config(flags[v]));
            std::cout << "wrote " << report["config_echo"]["output"]["dir"].get<std::string>()
                      << "/report.json" << std::endl;
            return 0;
        } catch (const qksvm::StageError& e) {
            std::cerr << e.what() << std::endl;
            return 1;
        } catch (const std::exception& e) {
            std::cerr << "[cli] " << e.what() << std::endl;
            return 1;
        }
    }
    std::cerr << "[cli] no verb given" << std::endl;
    return 1;
}
