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
 * Experiment configuration: a flat INI-style file with sections mirroring
 * the pipeline stages, materialized into an ExperimentConfig where every
 * defaulted value is filled in explicitly (so the echoed config reproduces
 * the run exactly).
 */

#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qksvm/csv.hpp"
#include "qksvm/feature_map.hpp"
#include "qksvm/kernel.hpp"
#include "qksvm/svm.hpp"
#include "qksvm/textpipe.hpp"
#include "qksvm/trees.hpp"
#include "qksvm/util.hpp"

namespace qksvm {

/// section -> key -> raw value. Sections and keys keep file order out of the
/// picture by sorting (std::map), which also makes echoes deterministic.
using IniData = std::map<std::string, std::map<std::string, std::string>>;

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) {
        ++begin;
    }
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) {
        --end;
    }
    return s.substr(begin, end - begin);
}

}  // namespace detail

/// Parses `[section]` headers and `key = value` lines; `#` and `;` start
/// comments; blank lines are skipped.
inline IniData parse_ini(const std::string& text) {
    IniData data;
    std::string section;
    std::istringstream stream(text);
    std::string raw_line;
    std::size_t line_no = 0;
    while (std::getline(stream, raw_line)) {
        ++line_no;
        if (!raw_line.empty() && raw_line.back() == '\r') {
            raw_line.pop_back();
        }
        const std::size_t comment = raw_line.find_first_of("#;");
        std::string line = detail::trim(
            comment == std::string::npos ? raw_line : raw_line.substr(0, comment));
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3) {
                throw std::invalid_argument("config line " + std::to_string(line_no) +
                                            ": malformed section header");
            }
            section = detail::trim(line.substr(1, line.size() - 2));
            data[section];
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": expected key = value");
        }
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty()) {
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": empty key");
        }
        data[section][key] = value;
    }
    return data;
}

inline std::string serialize_ini(const IniData& data) {
    std::string out;
    for (const auto& [section, entries] : data) {
        out += "[" + section + "]\n";
        for (const auto& [key, value] : entries) {
            out += key + " = " + value + "\n";
        }
        out += "\n";
    }
    return out;
}

struct ModelSpec {
    enum class Kind { Quantum, ClassicalSvm, DecisionTree };
    Kind kind = Kind::Quantum;
    std::string name;
    FeatureMapSpec feature_map;      // Quantum
    ClassicalKernelKind classical;   // ClassicalSvm; Rbf gamma resolved at run time
};

struct ExperimentConfig {
    // [dataset]
    std::string dataset_source = "synthetic-blobs";
    std::string iris_positive = "setosa";
    std::string iris_negative = "versicolor";
    std::size_t n_positive = 90;
    std::size_t n_negative = 60;
    std::size_t dimension = 5;
    std::string scaling = "minmax-pi";  // or "none"

    // [textpipe]
    CleanOptions clean = CleanOptions::defaults();
    std::string stopword_file;  // empty = builtin list

    // [selection]
    std::string selection_method = "none";  // "rfe-lasso" | "none"
    std::size_t k = 0;                      // single k (0 = use full dimension)
    std::size_t k_min = 0;                  // sweep range; 0 = unset
    std::size_t k_max = 0;
    double lambda = 1.0;
    std::vector<double> lambda_grid;
    std::size_t rfe_step = 1;
    ForestConfig forest;

    // [models]
    std::vector<std::string> roster_names;
    std::size_t reps = 2;
    double rx_angle = kPi / 2.0;
    double angle_scale = 1.0;
    double rbf_gamma = 0.0;  // 0 = scale heuristic 1/(d*var)

    // [svm]
    SvmTrainConfig svm;

    // [kernel]
    std::string mode = "exact";  // "exact" | "sampled"
    std::size_t shots = 8192;

    // [protocol]
    std::string protocol = "cv";  // "cv" | "holdout"
    std::size_t cv_k = 10;
    double test_fraction = 0.25;
    std::uint64_t seed = 42;

    // [output]
    std::string out_dir = "out";
};

inline const std::vector<std::string>& default_roster() {
    static const std::vector<std::string> names = {
        "proposed-linear", "proposed-full",     "iqp-linear",    "iqp-full",
        "heisenberg-linear", "heisenberg-full", "classical-rbf", "decision-tree"};
    return names;
}

namespace detail {

inline bool parse_bool(const std::string& value, const std::string& key) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") {
        return true;
    }
    if (value == "false" || value == "0" || value == "no" || value == "off") {
        return false;
    }
    throw std::invalid_argument("config key '" + key + "': expected a boolean, got '" + value +
                                "'");
}

inline std::size_t parse_size(const std::string& value, const std::string& key) {
    try {
        // stoull would wrap a leading minus sign instead of rejecting it.
        if (value.empty() || value.find_first_not_of("0123456789") != std::string::npos) {
            throw std::invalid_argument("not a digit string");
        }
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(value, &pos);
        if (pos != value.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': expected a nonnegative integer, got '" +
                                    value + "'");
    }
}

inline double parse_real(const std::string& value, const std::string& key) {
    try {
        return csv::parse_double(value);
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': expected a number, got '" + value +
                                    "'");
    }
}

inline std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream stream(value);
    while (std::getline(stream, item, ',')) {
        item = trim(item);
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

}  // namespace detail

/// Resolves a roster name into a model spec using the configured circuit
/// parameters.
inline ModelSpec resolve_model(const std::string& name, const ExperimentConfig& config) {
    ModelSpec model;
    model.name = name;
    const auto quantum = [&](FeatureMapFamily family, EntanglementTopology topology) {
        model.kind = ModelSpec::Kind::Quantum;
        model.feature_map.family = family;
        model.feature_map.topology = topology;
        model.feature_map.reps = config.reps;
        model.feature_map.rx_angle = config.rx_angle;
        model.feature_map.angle_scale = config.angle_scale;
    };
    if (name == "proposed-linear") {
        quantum(FeatureMapFamily::Proposed, EntanglementTopology::Linear);
    } else if (name == "proposed-full") {
        quantum(FeatureMapFamily::Proposed, EntanglementTopology::Full);
    } else if (name == "iqp-linear") {
        quantum(FeatureMapFamily::Iqp, EntanglementTopology::Linear);
    } else if (name == "iqp-full") {
        quantum(FeatureMapFamily::Iqp, EntanglementTopology::Full);
    } else if (name == "heisenberg-linear") {
        quantum(FeatureMapFamily::Heisenberg, EntanglementTopology::Linear);
    } else if (name == "heisenberg-full") {
        quantum(FeatureMapFamily::Heisenberg, EntanglementTopology::Full);
    } else if (name == "classical-rbf") {
        model.kind = ModelSpec::Kind::ClassicalSvm;
        model.classical = ClassicalKernelKind::rbf(1.0);  // gamma resolved per dataset
    } else if (name == "classical-linear") {
        model.kind = ModelSpec::Kind::ClassicalSvm;
        model.classical = ClassicalKernelKind::linear();
    } else if (name == "decision-tree") {
        model.kind = ModelSpec::Kind::DecisionTree;
    } else {
        throw std::invalid_argument("unknown roster model '" + name + "'");
    }
    return model;
}

/// Materializes a parsed INI file over the defaults, rejecting unknown keys.
inline ExperimentConfig config_from_ini(const IniData& ini) {
    ExperimentConfig config;
    config.roster_names = default_roster();

    const auto get = [&ini](const std::string& section,
                            const std::string& key) -> const std::string* {
        const auto sec = ini.find(section);
        if (sec == ini.end()) {
            return nullptr;
        }
        const auto it = sec->second.find(key);
        return it == sec->second.end() ? nullptr : &it->second;
    };

    static const std::map<std::string, std::vector<std::string>> known = {
        {"dataset",
         {"source", "iris_positive", "iris_negative", "n_positive", "n_negative", "dimension",
          "scaling"}},
        {"textpipe",
         {"lowercase", "strip_markup", "strip_punctuation", "remove_stopwords",
          "stopword_file"}},
        {"selection",
         {"method", "k", "k_min", "k_max", "lambda", "lambda_grid", "rfe_step", "n_trees",
          "tree_max_depth", "tree_min_samples_split"}},
        {"models", {"roster", "reps", "rx_angle", "angle_scale", "rbf_gamma"}},
        {"svm", {"C", "tol", "max_passes"}},
        {"kernel", {"mode", "shots"}},
        {"protocol", {"method", "cv_k", "test_fraction", "seed"}},
        {"output", {"dir"}},
    };
    for (const auto& [section, entries] : ini) {
        const auto it = known.find(section);
        if (it == known.end()) {
            throw std::invalid_argument("unknown config section '" + section + "'");
        }
        for (const auto& [key, value] : entries) {
            (void)value;
            if (std::find(it->second.begin(), it->second.end(), key) == it->second.end()) {
                throw std::invalid_argument("unknown config key '" + section + "." + key + "'");
            }
        }
    }

    if (const auto* v = get("dataset", "source")) config.dataset_source = *v;
    if (const auto* v = get("dataset", "iris_positive")) config.iris_positive = *v;
    if (const auto* v = get("dataset", "iris_negative")) config.iris_negative = *v;
    if (const auto* v = get("dataset", "n_positive"))
        config.n_positive = detail::parse_size(*v, "dataset.n_positive");
    if (const auto* v = get("dataset", "n_negative"))
        config.n_negative = detail::parse_size(*v, "dataset.n_negative");
    if (const auto* v = get("dataset", "dimension"))
        config.dimension = detail::parse_size(*v, "dataset.dimension");
    if (const auto* v = get("dataset", "scaling")) {
        if (*v != "minmax-pi" && *v != "none") {
            throw std::invalid_argument("dataset.scaling must be 'minmax-pi' or 'none'");
        }
        config.scaling = *v;
    }

    if (const auto* v = get("textpipe", "lowercase"))
        config.clean.lowercase = detail::parse_bool(*v, "textpipe.lowercase");
    if (const auto* v = get("textpipe", "strip_markup"))
        config.clean.strip_markup = detail::parse_bool(*v, "textpipe.strip_markup");
    if (const auto* v = get("textpipe", "strip_punctuation"))
        config.clean.strip_punctuation = detail::parse_bool(*v, "textpipe.strip_punctuation");
    if (const auto* v = get("textpipe", "remove_stopwords"))
        config.clean.remove_stopwords = detail::parse_bool(*v, "textpipe.remove_stopwords");
    if (const auto* v = get("textpipe", "stopword_file")) config.stopword_file = *v;

    if (const auto* v = get("selection", "method")) {
        if (*v != "rfe-lasso" && *v != "none") {
            throw std::invalid_argument("selection.method must be 'rfe-lasso' or 'none'");
        }
        config.selection_method = *v;
    }
    if (const auto* v = get("selection", "k")) config.k = detail::parse_size(*v, "selection.k");
    if (const auto* v = get("selection", "k_min"))
        config.k_min = detail::parse_size(*v, "selection.k_min");
    if (const auto* v = get("selection", "k_max"))
        config.k_max = detail::parse_size(*v, "selection.k_max");
    if (const auto* v = get("selection", "lambda"))
        config.lambda = detail::parse_real(*v, "selection.lambda");
    if (const auto* v = get("selection", "lambda_grid")) {
        for (const auto& item : detail::split_list(*v)) {
            config.lambda_grid.push_back(detail::parse_real(item, "selection.lambda_grid"));
        }
    }
    if (const auto* v = get("selection", "rfe_step"))
        config.rfe_step = detail::parse_size(*v, "selection.rfe_step");
    if (const auto* v = get("selection", "n_trees"))
        config.forest.n_trees = detail::parse_size(*v, "selection.n_trees");
    if (const auto* v = get("selection", "tree_max_depth"))
        config.forest.tree.max_depth = detail::parse_size(*v, "selection.tree_max_depth");
    if (const auto* v = get("selection", "tree_min_samples_split"))
        config.forest.tree.min_samples_split =
            detail::parse_size(*v, "selection.tree_min_samples_split");

    if (const auto* v = get("models", "roster")) {
        config.roster_names = detail::split_list(*v);
        if (config.roster_names.empty()) {
            throw std::invalid_argument("models.roster must list at least one model");
        }
    }
    if (const auto* v = get("models", "reps")) config.reps = detail::parse_size(*v, "models.reps");
    if (const auto* v = get("models", "rx_angle"))
        config.rx_angle = detail::parse_real(*v, "models.rx_angle");
    if (const auto* v = get("models", "angle_scale"))
        config.angle_scale = detail::parse_real(*v, "models.angle_scale");
    if (const auto* v = get("models", "rbf_gamma"))
        config.rbf_gamma = detail::parse_real(*v, "models.rbf_gamma");

    if (const auto* v = get("svm", "C")) config.svm.C = detail::parse_real(*v, "svm.C");
    if (const auto* v = get("svm", "tol")) config.svm.tol = detail::parse_real(*v, "svm.tol");
    if (const auto* v = get("svm", "max_passes"))
        config.svm.max_passes = detail::parse_size(*v, "svm.max_passes");

    if (const auto* v = get("kernel", "mode")) {
        if (*v != "exact" && *v != "sampled") {
            throw std::invalid_argument("kernel.mode must be 'exact' or 'sampled'");
        }
        config.mode = *v;
    }
    if (const auto* v = get("kernel", "shots"))
        config.shots = detail::parse_size(*v, "kernel.shots");

    if (const auto* v = get("protocol", "method")) {
        if (*v != "cv" && *v != "holdout") {
            throw std::invalid_argument("protocol.method must be 'cv' or 'holdout'");
        }
        config.protocol = *v;
    }
    if (const auto* v = get("protocol", "cv_k"))
        config.cv_k = detail::parse_size(*v, "protocol.cv_k");
    if (const auto* v = get("protocol", "test_fraction"))
        config.test_fraction = detail::parse_real(*v, "protocol.test_fraction");
    if (const auto* v = get("protocol", "seed"))
        config.seed = detail::parse_size(*v, "protocol.seed");

    if (const auto* v = get("output", "dir")) config.out_dir = *v;

    // Structural validation beyond per-key parsing.
    for (const auto& name : config.roster_names) {
        (void)resolve_model(name, config);
    }
    if (config.reps < 1) {
        throw std::invalid_argument("models.reps must be >= 1");
    }
    if (config.k_min > 0 || config.k_max > 0) {
        if (config.k_min < 1 || config.k_max < config.k_min || config.k_max > kMaxQubits) {
            throw std::invalid_argument("selection k-range must satisfy 1 <= k_min <= k_max <= 24");
        }
    }
    if (config.shots < 1) {
        throw std::invalid_argument("kernel.shots must be >= 1");
    }
    return config;
}

inline ExperimentConfig config_from_ini_text(const std::string& text) {
    return config_from_ini(parse_ini(text));
}

/// Echoes a config with every field materialized, for the run report and
/// for byte-identical reruns.
inline IniData config_to_ini(const ExperimentConfig& config) {
    IniData ini;
    auto& dataset = ini["dataset"];
    dataset["source"] = config.dataset_source;
    dataset["iris_positive"] = config.iris_positive;
    dataset["iris_negative"] = config.iris_negative;
    dataset["n_positive"] = std::to_string(config.n_positive);
    dataset["n_negative"] = std::to_string(config.n_negative);
    dataset["dimension"] = std::to_string(config.dimension);
    dataset["scaling"] = config.scaling;

    auto& textpipe = ini["textpipe"];
    textpipe["lowercase"] = config.clean.lowercase ? "true" : "false";
    textpipe["strip_markup"] = config.clean.strip_markup ? "true" : "false";
    textpipe["strip_punctuation"] = config.clean.strip_punctuation ? "true" : "false";
    textpipe["remove_stopwords"] = config.clean.remove_stopwords ? "true" : "false";
    textpipe["stopword_file"] = config.stopword_file;

    auto& selection = ini["selection"];
    selection["method"] = config.selection_method;
    selection["k"] = std::to_string(config.k);
    selection["k_min"] = std::to_string(config.k_min);
    selection["k_max"] = std::to_string(config.k_max);
    selection["lambda"] = csv::format_double(config.lambda);
    std::string grid;
    for (const double v : config.lambda_grid) {
        if (!grid.empty()) {
            grid += ",";
        }
        grid += csv::format_double(v);
    }
    selection["lambda_grid"] = grid;
    selection["rfe_step"] = std::to_string(config.rfe_step);
    selection["n_trees"] = std::to_string(config.forest.n_trees);
    selection["tree_max_depth"] = std::to_string(config.forest.tree.max_depth);
    selection["tree_min_samples_split"] = std::to_string(config.forest.tree.min_samples_split);

    auto& models = ini["models"];
    std::string roster;
    for (const auto& name : config.roster_names) {
        if (!roster.empty()) {
            roster += ",";
        }
        roster += name;
    }
    models["roster"] = roster;
    models["reps"] = std::to_string(config.reps);
    models["rx_angle"] = csv::format_double(config.rx_angle);
    models["angle_scale"] = csv::format_double(config.angle_scale);
    models["rbf_gamma"] = csv::format_double(config.rbf_gamma);

    auto& svm = ini["svm"];
    svm["C"] = csv::format_double(config.svm.C);
    svm["tol"] = csv::format_double(config.svm.tol);
    svm["max_passes"] = std::to_string(config.svm.max_passes);

    auto& kernel = ini["kernel"];
    kernel["mode"] = config.mode;
    kernel["shots"] = std::to_string(config.shots);

    auto& protocol = ini["protocol"];
    protocol["method"] = config.protocol;
    protocol["cv_k"] = std::to_string(config.cv_k);
    protocol["test_fraction"] = csv::format_double(config.test_fraction);
    protocol["seed"] = std::to_string(config.seed);

    ini["output"]["dir"] = config.out_dir;
    return ini;
}

}  // namespace qksvm
