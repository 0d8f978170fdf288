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
 * Flat JSON serialization of trained SVM models, so a model trained in one
 * process can score data in another.
 */

#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "qksvm/svm.hpp"

namespace qksvm {

inline nlohmann::json model_to_json(const SvmModel& model, const SvmTrainConfig& config) {
    nlohmann::json j;
    j["alphas"] = model.alphas;
    j["bias"] = model.bias;
    j["labels"] = model.labels;
    j["support_indices"] = model.support_indices;
    j["config"] = {{"C", config.C}, {"tol", config.tol}, {"max_passes", config.max_passes}};
    return j;
}

inline SvmModel model_from_json(const nlohmann::json& j) {
    SvmModel model;
    model.alphas = j.at("alphas").get<std::vector<double>>();
    model.bias = j.at("bias").get<double>();
    model.labels = j.at("labels").get<std::vector<int>>();
    model.support_indices = j.at("support_indices").get<std::vector<std::size_t>>();
    if (model.labels.size() != model.alphas.size()) {
        throw std::invalid_argument("model_from_json: alphas/labels size mismatch");
    }
    return model;
}

inline SvmTrainConfig train_config_from_json(const nlohmann::json& j) {
    SvmTrainConfig config;
    const auto& c = j.at("config");
    config.C = c.at("C").get<double>();
    config.tol = c.at("tol").get<double>();
    config.max_passes = c.at("max_passes").get<std::size_t>();
    return config;
}

}  // namespace qksvm
