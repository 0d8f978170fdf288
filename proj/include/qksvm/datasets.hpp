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
 * Dataset access: numeric CSV loading, the built-in Iris class pairs,
 * min-max angle scaling, and seeded synthetic generators (numeric blobs and
 * a sentiment-style text corpus) for self-contained protocol runs.
 */

#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "qksvm/csv.hpp"
#include "qksvm/feature_map.hpp"
#include "qksvm/iris_data.hpp"
#include "qksvm/matrix.hpp"
#include "qksvm/util.hpp"

namespace qksvm {

struct Dataset {
    RealMatrix x;
    std::vector<int> y;  // mapped to {-1, +1}
    std::vector<std::string> feature_names;

    std::size_t size() const { return x.rows(); }
    std::size_t dimension() const { return x.cols(); }
};

/// Copies matrix rows into per-row feature vectors.
inline std::vector<FeatureVector> rows_of(const RealMatrix& m) {
    std::vector<FeatureVector> rows;
    rows.reserve(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        rows.push_back(m.row(i));
    }
    return rows;
}

namespace detail {

inline int map_label(const std::string& field) {
    if (field == "1" || field == "+1") {
        return 1;
    }
    if (field == "0" || field == "-1") {
        return -1;
    }
    throw std::invalid_argument("load_dataset: label '" + field +
                                "' is not one of 0, 1, -1, +1");
}

}  // namespace detail

/// Parses a numeric dataset from CSV text: every column except `label` is a
/// feature, and label values {0,-1} map to -1 while {1,+1} map to +1.
inline Dataset load_dataset_csv(const std::string& text) {
    const auto records = csv::parse(text);
    if (records.size() < 2) {
        throw std::invalid_argument("load_dataset: need a header row and at least one data row");
    }
    const auto& header = records.front();
    std::size_t label_col = header.size();
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == "label") {
            label_col = c;
            break;
        }
    }
    if (label_col == header.size()) {
        throw std::invalid_argument("load_dataset: missing 'label' column");
    }
    if (header.size() < 2) {
        throw std::invalid_argument("load_dataset: no feature columns");
    }

    Dataset data;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c != label_col) {
            data.feature_names.push_back(header[c]);
        }
    }
    data.x = RealMatrix(records.size() - 1, header.size() - 1);
    data.y.reserve(records.size() - 1);
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != header.size()) {
            throw std::invalid_argument("load_dataset: row " + std::to_string(r) +
                                        " has wrong field count");
        }
        std::size_t out_col = 0;
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (c == label_col) {
                data.y.push_back(detail::map_label(records[r][c]));
            } else {
                data.x(r - 1, out_col++) = csv::parse_double(records[r][c]);
            }
        }
    }
    return data;
}

inline const std::vector<std::string>& iris_species_names() {
    static const std::vector<std::string> names = {"setosa", "versicolor", "virginica"};
    return names;
}

/// The two-class Iris restriction: rows of the named pair only, first class
/// mapped to +1 and second to -1. Any pair yields 100 rows x 4 features.
inline Dataset load_iris_pair(const std::string& class_pos, const std::string& class_neg) {
    const auto species_id = [](const std::string& name) -> double {
        const auto& names = iris_species_names();
        const auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) {
            throw std::invalid_argument("load_iris_pair: unknown species '" + name + "'");
        }
        return static_cast<double>(it - names.begin());
    };
    const double id_pos = species_id(class_pos);
    const double id_neg = species_id(class_neg);
    if (id_pos == id_neg) {
        throw std::invalid_argument("load_iris_pair: classes must differ");
    }

    Dataset data;
    data.feature_names = {"sepal_length", "sepal_width", "petal_length", "petal_width"};
    std::vector<std::array<double, 4>> rows;
    for (const auto& row : datasets::kIrisData) {
        if (row[4] == id_pos || row[4] == id_neg) {
            rows.push_back({row[0], row[1], row[2], row[3]});
            data.y.push_back(row[4] == id_pos ? 1 : -1);
        }
    }
    data.x = RealMatrix(rows.size(), 4);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            data.x(i, j) = rows[i][j];
        }
    }
    return data;
}

/**
 * Per-column min-max map onto [0, pi]. Fitting records each column's range;
 * transforming maps min -> 0 and max -> pi, with constant columns sent to 0.
 */
struct MinMaxPiScaler {
    std::vector<double> col_min;
    std::vector<double> col_max;

    void fit(const RealMatrix& m) {
        col_min.assign(m.cols(), std::numeric_limits<double>::infinity());
        col_max.assign(m.cols(), -std::numeric_limits<double>::infinity());
        for (std::size_t i = 0; i < m.rows(); ++i) {
            for (std::size_t j = 0; j < m.cols(); ++j) {
                col_min[j] = std::min(col_min[j], m(i, j));
                col_max[j] = std::max(col_max[j], m(i, j));
            }
        }
    }

    RealMatrix transform(const RealMatrix& m) const {
        if (col_min.size() != m.cols()) {
            throw std::invalid_argument("MinMaxPiScaler: column count mismatch");
        }
        RealMatrix out(m.rows(), m.cols());
        for (std::size_t j = 0; j < m.cols(); ++j) {
            const double range = col_max[j] - col_min[j];
            for (std::size_t i = 0; i < m.rows(); ++i) {
                out(i, j) = range > 0.0 ? (m(i, j) - col_min[j]) / range * kPi : 0.0;
            }
        }
        return out;
    }
};

/**
 * Two Gaussian blobs in [0, pi]^d with a 3:2 class skew by default. The
 * positive class centers at 0.3*pi and the negative at 0.7*pi on every
 * coordinate, with sigma = 0.1*pi noise, clamped into [0, pi].
 */
inline Dataset make_synthetic_blobs(std::size_t n_pos, std::size_t n_neg, std::size_t d,
                                    std::uint64_t seed) {
    if (n_pos == 0 || n_neg == 0 || d == 0) {
        throw std::invalid_argument("make_synthetic_blobs: counts and dimension must be positive");
    }
    Rng rng(seed);
    Dataset data;
    data.x = RealMatrix(n_pos + n_neg, d);
    data.y.reserve(n_pos + n_neg);
    for (std::size_t j = 0; j < d; ++j) {
        data.feature_names.push_back("f" + std::to_string(j));
    }
    const double sigma = 0.1 * kPi;
    for (std::size_t i = 0; i < n_pos + n_neg; ++i) {
        const bool positive = i < n_pos;
        const double center = positive ? 0.3 * kPi : 0.7 * kPi;
        for (std::size_t j = 0; j < d; ++j) {
            data.x(i, j) = std::clamp(center + sigma * rng.next_gaussian(), 0.0, kPi);
        }
        data.y.push_back(positive ? 1 : -1);
    }
    return data;
}

struct TextDataset {
    std::vector<std::string> docs;
    std::vector<int> labels;  // 1 = positive sentiment, 0 = negative
};

/**
 * Seeded sentiment-style corpus with a 3:2 positive:negative skew by
 * default. Documents mix class-flavored words with shared vocabulary,
 * stopwords, punctuation and occasional markup so every cleaning step has
 * something to do.
 */
inline TextDataset make_synthetic_corpus(std::size_t n_pos, std::size_t n_neg,
                                         std::uint64_t seed) {
    if (n_pos == 0 || n_neg == 0) {
        throw std::invalid_argument("make_synthetic_corpus: counts must be positive");
    }
    static const std::vector<std::string> positive_words = {
        "good",      "great",    "excellent", "wonderful", "amazing",
        "superb",    "charming", "brilliant", "enjoyable", "fantastic"};
    static const std::vector<std::string> negative_words = {
        "bad",      "awful",    "terrible", "boring",        "poor",
        "dreadful", "horrible", "clumsy",   "disappointing", "tedious"};
    static const std::vector<std::string> shared_words = {
        "movie",  "film",   "plot",     "actor", "scene", "story",
        "script", "ending", "director", "cast",  "music", "pacing"};
    static const std::vector<std::string> fillers = {"the", "a", "is", "was", "and"};

    Rng rng(seed);
    TextDataset corpus;
    const std::size_t n = n_pos + n_neg;
    for (std::size_t i = 0; i < n; ++i) {
        const bool positive = i < n_pos;
        const auto& pool = positive ? positive_words : negative_words;
        std::string doc;
        if (rng.next_double() < 0.3) {
            doc += "<br>";
        }
        const std::size_t length = 6 + static_cast<std::size_t>(rng.bounded(7));
        for (std::size_t w = 0; w < length; ++w) {
            if (!doc.empty() && doc.back() != '>') {
                doc += ' ';
            }
            const double u = rng.next_double();
            std::string word;
            if (u < 0.5) {
                word = pool[static_cast<std::size_t>(rng.bounded(pool.size()))];
            } else if (u < 0.8) {
                word = shared_words[static_cast<std::size_t>(rng.bounded(shared_words.size()))];
            } else {
                word = fillers[static_cast<std::size_t>(rng.bounded(fillers.size()))];
            }
            if (rng.next_double() < 0.15) {
                word[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
            }
            doc += word;
            if (rng.next_double() < 0.2) {
                doc += rng.next_double() < 0.5 ? "," : "!";
            }
        }
        doc += '.';
        corpus.docs.push_back(doc);
        corpus.labels.push_back(positive ? 1 : 0);
    }
    return corpus;
}

/// Serializes a text corpus as `text,label` CSV.
inline std::string corpus_to_csv(const TextDataset& corpus) {
    std::string out = "text,label\n";
    for (std::size_t i = 0; i < corpus.docs.size(); ++i) {
        out += csv::join_row({corpus.docs[i], std::to_string(corpus.labels[i])});
        out += '\n';
    }
    return out;
}

/// Parses a `text,label` CSV into a corpus (labels 0/1).
inline TextDataset corpus_from_csv(const std::string& text) {
    const auto records = csv::parse(text);
    if (records.size() < 2) {
        throw std::invalid_argument("corpus_from_csv: need a header row and data rows");
    }
    const auto& header = records.front();
    std::size_t text_col = header.size();
    std::size_t label_col = header.size();
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == "text") {
            text_col = c;
        } else if (header[c] == "label") {
            label_col = c;
        }
    }
    if (text_col == header.size() || label_col == header.size()) {
        throw std::invalid_argument("corpus_from_csv: need 'text' and 'label' columns");
    }
    TextDataset corpus;
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != header.size()) {
            throw std::invalid_argument("corpus_from_csv: row " + std::to_string(r) +
                                        " has wrong field count");
        }
        corpus.docs.push_back(records[r][text_col]);
        const std::string& label = records[r][label_col];
        if (label != "0" && label != "1") {
            throw std::invalid_argument("corpus_from_csv: label must be 0 or 1");
        }
        corpus.labels.push_back(label == "1" ? 1 : 0);
    }
    return corpus;
}

}  // namespace qksvm
