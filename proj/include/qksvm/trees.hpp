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
 * CART decision tree and random-forest Gini importance.
 *
 * Splits minimize the weighted child Gini impurity over midpoint thresholds
 * of every candidate feature; ties go to the lowest feature index and then
 * the lowest threshold. Points with x[feature] <= threshold route left. The
 * forest trains each tree from a seed derived from (base seed, tree index),
 * bootstrapping rows and subsampling candidate features per split, and
 * reports mean weighted impurity decrease per feature, normalized to sum 1.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "qksvm/matrix.hpp"
#include "qksvm/util.hpp"

namespace qksvm {

struct TreeConfig {
    std::size_t max_depth = 5;
    std::size_t min_samples_split = 2;
    std::uint64_t seed = 0;
};

struct ForestConfig {
    std::size_t n_trees = 50;
    TreeConfig tree;
    bool bootstrap = true;
    std::size_t features_per_split = 0;  // 0 = ceil(sqrt(d))
};

struct TreeNode {
    bool is_leaf = true;
    int label = 1;              // leaf only
    std::size_t feature = 0;    // internal only
    double threshold = 0.0;     // internal only
    std::size_t left = 0;
    std::size_t right = 0;
};

struct DecisionTree {
    std::vector<TreeNode> nodes;  // root at index 0
    std::size_t num_features = 0;
};

/// Gini impurity 1 - p(+1)^2 - p(-1)^2 of a label multiset.
inline double gini_impurity(std::size_t n_pos, std::size_t n_neg) {
    const std::size_t n = n_pos + n_neg;
    if (n == 0) {
        return 0.0;
    }
    const double p = static_cast<double>(n_pos) / static_cast<double>(n);
    const double q = static_cast<double>(n_neg) / static_cast<double>(n);
    return 1.0 - p * p - q * q;
}

namespace detail {

struct SplitChoice {
    bool found = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    double impurity_decrease = 0.0;  // parent Gini minus weighted child Gini
};

/// Best (feature, threshold) over the candidate features for the rows in
/// `idx`. Scanning features ascending and thresholds ascending with a strict
/// improvement test realizes the documented tie-break.
inline SplitChoice best_split(const RealMatrix& x, const std::vector<int>& y,
                              const std::vector<std::size_t>& idx,
                              const std::vector<std::size_t>& features) {
    const std::size_t n = idx.size();
    std::size_t pos_total = 0;
    for (const std::size_t i : idx) {
        pos_total += y[i] == 1 ? 1 : 0;
    }
    const double parent = gini_impurity(pos_total, n - pos_total);

    SplitChoice best;
    std::vector<std::pair<double, int>> column(n);
    for (const std::size_t feature : features) {
        for (std::size_t k = 0; k < n; ++k) {
            column[k] = {x(idx[k], feature), y[idx[k]]};
        }
        std::sort(column.begin(), column.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });

        std::size_t pos_left = 0;
        for (std::size_t k = 0; k + 1 < n; ++k) {
            pos_left += column[k].second == 1 ? 1 : 0;
            if (column[k].first == column[k + 1].first) {
                continue;  // identical values cannot be separated
            }
            const std::size_t n_left = k + 1;
            const std::size_t n_right = n - n_left;
            const std::size_t pos_right = pos_total - pos_left;
            const double child =
                (static_cast<double>(n_left) * gini_impurity(pos_left, n_left - pos_left) +
                 static_cast<double>(n_right) * gini_impurity(pos_right, n_right - pos_right)) /
                static_cast<double>(n);
            const double decrease = parent - child;
            if (decrease > best.impurity_decrease) {
                best.found = true;
                best.feature = feature;
                best.threshold = 0.5 * (column[k].first + column[k + 1].first);
                best.impurity_decrease = decrease;
            }
        }
    }
    return best;
}

inline int majority_label(const std::vector<int>& y, const std::vector<std::size_t>& idx) {
    std::ptrdiff_t balance = 0;
    for (const std::size_t i : idx) {
        balance += y[i] == 1 ? 1 : -1;
    }
    return balance >= 0 ? 1 : -1;  // exact tie -> +1
}

/// Draws `count` distinct feature indices, returned in ascending order.
inline std::vector<std::size_t> sample_features(std::size_t d, std::size_t count, Rng& rng) {
    std::vector<std::size_t> pool(d);
    for (std::size_t j = 0; j < d; ++j) {
        pool[j] = j;
    }
    if (count >= d) {
        return pool;
    }
    for (std::size_t k = 0; k < count; ++k) {
        const std::size_t pick = k + static_cast<std::size_t>(rng.bounded(d - k));
        std::swap(pool[k], pool[pick]);
    }
    pool.resize(count);
    std::sort(pool.begin(), pool.end());
    return pool;
}

struct TreeBuilder {
    const RealMatrix& x;
    const std::vector<int>& y;
    const TreeConfig& config;
    std::size_t features_per_split;      // 0 = use all features
    Rng* rng;                            // nullptr when not subsampling
    std::vector<double>* importance;     // optional accumulator
    std::size_t n_total;
    DecisionTree tree;

    std::size_t build(std::vector<std::size_t> idx, std::size_t depth) {
        const std::size_t node_id = tree.nodes.size();
        tree.nodes.emplace_back();
        tree.nodes[node_id].label = majority_label(y, idx);

        if (depth >= config.max_depth || idx.size() < config.min_samples_split) {
            return node_id;
        }
        std::vector<std::size_t> candidates;
        if (features_per_split == 0 || features_per_split >= x.cols()) {
            candidates.resize(x.cols());
            for (std::size_t j = 0; j < x.cols(); ++j) {
                candidates[j] = j;
            }
        } else {
            candidates = sample_features(x.cols(), features_per_split, *rng);
        }
        const SplitChoice split = best_split(x, y, idx, candidates);
        if (!split.found || split.impurity_decrease <= 0.0) {
            return node_id;
        }

        if (importance != nullptr) {
            (*importance)[split.feature] += split.impurity_decrease *
                                            static_cast<double>(idx.size()) /
                                            static_cast<double>(n_total);
        }

        std::vector<std::size_t> left_idx;
        std::vector<std::size_t> right_idx;
        for (const std::size_t i : idx) {
            (x(i, split.feature) <= split.threshold ? left_idx : right_idx).push_back(i);
        }
        idx.clear();
        idx.shrink_to_fit();

        const std::size_t left_id = build(std::move(left_idx), depth + 1);
        const std::size_t right_id = build(std::move(right_idx), depth + 1);
        TreeNode& node = tree.nodes[node_id];
        node.is_leaf = false;
        node.feature = split.feature;
        node.threshold = split.threshold;
        node.left = left_id;
        node.right = right_id;
        return node_id;
    }
};

}  // namespace detail

/// Trains a CART tree on the full dataset with no feature subsampling.
inline DecisionTree cart_train(const RealMatrix& x, const std::vector<int>& y,
                               const TreeConfig& config) {
    if (x.rows() == 0 || x.cols() == 0) {
        throw std::invalid_argument("cart_train: empty dataset");
    }
    if (x.rows() != y.size()) {
        throw std::invalid_argument("cart_train: row/label count mismatch");
    }
    if (config.max_depth < 1) {
        throw std::invalid_argument("cart_train: max_depth must be >= 1");
    }
    detail::TreeBuilder builder{x, y, config, 0, nullptr, nullptr, x.rows(), {}};
    std::vector<std::size_t> all(x.rows());
    for (std::size_t i = 0; i < all.size(); ++i) {
        all[i] = i;
    }
    builder.build(std::move(all), 0);
    builder.tree.num_features = x.cols();
    return builder.tree;
}

template <typename Row>
inline int cart_predict_row(const DecisionTree& tree, const Row& row) {
    std::size_t node = 0;
    while (!tree.nodes[node].is_leaf) {
        node = row[tree.nodes[node].feature] <= tree.nodes[node].threshold
                   ? tree.nodes[node].left
                   : tree.nodes[node].right;
    }
    return tree.nodes[node].label;
}

inline std::vector<int> cart_predict(const DecisionTree& tree, const RealMatrix& x) {
    if (x.cols() != tree.num_features) {
        throw std::invalid_argument("cart_predict: feature count mismatch");
    }
    std::vector<int> out(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        std::size_t node = 0;
        while (!tree.nodes[node].is_leaf) {
            node = x(i, tree.nodes[node].feature) <= tree.nodes[node].threshold
                       ? tree.nodes[node].left
                       : tree.nodes[node].right;
        }
        out[i] = tree.nodes[node].label;
    }
    return out;
}

/// Mean weighted Gini-decrease per feature across the forest, normalized to
/// sum 1 (all zeros when no tree ever split).
inline std::vector<double> forest_importance(const RealMatrix& x, const std::vector<int>& y,
                                             const ForestConfig& config) {
    if (x.rows() < 2) {
        throw std::invalid_argument("forest_importance: need at least two samples");
    }
    if (x.rows() != y.size()) {
        throw std::invalid_argument("forest_importance: row/label count mismatch");
    }
    bool has_pos = false;
    bool has_neg = false;
    for (const int label : y) {
        (label == 1 ? has_pos : has_neg) = true;
    }
    if (!has_pos || !has_neg) {
        throw std::invalid_argument("forest_importance: degenerate labels (single class)");
    }
    if (config.n_trees < 1) {
        throw std::invalid_argument("forest_importance: n_trees must be >= 1");
    }

    const std::size_t d = x.cols();
    const std::size_t per_split =
        config.features_per_split > 0
            ? config.features_per_split
            : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d))));

    std::vector<double> total(d, 0.0);
    for (std::size_t t = 0; t < config.n_trees; ++t) {
        Rng rng(derive_seed(config.tree.seed, 0x74726565ULL, t));
        std::vector<std::size_t> rows(x.rows());
        if (config.bootstrap) {
            for (auto& r : rows) {
                r = static_cast<std::size_t>(rng.bounded(x.rows()));
            }
        } else {
            for (std::size_t i = 0; i < rows.size(); ++i) {
                rows[i] = i;
            }
        }
        std::vector<double> tree_importance(d, 0.0);
        detail::TreeBuilder builder{x,    y,          config.tree, per_split,
                                    &rng, &tree_importance, rows.size(),  {}};
        builder.n_total = rows.size();
        builder.build(std::move(rows), 0);
        for (std::size_t j = 0; j < d; ++j) {
            total[j] += tree_importance[j];
        }
    }

    double sum = 0.0;
    for (const double v : total) {
        sum += v;
    }
    if (sum > 0.0) {
        for (double& v : total) {
            v /= sum;
        }
    }
    return total;
}

}  // namespace qksvm
