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
 * Classification evaluation: confusion matrix, the metric suite, ROC/AUC,
 * stratified k-fold splitting and cross-validation.
 *
 * Positive class = label +1. Metrics with zero denominators are flagged
 * undefined rather than coerced to 0, and aggregates average only defined
 * folds (reporting how many were defined). The ROC curve sweeps thresholds
 * at the distinct scores in descending order; trapezoidal AUC then equals
 * the Mann-Whitney pair statistic with ties counted one half.
 */

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "qksvm/util.hpp"

namespace qksvm {

struct ConfusionMatrix {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;

    std::size_t total() const { return tp + fp + fn + tn; }
};

struct Metric {
    double value = 0.0;
    bool defined = false;

    static Metric of(double v) { return {v, true}; }
    static Metric undefined() { return {0.0, false}; }
};

struct MetricsReport {
    Metric accuracy;
    Metric precision_pos;
    Metric precision_neg;
    Metric recall_pos;
    Metric recall_neg;
    Metric f1_pos;
    Metric tpr;
    Metric fpr;
    Metric auc;
};

/// Field table so writers and aggregators can iterate the metric suite.
inline const std::array<std::pair<const char*, Metric MetricsReport::*>, 9>& metric_fields() {
    static const std::array<std::pair<const char*, Metric MetricsReport::*>, 9> fields = {{
        {"accuracy", &MetricsReport::accuracy},
        {"precision_pos", &MetricsReport::precision_pos},
        {"precision_neg", &MetricsReport::precision_neg},
        {"recall_pos", &MetricsReport::recall_pos},
        {"recall_neg", &MetricsReport::recall_neg},
        {"f1_pos", &MetricsReport::f1_pos},
        {"tpr", &MetricsReport::tpr},
        {"fpr", &MetricsReport::fpr},
        {"auc", &MetricsReport::auc},
    }};
    return fields;
}

namespace detail {

inline Metric ratio(std::size_t num, std::size_t den) {
    if (den == 0) {
        return Metric::undefined();
    }
    return Metric::of(static_cast<double>(num) / static_cast<double>(den));
}

}  // namespace detail

/// Tallies the confusion matrix and evaluates the metric formulas exactly.
/// The AUC field is left undefined; fill it from roc_auc when decision
/// scores are available.
inline std::pair<ConfusionMatrix, MetricsReport> confusion_and_metrics(
    const std::vector<int>& y_true, const std::vector<int>& y_pred) {
    if (y_true.size() != y_pred.size()) {
        throw std::invalid_argument("confusion_and_metrics: length mismatch");
    }
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if ((y_true[i] != 1 && y_true[i] != -1) || (y_pred[i] != 1 && y_pred[i] != -1)) {
            throw std::invalid_argument("confusion_and_metrics: labels must be -1 or +1");
        }
        if (y_true[i] == 1) {
            (y_pred[i] == 1 ? cm.tp : cm.fn) += 1;
        } else {
            (y_pred[i] == 1 ? cm.fp : cm.tn) += 1;
        }
    }

    MetricsReport m;
    m.accuracy = detail::ratio(cm.tp + cm.tn, cm.total());
    m.precision_pos = detail::ratio(cm.tp, cm.tp + cm.fp);
    m.precision_neg = detail::ratio(cm.tn, cm.tn + cm.fn);
    m.recall_pos = detail::ratio(cm.tp, cm.tp + cm.fn);
    m.recall_neg = detail::ratio(cm.tn, cm.tn + cm.fp);
    if (m.precision_pos.defined && m.recall_pos.defined &&
        m.precision_pos.value + m.recall_pos.value > 0.0) {
        m.f1_pos = Metric::of(2.0 * m.precision_pos.value * m.recall_pos.value /
                              (m.precision_pos.value + m.recall_pos.value));
    }
    m.tpr = m.recall_pos;
    m.fpr = detail::ratio(cm.fp, cm.tn + cm.fp);
    return {cm, m};
}

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
    double threshold = 0.0;
};

struct RocCurve {
    std::vector<RocPoint> points;
    double auc = 0.0;
};

/// Threshold sweep over the distinct scores in descending order (prefixed by
/// an all-negative point at threshold +infinity), with trapezoidal AUC.
inline RocCurve roc_auc(const std::vector<double>& scores, const std::vector<int>& y_true) {
    if (scores.size() != y_true.size()) {
        throw std::invalid_argument("roc_auc: length mismatch");
    }
    std::size_t n_pos = 0;
    std::size_t n_neg = 0;
    for (const int label : y_true) {
        if (label == 1) {
            ++n_pos;
        } else if (label == -1) {
            ++n_neg;
        } else {
            throw std::invalid_argument("roc_auc: labels must be -1 or +1");
        }
    }
    if (n_pos == 0 || n_neg == 0) {
        throw std::invalid_argument("roc_auc: both classes must be present");
    }

    std::vector<std::size_t> order(scores.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&scores](std::size_t a, std::size_t b) {
        return scores[a] > scores[b];
    });

    RocCurve curve;
    curve.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double threshold = scores[order[i]];
        // Consume the whole tie group so tied scores form one curve segment.
        while (i < order.size() && scores[order[i]] == threshold) {
            (y_true[order[i]] == 1 ? tp : fp) += 1;
            ++i;
        }
        curve.points.push_back({static_cast<double>(fp) / static_cast<double>(n_neg),
                                static_cast<double>(tp) / static_cast<double>(n_pos),
                                threshold});
    }

    double auc = 0.0;
    for (std::size_t p = 1; p < curve.points.size(); ++p) {
        const auto& a = curve.points[p - 1];
        const auto& b = curve.points[p];
        auc += (b.fpr - a.fpr) * 0.5 * (a.tpr + b.tpr);
    }
    curve.auc = auc;
    return curve;
}

struct FoldSplit {
    std::size_t k = 0;
    std::uint64_t seed = 0;
    std::vector<std::vector<std::size_t>> train_indices;
    std::vector<std::vector<std::size_t>> test_indices;
};

/// Shuffles each class with the seeded generator and deals members to folds
/// round-robin, so per-fold class counts differ from exact proportionality
/// by at most one sample.
inline FoldSplit stratified_folds(const std::vector<int>& y, std::size_t k,
                                  std::uint64_t seed) {
    if (k < 2) {
        throw std::invalid_argument("stratified_folds: k must be >= 2");
    }
    std::vector<std::size_t> pos_idx;
    std::vector<std::size_t> neg_idx;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] == 1) {
            pos_idx.push_back(i);
        } else if (y[i] == -1) {
            neg_idx.push_back(i);
        } else {
            throw std::invalid_argument("stratified_folds: labels must be -1 or +1");
        }
    }
    if (pos_idx.size() < k || neg_idx.size() < k) {
        throw std::invalid_argument("stratified_folds: each class needs at least k members");
    }

    Rng rng(seed);
    rng.shuffle(pos_idx);
    rng.shuffle(neg_idx);

    FoldSplit split;
    split.k = k;
    split.seed = seed;
    split.test_indices.assign(k, {});
    split.train_indices.assign(k, {});
    for (std::size_t i = 0; i < pos_idx.size(); ++i) {
        split.test_indices[i % k].push_back(pos_idx[i]);
    }
    for (std::size_t i = 0; i < neg_idx.size(); ++i) {
        split.test_indices[i % k].push_back(neg_idx[i]);
    }
    for (std::size_t f = 0; f < k; ++f) {
        std::sort(split.test_indices[f].begin(), split.test_indices[f].end());
        std::vector<bool> in_test(y.size(), false);
        for (const std::size_t i : split.test_indices[f]) {
            in_test[i] = true;
        }
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (!in_test[i]) {
                split.train_indices[f].push_back(i);
            }
        }
    }
    return split;
}

struct HoldoutSplit {
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
};

/// Stratified holdout: per-class test count = floor(fraction * n_c + 0.5),
/// clamped to [1, n_c - 1] so both sides keep both classes.
inline HoldoutSplit stratified_holdout(const std::vector<int>& y, double test_fraction,
                                       std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw std::invalid_argument("stratified_holdout: fraction must lie in (0, 1)");
    }
    std::vector<std::size_t> pos_idx;
    std::vector<std::size_t> neg_idx;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] == 1) {
            pos_idx.push_back(i);
        } else if (y[i] == -1) {
            neg_idx.push_back(i);
        } else {
            throw std::invalid_argument("stratified_holdout: labels must be -1 or +1");
        }
    }
    if (pos_idx.size() < 2 || neg_idx.size() < 2) {
        throw std::invalid_argument("stratified_holdout: each class needs at least 2 members");
    }

    Rng rng(seed);
    rng.shuffle(pos_idx);
    rng.shuffle(neg_idx);

    HoldoutSplit split;
    const auto take = [&split, test_fraction](const std::vector<std::size_t>& idx) {
        const double raw = test_fraction * static_cast<double>(idx.size()) + 0.5;
        std::size_t count = static_cast<std::size_t>(std::floor(raw));
        count = std::max<std::size_t>(1, std::min(count, idx.size() - 1));
        for (std::size_t i = 0; i < idx.size(); ++i) {
            (i < count ? split.test_indices : split.train_indices).push_back(idx[i]);
        }
    };
    take(pos_idx);
    take(neg_idx);
    std::sort(split.train_indices.begin(), split.train_indices.end());
    std::sort(split.test_indices.begin(), split.test_indices.end());
    return split;
}

struct AggregateMetric {
    double mean = 0.0;
    double stddev = 0.0;
    std::size_t defined_count = 0;
};

struct AggregateReport {
    MetricsReport mean;     // `defined` = at least one fold defined
    MetricsReport stddev;   // sample standard deviation (0 for one fold)
    std::array<std::size_t, 9> defined_counts{};  // aligned with metric_fields()
};

struct CrossValidationResult {
    std::vector<MetricsReport> per_fold;
    AggregateReport aggregate;
};

/// Aggregates fold metrics: mean and sample standard deviation over the
/// folds where each metric is defined.
inline AggregateReport aggregate_metrics(const std::vector<MetricsReport>& folds) {
    AggregateReport agg;
    const auto& fields = metric_fields();
    for (std::size_t f = 0; f < fields.size(); ++f) {
        const auto member = fields[f].second;
        std::vector<double> values;
        for (const auto& fold : folds) {
            const Metric& metric = fold.*member;
            if (metric.defined) {
                values.push_back(metric.value);
            }
        }
        agg.defined_counts[f] = values.size();
        if (values.empty()) {
            agg.mean.*member = Metric::undefined();
            agg.stddev.*member = Metric::undefined();
            continue;
        }
        double mean = 0.0;
        for (const double v : values) {
            mean += v;
        }
        mean /= static_cast<double>(values.size());
        double var = 0.0;
        if (values.size() > 1) {
            for (const double v : values) {
                var += (v - mean) * (v - mean);
            }
            var /= static_cast<double>(values.size() - 1);
        }
        agg.mean.*member = Metric::of(mean);
        agg.stddev.*member = Metric::of(std::sqrt(var));
    }
    return agg;
}

/// Fits on the fold's train indices and returns decision scores for its test
/// indices, in order.
using FitScoreFn = std::function<std::vector<double>(const std::vector<std::size_t>& train_idx,
                                                     const std::vector<std::size_t>& test_idx)>;

/// Runs every fold through `fit_score`, converts scores to labels with the
/// sign(0) -> +1 convention, and assembles per-fold plus aggregate metrics.
inline CrossValidationResult cross_validate(const std::vector<int>& y, const FoldSplit& folds,
                                            const FitScoreFn& fit_score) {
    CrossValidationResult result;
    for (std::size_t f = 0; f < folds.k; ++f) {
        const auto& test_idx = folds.test_indices[f];
        const std::vector<double> scores = fit_score(folds.train_indices[f], test_idx);
        if (scores.size() != test_idx.size()) {
            throw std::runtime_error("cross_validate: scorer returned wrong count");
        }
        std::vector<int> y_test;
        std::vector<int> y_pred;
        y_test.reserve(test_idx.size());
        y_pred.reserve(test_idx.size());
        for (std::size_t t = 0; t < test_idx.size(); ++t) {
            y_test.push_back(y[test_idx[t]]);
            y_pred.push_back(scores[t] >= 0.0 ? 1 : -1);
        }
        auto [cm, metrics] = confusion_and_metrics(y_test, y_pred);
        const bool has_pos = std::find(y_test.begin(), y_test.end(), 1) != y_test.end();
        const bool has_neg = std::find(y_test.begin(), y_test.end(), -1) != y_test.end();
        if (has_pos && has_neg) {
            metrics.auc = Metric::of(roc_auc(scores, y_test).auc);
        }
        result.per_fold.push_back(metrics);
    }
    result.aggregate = aggregate_metrics(result.per_fold);
    return result;
}

}  // namespace qksvm
