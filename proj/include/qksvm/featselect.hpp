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
 * Feature selection: LASSO coordinate descent and recursive feature
 * elimination, combined into a per-feature selection report.
 *
 * The LASSO objective is sum_i (y_i - sum_j w_j x_ij)^2 + lambda sum_j |w_j|
 * (squared loss without the 1/2 factor). Columns are rescaled to unit L2
 * norm internally, with the per-coordinate penalty scaled to compensate, so
 * the returned weights minimize the stated objective exactly; there is no
 * mean-centering because the objective has no intercept.
 *
 * RFE repeatedly fits an importance estimator and drops the `step`
 * lowest-importance features; survivors of the final round share rank 1 and
 * each earlier elimination round shares the next higher rank. The combined
 * ordering for select_features is (rfe_rank ascending, |lasso_coeff|
 * descending, feature index ascending).
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qksvm/csv.hpp"
#include "qksvm/matrix.hpp"

namespace qksvm {

struct LassoConfig {
    double lambda = 1.0;
    std::size_t max_iter = 1000;
    double tol = 1e-8;
};

/// Cyclic coordinate descent on the exact Eq.-form LASSO objective.
/// All-zero columns keep weight 0.
inline std::vector<double> lasso_fit(const RealMatrix& x, const std::vector<double>& y,
                                     const LassoConfig& config) {
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    if (n == 0 || d == 0) {
        throw std::invalid_argument("lasso_fit: empty design matrix");
    }
    if (y.size() != n) {
        throw std::invalid_argument("lasso_fit: row/target count mismatch");
    }
    if (config.lambda < 0.0 || config.tol <= 0.0 || config.max_iter < 1) {
        throw std::invalid_argument("lasso_fit: invalid configuration");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(y[i])) {
            throw std::invalid_argument("lasso_fit: non-finite target");
        }
        for (std::size_t j = 0; j < d; ++j) {
            if (!std::isfinite(x(i, j))) {
                throw std::invalid_argument("lasso_fit: non-finite design entry");
            }
        }
    }

    // Unit-L2 column rescaling: with x~_j = x_j / s_j and w~_j = s_j w_j the
    // objective becomes ||y - X~ w~||^2 + lambda sum |w~_j| / s_j, an exact
    // reparametrization with per-coordinate penalty lambda_j = lambda / s_j.
    std::vector<double> scale(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
        double norm_sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            norm_sq += x(i, j) * x(i, j);
        }
        scale[j] = std::sqrt(norm_sq);
    }

    std::vector<double> w_scaled(d, 0.0);
    std::vector<double> residual = y;  // r = y - X~ w~, starting at w~ = 0

    for (std::size_t iter = 0; iter < config.max_iter; ++iter) {
        double max_change = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            if (scale[j] == 0.0) {
                continue;
            }
            // rho = 2 x~_j . (r + x~_j w~_j): the full gradient target for
            // coordinate j given ||x~_j|| = 1.
            double dot = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                dot += (x(i, j) / scale[j]) * residual[i];
            }
            const double rho = 2.0 * (dot + w_scaled[j]);
            const double penalty = config.lambda / scale[j];
            double updated = 0.0;
            if (rho > penalty) {
                updated = (rho - penalty) / 2.0;
            } else if (rho < -penalty) {
                updated = (rho + penalty) / 2.0;
            }
            const double delta = updated - w_scaled[j];
            if (delta != 0.0) {
                for (std::size_t i = 0; i < n; ++i) {
                    residual[i] -= delta * (x(i, j) / scale[j]);
                }
                w_scaled[j] = updated;
            }
            max_change = std::max(max_change, std::abs(delta) / scale[j]);
        }
        if (max_change <= config.tol) {
            break;
        }
    }

    std::vector<double> w(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
        if (scale[j] != 0.0) {
            w[j] = w_scaled[j] / scale[j];
        }
    }
    return w;
}

/// Value of the LASSO objective at w (diagnostic).
inline double lasso_objective(const RealMatrix& x, const std::vector<double>& y,
                              const std::vector<double>& w, double lambda) {
    double loss = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        double fitted = 0.0;
        for (std::size_t j = 0; j < x.cols(); ++j) {
            fitted += w[j] * x(i, j);
        }
        const double diff = y[i] - fitted;
        loss += diff * diff;
    }
    double l1 = 0.0;
    for (const double v : w) {
        l1 += std::abs(v);
    }
    return loss + lambda * l1;
}

using ImportanceProvider =
    std::function<std::vector<double>(const RealMatrix&, const std::vector<int>&)>;

/**
 * Recursive feature elimination. Repeatedly fits the estimator on the
 * surviving columns and drops the `step` lowest-importance features (ties
 * drop the lowest index first); survivors of the final round get rank 1,
 * features dropped in the last elimination round rank 2, and so on outward.
 * When fewer than step+1 features remain, all but one are dropped.
 */
inline std::vector<std::size_t> rfe_rank(const RealMatrix& x, const std::vector<int>& y,
                                         const ImportanceProvider& estimator,
                                         std::size_t step = 1) {
    const std::size_t d = x.cols();
    if (d < 1) {
        throw std::invalid_argument("rfe_rank: no features");
    }
    if (step < 1) {
        throw std::invalid_argument("rfe_rank: step must be >= 1");
    }

    std::vector<std::size_t> rank(d, 0);
    std::vector<std::size_t> alive(d);
    for (std::size_t j = 0; j < d; ++j) {
        alive[j] = j;
    }

    std::size_t round = 0;  // counted from the last elimination backward
    std::vector<std::vector<std::size_t>> eliminated_per_round;
    while (alive.size() > 1) {
        const RealMatrix sub = x.select_columns(alive);
        const std::vector<double> importance = estimator(sub, y);
        if (importance.size() != alive.size()) {
            throw std::invalid_argument("rfe_rank: estimator returned wrong importance count");
        }
        // Sort survivor positions by (importance ascending, original index
        // ascending) and drop the first `step` (all but one when step is too
        // large for the remaining pool).
        std::vector<std::size_t> order(alive.size());
        for (std::size_t k = 0; k < order.size(); ++k) {
            order[k] = k;
        }
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (importance[a] != importance[b]) {
                return importance[a] < importance[b];
            }
            return alive[a] < alive[b];
        });
        const std::size_t drop = std::min(step, alive.size() - 1);
        std::vector<std::size_t> dropped;
        dropped.reserve(drop);
        for (std::size_t k = 0; k < drop; ++k) {
            dropped.push_back(alive[order[k]]);
        }
        eliminated_per_round.push_back(dropped);
        std::vector<std::size_t> next_alive;
        next_alive.reserve(alive.size() - drop);
        for (const std::size_t j : alive) {
            if (std::find(dropped.begin(), dropped.end(), j) == dropped.end()) {
                next_alive.push_back(j);
            }
        }
        alive = std::move(next_alive);
        ++round;
    }

    for (const std::size_t j : alive) {
        rank[j] = 1;
    }
    // The most recent elimination round ranks 2, the one before it 3, ...
    std::size_t r = 2;
    for (auto it = eliminated_per_round.rbegin(); it != eliminated_per_round.rend(); ++it, ++r) {
        for (const std::size_t j : *it) {
            rank[j] = r;
        }
    }
    return rank;
}

struct FeatureRecord {
    std::string name;
    int rfe_mask = 0;          // 1 iff rfe_rank <= the report's reference k
    std::size_t rfe_rank = 0;  // 1 = survivor
    double lasso_coeff = 0.0;
};

struct SelectionReport {
    std::vector<FeatureRecord> features;
    std::size_t reference_k = 0;  // the k whose membership rfe_mask records

    std::size_t dimension() const { return features.size(); }
};

/// Builds the combined report from RFE ranks and LASSO coefficients.
inline SelectionReport make_selection_report(const std::vector<std::string>& names,
                                             const std::vector<std::size_t>& rfe_ranks,
                                             const std::vector<double>& lasso_coeffs,
                                             std::size_t reference_k) {
    const std::size_t d = names.size();
    if (rfe_ranks.size() != d || lasso_coeffs.size() != d) {
        throw std::invalid_argument("make_selection_report: length mismatch");
    }
    if (reference_k < 1 || reference_k > d) {
        throw std::invalid_argument("make_selection_report: reference k out of range");
    }
    SelectionReport report;
    report.reference_k = reference_k;
    report.features.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
        report.features[j] = {names[j], 0, rfe_ranks[j], lasso_coeffs[j]};
    }
    // Mask the reference_k best features under the combined ordering.
    std::vector<std::size_t> order(d);
    for (std::size_t j = 0; j < d; ++j) {
        order[j] = j;
    }
    std::sort(order.begin(), order.end(), [&report](std::size_t a, std::size_t b) {
        const auto& fa = report.features[a];
        const auto& fb = report.features[b];
        if (fa.rfe_rank != fb.rfe_rank) {
            return fa.rfe_rank < fb.rfe_rank;
        }
        if (std::abs(fa.lasso_coeff) != std::abs(fb.lasso_coeff)) {
            return std::abs(fa.lasso_coeff) > std::abs(fb.lasso_coeff);
        }
        return a < b;
    });
    for (std::size_t k = 0; k < reference_k; ++k) {
        report.features[order[k]].rfe_mask = 1;
    }
    return report;
}

/// First k column indices under (rfe_rank asc, |lasso_coeff| desc, index asc).
inline std::vector<std::size_t> select_features(const SelectionReport& report, std::size_t k) {
    const std::size_t d = report.dimension();
    if (k < 1 || k > d) {
        throw std::invalid_argument("select_features: k out of range");
    }
    std::vector<std::size_t> order(d);
    for (std::size_t j = 0; j < d; ++j) {
        order[j] = j;
    }
    std::sort(order.begin(), order.end(), [&report](std::size_t a, std::size_t b) {
        const auto& fa = report.features[a];
        const auto& fb = report.features[b];
        if (fa.rfe_rank != fb.rfe_rank) {
            return fa.rfe_rank < fb.rfe_rank;
        }
        if (std::abs(fa.lasso_coeff) != std::abs(fb.lasso_coeff)) {
            return std::abs(fa.lasso_coeff) > std::abs(fb.lasso_coeff);
        }
        return a < b;
    });
    order.resize(k);
    std::sort(order.begin(), order.end());
    return order;
}

/// selection.csv: feature,rfe_mask,rfe_rank,lasso_coeff,selected_k.
inline std::string selection_to_csv(const SelectionReport& report) {
    std::string out = "feature,rfe_mask,rfe_rank,lasso_coeff,selected_k\n";
    const std::vector<std::size_t> selected = select_features(report, report.reference_k);
    for (std::size_t j = 0; j < report.dimension(); ++j) {
        const auto& f = report.features[j];
        const bool in_selected =
            std::find(selected.begin(), selected.end(), j) != selected.end();
        std::vector<std::string> fields = {
            f.name,
            std::to_string(f.rfe_mask),
            std::to_string(f.rfe_rank),
            csv::format_double(f.lasso_coeff),
            in_selected ? std::to_string(report.reference_k) : std::string("0"),
        };
        out += csv::join_row(fields);
        out += '\n';
    }
    return out;
}

}  // namespace qksvm
