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
 * Soft-margin SVM trained on a precomputed Gram matrix.
 *
 * The solver is SMO with maximal-violating-pair working-set selection over
 * the dual: minimize 1/2 a^T Q a - e^T a subject to 0 <= a_i <= C and
 * y^T a = 0, where Q_ij = y_i y_j K_ij. Convergence is declared when the
 * maximal KKT violation m(a) - M(a) drops to tol; the bias is the midpoint
 * of the admissible interval. Decision scores follow
 * score(z) = sum_i y_i a_i K(x_i, z) + b, with sign(0) mapped to +1.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "qksvm/kernel.hpp"
#include "qksvm/matrix.hpp"

namespace qksvm {

struct SvmTrainConfig {
    double C = 1.0;
    double tol = 1e-3;
    std::size_t max_passes = 200;
};

struct SvmModel {
    std::vector<double> alphas;
    double bias = 0.0;
    std::vector<int> labels;                  // y_i in {-1, +1}
    std::vector<std::size_t> support_indices;  // i with alpha_i > 0
};

enum class ClassicalKernelFamily { Linear, Rbf, Poly };

struct ClassicalKernelKind {
    ClassicalKernelFamily family = ClassicalKernelFamily::Rbf;
    double gamma = 1.0;       // Rbf
    std::size_t degree = 3;   // Poly
    double coef0 = 0.0;       // Poly

    static ClassicalKernelKind linear() {
        return {ClassicalKernelFamily::Linear, 1.0, 3, 0.0};
    }
    static ClassicalKernelKind rbf(double gamma) {
        if (gamma <= 0.0) {
            throw std::invalid_argument("ClassicalKernelKind: gamma must be positive");
        }
        return {ClassicalKernelFamily::Rbf, gamma, 3, 0.0};
    }
    static ClassicalKernelKind poly(std::size_t degree, double coef0) {
        if (degree < 1) {
            throw std::invalid_argument("ClassicalKernelKind: degree must be >= 1");
        }
        return {ClassicalKernelFamily::Poly, 1.0, degree, coef0};
    }
};

/// The "scale" heuristic: gamma = 1 / (d * var(X)) over all matrix entries,
/// falling back to 1/d for constant data.
inline double rbf_gamma_scale(const std::vector<FeatureVector>& rows) {
    if (rows.empty() || rows.front().empty()) {
        throw std::invalid_argument("rbf_gamma_scale: empty data");
    }
    const std::size_t d = rows.front().size();
    double sum = 0.0;
    double sum_sq = 0.0;
    std::size_t count = 0;
    for (const auto& row : rows) {
        for (const double v : row) {
            sum += v;
            sum_sq += v * v;
            ++count;
        }
    }
    const double mean = sum / static_cast<double>(count);
    const double var = sum_sq / static_cast<double>(count) - mean * mean;
    if (var <= 0.0) {
        return 1.0 / static_cast<double>(d);
    }
    return 1.0 / (static_cast<double>(d) * var);
}

namespace detail {

inline double classical_kernel_value(const FeatureVector& a, const FeatureVector& b,
                                     const ClassicalKernelKind& kind) {
    double dot = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        dot += a[j] * b[j];
    }
    switch (kind.family) {
        case ClassicalKernelFamily::Linear:
            return dot;
        case ClassicalKernelFamily::Rbf: {
            double dist_sq = 0.0;
            for (std::size_t j = 0; j < a.size(); ++j) {
                const double diff = a[j] - b[j];
                dist_sq += diff * diff;
            }
            return std::exp(-kind.gamma * dist_sq);
        }
        case ClassicalKernelFamily::Poly:
            return std::pow(dot + kind.coef0, static_cast<double>(kind.degree));
    }
    throw std::logic_error("classical_kernel_value: unknown kernel family");
}

}  // namespace detail

/// Gram matrix under a classical kernel (baseline models).
inline KernelMatrix classical_gram(const std::vector<FeatureVector>& rows,
                                   const ClassicalKernelKind& kind) {
    if (rows.empty()) {
        throw std::invalid_argument("classical_gram: empty dataset");
    }
    const std::size_t n = rows.size();
    const std::size_t d = rows.front().size();
    for (const auto& row : rows) {
        if (row.size() != d) {
            throw std::invalid_argument("classical_gram: rows have mismatched dimensions");
        }
    }
    KernelMatrix gram(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const double value = detail::classical_kernel_value(rows[i], rows[j], kind);
            gram(i, j) = value;
            gram(j, i) = value;
        }
    }
    return gram;
}

/// Test-set kernel block under a classical kernel.
inline RealMatrix classical_cross_gram(const std::vector<FeatureVector>& rows_test,
                                       const std::vector<FeatureVector>& rows_train,
                                       const ClassicalKernelKind& kind) {
    if (rows_test.empty() || rows_train.empty()) {
        throw std::invalid_argument("classical_cross_gram: empty dataset");
    }
    RealMatrix out(rows_test.size(), rows_train.size());
    for (std::size_t t = 0; t < rows_test.size(); ++t) {
        if (rows_test[t].size() != rows_train.front().size()) {
            throw std::invalid_argument("classical_cross_gram: dimension mismatch");
        }
        for (std::size_t i = 0; i < rows_train.size(); ++i) {
            out(t, i) = detail::classical_kernel_value(rows_test[t], rows_train[i], kind);
        }
    }
    return out;
}

/**
 * SMO with maximal-violating-pair selection.
 *
 * Preconditions: the Gram matrix must be PSD within 1e-9 (run psd_floor
 * first when it may not be) and both classes must be present.
 */
inline SvmModel train_smo(const KernelMatrix& gram, const std::vector<int>& y,
                          const SvmTrainConfig& config) {
    const std::size_t n = y.size();
    if (gram.n() != n) {
        throw std::invalid_argument("train_smo: Gram size does not match label count");
    }
    if (n == 0) {
        throw std::invalid_argument("train_smo: empty training set");
    }
    if (config.C <= 0.0 || config.tol <= 0.0 || config.max_passes < 1) {
        throw std::invalid_argument("train_smo: invalid training configuration");
    }
    bool has_pos = false;
    bool has_neg = false;
    for (const int label : y) {
        if (label == 1) {
            has_pos = true;
        } else if (label == -1) {
            has_neg = true;
        } else {
            throw std::invalid_argument("train_smo: labels must be -1 or +1");
        }
    }
    if (!has_pos || !has_neg) {
        throw std::invalid_argument("train_smo: degenerate labels (single class)");
    }
    if (min_eigenvalue(gram.entries) < -1e-9) {
        throw std::invalid_argument(
            "train_smo: Gram matrix is not PSD within 1e-9; apply psd_floor first");
    }

    const double C = config.C;
    std::vector<double> alpha(n, 0.0);
    // grad_i = d/d alpha_i of the dual objective = sum_j Q_ij alpha_j - 1;
    // at alpha = 0 this is -1 everywhere.
    std::vector<double> grad(n, -1.0);
    const auto yd = [&y](std::size_t i) { return static_cast<double>(y[i]); };

    const std::size_t max_updates = config.max_passes * n;
    for (std::size_t update = 0; update < max_updates; ++update) {
        // Maximal violating pair over -y_i grad_i:
        //   i from the "up" set (alpha can increase along +y), maximizing;
        //   j from the "down" set (alpha can decrease along +y), minimizing.
        double m_up = -std::numeric_limits<double>::infinity();
        double m_down = std::numeric_limits<double>::infinity();
        std::size_t i_up = n;
        std::size_t j_down = n;
        for (std::size_t t = 0; t < n; ++t) {
            const double v = -yd(t) * grad[t];
            const bool in_up = (y[t] == 1 && alpha[t] < C) || (y[t] == -1 && alpha[t] > 0.0);
            const bool in_down = (y[t] == 1 && alpha[t] > 0.0) || (y[t] == -1 && alpha[t] < C);
            if (in_up && v > m_up) {
                m_up = v;
                i_up = t;
            }
            if (in_down && v < m_down) {
                m_down = v;
                j_down = t;
            }
        }
        if (i_up == n || j_down == n || m_up - m_down <= config.tol) {
            break;
        }

        const std::size_t i = i_up;
        const std::size_t j = j_down;
        // Curvature along the feasible direction (d_i = y_i, d_j = -y_j) is
        // label-free: d^T Q d = K_ii + K_jj - 2 K_ij.
        double eta = gram(i, i) + gram(j, j) - 2.0 * gram(i, j);
        if (eta <= 1e-12) {
            eta = 1e-12;  // flat directions still take a full clipped step
        }

        // Step along alpha_i += y_i * delta, alpha_j -= y_j * delta keeps the
        // equality constraint; delta* = (m_up - m_down) / eta before clipping.
        double delta = (m_up - m_down) / eta;
        const double max_di = y[i] == 1 ? C - alpha[i] : alpha[i];
        const double max_dj = y[j] == 1 ? alpha[j] : C - alpha[j];
        delta = std::min(delta, std::min(max_di, max_dj));
        if (delta <= 0.0) {
            break;
        }
        alpha[i] += yd(i) * delta;
        alpha[j] -= yd(j) * delta;
        alpha[i] = std::clamp(alpha[i], 0.0, C);
        alpha[j] = std::clamp(alpha[j], 0.0, C);
        for (std::size_t t = 0; t < n; ++t) {
            grad[t] += yd(t) * delta * (gram(t, i) - gram(t, j));
        }
    }

    // Bias: for free support vectors y_i (grad_i + ... ) pins b exactly; in
    // general b lies in [b_lo, b_hi] derived from the KKT conditions, and the
    // midpoint is used. -y_t grad_t bounds b from below over the "up" set and
    // from above over the "down" set at the solution.
    double b_lo = -std::numeric_limits<double>::infinity();
    double b_hi = std::numeric_limits<double>::infinity();
    double free_sum = 0.0;
    std::size_t free_count = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const double v = -yd(t) * grad[t];
        const bool at_lower = alpha[t] <= 0.0;
        const bool at_upper = alpha[t] >= C;
        if (!at_lower && !at_upper) {
            free_sum += v;
            ++free_count;
            continue;
        }
        const bool in_up = (y[t] == 1 && !at_upper) || (y[t] == -1 && !at_lower);
        const bool in_down = (y[t] == 1 && !at_lower) || (y[t] == -1 && !at_upper);
        if (in_up) {
            b_lo = std::max(b_lo, v);
        }
        if (in_down) {
            b_hi = std::min(b_hi, v);
        }
    }
    double bias = 0.0;
    if (free_count > 0) {
        bias = free_sum / static_cast<double>(free_count);
    } else if (std::isfinite(b_lo) && std::isfinite(b_hi)) {
        bias = 0.5 * (b_lo + b_hi);
    } else if (std::isfinite(b_lo)) {
        bias = b_lo;
    } else if (std::isfinite(b_hi)) {
        bias = b_hi;
    }

    SvmModel model;
    model.alphas = std::move(alpha);
    model.bias = bias;
    model.labels = y;
    for (std::size_t t = 0; t < n; ++t) {
        if (model.alphas[t] > 0.0) {
            model.support_indices.push_back(t);
        }
    }
    return model;
}

struct ScoredPrediction {
    double score = 0.0;
    int label = 1;
};

/// Decision values and classes for each test row of a cross-Gram block.
/// Columns of `cross` must align with the model's training indices.
inline std::vector<ScoredPrediction> predict_scores(const SvmModel& model,
                                                    const RealMatrix& cross) {
    if (cross.cols() != model.alphas.size()) {
        throw std::invalid_argument("predict_scores: cross-Gram columns do not match model size");
    }
    std::vector<ScoredPrediction> out;
    out.reserve(cross.rows());
    for (std::size_t t = 0; t < cross.rows(); ++t) {
        double score = model.bias;
        for (std::size_t i = 0; i < model.alphas.size(); ++i) {
            if (model.alphas[i] != 0.0) {
                score += static_cast<double>(model.labels[i]) * model.alphas[i] * cross(t, i);
            }
        }
        out.push_back({score, score >= 0.0 ? 1 : -1});
    }
    return out;
}

/// Dual objective 1/2 a^T Q a - e^T a (diagnostic; lower is better).
inline double dual_objective(const KernelMatrix& gram, const std::vector<int>& y,
                             const std::vector<double>& alpha) {
    const std::size_t n = y.size();
    double quad = 0.0;
    double lin = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        lin += alpha[i];
        for (std::size_t j = 0; j < n; ++j) {
            quad += alpha[i] * alpha[j] * static_cast<double>(y[i]) *
                    static_cast<double>(y[j]) * gram(i, j);
        }
    }
    return 0.5 * quad - lin;
}

}  // namespace qksvm
