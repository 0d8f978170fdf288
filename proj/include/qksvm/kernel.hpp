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
 * Fidelity kernels: K(x_i, x_j) = |<0^n| U†(x_i) U(x_j) |0^n>|^2.
 *
 * Exact mode reads the all-zeros amplitude; Sampled mode estimates it as the
 * frequency of the all-zeros outcome over a finite number of shots. Gram and
 * cross-Gram assembly cache the encoded state U(x)|0^n> per data row, since
 * |<0|U†(x_i)U(x_j)|0>| = |<phi_i|phi_j>|, which avoids re-simulating the
 * composed circuit for every pair. Entries are computed for i <= j in
 * row-major order and mirrored; in Sampled mode each computed entry draws
 * from its own seed derived from (master seed, i, j) so results do not
 * depend on evaluation order.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qksvm/csv.hpp"
#include "qksvm/feature_map.hpp"
#include "qksvm/matrix.hpp"
#include "qksvm/state_vector.hpp"
#include "qksvm/util.hpp"

namespace qksvm {

struct EstimationMode {
    enum class Kind { Exact, Sampled };

    Kind kind = Kind::Exact;
    std::size_t shots = 8192;   // Sampled only
    std::uint64_t seed = 0;     // Sampled only

    static EstimationMode exact() { return EstimationMode{}; }

    static EstimationMode sampled(std::size_t shots, std::uint64_t seed) {
        if (shots < 1) {
            throw std::invalid_argument("EstimationMode: shots must be >= 1");
        }
        EstimationMode mode;
        mode.kind = Kind::Sampled;
        mode.shots = shots;
        mode.seed = seed;
        return mode;
    }
};

struct KernelMatrix {
    RealMatrix entries;

    KernelMatrix() = default;
    explicit KernelMatrix(std::size_t n) : entries(n, n) {}

    std::size_t n() const { return entries.rows(); }
    double operator()(std::size_t i, std::size_t j) const { return entries(i, j); }
    double& operator()(std::size_t i, std::size_t j) { return entries(i, j); }
};

namespace detail {

/// Probability of the all-zeros outcome, estimated per the mode.
inline double zero_outcome_value(const StateVector& state, const EstimationMode& mode) {
    if (mode.kind == EstimationMode::Kind::Exact) {
        return zero_probability(state);
    }
    const auto counts = sample_counts(state, mode.shots, mode.seed);
    const auto it = counts.find(0);
    const std::size_t zeros = it == counts.end() ? 0 : it->second;
    return static_cast<double>(zeros) / static_cast<double>(mode.shots);
}

inline StateVector encoded_state(const FeatureMapSpec& spec, const FeatureVector& x) {
    StateVector state = init_zero_state(x.size());
    apply_circuit(state, build_feature_circuit(spec, x));
    return state;
}

}  // namespace detail

/// One kernel entry by literal circuit composition: U(x_j)|0>, then the
/// adjoint of U(x_i), then the all-zeros readout.
inline double kernel_entry(const FeatureMapSpec& spec, const FeatureVector& x_i,
                           const FeatureVector& x_j, const EstimationMode& mode) {
    if (x_i.size() != x_j.size()) {
        throw std::invalid_argument("kernel_entry: dimension mismatch");
    }
    StateVector state = init_zero_state(x_j.size());
    apply_circuit(state, build_feature_circuit(spec, x_j));
    apply_circuit(state, adjoint_circuit(build_feature_circuit(spec, x_i)));
    return detail::zero_outcome_value(state, mode);
}

namespace detail {

inline std::vector<StateVector> encode_rows(const FeatureMapSpec& spec,
                                            const std::vector<FeatureVector>& rows) {
    if (rows.empty()) {
        throw std::invalid_argument("kernel: empty dataset");
    }
    const std::size_t d = rows.front().size();
    std::vector<StateVector> states;
    states.reserve(rows.size());
    for (const auto& row : rows) {
        if (row.size() != d) {
            throw std::invalid_argument("kernel: rows have mismatched dimensions");
        }
        states.push_back(encoded_state(spec, row));
    }
    return states;
}

/// |<phi_i|phi_j>|^2 evaluated per the mode; Sampled mode draws the
/// all-zeros outcome as a Bernoulli count, which is distributed identically
/// to sampling the composed state and counting zero outcomes.
inline double fidelity_value(const StateVector& phi_i, const StateVector& phi_j,
                             const EstimationMode& mode) {
    const double p = std::norm(inner_product(phi_i, phi_j));
    if (mode.kind == EstimationMode::Kind::Exact) {
        return p;
    }
    Rng rng(mode.seed);
    std::size_t zeros = 0;
    for (std::size_t s = 0; s < mode.shots; ++s) {
        if (rng.next_double() < p) {
            ++zeros;
        }
    }
    return static_cast<double>(zeros) / static_cast<double>(mode.shots);
}

inline EstimationMode entry_mode(const EstimationMode& mode, std::size_t i, std::size_t j) {
    EstimationMode out = mode;
    if (mode.kind == EstimationMode::Kind::Sampled) {
        out.seed = derive_seed(mode.seed, static_cast<std::uint64_t>(i),
                               static_cast<std::uint64_t>(j));
    }
    return out;
}

}  // namespace detail

/// Full n x n kernel matrix over one dataset. Entries are computed for
/// i <= j and mirrored.
inline KernelMatrix gram_matrix(const FeatureMapSpec& spec,
                                const std::vector<FeatureVector>& rows,
                                const EstimationMode& mode) {
    const auto states = detail::encode_rows(spec, rows);
    const std::size_t n = states.size();
    KernelMatrix gram(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const double value =
                detail::fidelity_value(states[i], states[j], detail::entry_mode(mode, i, j));
            gram(i, j) = value;
            gram(j, i) = value;
        }
    }
    return gram;
}

/// |rows_test| x |rows_train| kernel block between two datasets.
inline RealMatrix cross_gram(const FeatureMapSpec& spec,
                             const std::vector<FeatureVector>& rows_test,
                             const std::vector<FeatureVector>& rows_train,
                             const EstimationMode& mode) {
    const auto test_states = detail::encode_rows(spec, rows_test);
    const auto train_states = detail::encode_rows(spec, rows_train);
    if (rows_test.front().size() != rows_train.front().size()) {
        throw std::invalid_argument("cross_gram: dimension mismatch between datasets");
    }
    RealMatrix out(test_states.size(), train_states.size());
    for (std::size_t t = 0; t < test_states.size(); ++t) {
        for (std::size_t i = 0; i < train_states.size(); ++i) {
            out(t, i) = detail::fidelity_value(test_states[t], train_states[i],
                                               detail::entry_mode(mode, t, i));
        }
    }
    return out;
}

/// Smallest eigenvalue of a symmetric matrix (uses the lower triangle).
inline double min_eigenvalue(const RealMatrix& m) {
    const std::size_t n = m.rows();
    Eigen::MatrixXd sym(n, n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            sym(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = m(r, c);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym,
                                                          Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("min_eigenvalue: eigen decomposition failed");
    }
    return solver.eigenvalues().minCoeff();
}

/// Clips negative eigenvalues to zero. Returns the input unchanged when it
/// is already PSD within epsilon.
inline KernelMatrix psd_floor(const KernelMatrix& m, double epsilon = 1e-9) {
    const std::size_t n = m.n();
    Eigen::MatrixXd sym(n, n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            sym(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = m(r, c);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("psd_floor: eigen decomposition failed");
    }
    if (solver.eigenvalues().minCoeff() >= -epsilon) {
        return m;
    }
    Eigen::VectorXd clipped = solver.eigenvalues().cwiseMax(0.0);
    const Eigen::MatrixXd rebuilt =
        solver.eigenvectors() * clipped.asDiagonal() * solver.eigenvectors().transpose();
    KernelMatrix out(n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            out(r, c) = rebuilt(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        }
    }
    return out;
}

/// Serializes a full matrix to CSV: header row k0..k{n-1}, then one row of
/// 17-significant-digit decimals per matrix row.
inline std::string gram_to_csv(const RealMatrix& m) {
    std::string out;
    std::vector<std::string> header;
    header.reserve(m.cols());
    for (std::size_t c = 0; c < m.cols(); ++c) {
        header.push_back("k" + std::to_string(c));
    }
    out += csv::join_row(header);
    out += '\n';
    std::vector<std::string> fields(m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            fields[c] = csv::format_double(m(r, c));
        }
        out += csv::join_row(fields);
        out += '\n';
    }
    return out;
}

inline RealMatrix gram_from_csv(const std::string& text) {
    const auto records = csv::parse(text);
    if (records.size() < 2) {
        throw std::invalid_argument("gram_from_csv: need a header row and at least one data row");
    }
    const std::size_t cols = records.front().size();
    RealMatrix out(records.size() - 1, cols);
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != cols) {
            throw std::invalid_argument("gram_from_csv: ragged rows");
        }
        for (std::size_t c = 0; c < cols; ++c) {
            out(r - 1, c) = csv::parse_double(records[r][c]);
        }
    }
    return out;
}

}  // namespace qksvm
