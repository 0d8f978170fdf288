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
 * Dense statevector for exact pure-state simulation.
 *
 * Conventions (pinned here and relied on everywhere else):
 *  - qubit 0 is the least-significant bit of the basis-state index, so
 *    |q_{n-1} ... q_1 q_0> lives at index sum_k q_k 2^k;
 *  - amplitudes are std::complex<double>;
 *  - capacity is capped at 24 qubits (dense array of 2^24 amplitudes).
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "qksvm/util.hpp"

namespace qksvm {

using ComplexAmp = std::complex<double>;

inline constexpr std::size_t kMaxQubits = 24;

class StateVector {
  public:
    /// Constructs |0...0> on num_qubits qubits.
    explicit StateVector(std::size_t num_qubits) : num_qubits_(num_qubits) {
        if (num_qubits < 1 || num_qubits > kMaxQubits) {
            throw std::out_of_range("StateVector: qubit count must be in [1, 24]");
        }
        amps_.assign(std::size_t{1} << num_qubits, ComplexAmp{0.0, 0.0});
        amps_[0] = ComplexAmp{1.0, 0.0};
    }

    std::size_t num_qubits() const { return num_qubits_; }
    std::size_t dim() const { return amps_.size(); }

    const std::vector<ComplexAmp>& amps() const { return amps_; }
    std::vector<ComplexAmp>& amps() { return amps_; }

    ComplexAmp amp(std::size_t basis_index) const { return amps_.at(basis_index); }

    double norm_sq() const {
        double total = 0.0;
        for (const auto& a : amps_) {
            total += std::norm(a);
        }
        return total;
    }

  private:
    std::size_t num_qubits_;
    std::vector<ComplexAmp> amps_;
};

/// |0^n> for n qubits. Throws for qubit counts outside [1, 24].
inline StateVector init_zero_state(std::size_t num_qubits) { return StateVector(num_qubits); }

/// <a|b> = sum_k conj(a_k) b_k.
inline ComplexAmp inner_product(const StateVector& a, const StateVector& b) {
    if (a.num_qubits() != b.num_qubits()) {
        throw std::invalid_argument("inner_product: qubit counts differ");
    }
    ComplexAmp acc{0.0, 0.0};
    const auto& av = a.amps();
    const auto& bv = b.amps();
    for (std::size_t k = 0; k < av.size(); ++k) {
        acc += std::conj(av[k]) * bv[k];
    }
    return acc;
}

/// Probability of the all-zeros outcome, |amps[0]|^2.
inline double zero_probability(const StateVector& state) { return std::norm(state.amps()[0]); }

/**
 * @brief Samples computational-basis measurement outcomes.
 *
 * Draws `shots` outcomes from |amps_k|^2 by CDF inversion with a
 * deterministic generator, so fixed seeds reproduce counts exactly.
 * Returns a basis-index -> count map whose values sum to `shots`.
 */
inline std::map<std::size_t, std::size_t> sample_counts(const StateVector& state,
                                                        std::size_t shots, std::uint64_t seed) {
    if (shots < 1) {
        throw std::invalid_argument("sample_counts: shots must be >= 1");
    }
    const auto& amps = state.amps();
    std::vector<double> cdf(amps.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < amps.size(); ++k) {
        acc += std::norm(amps[k]);
        cdf[k] = acc;
    }
    // Guard the tail against rounding so every draw lands on a valid index.
    cdf.back() = std::max(cdf.back(), 1.0);

    Rng rng(seed);
    std::map<std::size_t, std::size_t> counts;
    for (std::size_t s = 0; s < shots; ++s) {
        const double u = rng.next_double() * acc;
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        const std::size_t idx =
            it == cdf.end() ? amps.size() - 1
                            : static_cast<std::size_t>(std::distance(cdf.begin(), it));
        ++counts[idx];
    }
    return counts;
}

}  // namespace qksvm
