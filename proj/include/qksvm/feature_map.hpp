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
 * Data-encoding feature-map circuits.
 *
 * Three families are provided:
 *  - Proposed: Hadamard layer (first repetition only), ZZ entangler blocks,
 *    then a per-qubit UC block of R_x(rx_angle) followed by R_y(scale * x_j).
 *  - IQP: Hadamard layer every repetition, per-qubit R_z(scale * x_j), then
 *    ZZ entangler blocks.
 *  - Heisenberg: one exact exp(-i theta (XX + YY + ZZ)) gate per entangler
 *    pair and nothing else.
 *
 * Pair angles follow phi(x_j, x_j') = (pi - x_j)(pi - x_j'), and the ZZ block
 * is decomposed as CNOT . R_z(2 theta) . CNOT, which equals exp(-i theta Z@Z)
 * exactly under the R_z(theta) = exp(-i theta Z / 2) convention.
 */

#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qksvm/circuit.hpp"
#include "qksvm/util.hpp"

namespace qksvm {

using FeatureVector = std::vector<double>;

enum class FeatureMapFamily { Proposed, Iqp, Heisenberg };
enum class EntanglementTopology { Linear, Full };

struct FeatureMapSpec {
    FeatureMapFamily family = FeatureMapFamily::Proposed;
    EntanglementTopology topology = EntanglementTopology::Linear;
    std::size_t reps = 2;
    double rx_angle = kPi / 2.0;
    double angle_scale = 1.0;
};

inline std::string to_string(FeatureMapFamily family) {
    switch (family) {
        case FeatureMapFamily::Proposed: return "proposed";
        case FeatureMapFamily::Iqp: return "iqp";
        case FeatureMapFamily::Heisenberg: return "heisenberg";
    }
    throw std::logic_error("to_string: unknown feature-map family");
}

inline std::string to_string(EntanglementTopology topology) {
    switch (topology) {
        case EntanglementTopology::Linear: return "linear";
        case EntanglementTopology::Full: return "full";
    }
    throw std::logic_error("to_string: unknown entanglement topology");
}

inline FeatureMapFamily family_from_string(const std::string& text) {
    if (text == "proposed") return FeatureMapFamily::Proposed;
    if (text == "iqp") return FeatureMapFamily::Iqp;
    if (text == "heisenberg") return FeatureMapFamily::Heisenberg;
    throw std::invalid_argument("family_from_string: unknown family '" + text + "'");
}

inline EntanglementTopology topology_from_string(const std::string& text) {
    if (text == "linear") return EntanglementTopology::Linear;
    if (text == "full") return EntanglementTopology::Full;
    throw std::invalid_argument("topology_from_string: unknown topology '" + text + "'");
}

/// phi(x_j, x_j') = (pi - x_j)(pi - x_j').
inline double pair_angle(double x_j, double x_jp) {
    return (kPi - x_j) * (kPi - x_jp);
}

/// Linear: chain neighbors (0,1)..(d-2,d-1). Full: all (j,j'), j < j',
/// lexicographic. d = 1 yields an empty sequence for either topology.
inline std::vector<std::pair<std::size_t, std::size_t>> entangler_pairs(
    std::size_t d, EntanglementTopology topology) {
    if (d < 1) {
        throw std::invalid_argument("entangler_pairs: dimension must be positive");
    }
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    if (topology == EntanglementTopology::Linear) {
        for (std::size_t j = 0; j + 1 < d; ++j) {
            pairs.emplace_back(j, j + 1);
        }
    } else {
        for (std::size_t j = 0; j < d; ++j) {
            for (std::size_t jp = j + 1; jp < d; ++jp) {
                pairs.emplace_back(j, jp);
            }
        }
    }
    return pairs;
}

/**
 * exp(-i theta (X@X + Y@Y + Z@Z)) in closed form.
 *
 * The Heisenberg operator has eigenvalue +1 on the triplet {|00>, |11>,
 * (|01>+|10>)/sqrt(2)} and -3 on the singlet (|01>-|10>)/sqrt(2), so the
 * exponential is e^{-i theta} on the triplet and e^{3 i theta} on the
 * singlet. Spelled out on the computational basis that gives e^{-i theta}
 * phases on |00> and |11> and a symmetric 2x2 mixing block in the middle.
 */
inline GateMatrix heisenberg_gate(double theta) {
    const ComplexAmp triplet = std::polar(1.0, -theta);
    const ComplexAmp singlet = std::polar(1.0, 3.0 * theta);
    const ComplexAmp c = 0.5 * (triplet + singlet);
    const ComplexAmp s = 0.5 * (triplet - singlet);
    GateMatrix g;
    g.arity = 2;
    g.name = "HEIS";
    g.m[0 * 4 + 0] = triplet;
    g.m[1 * 4 + 1] = c;
    g.m[1 * 4 + 2] = s;
    g.m[2 * 4 + 1] = s;
    g.m[2 * 4 + 2] = c;
    g.m[3 * 4 + 3] = triplet;
    return g;
}

namespace detail {

inline void add_zz_block(CircuitDescription& circuit, std::size_t j, std::size_t jp,
                         double angle) {
    circuit.add(gates::cnot(), j, jp);
    circuit.add(gates::rz(2.0 * angle), jp);
    circuit.add(gates::cnot(), j, jp);
}

}  // namespace detail

/// Builds the encoding circuit U_phi(x) for one data vector.
inline CircuitDescription build_feature_circuit(const FeatureMapSpec& spec,
                                                const FeatureVector& x) {
    const std::size_t d = x.size();
    if (d < 1) {
        throw std::invalid_argument("build_feature_circuit: feature vector is empty");
    }
    if (d > kMaxQubits) {
        throw std::invalid_argument("build_feature_circuit: dimension exceeds qubit capacity");
    }
    if (spec.reps < 1) {
        throw std::invalid_argument("build_feature_circuit: reps must be >= 1");
    }
    for (const double v : x) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("build_feature_circuit: non-finite feature value");
        }
    }

    const auto pairs = entangler_pairs(d, spec.topology);
    CircuitDescription circuit;
    circuit.num_qubits = d;

    for (std::size_t rep = 0; rep < spec.reps; ++rep) {
        switch (spec.family) {
            case FeatureMapFamily::Proposed: {
                if (rep == 0) {
                    for (std::size_t q = 0; q < d; ++q) {
                        circuit.add(gates::hadamard(), q);
                    }
                }
                for (const auto& [j, jp] : pairs) {
                    detail::add_zz_block(circuit, j, jp, pair_angle(x[j], x[jp]));
                }
                for (std::size_t q = 0; q < d; ++q) {
                    circuit.add(gates::rx(spec.rx_angle), q);
                    circuit.add(gates::ry(spec.angle_scale * x[q]), q);
                }
                break;
            }
            case FeatureMapFamily::Iqp: {
                for (std::size_t q = 0; q < d; ++q) {
                    circuit.add(gates::hadamard(), q);
                }
                for (std::size_t q = 0; q < d; ++q) {
                    circuit.add(gates::rz(spec.angle_scale * x[q]), q);
                }
                for (const auto& [j, jp] : pairs) {
                    detail::add_zz_block(circuit, j, jp, pair_angle(x[j], x[jp]));
                }
                break;
            }
            case FeatureMapFamily::Heisenberg: {
                for (const auto& [j, jp] : pairs) {
                    circuit.add(heisenberg_gate(pair_angle(x[j], x[jp])), j, jp);
                }
                break;
            }
        }
    }
    return circuit;
}

}  // namespace qksvm
