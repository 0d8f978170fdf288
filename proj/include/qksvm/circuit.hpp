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
 * Gate matrices, circuit descriptions and in-place strided application.
 *
 * Gates are applied over the amplitude array in strided 2x2 / 4x4 blocks;
 * the full 2^n x 2^n matrix is never formed here. Rotation convention:
 * R_a(theta) = exp(-i theta/2 a) for a in {X, Y, Z}. For two-qubit gates
 * the first listed target is the low bit of the 4x4 local index.
 */

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qksvm/state_vector.hpp"

namespace qksvm {

struct GateMatrix {
    int arity = 1;                      // 1 or 2
    std::array<ComplexAmp, 16> m{};    // row-major; a 2x2 occupies m[0..3]
    std::string name;

    std::size_t dim() const { return arity == 1 ? 2 : 4; }

    ComplexAmp entry(std::size_t r, std::size_t c) const { return m[r * dim() + c]; }

    GateMatrix adjoint() const {
        GateMatrix out;
        out.arity = arity;
        out.name = name + "†";
        const std::size_t d = dim();
        for (std::size_t r = 0; r < d; ++r) {
            for (std::size_t c = 0; c < d; ++c) {
                out.m[r * d + c] = std::conj(entry(c, r));
            }
        }
        return out;
    }
};

/// Max elementwise deviation of G†G from the identity.
inline double unitarity_defect(const GateMatrix& g) {
    const std::size_t d = g.dim();
    double worst = 0.0;
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = 0; c < d; ++c) {
            ComplexAmp acc{0.0, 0.0};
            for (std::size_t k = 0; k < d; ++k) {
                acc += std::conj(g.entry(k, r)) * g.entry(k, c);
            }
            const ComplexAmp expected = r == c ? ComplexAmp{1.0, 0.0} : ComplexAmp{0.0, 0.0};
            worst = std::max(worst, std::abs(acc - expected));
        }
    }
    return worst;
}

inline bool is_unitary(const GateMatrix& g, double tol = 1e-10) {
    return unitarity_defect(g) <= tol;
}

namespace gates {

inline GateMatrix make1(std::string name, ComplexAmp a, ComplexAmp b, ComplexAmp c,
                        ComplexAmp d) {
    GateMatrix g;
    g.arity = 1;
    g.name = std::move(name);
    g.m[0] = a;
    g.m[1] = b;
    g.m[2] = c;
    g.m[3] = d;
    return g;
}

inline GateMatrix hadamard() {
    const double s = 1.0 / std::sqrt(2.0);
    return make1("H", {s, 0}, {s, 0}, {s, 0}, {-s, 0});
}

inline GateMatrix pauli_x() { return make1("X", {0, 0}, {1, 0}, {1, 0}, {0, 0}); }
inline GateMatrix pauli_y() { return make1("Y", {0, 0}, {0, -1}, {0, 1}, {0, 0}); }
inline GateMatrix pauli_z() { return make1("Z", {1, 0}, {0, 0}, {0, 0}, {-1, 0}); }

inline GateMatrix rx(double theta) {
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    return make1("RX", {c, 0}, {0, -s}, {0, -s}, {c, 0});
}

inline GateMatrix ry(double theta) {
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    return make1("RY", {c, 0}, {-s, 0}, {s, 0}, {c, 0});
}

inline GateMatrix rz(double theta) {
    const ComplexAmp lo = std::polar(1.0, -theta / 2.0);
    const ComplexAmp hi = std::polar(1.0, theta / 2.0);
    return make1("RZ", lo, {0, 0}, {0, 0}, hi);
}

/// CNOT with control = first target (local bit 0), target = second.
inline GateMatrix cnot() {
    GateMatrix g;
    g.arity = 2;
    g.name = "CNOT";
    for (std::size_t b0 = 0; b0 < 2; ++b0) {
        for (std::size_t b1 = 0; b1 < 2; ++b1) {
            const std::size_t src = (b1 << 1) | b0;
            const std::size_t dst = ((b1 ^ b0) << 1) | b0;
            g.m[dst * 4 + src] = ComplexAmp{1.0, 0.0};
        }
    }
    return g;
}

}  // namespace gates

struct CircuitOp {
    GateMatrix gate;
    std::array<std::size_t, 2> targets{0, 0};  // targets[1] unused for arity 1
};

struct CircuitDescription {
    std::size_t num_qubits = 0;
    std::vector<CircuitOp> ops;

    void add(GateMatrix gate, std::size_t t0) {
        validate_targets(gate, t0, 0, /*two=*/false);
        ops.push_back({std::move(gate), {t0, 0}});
    }
    void add(GateMatrix gate, std::size_t t0, std::size_t t1) {
        validate_targets(gate, t0, t1, /*two=*/true);
        ops.push_back({std::move(gate), {t0, t1}});
    }

  private:
    void validate_targets(const GateMatrix& gate, std::size_t t0, std::size_t t1, bool two) const {
        if ((gate.arity == 2) != two) {
            throw std::invalid_argument("CircuitDescription: gate arity does not match targets");
        }
        if (t0 >= num_qubits || (two && t1 >= num_qubits)) {
            throw std::invalid_argument("CircuitDescription: target out of range");
        }
        if (two && t0 == t1) {
            throw std::invalid_argument("CircuitDescription: two-qubit targets must be distinct");
        }
    }
};

namespace detail {

/// Inserts a 0 bit at position k, shifting higher bits left.
inline std::size_t expand_bit(std::size_t x, std::size_t k) {
    const std::size_t low_mask = (std::size_t{1} << k) - 1;
    return ((x & ~low_mask) << 1) | (x & low_mask);
}

inline void apply_1q(std::vector<ComplexAmp>& amps, const GateMatrix& g, std::size_t target) {
    const std::size_t bit = std::size_t{1} << target;
    const std::size_t half = amps.size() >> 1;
    const ComplexAmp m00 = g.m[0], m01 = g.m[1], m10 = g.m[2], m11 = g.m[3];
    for (std::size_t i = 0; i < half; ++i) {
        const std::size_t i0 = expand_bit(i, target);
        const std::size_t i1 = i0 | bit;
        const ComplexAmp a0 = amps[i0];
        const ComplexAmp a1 = amps[i1];
        amps[i0] = m00 * a0 + m01 * a1;
        amps[i1] = m10 * a0 + m11 * a1;
    }
}

inline void apply_2q(std::vector<ComplexAmp>& amps, const GateMatrix& g, std::size_t t0,
                     std::size_t t1) {
    const std::size_t lo = std::min(t0, t1);
    const std::size_t hi = std::max(t0, t1);
    const std::size_t quarter = amps.size() >> 2;
    const std::size_t bit0 = std::size_t{1} << t0;
    const std::size_t bit1 = std::size_t{1} << t1;
    for (std::size_t i = 0; i < quarter; ++i) {
        const std::size_t base = expand_bit(expand_bit(i, lo), hi);
        const std::array<std::size_t, 4> idx{base, base | bit0, base | bit1, base | bit0 | bit1};
        std::array<ComplexAmp, 4> in;
        for (std::size_t k = 0; k < 4; ++k) {
            in[k] = amps[idx[k]];
        }
        for (std::size_t r = 0; r < 4; ++r) {
            ComplexAmp acc{0.0, 0.0};
            for (std::size_t c = 0; c < 4; ++c) {
                acc += g.m[r * 4 + c] * in[c];
            }
            amps[idx[r]] = acc;
        }
    }
}

}  // namespace detail

/// Applies one gate in place over the target subspace.
inline void apply_gate(StateVector& state, const GateMatrix& gate,
                       std::span<const std::size_t> targets) {
    const std::size_t n = state.num_qubits();
    if (static_cast<std::size_t>(gate.arity) != targets.size()) {
        throw std::invalid_argument("apply_gate: gate arity does not match target count");
    }
    for (const std::size_t t : targets) {
        if (t >= n) {
            throw std::invalid_argument("apply_gate: target out of range");
        }
    }
    if (gate.arity == 1) {
        detail::apply_1q(state.amps(), gate, targets[0]);
        return;
    }
    if (targets[0] == targets[1]) {
        throw std::invalid_argument("apply_gate: two-qubit targets must be distinct");
    }
    detail::apply_2q(state.amps(), gate, targets[0], targets[1]);
}

inline void apply_gate(StateVector& state, const GateMatrix& gate,
                       std::initializer_list<std::size_t> targets) {
    apply_gate(state, gate, std::span<const std::size_t>(targets.begin(), targets.size()));
}

/// Applies all ops of a circuit in order.
inline void apply_circuit(StateVector& state, const CircuitDescription& circuit) {
    if (circuit.num_qubits != state.num_qubits()) {
        throw std::invalid_argument("apply_circuit: qubit counts differ");
    }
    for (const auto& op : circuit.ops) {
        if (op.gate.arity == 1) {
            detail::apply_1q(state.amps(), op.gate, op.targets[0]);
        } else {
            detail::apply_2q(state.amps(), op.gate, op.targets[0], op.targets[1]);
        }
    }
}

/// Reverses the op order and conjugate-transposes each gate.
inline CircuitDescription adjoint_circuit(const CircuitDescription& circuit) {
    CircuitDescription out;
    out.num_qubits = circuit.num_qubits;
    out.ops.reserve(circuit.ops.size());
    for (auto it = circuit.ops.rbegin(); it != circuit.ops.rend(); ++it) {
        out.ops.push_back({it->gate.adjoint(), it->targets});
    }
    return out;
}

}  // namespace qksvm
