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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "oracles/oracles.hpp"
#include "qksvm/circuit.hpp"
#include "qksvm/state_vector.hpp"
#include "qksvm/util.hpp"

using namespace qksvm;

namespace {

double max_amp_diff(const StateVector& a, const StateVector& b) {
    double worst = 0.0;
    for (std::size_t k = 0; k < a.dim(); ++k) {
        worst = std::max(worst, std::abs(a.amp(k) - b.amp(k)));
    }
    return worst;
}

}  // namespace

TEST_CASE("init_zero_state places all weight on the zero index") {
    const StateVector two = init_zero_state(2);
    REQUIRE(two.dim() == 4);
    CHECK(two.amp(0) == ComplexAmp{1.0, 0.0});
    CHECK(two.amp(1) == ComplexAmp{0.0, 0.0});
    CHECK(two.amp(2) == ComplexAmp{0.0, 0.0});
    CHECK(two.amp(3) == ComplexAmp{0.0, 0.0});

    const StateVector one = init_zero_state(1);
    REQUIRE(one.dim() == 2);
    CHECK(one.amp(0) == ComplexAmp{1.0, 0.0});
    CHECK(one.amp(1) == ComplexAmp{0.0, 0.0});

    CHECK_THROWS_AS(init_zero_state(25), std::out_of_range);
    CHECK_THROWS_AS(init_zero_state(0), std::out_of_range);
}

TEST_CASE("named gates are unitary") {
    CHECK(is_unitary(gates::hadamard()));
    CHECK(is_unitary(gates::pauli_x()));
    CHECK(is_unitary(gates::pauli_y()));
    CHECK(is_unitary(gates::pauli_z()));
    CHECK(is_unitary(gates::rx(0.7)));
    CHECK(is_unitary(gates::ry(-2.3)));
    CHECK(is_unitary(gates::rz(5.1)));
    CHECK(is_unitary(gates::cnot()));
}

TEST_CASE("Hadamard on qubit 0 creates the even superposition") {
    StateVector state = init_zero_state(1);
    apply_gate(state, gates::hadamard(), {0});
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(state.amp(0) - ComplexAmp{s, 0.0}) < 1e-15);
    CHECK(std::abs(state.amp(1) - ComplexAmp{s, 0.0}) < 1e-15);
}

TEST_CASE("CNOT with control qubit 1 maps index 2 to index 3") {
    StateVector state = init_zero_state(2);
    apply_gate(state, gates::pauli_x(), {1});  // |10> = index 2
    REQUIRE(std::abs(state.amp(2) - ComplexAmp{1.0, 0.0}) < 1e-15);
    apply_gate(state, gates::cnot(), {1, 0});  // control = first target
    CHECK(std::abs(state.amp(3) - ComplexAmp{1.0, 0.0}) < 1e-15);
    CHECK(std::abs(state.amp(2)) < 1e-15);
}

TEST_CASE("R_z on |0> changes only the global phase") {
    StateVector state = init_zero_state(1);
    apply_gate(state, gates::rz(1.234), {0});
    CHECK(zero_probability(state) == Catch::Approx(1.0).margin(1e-12));
    CHECK(std::abs(std::abs(state.amp(0)) - 1.0) < 1e-12);
}

TEST_CASE("apply_gate validates arity and targets") {
    StateVector state = init_zero_state(2);
    CHECK_THROWS_AS(apply_gate(state, gates::hadamard(), {0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(apply_gate(state, gates::cnot(), {0}), std::invalid_argument);
    CHECK_THROWS_AS(apply_gate(state, gates::cnot(), {0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(apply_gate(state, gates::hadamard(), {2}), std::invalid_argument);
}

TEST_CASE("empty circuit leaves the state unchanged") {
    StateVector state = init_zero_state(3);
    CircuitDescription circuit;
    circuit.num_qubits = 3;
    apply_circuit(state, circuit);
    CHECK(std::abs(state.amp(0) - ComplexAmp{1.0, 0.0}) < 1e-15);
    CHECK(state.norm_sq() == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("H followed by H restores |0>") {
    StateVector state = init_zero_state(1);
    CircuitDescription circuit;
    circuit.num_qubits = 1;
    circuit.add(gates::hadamard(), 0);
    circuit.add(gates::hadamard(), 0);
    apply_circuit(state, circuit);
    CHECK(std::abs(state.amp(0) - ComplexAmp{1.0, 0.0}) < 1e-12);
    CHECK(std::abs(state.amp(1)) < 1e-12);
}

TEST_CASE("apply_circuit rejects a qubit-count mismatch") {
    StateVector state = init_zero_state(2);
    CircuitDescription circuit;
    circuit.num_qubits = 3;
    CHECK_THROWS_AS(apply_circuit(state, circuit), std::invalid_argument);
}

TEST_CASE("adjoint of a Hadamard op is a Hadamard") {
    CircuitDescription circuit;
    circuit.num_qubits = 1;
    circuit.add(gates::hadamard(), 0);
    const CircuitDescription adj = adjoint_circuit(circuit);
    REQUIRE(adj.ops.size() == 1);
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(std::abs(adj.ops[0].gate.m[k] - circuit.ops[0].gate.m[k]) < 1e-15);
    }
}

TEST_CASE("adjoint of an R_z sequence is the reversed R_z(-theta) sequence") {
    CircuitDescription circuit;
    circuit.num_qubits = 2;
    circuit.add(gates::rz(0.3), 0);
    circuit.add(gates::rz(1.1), 1);
    const CircuitDescription adj = adjoint_circuit(circuit);
    REQUIRE(adj.ops.size() == 2);
    CHECK(adj.ops[0].targets[0] == 1);
    CHECK(adj.ops[1].targets[0] == 0);
    const GateMatrix expected_first = gates::rz(-1.1);
    const GateMatrix expected_second = gates::rz(-0.3);
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(std::abs(adj.ops[0].gate.m[k] - expected_first.m[k]) < 1e-15);
        CHECK(std::abs(adj.ops[1].gate.m[k] - expected_second.m[k]) < 1e-15);
    }
}

TEST_CASE("circuit followed by its adjoint is the identity") {
    Rng rng(20260816);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 1 + rng.bounded(4);
        const CircuitDescription circuit = oracles::random_circuit(n, 12, rng);
        StateVector state = init_zero_state(n);
        apply_circuit(state, circuit);
        apply_circuit(state, adjoint_circuit(circuit));
        const StateVector reference = init_zero_state(n);
        CHECK(max_amp_diff(state, reference) < 1e-10);
    }
}

TEST_CASE("inner products match their closed forms") {
    StateVector psi = init_zero_state(2);
    apply_gate(psi, gates::hadamard(), {0});
    apply_gate(psi, gates::ry(0.8), {1});
    CHECK(std::abs(inner_product(psi, psi) - ComplexAmp{1.0, 0.0}) < 1e-12);

    StateVector zero2 = init_zero_state(2);
    StateVector ones = init_zero_state(2);
    apply_gate(ones, gates::pauli_x(), {0});
    apply_gate(ones, gates::pauli_x(), {1});
    CHECK(std::abs(inner_product(zero2, ones)) < 1e-15);

    StateVector zero1 = init_zero_state(1);
    StateVector h0 = init_zero_state(1);
    apply_gate(h0, gates::hadamard(), {0});
    CHECK(std::abs(inner_product(zero1, h0) - ComplexAmp{1.0 / std::sqrt(2.0), 0.0}) < 1e-12);

    CHECK_THROWS_AS(inner_product(zero1, zero2), std::invalid_argument);
}

TEST_CASE("zero_probability reads the all-zeros amplitude") {
    StateVector state = init_zero_state(3);
    CHECK(zero_probability(state) == 1.0);

    apply_gate(state, gates::pauli_x(), {1});
    CHECK(zero_probability(state) == 0.0);

    StateVector h0 = init_zero_state(1);
    apply_gate(h0, gates::hadamard(), {0});
    CHECK(zero_probability(h0) == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("probabilities over all outcomes sum to one") {
    Rng rng(77);
    const CircuitDescription circuit = oracles::random_circuit(3, 15, rng);
    StateVector state = init_zero_state(3);
    apply_circuit(state, circuit);
    double tail = 0.0;
    for (std::size_t k = 1; k < state.dim(); ++k) {
        tail += std::norm(state.amp(k));
    }
    CHECK(zero_probability(state) + tail == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("sample_counts is deterministic and concentrates correctly") {
    StateVector basis1 = init_zero_state(2);
    apply_gate(basis1, gates::pauli_x(), {0});  // |01> = index 1
    const auto counts = sample_counts(basis1, 100, 9);
    REQUIRE(counts.size() == 1);
    CHECK(counts.at(1) == 100);

    StateVector h0 = init_zero_state(1);
    apply_gate(h0, gates::hadamard(), {0});
    const auto a = sample_counts(h0, 512, 1234);
    const auto b = sample_counts(h0, 512, 1234);
    CHECK(a == b);

    const auto big = sample_counts(h0, 8192, 5);
    std::size_t zeros = big.count(0) ? big.at(0) : 0;
    const double freq = static_cast<double>(zeros) / 8192.0;
    CHECK(std::abs(freq - 0.5) <= 4.0 * std::sqrt(0.25 / 8192.0));

    std::size_t total = 0;
    for (const auto& [idx, c] : big) {
        total += c;
    }
    CHECK(total == 8192);
}

TEST_CASE("strided application matches the dense tensor oracle") {
    Rng rng(424242);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 1 + rng.bounded(3);
        const CircuitDescription circuit = oracles::random_circuit(n, 20, rng);
        StateVector fast = init_zero_state(n);
        apply_circuit(fast, circuit);
        const StateVector slow = oracles::dense_apply_circuit(init_zero_state(n), circuit);
        CHECK(max_amp_diff(fast, slow) < 1e-12);
    }
}

TEST_CASE("random circuits preserve the norm") {
    Rng rng(31337);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n = 1 + rng.bounded(6);
        const CircuitDescription circuit = oracles::random_circuit(n, 50, rng);
        StateVector state = init_zero_state(n);
        apply_circuit(state, circuit);
        CHECK(std::abs(state.norm_sq() - 1.0) <= 1e-10);
    }
}

TEST_CASE("two-qubit gates act on nonadjacent and reversed target orders") {
    // CNOT(control=2, target=0) on |100> (index 4) flips qubit 0 -> index 5.
    StateVector state = init_zero_state(3);
    apply_gate(state, gates::pauli_x(), {2});
    apply_gate(state, gates::cnot(), {2, 0});
    CHECK(std::abs(state.amp(5) - ComplexAmp{1.0, 0.0}) < 1e-15);

    // Same gate through the dense oracle.
    StateVector again = init_zero_state(3);
    apply_gate(again, gates::pauli_x(), {2});
    const StateVector slow = oracles::dense_apply(again, gates::cnot(), {2, 0});
    CHECK(std::abs(slow.amp(5) - ComplexAmp{1.0, 0.0}) < 1e-15);
}
