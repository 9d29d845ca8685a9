// Copyright 2026 The nvnode Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "nvnode/node.h"

using namespace nvnode;

namespace {

const double kPi = std::numbers::pi;

NoiseModel quiet() { return NoiseModel::ideal(); }

QuantumState node_state(Backend b) { return QuantumState::zero(kNodeQubits, b); }

size_t idx(int e, int c1, int c2, int c3, int p) { return e | c1 << 1 | c2 << 2 | c3 << 3 | p << 4; }

double sq(double x) { return x * x; }

}  // namespace

TEST(noise_model, defaults_and_parse) {
    NoiseModel n;
    EXPECT_DOUBLE_EQ(n.readout_bright_fid, 0.809);
    EXPECT_DOUBLE_EQ(n.readout_dark_fid, 0.988);
    EXPECT_DOUBLE_EQ(n.round_duration_ms, 5.0);
    EXPECT_DOUBLE_EQ(n.herald_prob, 0.01);
    auto parsed = parse_noise_model("# comment\np_gate_ec = 0.02\nmzi_visibility=0.8\n\n");
    EXPECT_DOUBLE_EQ(parsed.p_gate_ec, 0.02);
    EXPECT_DOUBLE_EQ(parsed.mzi_visibility, 0.8);
    EXPECT_THROW(parse_noise_model("p_gate_ecc = 0.1\n"), std::invalid_argument);
    EXPECT_THROW(parse_noise_model("p_gate_ec = 0.1\np_gate_ec = 0.2\n"), std::invalid_argument);
    EXPECT_THROW(parse_noise_model("p_gate_ec = 1.5\n"), std::invalid_argument);
    EXPECT_THROW(parse_noise_model("round_duration_ms = 0\n"), std::invalid_argument);
    EXPECT_THROW(parse_noise_model("p_gate_ec 0.1\n"), std::invalid_argument);
    EXPECT_THROW(load_noise_model("/nonexistent/noise.txt"), std::runtime_error);
}

TEST(noise_model, format_round_trips) {
    NoiseModel n;
    n.p_gate_e = 0.0123456789;
    n.mzi_visibility = 0.91;
    auto back = parse_noise_model(format_noise_model(n));
    EXPECT_EQ(back.fields(), n.fields());
}

TEST(confusion, columns_and_inverse) {
    ConfusionMatrix c(0.809, 0.988);
    EXPECT_NEAR(c(0, 0) + c(1, 0), 1.0, 1e-15);
    EXPECT_NEAR(c(0, 1) + c(1, 1), 1.0, 1e-15);
    auto inv = c.inverse();
    for (int r = 0; r < 2; ++r) {
        for (int k = 0; k < 2; ++k) {
            double s = inv[r][0] * c(0, k) + inv[r][1] * c(1, k);
            EXPECT_NEAR(s, r == k ? 1.0 : 0.0, 1e-14);
        }
    }
    EXPECT_THROW(ConfusionMatrix(0.5, 0.5).inverse(), std::domain_error);
    auto parity = ConfusionMatrix::parity(NoiseModel{});
    EXPECT_DOUBLE_EQ(parity(0, 0), 0.988);
    EXPECT_DOUBLE_EQ(parity(1, 1), 0.809);
}

TEST(register_layout, node_roles) {
    auto r = RegisterLayout::node();
    EXPECT_EQ(r.interface_qubit(), kElectron);
    EXPECT_EQ(r.flying_qubit(), kPhoton);
    EXPECT_EQ(r.memory_qubits().size(), 3u);
    EXPECT_THROW(RegisterLayout({kElectron, kCarbon1}), std::invalid_argument);
    EXPECT_THROW(RegisterLayout({kElectron, kElectron, kPhoton}), std::invalid_argument);
}

TEST(mw_rotation, pi_and_half_pi) {
    Rng rng(1);
    auto s = node_state(Backend::PureVector);
    mw_rotation(s, Axis::X, kPi, quiet(), rng);
    EXPECT_NEAR(s.probabilities()[idx(1, 0, 0, 0, 0)], 1.0, 1e-14);

    auto h = node_state(Backend::PureVector);
    mw_rotation(h, Axis::X, kPi / 2, quiet(), rng);
    EXPECT_LT(std::abs(h.amplitudes()[0] - Complex(1 / std::sqrt(2.0), 0)), 1e-14);
    EXPECT_LT(std::abs(h.amplitudes()[1] - Complex(0, -1 / std::sqrt(2.0))), 1e-14);
}

TEST(mw_rotation, noisy_pi_pulse) {
    Rng rng(1);
    NoiseModel n = quiet();
    n.p_gate_e = 0.01;
    auto s = node_state(Backend::DensityMatrix);
    mw_rotation(s, Axis::X, kPi, n, rng);
    EXPECT_NEAR(s.expectation(PauliString("ZIIII")), -0.99, 1e-12);
}

TEST(conditional_rotation, branches) {
    Rng rng(1);
    auto s = node_state(Backend::PureVector);
    conditional_nuclear_rotation(s, kCarbon1, quiet(), rng);
    EXPECT_LT(std::abs(s.amplitudes()[idx(0, 0, 0, 0, 0)] - Complex(1 / std::sqrt(2.0), 0)), 1e-14);
    EXPECT_LT(std::abs(s.amplitudes()[idx(0, 1, 0, 0, 0)] - Complex(0, -1 / std::sqrt(2.0))), 1e-14);

    auto t = node_state(Backend::PureVector);
    conditional_nuclear_rotation(t, kCarbon2, quiet(), rng);
    conditional_nuclear_rotation(t, kCarbon2, quiet(), rng);
    EXPECT_NEAR(t.probabilities()[idx(0, 0, 1, 0, 0)], 1.0, 1e-14);

    EXPECT_THROW(conditional_nuclear_rotation(t, kPhoton, quiet(), rng), std::invalid_argument);
    EXPECT_THROW(conditional_nuclear_rotation(t, kElectron, quiet(), rng), std::invalid_argument);
}

TEST(conditional_rotation, superposed_electron_matches_matrix_product) {
    Rng rng(1);
    auto s = node_state(Backend::PureVector);
    s.apply_unitary(gates::hadamard(), {kElectron.index});
    conditional_nuclear_rotation(s, kCarbon1, quiet(), rng);
    // Hand-written 4x4 on (e, c), local index e + 2c:
    // |0>_e -> R_X(pi/2) on c, |1>_e -> R_X(-pi/2) on c.
    const double r = 1 / std::sqrt(2.0);
    Eigen::Matrix4cd u = Eigen::Matrix4cd::Zero();
    u(0, 0) = r;
    u(2, 0) = Complex(0, -r);
    u(0, 2) = Complex(0, -r);
    u(2, 2) = r;
    u(1, 1) = r;
    u(3, 1) = Complex(0, r);
    u(1, 3) = Complex(0, r);
    u(3, 3) = r;
    Eigen::Vector4cd in(r, r, 0, 0);
    Eigen::Vector4cd out = u * in;
    for (int e = 0; e < 2; ++e) {
        for (int c = 0; c < 2; ++c) {
            EXPECT_LT(std::abs(s.amplitudes()[idx(e, c, 0, 0, 0)] - out(e + 2 * c)), 1e-14);
        }
    }
    EXPECT_NEAR(s.expectation(PauliString("ZZIII")), 0.0, 1e-14);
    // X_e Y_c commutes with exp(-i pi/4 Z_e X_c) and stays 0; the
    // entanglement shows up in Y_e X_c and Z_e Y_c instead.
    EXPECT_NEAR(s.expectation(PauliString("XYIII")), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(s.expectation(PauliString("YXIII"))), 1.0, 1e-14);
    EXPECT_NEAR(std::abs(s.expectation(PauliString("ZYIII"))), 1.0, 1e-14);
}

TEST(composed_gates, cnot_and_swap) {
    Rng rng(1);
    auto s = QuantumState::basis(kNodeQubits, idx(1, 0, 0, 0, 0), Backend::PureVector);
    cnot_gate(s, kElectron, kCarbon1, quiet(), rng);
    EXPECT_NEAR(s.probabilities()[idx(1, 1, 0, 0, 0)], 1.0, 1e-14);
    EXPECT_THROW(cnot_gate(s, kCarbon1, kCarbon1, quiet(), rng), std::invalid_argument);

    Rng urng(42);
    for (int trial = 0; trial < 10; ++trial) {
        auto t = node_state(Backend::PureVector);
        Matrix u = gates::ry(urng.uniform() * kPi) * gates::rz(urng.uniform() * 2 * kPi);
        t.apply_unitary(u, {kElectron.index});
        swap_gate(t, kElectron, kCarbon3, quiet(), rng);
        auto ref = node_state(Backend::PureVector);
        ref.apply_unitary(u, {kCarbon3.index});
        EXPECT_NEAR(t.fidelity_to(ref.amplitudes()), 1.0, 1e-12);
    }
}

TEST(composed_gates, noisy_swap_matches_composed_channel) {
    // Entanglement fidelity of the noisy SWAP on (e, c3), probed with Bell
    // pairs e-c1 and c3-c2, against a 16x16 superoperator product.
    const double p = 0.02;
    NoiseModel n = quiet();
    n.p_gate_ec = p;
    Rng rng(1);
    auto s = node_state(Backend::DensityMatrix);
    for (auto [a, b] : {std::pair{kElectron, kCarbon1}, std::pair{kCarbon3, kCarbon2}}) {
        s.apply_unitary(gates::hadamard(), {a.index});
        s.apply_unitary(gates::cnot(), {a.index, b.index});
    }
    auto ideal = node_state(Backend::PureVector);
    for (auto [a, b] : {std::pair{kElectron, kCarbon1}, std::pair{kCarbon3, kCarbon2}}) {
        ideal.apply_unitary(gates::hadamard(), {a.index});
        ideal.apply_unitary(gates::cnot(), {a.index, b.index});
    }
    ideal.apply_unitary(gates::swap(), {kElectron.index, kCarbon3.index});
    swap_gate(s, kElectron, kCarbon3, n, rng);
    double fe_sim = s.fidelity_to(ideal.amplitudes());

    // Oracle: S = D^3 * S_swap with column-stacked vec(rho), d = 4.
    const int d = 4;
    Matrix sw = gates::swap();
    Matrix s_swap = gates::kron(sw.conjugate(), sw);
    Matrix dep = Matrix::Zero(d * d, d * d);
    for (int i = 0; i < d * d; ++i) {
        dep(i, i) = 1.0 - p;
    }
    // Trace-and-replace: vec(I/d) * vec(I)^T.
    for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c) {
            dep(r * d + r, c * d + c) += p / d;
        }
    }
    Matrix total = dep * dep * dep * s_swap;
    double fe_oracle = (s_swap.adjoint() * total).trace().real() / (d * d);
    EXPECT_NEAR(fe_sim, fe_oracle, 1e-10);
    double favg_sim = (d * fe_sim + 1) / (d + 1);
    double favg_oracle = (d * fe_oracle + 1) / (d + 1);
    EXPECT_NEAR(favg_sim, favg_oracle, 1e-10);
}

TEST(emission, single_branch_and_bell) {
    Rng rng(1);
    NodeState n0 = NodeState::fresh(Backend::PureVector);
    emit_time_bin(n0, quiet(), rng, true);
    EXPECT_NEAR(n0.q.probabilities()[idx(0, 0, 0, 0, 0)], 1.0, 1e-14);
    EXPECT_THROW(emit_time_bin(n0, quiet(), rng, true), std::logic_error);

    NodeState b = NodeState::fresh(Backend::PureVector);
    b.q.apply_unitary(gates::hadamard(), {kElectron.index});
    emit_time_bin(b, quiet(), rng, true);
    EXPECT_NEAR(b.q.expectation(PauliString("ZIIIZ")), 1.0, 1e-14);
    EXPECT_NEAR(b.q.probabilities()[idx(0, 0, 0, 0, 0)], 0.5, 1e-14);
    EXPECT_NEAR(b.q.probabilities()[idx(1, 0, 0, 0, 1)], 0.5, 1e-14);
    // Coherent: X_e X_p has unit modulus.
    EXPECT_NEAR(std::abs(b.q.expectation(PauliString("XIIIX"))), 1.0, 1e-12);

    NodeState a = NodeState::fresh(Backend::PureVector);
    a.q.apply_unitary(gates::hadamard(), {kElectron.index});
    emit_time_bin(a, quiet(), rng, false);
    EXPECT_NEAR(a.q.expectation(PauliString("ZIIIZ")), -1.0, 1e-14);
}

TEST(emission, commutes_with_memory_unitaries) {
    Rng rng(3), urng(5);
    Matrix u = gates::ry(1.1) * gates::rx(0.4);
    for (bool restore : {true, false}) {
        NodeState a = NodeState::fresh(Backend::PureVector), b = NodeState::fresh(Backend::PureVector);
        for (auto *n : {&a, &b}) {
            n->q.apply_unitary(gates::ry(0.8), {kElectron.index});
            n->q.apply_unitary(gates::cnot(), {kElectron.index, kCarbon2.index});
        }
        a.q.apply_unitary(u, {kCarbon1.index});
        emit_time_bin(a, quiet(), rng, restore);
        emit_time_bin(b, quiet(), rng, restore);
        b.q.apply_unitary(u, {kCarbon1.index});
        EXPECT_NEAR(a.q.fidelity_to(b.q.amplitudes()), 1.0, 1e-12);
    }
}

TEST(readout, confusion_statistics) {
    NoiseModel n;
    const int shots = 100000;
    for (int truth : {0, 1}) {
        int correct = 0;
        for (int k = 0; k < shots; ++k) {
            Rng rng(17, streams::kTest + truth, k);
            auto s = QuantumState::basis(kNodeQubits, truth, Backend::PureVector);
            auto r = fluorescence_readout(s, n, rng);
            EXPECT_EQ(r.projected, truth);
            correct += r.reported == truth;
        }
        double f = static_cast<double>(correct) / shots;
        double expected = truth == 0 ? 0.809 : 0.988;
        EXPECT_NEAR(f, expected, 4 * std::sqrt(expected * (1 - expected) / shots));
    }
}

TEST(readout, ideal_confusion_is_born_rule) {
    NoiseModel n = quiet();
    const int shots = 20000;
    int zeros = 0;
    for (int k = 0; k < shots; ++k) {
        Rng rng(23, streams::kTest, k);
        auto s = node_state(Backend::PureVector);
        s.apply_unitary(gates::ry(2 * std::acos(std::sqrt(0.3))), {kElectron.index});
        auto r = fluorescence_readout(s, n, rng);
        EXPECT_EQ(r.reported, r.projected);
        zeros += r.reported == 0;
    }
    EXPECT_NEAR(static_cast<double>(zeros) / shots, 0.3, 4 * std::sqrt(0.21 / shots));
}

TEST(readout, exact_branches_sum_to_state) {
    NoiseModel n;
    auto s = node_state(Backend::DensityMatrix);
    s.apply_unitary(gates::ry(0.9), {kElectron.index});
    auto br = fluorescence_branches(s, n);
    double p0 = std::pow(std::cos(0.45), 2);
    EXPECT_NEAR(br[0].trace(), 0.809 * p0 + 0.012 * (1 - p0), 1e-12);
    EXPECT_NEAR(br[0].trace() + br[1].trace(), 1.0, 1e-12);
}

TEST(reset, electron_reset) {
    Rng rng(1);
    NoiseModel n = quiet();
    auto s = QuantumState::basis(kNodeQubits, idx(1, 0, 0, 0, 0), Backend::PureVector);
    reset_electron(s, n, rng);
    EXPECT_NEAR(s.probabilities()[0], 1.0, 1e-14);

    auto m = node_state(Backend::DensityMatrix);
    m.apply_channel(channels::depolarizing(1.0, 1), {kElectron.index}, rng);
    reset_electron(m, n, rng);
    EXPECT_NEAR(m.expectation(PauliString("ZIIII")), 1.0, 1e-14);

    n.reset_error = 0.05;
    auto e = node_state(Backend::DensityMatrix);
    reset_electron(e, n, rng);
    EXPECT_NEAR(e.expectation(PauliString("ZIIII")), 0.9, 1e-12);
}

TEST(idle_noise, values) {
    Rng rng(1);
    NoiseModel n = quiet();
    auto s = node_state(Backend::DensityMatrix);
    Matrix before = s.density_matrix();
    apply_idle_round_noise(s, n, rng);
    EXPECT_LT((before - s.density_matrix()).norm(), 1e-14);

    n.p_flip_round = 0.05;
    apply_idle_round_noise(s, n, rng);
    auto p = s.probabilities();
    double w1 = p[idx(0, 1, 0, 0, 0)] + p[idx(0, 0, 1, 0, 0)] + p[idx(0, 0, 0, 1, 0)];
    EXPECT_NEAR(w1, 3 * 0.05 * sq(0.95), 1e-12);
    EXPECT_NEAR(3 * 0.05 * sq(0.95), 0.135375, 1e-15);

    NoiseModel ph = quiet();
    ph.p_phase_round = 0.5;
    auto x = node_state(Backend::DensityMatrix);
    x.apply_unitary(gates::hadamard(), {kCarbon1.index});
    apply_idle_round_noise(x, ph, rng);
    EXPECT_NEAR(x.expectation(PauliString("IXIII")), 0.0, 1e-14);
}

TEST(gates, noiseless_model_reduces_to_ideal_unitaries) {
    // A circuit through apply_circuit with NoiseModel::ideal() and explicit
    // unitaries agree to 1e-12 on both backends.
    std::vector<GateSpec> c = {GateSpec::mw(Axis::Y, kPi / 2), GateSpec::cond_rot(kCarbon1),
                               GateSpec::nuc(kCarbon1, Axis::X, kPi / 2), GateSpec::cnot(kElectron, kCarbon2),
                               GateSpec::swap(kElectron, kCarbon3), GateSpec::flip(kCarbon2),
                               GateSpec::mw(Axis::Z, 0.3)};
    for (auto b : {Backend::PureVector, Backend::DensityMatrix}) {
        Rng rng(1);
        NodeState n = NodeState::fresh(b);
        apply_circuit(n, c, quiet(), rng);
        auto ref = node_state(Backend::PureVector);
        ref.apply_unitary(gates::ry(kPi / 2), {0});
        Matrix p0 = Matrix::Zero(2, 2), p1 = Matrix::Zero(2, 2);
        p0(0, 0) = 1;
        p1(1, 1) = 1;
        ref.apply_unitary(gates::kron(gates::rx(kPi / 2), p0) + gates::kron(gates::rx(-kPi / 2), p1), {0, 1});
        ref.apply_unitary(gates::rx(kPi / 2), {1});
        ref.apply_unitary(gates::cnot(), {0, 2});
        ref.apply_unitary(gates::swap(), {0, 3});
        ref.apply_unitary(gates::pauli_x(), {2});
        ref.apply_unitary(gates::rz(0.3), {0});
        Matrix diff = n.q.density_matrix() - ref.density_matrix();
        EXPECT_LT(diff.cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(gates, spec_validation) {
    EXPECT_THROW(GateSpec::cnot(kElectron, kElectron).validate(), std::invalid_argument);
    EXPECT_THROW(GateSpec::cond_rot(kPhoton).validate(), std::invalid_argument);
    EXPECT_THROW(GateSpec::flip(kElectron).validate(), std::invalid_argument);
    EXPECT_NO_THROW(GateSpec::swap(kElectron, kCarbon3).validate());
}

TEST(emission, herald_independent_of_outcomes) {
    NoiseModel n;
    n.herald_prob = 0.3;
    const int shots = 100000;
    double table[2][2] = {};
    for (int k = 0; k < shots; ++k) {
        Rng rng(31, streams::kTest, k);
        NodeState s = NodeState::fresh(Backend::PureVector);
        s.q.apply_unitary(gates::hadamard(), {kElectron.index});
        emit_time_bin(s, n, rng, true);
        auto r = fluorescence_readout(s.q, n, rng);
        table[s.heralded][r.reported] += 1;
    }
    double chi2 = 0.0;
    for (int h = 0; h < 2; ++h) {
        for (int r = 0; r < 2; ++r) {
            double row = table[h][0] + table[h][1];
            double col = table[0][r] + table[1][r];
            double expected = row * col / shots;
            chi2 += sq(table[h][r] - expected) / expected;
        }
    }
    // 1 degree of freedom, p = 0.001.
    EXPECT_LT(chi2, 10.828);
}

TEST(photon_detection, bin_errors) {
    NoiseModel n = quiet();
    n.bin_overlap_error = 0.1;
    n.background_error = 0.2;
    auto c = photon_z_confusion(n);
    EXPECT_NEAR(c(0, 0), 0.8 * 0.9 + 0.1, 1e-15);
    const int shots = 50000;
    int plus = 0;
    for (int k = 0; k < shots; ++k) {
        Rng rng(41, streams::kTest, k);
        auto s = node_state(Backend::PureVector);
        plus += detect_photon_z(s, n, rng) == 1;
    }
    double f = static_cast<double>(plus) / shots;
    EXPECT_NEAR(f, c(0, 0), 4 * std::sqrt(c(0, 0) * (1 - c(0, 0)) / shots));
}
