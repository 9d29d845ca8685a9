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

#include "nvnode/node.h"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nvnode {

namespace {

void check_register(const QuantumState &state) {
    if (state.num_qubits() != kNodeQubits) {
        throw std::invalid_argument("node operations need the 5-qubit node register");
    }
}

void check_memory(QubitId q) {
    if (q.role != QubitRole::Memory) {
        throw std::invalid_argument("target must be a memory qubit");
    }
}

void depolarize1(QuantumState &state, size_t q, double p, Rng &rng) {
    if (p > 0.0) {
        state.apply_channel(channels::cached(channels::Kind::Depolarizing1, p), {q}, rng);
    }
}

void depolarize2(QuantumState &state, size_t a, size_t b, double p, int steps, Rng &rng) {
    if (p <= 0.0) {
        return;
    }
    const auto &ch = channels::cached(channels::Kind::Depolarizing2, p);
    for (int k = 0; k < steps; ++k) {
        state.apply_channel(ch, {a, b}, rng);
    }
}

PauliString z_on(size_t n, size_t q) {
    return PauliString::on(n, {q}, Pauli::Z);
}

}  // namespace

GateSpec GateSpec::mw(Axis axis, double angle) {
    GateSpec g;
    g.kind = GateKind::MwRot;
    g.axis = axis;
    g.angle = angle;
    return g;
}

GateSpec GateSpec::nuc(QubitId target, Axis axis, double angle) {
    GateSpec g;
    g.kind = GateKind::NucRot;
    g.a = target;
    g.axis = axis;
    g.angle = angle;
    return g;
}

GateSpec GateSpec::cond_rot(QubitId target) {
    GateSpec g;
    g.kind = GateKind::CondNucRot;
    g.a = kElectron;
    g.b = target;
    return g;
}

GateSpec GateSpec::cnot(QubitId control, QubitId target) {
    GateSpec g;
    g.kind = GateKind::Cnot;
    g.a = control;
    g.b = target;
    return g;
}

GateSpec GateSpec::swap(QubitId first, QubitId second) {
    GateSpec g;
    g.kind = GateKind::Swap;
    g.a = first;
    g.b = second;
    return g;
}

GateSpec GateSpec::emit(bool restore) {
    GateSpec g;
    g.kind = GateKind::OpticalPiEmit;
    g.a = kElectron;
    g.b = kPhoton;
    g.restore = restore;
    return g;
}

GateSpec GateSpec::flip(QubitId target) {
    GateSpec g;
    g.kind = GateKind::Flip;
    g.a = target;
    return g;
}

void GateSpec::validate() const {
    auto in_range = [](QubitId q) { return q.index < kNodeQubits; };
    switch (kind) {
        case GateKind::MwRot:
            if (a != kElectron) throw std::invalid_argument("microwave rotations act on the electron");
            break;
        case GateKind::NucRot:
        case GateKind::Flip:
            check_memory(a);
            break;
        case GateKind::CondNucRot:
            if (a != kElectron) throw std::invalid_argument("conditional rotation is controlled by the electron");
            check_memory(b);
            break;
        case GateKind::Cnot:
        case GateKind::Swap:
            if (!in_range(a) || !in_range(b)) throw std::out_of_range("qubit out of range");
            if (a.index == b.index) throw std::invalid_argument("two-qubit gate needs distinct qubits");
            break;
        case GateKind::OpticalPiEmit:
            if (a != kElectron || b != kPhoton) throw std::invalid_argument("emission couples electron and photon");
            break;
    }
}

std::string GateSpec::str() const {
    auto axis_name = [](Axis ax) { return ax == Axis::X ? "X" : ax == Axis::Y ? "Y" : "Z"; };
    char buf[96];
    switch (kind) {
        case GateKind::MwRot:
            std::snprintf(buf, sizeof buf, "MW_R%s(%.4f)", axis_name(axis), angle);
            break;
        case GateKind::NucRot:
            std::snprintf(buf, sizeof buf, "NUC_R%s(%.4f) q%zu", axis_name(axis), angle, a.index);
            break;
        case GateKind::CondNucRot:
            std::snprintf(buf, sizeof buf, "COND_RX q%zu", b.index);
            break;
        case GateKind::Cnot:
            std::snprintf(buf, sizeof buf, "CNOT q%zu q%zu", a.index, b.index);
            break;
        case GateKind::Swap:
            std::snprintf(buf, sizeof buf, "SWAP q%zu q%zu", a.index, b.index);
            break;
        case GateKind::OpticalPiEmit:
            std::snprintf(buf, sizeof buf, "EMIT%s", restore ? "" : "_RAW");
            break;
        case GateKind::Flip:
            std::snprintf(buf, sizeof buf, "FLIP q%zu", a.index);
            break;
    }
    return buf;
}

NodeState NodeState::fresh(Backend backend) {
    return NodeState{QuantumState::zero(kNodeQubits, backend), false, false};
}

Matrix axis_rotation(Axis axis, double angle) {
    switch (axis) {
        case Axis::X:
            return gates::rx(angle);
        case Axis::Y:
            return gates::ry(angle);
        case Axis::Z:
            return gates::rz(angle);
    }
    return gates::identity();
}

void mw_rotation(QuantumState &state, Axis axis, double angle, const NoiseModel &noise, Rng &rng) {
    check_register(state);
    state.apply_unitary(axis_rotation(axis, angle), {kElectron.index});
    if (axis != Axis::Z) {
        depolarize1(state, kElectron.index, noise.p_gate_e, rng);
    }
}

void nuclear_rotation(QuantumState &state, QubitId target, Axis axis, double angle) {
    check_register(state);
    check_memory(target);
    state.apply_unitary(axis_rotation(axis, angle), {target.index});
}

void conditional_nuclear_rotation(QuantumState &state, QubitId target, const NoiseModel &noise, Rng &rng) {
    check_register(state);
    check_memory(target);
    // |0><0|_e (x) R_X(pi/2) + |1><1|_e (x) R_X(-pi/2) = exp(-i pi/4 Z_e X_c).
    static const Matrix u = [] {
        Matrix p0 = Matrix::Zero(2, 2), p1 = Matrix::Zero(2, 2);
        p0(0, 0) = 1;
        p1(1, 1) = 1;
        const double half_pi = std::numbers::pi / 2;
        return Matrix(gates::kron(gates::rx(half_pi), p0) + gates::kron(gates::rx(-half_pi), p1));
    }();
    state.apply_unitary(u, {kElectron.index, target.index});
    depolarize2(state, kElectron.index, target.index, noise.p_gate_ec, 1, rng);
}

void cnot_gate(QuantumState &state, QubitId control, QubitId target, const NoiseModel &noise, Rng &rng) {
    check_register(state);
    if (control.index == target.index) {
        throw std::invalid_argument("CNOT control and target must differ");
    }
    static const Matrix u = gates::cnot();
    state.apply_unitary(u, {control.index, target.index});
    // Two entangling steps; the two-qubit depolarizing channel commutes with
    // any two-qubit unitary on the same pair.
    depolarize2(state, control.index, target.index, noise.p_gate_ec, 2, rng);
}

void swap_gate(QuantumState &state, QubitId first, QubitId second, const NoiseModel &noise, Rng &rng) {
    check_register(state);
    if (first.index == second.index) {
        throw std::invalid_argument("SWAP needs distinct qubits");
    }
    static const Matrix u = gates::swap();
    state.apply_unitary(u, {first.index, second.index});
    depolarize2(state, first.index, second.index, noise.p_gate_ec, 3, rng);
}

void nuclear_flip(QuantumState &state, QubitId target, const NoiseModel &noise, Rng &rng) {
    check_register(state);
    check_memory(target);
    static const Matrix u = gates::pauli_x();
    state.apply_unitary(u, {target.index});
    depolarize1(state, target.index, noise.p_nuc_flip, rng);
}

void emit_time_bin(NodeState &node, const NoiseModel &noise, Rng &rng, bool restore) {
    check_register(node.q);
    if (node.photon_used) {
        throw std::logic_error("photon qubit already used in this shot");
    }
    if (node.q.probability_plus(z_on(kNodeQubits, kPhoton.index)) < 1.0 - 1e-9) {
        throw std::logic_error("photon qubit is not in the fiducial |e> placeholder");
    }
    // Early optical pi: the |0>_e branch emits into the early bin, which is
    // the photon's |0> label, so nothing changes.
    mw_rotation(node.q, Axis::X, std::numbers::pi, noise, rng);
    // Late optical pi: the branch now in |0>_e emits late.
    Matrix late = Matrix::Identity(4, 4);
    late(0, 0) = 0;
    late(2, 2) = 0;
    late(0, 2) = 1;
    late(2, 0) = 1;
    node.q.apply_unitary(late, {kElectron.index, kPhoton.index});
    if (restore) {
        mw_rotation(node.q, Axis::X, std::numbers::pi, noise, rng);
    }
    node.photon_used = true;
    node.heralded = rng.bernoulli(noise.herald_prob);
}

ReadoutResult fluorescence_readout(QuantumState &state, const NoiseModel &noise, Rng &rng) {
    int z = state.measure(z_on(state.num_qubits(), kElectron.index), rng);
    int projected = z == 1 ? 0 : 1;
    ConfusionMatrix c = ConfusionMatrix::electron(noise);
    int reported = rng.uniform() < c(0, projected) ? 0 : 1;
    return {reported, projected};
}

std::array<QuantumState, 2> fluorescence_branches(const QuantumState &state, const NoiseModel &noise) {
    if (state.backend() != Backend::DensityMatrix) {
        throw std::logic_error("readout branches need the density-matrix backend");
    }
    auto z = z_on(state.num_qubits(), kElectron.index);
    QuantumState t0 = state, t1 = state;
    t0.project(z, +1, false);
    t1.project(z, -1, false);
    ConfusionMatrix c = ConfusionMatrix::electron(noise);
    std::array<QuantumState, 2> out;
    for (int r = 0; r < 2; ++r) {
        QuantumState a = t0, b = t1;
        a.scale(c(r, 0));
        b.scale(c(r, 1));
        a.add(b);
        out[r] = std::move(a);
    }
    return out;
}

void reset_electron(QuantumState &state, const NoiseModel &noise, Rng &rng) {
    state.apply_channel(channels::cached(channels::Kind::Reset, noise.reset_error), {kElectron.index}, rng);
}

void apply_idle_round_noise(QuantumState &state, const NoiseModel &noise, Rng &rng) {
    check_register(state);
    for (const auto &c : kCarbons) {
        if (noise.p_flip_round > 0.0) {
            state.apply_channel(channels::cached(channels::Kind::BitFlip, noise.p_flip_round), {c.index}, rng);
        }
        if (noise.p_phase_round > 0.0) {
            state.apply_channel(channels::cached(channels::Kind::PhaseFlip, noise.p_phase_round), {c.index}, rng);
        }
    }
    state.apply_channel(channels::cached(channels::Kind::PhaseFlip, 0.5), {kElectron.index}, rng);
}

ConfusionMatrix photon_z_confusion(const NoiseModel &noise) {
    double keep = (1.0 - noise.background_error) * (1.0 - noise.bin_overlap_error) + 0.5 * noise.background_error;
    return ConfusionMatrix(keep, keep);
}

int detect_photon_z(QuantumState &state, const NoiseModel &noise, Rng &rng) {
    int z = state.measure(z_on(state.num_qubits(), kPhoton.index), rng);
    if (rng.bernoulli(noise.bin_overlap_error)) {
        z = -z;
    }
    if (rng.bernoulli(noise.background_error)) {
        z = rng.bernoulli(0.5) ? 1 : -1;
    }
    return z;
}

void apply_gate(NodeState &node, const GateSpec &gate, const NoiseModel &noise, Rng &rng) {
    gate.validate();
    static const NoiseModel kIdeal = NoiseModel::ideal();
    const NoiseModel &n = gate.noisy ? noise : kIdeal;
    switch (gate.kind) {
        case GateKind::MwRot:
            mw_rotation(node.q, gate.axis, gate.angle, n, rng);
            break;
        case GateKind::NucRot:
            nuclear_rotation(node.q, gate.a, gate.axis, gate.angle);
            break;
        case GateKind::CondNucRot:
            conditional_nuclear_rotation(node.q, gate.b, n, rng);
            break;
        case GateKind::Cnot:
            cnot_gate(node.q, gate.a, gate.b, n, rng);
            break;
        case GateKind::Swap:
            swap_gate(node.q, gate.a, gate.b, n, rng);
            break;
        case GateKind::OpticalPiEmit: {
            // The herald draw uses the real herald probability even for an
            // otherwise noiseless emission.
            NoiseModel emit_noise = n;
            emit_noise.herald_prob = noise.herald_prob;
            emit_time_bin(node, emit_noise, rng, gate.restore);
            break;
        }
        case GateKind::Flip:
            nuclear_flip(node.q, gate.a, n, rng);
            break;
    }
}

void apply_circuit(NodeState &node, std::span<const GateSpec> circuit, const NoiseModel &noise, Rng &rng) {
    for (const auto &g : circuit) {
        apply_gate(node, g, noise, rng);
    }
}

}  // namespace nvnode
