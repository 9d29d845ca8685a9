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

#ifndef NVNODE_NODE_H
#define NVNODE_NODE_H

#include <array>
#include <span>
#include <string>
#include <vector>

#include "nvnode/noise_model.h"
#include "nvnode/qubit.h"
#include "nvnode/rng.h"
#include "nvnode/state.h"

namespace nvnode {

enum class Axis { X, Y, Z };

enum class GateKind {
    MwRot,       // electron rotation; Z is a noiseless frame update
    NucRot,      // ideal single-qubit rotation of a memory qubit
    CondNucRot,  // R_{+X}(pi/2) on the carbon if |0>_e, R_{-X}(pi/2) if |1>_e
    Cnot,
    Swap,
    OpticalPiEmit,
    Flip,        // X on a memory qubit
};

struct GateSpec {
    GateKind kind = GateKind::MwRot;
    Axis axis = Axis::X;
    double angle = 0.0;
    QubitId a = kElectron;
    QubitId b = kElectron;
    bool noisy = true;
    // OpticalPiEmit only: add the final microwave pi pulse that restores the
    // electron label of each emission branch.
    bool restore = true;

    static GateSpec mw(Axis axis, double angle);
    static GateSpec nuc(QubitId target, Axis axis, double angle);
    static GateSpec cond_rot(QubitId target);
    static GateSpec cnot(QubitId control, QubitId target);
    static GateSpec swap(QubitId first, QubitId second);
    static GateSpec emit(bool restore);
    static GateSpec flip(QubitId target);

    /// Throws std::invalid_argument if the qubit arguments do not fit the kind.
    void validate() const;
    std::string str() const;
};

/// Quantum payload of one shot plus the per-shot photon bookkeeping.
struct NodeState {
    QuantumState q;
    bool photon_used = false;
    bool heralded = false;

    /// All five qubits in |0>: |0>_e |000>_c |e>_p.
    static NodeState fresh(Backend backend);
};

Matrix axis_rotation(Axis axis, double angle);

void mw_rotation(QuantumState &state, Axis axis, double angle, const NoiseModel &noise, Rng &rng);
void nuclear_rotation(QuantumState &state, QubitId target, Axis axis, double angle);
void conditional_nuclear_rotation(QuantumState &state, QubitId target, const NoiseModel &noise, Rng &rng);
void cnot_gate(QuantumState &state, QubitId control, QubitId target, const NoiseModel &noise, Rng &rng);
void swap_gate(QuantumState &state, QubitId first, QubitId second, const NoiseModel &noise, Rng &rng);
void nuclear_flip(QuantumState &state, QubitId target, const NoiseModel &noise, Rng &rng);

/// Time-bin spin-photon entanglement: optical pi (early emission from |0>_e),
/// microwave pi, optical pi (late emission). With `restore` a final
/// microwave pi maps a|0>_e + b|1>_e to a|0>_e|e>_p + b|1>_e|l>_p; without
/// it to a|1>_e|e>_p + b|0>_e|l>_p (both up to a global phase). Marks the
/// shot heralded with probability herald_prob.
void emit_time_bin(NodeState &node, const NoiseModel &noise, Rng &rng, bool restore = true);

struct ReadoutResult {
    int reported;  // 0 = bright (photons detected), 1 = dark
    int projected;  // the electron's projected state
};

/// Projective Z measurement of the electron followed by classical reporting
/// noise from ConfusionMatrix::electron.
ReadoutResult fluorescence_readout(QuantumState &state, const NoiseModel &noise, Rng &rng);

/// Density-backend instrument: unnormalized post-measurement states for
/// reported bit 0 and 1. Their traces are the report probabilities.
std::array<QuantumState, 2> fluorescence_branches(const QuantumState &state, const NoiseModel &noise);

void reset_electron(QuantumState &state, const NoiseModel &noise, Rng &rng);

/// Bit flips and phase flips on each memory qubit, full dephasing of the
/// electron.
void apply_idle_round_noise(QuantumState &state, const NoiseModel &noise, Rng &rng);

/// Time-resolved detection: +1 early, -1 late, including bin misassignment
/// and background counts.
int detect_photon_z(QuantumState &state, const NoiseModel &noise, Rng &rng);

/// Classical reporting noise of the time-resolved detection (+1 <-> bit 0).
ConfusionMatrix photon_z_confusion(const NoiseModel &noise);

void apply_gate(NodeState &node, const GateSpec &gate, const NoiseModel &noise, Rng &rng);
void apply_circuit(NodeState &node, std::span<const GateSpec> circuit, const NoiseModel &noise, Rng &rng);

}  // namespace nvnode

#endif
