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

#ifndef NVNODE_STATE_H
#define NVNODE_STATE_H

#include <span>
#include <vector>

#include "nvnode/kraus.h"
#include "nvnode/pauli.h"
#include "nvnode/rng.h"

namespace nvnode {

enum class Backend { PureVector, DensityMatrix };

const char *backend_name(Backend backend);

/// Dense state of a register of up to kMaxQubits qubits.
///
/// PureVector stores 2^n amplitudes and unravels channels into sampled Kraus
/// branches (one quantum trajectory per shot). DensityMatrix stores the full
/// 2^n x 2^n matrix row-major and applies channels exactly. Basis index bit k
/// is qubit k.
class QuantumState {
   public:
    QuantumState() = default;

    /// |0...0> on `num_qubits` qubits.
    static QuantumState zero(size_t num_qubits, Backend backend);
    static QuantumState basis(size_t num_qubits, uint64_t index, Backend backend);
    /// Pure state from amplitudes; normalizes.
    static QuantumState from_amplitudes(std::vector<Complex> amplitudes);
    static QuantumState from_density_matrix(const Matrix &rho);

    Backend backend() const { return backend_; }
    size_t num_qubits() const { return num_qubits_; }
    size_t dim() const { return size_t{1} << num_qubits_; }

    /// Pure backend only.
    const std::vector<Complex> &amplitudes() const;
    /// Density matrix of either backend (|psi><psi| for pure states).
    Matrix density_matrix() const;
    /// Same state on the density-matrix backend.
    QuantumState to_density() const;

    void apply_unitary(const Matrix &u, std::span<const size_t> targets);
    void apply_unitary(const Matrix &u, std::initializer_list<size_t> targets) {
        apply_unitary(u, std::span<const size_t>(targets.begin(), targets.size()));
    }
    /// Pure backend samples one Kraus branch with Born weights and
    /// renormalizes; density backend applies the full sum.
    void apply_channel(const KrausChannel &channel, std::span<const size_t> targets, Rng &rng);
    void apply_channel(const KrausChannel &channel, std::initializer_list<size_t> targets, Rng &rng) {
        apply_channel(channel, std::span<const size_t>(targets.begin(), targets.size()), rng);
    }
    /// Applies a Pauli string as an operator (no normalization needed).
    void apply_pauli(const PauliString &p);

    /// <P>, or Tr(rho P) / Tr(rho) for unnormalized density branches.
    double expectation(const PauliString &p) const;
    /// Born probability of the +1 eigenvalue of P.
    double probability_plus(const PauliString &p) const;
    /// Projects onto the eigenvalue `outcome` (+1 or -1) of P. When
    /// `renormalize` is false the result keeps weight equal to the Born
    /// probability times the current trace; exact-branch bookkeeping uses it.
    void project(const PauliString &p, int outcome, bool renormalize = true);
    /// Samples an eigenvalue of P and projects onto it.
    int measure(const PauliString &p, Rng &rng);

    /// Reduced state on `keep` (listed order becomes the new qubit order).
    QuantumState partial_trace(std::span<const size_t> keep) const;
    QuantumState partial_trace(std::initializer_list<size_t> keep) const {
        return partial_trace(std::span<const size_t>(keep.begin(), keep.size()));
    }

    /// Probability of each computational basis state.
    std::vector<double> probabilities() const;
    /// Norm squared (pure) or trace (density).
    double trace() const;
    /// <phi|rho|phi> for a pure reference state of the same size.
    double fidelity_to(const std::vector<Complex> &reference) const;

    /// Density-backend branch arithmetic.
    void scale(double weight);
    void add(const QuantumState &other);

    /// Throws std::logic_error if the normalization, hermiticity, or
    /// positivity invariants are violated beyond the given tolerances.
    void validate(double tolerance = 1e-10, double eigen_floor = -1e-10) const;

   private:
    void check_targets(std::span<const size_t> targets, size_t matrix_dim) const;

    Backend backend_ = Backend::PureVector;
    size_t num_qubits_ = 0;
    std::vector<Complex> data_;
};

/// Applies `m` (2^k x 2^k, local index bit j = targets[j]) to a flat vector of
/// 2^total_qubits amplitudes.
void apply_matrix_inplace(std::vector<Complex> &data, size_t total_qubits, const Matrix &m,
                          std::span<const size_t> targets);

}  // namespace nvnode

#endif
