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

#ifndef NVNODE_KRAUS_H
#define NVNODE_KRAUS_H

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace nvnode {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

/// A completely positive trace-preserving map given by Kraus operators on
/// k target qubits. Completeness (sum K^dag K = I) is checked on construction.
class KrausChannel {
   public:
    explicit KrausChannel(std::vector<Matrix> operators, double tolerance = 1e-10);

    const std::vector<Matrix> &operators() const { return operators_; }
    size_t num_qubits() const { return num_qubits_; }
    size_t size() const { return operators_.size(); }
    /// sum_i K_i (x) conj(K_i) acting on the local index r | c << k of
    /// rho(r, c); used to apply the channel to a density matrix in one pass.
    const Matrix &superoperator() const { return superop_; }
    /// Non-empty when every K_i is sqrt(w_i) times a unitary; the branch
    /// probabilities are then state independent.
    const std::vector<double> &mixture_weights() const { return weights_; }
    const std::vector<Matrix> &mixture_unitaries() const { return unitaries_; }

   private:
    std::vector<Matrix> operators_;
    Matrix superop_;
    std::vector<double> weights_;
    std::vector<Matrix> unitaries_;
    size_t num_qubits_ = 0;
};

namespace channels {

KrausChannel identity(size_t num_qubits = 1);
/// rho -> (1 - p) rho + p I / 2^k on k = 1 or 2 qubits.
KrausChannel depolarizing(double p, size_t num_qubits = 1);
KrausChannel bit_flip(double p);
KrausChannel phase_flip(double p);
/// Reset to |0> that leaves |1> instead with probability `error`.
KrausChannel reset(double error);

enum class Kind { Depolarizing1, Depolarizing2, BitFlip, PhaseFlip, Reset };
/// Per-thread memo of the constructors above, keyed by (kind, p).
const KrausChannel &cached(Kind kind, double p);

}  // namespace channels

namespace gates {

Matrix identity(size_t num_qubits = 1);
Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();
Matrix hadamard();
/// exp(-i angle/2 sigma), sigma in {X, Y, Z}.
Matrix rx(double angle);
Matrix ry(double angle);
Matrix rz(double angle);
/// Two-qubit matrices use local index (first target) + 2 * (second target).
Matrix cnot();
Matrix swap();
Matrix kron(const Matrix &high, const Matrix &low);

bool is_unitary(const Matrix &u, double tolerance = 1e-10);

}  // namespace gates

}  // namespace nvnode

#endif
