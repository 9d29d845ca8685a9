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

#ifndef NVNODE_PAULI_H
#define NVNODE_PAULI_H

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace nvnode {

enum class Pauli : uint8_t { I, X, Y, Z };

/// Tensor product of single-qubit Paulis; character k of the text form acts
/// on qubit k.
class PauliString {
   public:
    PauliString() = default;
    explicit PauliString(std::vector<Pauli> ops) : ops_(std::move(ops)) {}
    explicit PauliString(std::string_view text);

    /// Identity everywhere except `op` on each listed qubit.
    static PauliString on(size_t num_qubits, std::initializer_list<size_t> qubits, Pauli op);

    size_t size() const { return ops_.size(); }
    Pauli operator[](size_t k) const { return ops_[k]; }
    Pauli &operator[](size_t k) { return ops_[k]; }
    bool is_identity() const;

    /// Bit k set when qubit k carries X or Y.
    uint64_t x_mask() const;
    /// Bit k set when qubit k carries Z or Y.
    uint64_t z_mask() const;

    /// P|b> = phase(b) |b ^ x_mask()>.
    std::complex<double> phase(uint64_t basis_index) const;

    std::string str() const;

    bool operator==(const PauliString &other) const = default;

   private:
    std::vector<Pauli> ops_;
};

}  // namespace nvnode

#endif
