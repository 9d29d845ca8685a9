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

#ifndef NVNODE_QUBIT_H
#define NVNODE_QUBIT_H

#include <cstddef>
#include <string>
#include <vector>

namespace nvnode {

enum class QubitRole { Interface, Memory, Flying };

struct QubitId {
    size_t index;
    QubitRole role;

    constexpr bool operator==(const QubitId &other) const = default;
};

// Canonical node register: [electron, carbon1, carbon2, carbon3, photon].
// Basis index bit k holds qubit k (little-endian). Photon |e> is 0, |l> is 1.
inline constexpr QubitId kElectron{0, QubitRole::Interface};
inline constexpr QubitId kCarbon1{1, QubitRole::Memory};
inline constexpr QubitId kCarbon2{2, QubitRole::Memory};
inline constexpr QubitId kCarbon3{3, QubitRole::Memory};
inline constexpr QubitId kPhoton{4, QubitRole::Flying};
inline constexpr size_t kNodeQubits = 5;
inline constexpr size_t kMaxQubits = 8;

inline constexpr QubitId kCarbons[3] = {kCarbon1, kCarbon2, kCarbon3};

/// Role assignment of a register. Checks that indices are unique and dense
/// and that there is exactly one interface and one flying qubit.
class RegisterLayout {
   public:
    explicit RegisterLayout(std::vector<QubitId> qubits);

    static RegisterLayout node();

    size_t size() const { return qubits_.size(); }
    const QubitId &operator[](size_t i) const { return qubits_[i]; }
    const std::vector<QubitId> &qubits() const { return qubits_; }
    QubitId interface_qubit() const;
    QubitId flying_qubit() const;
    std::vector<QubitId> memory_qubits() const;

   private:
    std::vector<QubitId> qubits_;
};

std::string role_name(QubitRole role);

}  // namespace nvnode

#endif
