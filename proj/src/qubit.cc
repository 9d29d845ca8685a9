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

#include "nvnode/qubit.h"

#include <algorithm>
#include <stdexcept>

namespace nvnode {

RegisterLayout::RegisterLayout(std::vector<QubitId> qubits) : qubits_(std::move(qubits)) {
    if (qubits_.empty() || qubits_.size() > kMaxQubits) {
        throw std::invalid_argument("register size must be in [1, 8]");
    }
    std::vector<bool> seen(qubits_.size(), false);
    size_t interfaces = 0;
    size_t flying = 0;
    for (const auto &q : qubits_) {
        if (q.index >= qubits_.size() || seen[q.index]) {
            throw std::invalid_argument("qubit indices must be unique and in [0, N)");
        }
        seen[q.index] = true;
        interfaces += q.role == QubitRole::Interface;
        flying += q.role == QubitRole::Flying;
    }
    if (interfaces != 1) {
        throw std::invalid_argument("register needs exactly one interface qubit");
    }
    if (flying != 1) {
        throw std::invalid_argument("register needs exactly one flying qubit");
    }
}

RegisterLayout RegisterLayout::node() {
    return RegisterLayout({kElectron, kCarbon1, kCarbon2, kCarbon3, kPhoton});
}

QubitId RegisterLayout::interface_qubit() const {
    return *std::find_if(qubits_.begin(), qubits_.end(), [](const QubitId &q) { return q.role == QubitRole::Interface; });
}

QubitId RegisterLayout::flying_qubit() const {
    return *std::find_if(qubits_.begin(), qubits_.end(), [](const QubitId &q) { return q.role == QubitRole::Flying; });
}

std::vector<QubitId> RegisterLayout::memory_qubits() const {
    std::vector<QubitId> out;
    for (const auto &q : qubits_) {
        if (q.role == QubitRole::Memory) {
            out.push_back(q);
        }
    }
    return out;
}

std::string role_name(QubitRole role) {
    switch (role) {
        case QubitRole::Interface:
            return "interface";
        case QubitRole::Memory:
            return "memory";
        case QubitRole::Flying:
            return "flying";
    }
    return "?";
}

}  // namespace nvnode
