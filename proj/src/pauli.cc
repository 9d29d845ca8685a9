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

#include "nvnode/pauli.h"

#include <stdexcept>

namespace nvnode {

PauliString::PauliString(std::string_view text) {
    ops_.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case 'I':
            case '_':
                ops_.push_back(Pauli::I);
                break;
            case 'X':
                ops_.push_back(Pauli::X);
                break;
            case 'Y':
                ops_.push_back(Pauli::Y);
                break;
            case 'Z':
                ops_.push_back(Pauli::Z);
                break;
            default:
                throw std::invalid_argument("bad Pauli character '" + std::string(1, c) + "'");
        }
    }
}

PauliString PauliString::on(size_t num_qubits, std::initializer_list<size_t> qubits, Pauli op) {
    std::vector<Pauli> ops(num_qubits, Pauli::I);
    for (size_t q : qubits) {
        if (q >= num_qubits) {
            throw std::out_of_range("Pauli target out of range");
        }
        ops[q] = op;
    }
    return PauliString(std::move(ops));
}

bool PauliString::is_identity() const {
    for (auto p : ops_) {
        if (p != Pauli::I) {
            return false;
        }
    }
    return true;
}

uint64_t PauliString::x_mask() const {
    uint64_t m = 0;
    for (size_t k = 0; k < ops_.size(); ++k) {
        if (ops_[k] == Pauli::X || ops_[k] == Pauli::Y) {
            m |= uint64_t{1} << k;
        }
    }
    return m;
}

uint64_t PauliString::z_mask() const {
    uint64_t m = 0;
    for (size_t k = 0; k < ops_.size(); ++k) {
        if (ops_[k] == Pauli::Z || ops_[k] == Pauli::Y) {
            m |= uint64_t{1} << k;
        }
    }
    return m;
}

std::complex<double> PauliString::phase(uint64_t basis_index) const {
    // X|b> = |~b>, Z|b> = (-1)^b |b>, Y|b> = i (-1)^b |~b>.
    std::complex<double> ph{1.0, 0.0};
    for (size_t k = 0; k < ops_.size(); ++k) {
        bool bit = (basis_index >> k) & 1;
        switch (ops_[k]) {
            case Pauli::I:
            case Pauli::X:
                break;
            case Pauli::Z:
                if (bit) ph = -ph;
                break;
            case Pauli::Y:
                ph *= bit ? std::complex<double>{0.0, -1.0} : std::complex<double>{0.0, 1.0};
                break;
        }
    }
    return ph;
}

std::string PauliString::str() const {
    std::string s;
    for (auto p : ops_) {
        s.push_back("IXYZ"[static_cast<int>(p)]);
    }
    return s;
}

}  // namespace nvnode
