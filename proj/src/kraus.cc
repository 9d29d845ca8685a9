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

#include "nvnode/kraus.h"

#include <cmath>
#include <map>
#include <utility>
#include <stdexcept>

namespace nvnode {

KrausChannel::KrausChannel(std::vector<Matrix> operators, double tolerance) : operators_(std::move(operators)) {
    if (operators_.empty()) {
        throw std::invalid_argument("Kraus channel needs at least one operator");
    }
    auto d = operators_.front().rows();
    if (d < 2 || (d & (d - 1)) != 0) {
        throw std::invalid_argument("Kraus operators must be 2^k x 2^k");
    }
    Matrix sum = Matrix::Zero(d, d);
    for (const auto &k : operators_) {
        if (k.rows() != d || k.cols() != d) {
            throw std::invalid_argument("Kraus operators have mismatched dimensions");
        }
        sum += k.adjoint() * k;
    }
    if ((sum - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > tolerance) {
        throw std::invalid_argument("Kraus operators are not complete (sum K^dag K != I)");
    }
    while ((size_t{1} << num_qubits_) < static_cast<size_t>(d)) {
        ++num_qubits_;
    }
    for (const auto &k : operators_) {
        Matrix kk = k.adjoint() * k;
        double w = kk(0, 0).real();
        if ((kk - w * Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > tolerance) {
            weights_.clear();
            unitaries_.clear();
            break;
        }
        if (w > tolerance) {
            weights_.push_back(w);
            unitaries_.push_back(k / std::sqrt(w));
        }
    }
    superop_ = Matrix::Zero(d * d, d * d);
    for (const auto &k : operators_) {
        for (Eigen::Index ro = 0; ro < d; ++ro) {
            for (Eigen::Index co = 0; co < d; ++co) {
                for (Eigen::Index ri = 0; ri < d; ++ri) {
                    for (Eigen::Index ci = 0; ci < d; ++ci) {
                        superop_(ro + co * d, ri + ci * d) += k(ro, ri) * std::conj(k(co, ci));
                    }
                }
            }
        }
    }
}

namespace gates {

Matrix identity(size_t num_qubits) {
    auto d = static_cast<Eigen::Index>(size_t{1} << num_qubits);
    return Matrix::Identity(d, d);
}

Matrix pauli_x() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

Matrix pauli_y() {
    Matrix m(2, 2);
    m << 0, Complex(0, -1), Complex(0, 1), 0;
    return m;
}

Matrix pauli_z() {
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

Matrix hadamard() {
    Matrix m(2, 2);
    m << 1, 1, 1, -1;
    return m / std::sqrt(2.0);
}

Matrix rx(double angle) {
    return std::cos(angle / 2) * identity() - Complex(0, std::sin(angle / 2)) * pauli_x();
}

Matrix ry(double angle) {
    return std::cos(angle / 2) * identity() - Complex(0, std::sin(angle / 2)) * pauli_y();
}

Matrix rz(double angle) {
    return std::cos(angle / 2) * identity() - Complex(0, std::sin(angle / 2)) * pauli_z();
}

Matrix cnot() {
    // Control is local bit 0, target local bit 1.
    Matrix m = Matrix::Zero(4, 4);
    m(0, 0) = 1;
    m(3, 1) = 1;
    m(2, 2) = 1;
    m(1, 3) = 1;
    return m;
}

Matrix swap() {
    Matrix m = Matrix::Zero(4, 4);
    m(0, 0) = 1;
    m(2, 1) = 1;
    m(1, 2) = 1;
    m(3, 3) = 1;
    return m;
}

Matrix kron(const Matrix &high, const Matrix &low) {
    Matrix out(high.rows() * low.rows(), high.cols() * low.cols());
    for (Eigen::Index i = 0; i < high.rows(); ++i) {
        for (Eigen::Index j = 0; j < high.cols(); ++j) {
            out.block(i * low.rows(), j * low.cols(), low.rows(), low.cols()) = high(i, j) * low;
        }
    }
    return out;
}

bool is_unitary(const Matrix &u, double tolerance) {
    if (u.rows() != u.cols()) {
        return false;
    }
    const Eigen::Index d = u.rows();
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            Complex dot = 0.0;
            for (Eigen::Index r = 0; r < d; ++r) {
                dot += std::conj(u(r, i)) * u(r, j);
            }
            if (std::norm(dot - (i == j ? Complex(1.0) : Complex(0.0))) > tolerance * tolerance) {
                return false;
            }
        }
    }
    return true;
}

}  // namespace gates

namespace channels {

namespace {

void check_probability(double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("channel probability outside [0, 1]");
    }
}

}  // namespace

KrausChannel identity(size_t num_qubits) {
    return KrausChannel({gates::identity(num_qubits)});
}

KrausChannel depolarizing(double p, size_t num_qubits) {
    check_probability(p);
    if (num_qubits != 1 && num_qubits != 2) {
        throw std::invalid_argument("depolarizing channel supports 1 or 2 qubits");
    }
    const Matrix paulis[4] = {gates::identity(), gates::pauli_x(), gates::pauli_y(), gates::pauli_z()};
    std::vector<Matrix> ops;
    if (num_qubits == 1) {
        ops.push_back(std::sqrt(1.0 - 3.0 * p / 4.0) * paulis[0]);
        for (int k = 1; k < 4; ++k) {
            ops.push_back(std::sqrt(p / 4.0) * paulis[k]);
        }
    } else {
        ops.push_back(std::sqrt(1.0 - 15.0 * p / 16.0) * gates::identity(2));
        for (int a = 0; a < 4; ++a) {
            for (int b = 0; b < 4; ++b) {
                if (a == 0 && b == 0) continue;
                ops.push_back(std::sqrt(p / 16.0) * gates::kron(paulis[a], paulis[b]));
            }
        }
    }
    return KrausChannel(std::move(ops));
}

KrausChannel bit_flip(double p) {
    check_probability(p);
    return KrausChannel({std::sqrt(1.0 - p) * gates::identity(), std::sqrt(p) * gates::pauli_x()});
}

KrausChannel phase_flip(double p) {
    check_probability(p);
    return KrausChannel({std::sqrt(1.0 - p) * gates::identity(), std::sqrt(p) * gates::pauli_z()});
}

KrausChannel reset(double error) {
    check_probability(error);
    Matrix k00 = Matrix::Zero(2, 2), k01 = Matrix::Zero(2, 2), k10 = Matrix::Zero(2, 2), k11 = Matrix::Zero(2, 2);
    k00(0, 0) = std::sqrt(1.0 - error);
    k01(0, 1) = std::sqrt(1.0 - error);
    k10(1, 0) = std::sqrt(error);
    k11(1, 1) = std::sqrt(error);
    return KrausChannel({k00, k01, k10, k11});
}

const KrausChannel &cached(Kind kind, double p) {
    thread_local std::map<std::pair<Kind, double>, KrausChannel> memo;
    auto key = std::make_pair(kind, p);
    auto it = memo.find(key);
    if (it != memo.end()) {
        return it->second;
    }
    if (memo.size() >= 256) {
        memo.clear();
    }
    switch (kind) {
        case Kind::Depolarizing1:
            return memo.emplace(key, depolarizing(p, 1)).first->second;
        case Kind::Depolarizing2:
            return memo.emplace(key, depolarizing(p, 2)).first->second;
        case Kind::BitFlip:
            return memo.emplace(key, bit_flip(p)).first->second;
        case Kind::PhaseFlip:
            return memo.emplace(key, phase_flip(p)).first->second;
        case Kind::Reset:
            return memo.emplace(key, reset(p)).first->second;
    }
    throw std::invalid_argument("unknown channel kind");
}

}  // namespace channels

}  // namespace nvnode
