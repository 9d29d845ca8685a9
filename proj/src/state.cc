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

#include "nvnode/state.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "nvnode/qubit.h"

namespace nvnode {

const char *backend_name(Backend backend) {
    return backend == Backend::PureVector ? "trajectory" : "exact";
}

namespace {

constexpr double kBranchFloor = 1e-30;

/// Inserts a zero bit at each (ascending) position in `sorted`.
inline uint64_t spread_bits(uint64_t compact, std::span<const size_t> sorted) {
    for (size_t pos : sorted) {
        uint64_t low = compact & ((uint64_t{1} << pos) - 1);
        compact = ((compact >> pos) << (pos + 1)) | low;
    }
    return compact;
}

double norm_squared(const std::vector<Complex> &v) {
    double s = 0.0;
    for (const auto &a : v) {
        s += std::norm(a);
    }
    return s;
}

}  // namespace

void apply_matrix_inplace(std::vector<Complex> &data, size_t total_qubits, const Matrix &m,
                          std::span<const size_t> targets) {
    constexpr size_t kMaxLocal = 4;
    const size_t k = targets.size();
    if (k == 1) {
        const uint64_t bit = uint64_t{1} << targets[0];
        const uint64_t dim = uint64_t{1} << total_qubits;
        const Complex m00 = m(0, 0), m01 = m(0, 1), m10 = m(1, 0), m11 = m(1, 1);
        auto mul = [](Complex x, Complex y) {
            return Complex(x.real() * y.real() - x.imag() * y.imag(), x.real() * y.imag() + x.imag() * y.real());
        };
        for (uint64_t i = 0; i < dim; ++i) {
            if (i & bit) {
                continue;
            }
            Complex a = data[i];
            Complex b = data[i | bit];
            data[i] = mul(m00, a) + mul(m01, b);
            data[i | bit] = mul(m10, a) + mul(m11, b);
        }
        return;
    }
    const size_t local_dim = size_t{1} << k;
    struct Entry {
        uint32_t r;
        uint32_t l;
        double re;
        double im;
    };
    std::array<size_t, kMaxLocal> sorted_small;
    std::array<uint64_t, size_t{1} << kMaxLocal> offsets_small;
    std::array<Entry, (size_t{1} << kMaxLocal) * (size_t{1} << kMaxLocal)> entries_small;
    std::array<double, 4 * (size_t{1} << kMaxLocal)> scratch_small;
    std::vector<size_t> sorted_big;
    std::vector<uint64_t> offsets_big;
    std::vector<Entry> entries_big;
    std::vector<double> scratch_big;
    const bool small = k <= kMaxLocal;
    if (!small) {
        sorted_big.resize(k);
        offsets_big.resize(local_dim);
        entries_big.resize(local_dim * local_dim);
        scratch_big.resize(4 * local_dim);
    }
    size_t *sorted = small ? sorted_small.data() : sorted_big.data();
    uint64_t *offsets = small ? offsets_small.data() : offsets_big.data();
    Entry *entries = small ? entries_small.data() : entries_big.data();
    double *scratch = small ? scratch_small.data() : scratch_big.data();

    std::copy(targets.begin(), targets.end(), sorted);
    std::sort(sorted, sorted + k);
    for (size_t l = 0; l < local_dim; ++l) {
        uint64_t off = 0;
        for (size_t j = 0; j < k; ++j) {
            if ((l >> j) & 1) {
                off |= uint64_t{1} << targets[j];
            }
        }
        offsets[l] = off;
    }
    size_t num_entries = 0;
    for (size_t r = 0; r < local_dim; ++r) {
        for (size_t l = 0; l < local_dim; ++l) {
            Complex v = m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(l));
            if (v != Complex(0.0, 0.0)) {
                entries[num_entries++] = {static_cast<uint32_t>(r), static_cast<uint32_t>(l), v.real(), v.imag()};
            }
        }
    }

    double *in_re = scratch;
    double *in_im = scratch + local_dim;
    double *out_re = scratch + 2 * local_dim;
    double *out_im = scratch + 3 * local_dim;
    std::span<const size_t> sorted_span(sorted, k);
    const uint64_t outer = uint64_t{1} << (total_qubits - k);
    for (uint64_t c = 0; c < outer; ++c) {
        uint64_t base = spread_bits(c, sorted_span);
        for (size_t l = 0; l < local_dim; ++l) {
            const Complex &a = data[base | offsets[l]];
            in_re[l] = a.real();
            in_im[l] = a.imag();
            out_re[l] = 0.0;
            out_im[l] = 0.0;
        }
        for (size_t i = 0; i < num_entries; ++i) {
            const Entry &e = entries[i];
            out_re[e.r] += e.re * in_re[e.l] - e.im * in_im[e.l];
            out_im[e.r] += e.re * in_im[e.l] + e.im * in_re[e.l];
        }
        for (size_t r = 0; r < local_dim; ++r) {
            data[base | offsets[r]] = Complex(out_re[r], out_im[r]);
        }
    }
}

QuantumState QuantumState::zero(size_t num_qubits, Backend backend) {
    return basis(num_qubits, 0, backend);
}

QuantumState QuantumState::basis(size_t num_qubits, uint64_t index, Backend backend) {
    if (num_qubits == 0 || num_qubits > kMaxQubits) {
        throw std::invalid_argument("register size must be in [1, 8]");
    }
    QuantumState s;
    s.backend_ = backend;
    s.num_qubits_ = num_qubits;
    const size_t d = s.dim();
    if (index >= d) {
        throw std::out_of_range("basis index out of range");
    }
    if (backend == Backend::PureVector) {
        s.data_.assign(d, 0.0);
        s.data_[index] = 1.0;
    } else {
        s.data_.assign(d * d, 0.0);
        s.data_[index * d + index] = 1.0;
    }
    return s;
}

QuantumState QuantumState::from_amplitudes(std::vector<Complex> amplitudes) {
    size_t n = 0;
    while ((size_t{1} << n) < amplitudes.size()) {
        ++n;
    }
    if ((size_t{1} << n) != amplitudes.size() || n == 0 || n > kMaxQubits) {
        throw std::invalid_argument("amplitude vector length must be 2^n with 1 <= n <= 8");
    }
    double norm = std::sqrt(norm_squared(amplitudes));
    if (norm < kBranchFloor) {
        throw std::invalid_argument("zero amplitude vector");
    }
    for (auto &a : amplitudes) {
        a /= norm;
    }
    QuantumState s;
    s.backend_ = Backend::PureVector;
    s.num_qubits_ = n;
    s.data_ = std::move(amplitudes);
    return s;
}

QuantumState QuantumState::from_density_matrix(const Matrix &rho) {
    size_t n = 0;
    while ((Eigen::Index{1} << n) < rho.rows()) {
        ++n;
    }
    if (rho.rows() != rho.cols() || (Eigen::Index{1} << n) != rho.rows() || n == 0 || n > kMaxQubits) {
        throw std::invalid_argument("density matrix must be 2^n x 2^n with 1 <= n <= 8");
    }
    QuantumState s;
    s.backend_ = Backend::DensityMatrix;
    s.num_qubits_ = n;
    const size_t d = s.dim();
    s.data_.resize(d * d);
    for (size_t r = 0; r < d; ++r) {
        for (size_t c = 0; c < d; ++c) {
            s.data_[r * d + c] = rho(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        }
    }
    return s;
}

const std::vector<Complex> &QuantumState::amplitudes() const {
    if (backend_ != Backend::PureVector) {
        throw std::logic_error("amplitudes() requires the pure-vector backend");
    }
    return data_;
}

Matrix QuantumState::density_matrix() const {
    const auto d = static_cast<Eigen::Index>(dim());
    Matrix rho(d, d);
    if (backend_ == Backend::PureVector) {
        for (Eigen::Index r = 0; r < d; ++r) {
            for (Eigen::Index c = 0; c < d; ++c) {
                rho(r, c) = data_[r] * std::conj(data_[c]);
            }
        }
    } else {
        for (Eigen::Index r = 0; r < d; ++r) {
            for (Eigen::Index c = 0; c < d; ++c) {
                rho(r, c) = data_[r * d + c];
            }
        }
    }
    return rho;
}

QuantumState QuantumState::to_density() const {
    if (backend_ == Backend::DensityMatrix) {
        return *this;
    }
    return from_density_matrix(density_matrix());
}

void QuantumState::check_targets(std::span<const size_t> targets, size_t matrix_dim) const {
    if (targets.empty()) {
        throw std::invalid_argument("no target qubits");
    }
    if ((size_t{1} << targets.size()) != matrix_dim) {
        throw std::invalid_argument("matrix dimension does not match the number of targets");
    }
    for (size_t i = 0; i < targets.size(); ++i) {
        if (targets[i] >= num_qubits_) {
            throw std::out_of_range("target qubit out of range");
        }
        for (size_t j = 0; j < i; ++j) {
            if (targets[i] == targets[j]) {
                throw std::invalid_argument("target qubits must be distinct");
            }
        }
    }
}

void QuantumState::apply_unitary(const Matrix &u, std::span<const size_t> targets) {
    if (u.rows() != u.cols()) {
        throw std::invalid_argument("gate matrix must be square");
    }
    check_targets(targets, static_cast<size_t>(u.rows()));
    if (!gates::is_unitary(u)) {
        throw std::invalid_argument("gate matrix is not unitary");
    }
    if (backend_ == Backend::PureVector) {
        apply_matrix_inplace(data_, num_qubits_, u, targets);
        return;
    }
    std::vector<size_t> rows(targets.begin(), targets.end());
    for (auto &r : rows) {
        r += num_qubits_;
    }
    apply_matrix_inplace(data_, 2 * num_qubits_, u, rows);
    apply_matrix_inplace(data_, 2 * num_qubits_, u.conjugate(), targets);
}

void QuantumState::apply_channel(const KrausChannel &channel, std::span<const size_t> targets, Rng &rng) {
    check_targets(targets, size_t{1} << channel.num_qubits());
    const auto &ops = channel.operators();
    if (ops.size() == 1) {
        // A single complete Kraus operator is unitary.
        if (backend_ == Backend::PureVector) {
            apply_matrix_inplace(data_, num_qubits_, ops[0], targets);
        } else {
            apply_unitary(ops[0], targets);
        }
        return;
    }
    if (backend_ == Backend::DensityMatrix) {
        // Local index r | c << k of the superoperator: row bits first.
        std::vector<size_t> local;
        for (size_t t : targets) {
            local.push_back(t + num_qubits_);
        }
        local.insert(local.end(), targets.begin(), targets.end());
        apply_matrix_inplace(data_, 2 * num_qubits_, channel.superoperator(), local);
        return;
    }

    const auto &weights = channel.mixture_weights();
    if (!weights.empty()) {
        double u = rng.uniform();
        size_t pick = weights.size() - 1;
        for (size_t i = 0; i < weights.size(); ++i) {
            if (u < weights[i]) {
                pick = i;
                break;
            }
            u -= weights[i];
        }
        apply_matrix_inplace(data_, num_qubits_, channel.mixture_unitaries()[pick], targets);
        return;
    }

    double total = norm_squared(data_);
    double u = rng.uniform() * total;
    std::vector<Complex> branch;
    std::vector<Complex> fallback;
    double fallback_p = 0.0;
    for (const auto &k : ops) {
        branch = data_;
        apply_matrix_inplace(branch, num_qubits_, k, targets);
        double p = norm_squared(branch);
        if (p < kBranchFloor) {
            continue;
        }
        if (u < p) {
            fallback = std::move(branch);
            fallback_p = p;
            break;
        }
        u -= p;
        fallback = branch;
        fallback_p = p;
    }
    if (fallback_p < kBranchFloor) {
        throw std::logic_error("all Kraus branches have zero probability");
    }
    double scale = std::sqrt(total / fallback_p);
    for (auto &a : fallback) {
        a *= scale;
    }
    data_ = std::move(fallback);
}

void QuantumState::apply_pauli(const PauliString &p) {
    if (p.size() != num_qubits_) {
        throw std::invalid_argument("Pauli string length does not match the register");
    }
    const uint64_t x = p.x_mask();
    const size_t d = dim();
    if (backend_ == Backend::PureVector) {
        std::vector<Complex> out(d);
        for (uint64_t b = 0; b < d; ++b) {
            out[b ^ x] = p.phase(b) * data_[b];
        }
        data_ = std::move(out);
        return;
    }
    // rho -> P rho P^dag; P is Hermitian.
    std::vector<Complex> out(d * d);
    for (uint64_t r = 0; r < d; ++r) {
        Complex pr = p.phase(r);
        for (uint64_t c = 0; c < d; ++c) {
            out[(r ^ x) * d + (c ^ x)] = pr * std::conj(p.phase(c)) * data_[r * d + c];
        }
    }
    data_ = std::move(out);
}

double QuantumState::expectation(const PauliString &p) const {
    if (p.size() != num_qubits_) {
        throw std::invalid_argument("Pauli string length does not match the register");
    }
    const uint64_t x = p.x_mask();
    const size_t d = dim();
    Complex acc = 0.0;
    double norm = 0.0;
    if (backend_ == Backend::PureVector) {
        for (uint64_t b = 0; b < d; ++b) {
            acc += std::conj(data_[b ^ x]) * p.phase(b) * data_[b];
            norm += std::norm(data_[b]);
        }
    } else {
        for (uint64_t c = 0; c < d; ++c) {
            acc += data_[c * d + (c ^ x)] * p.phase(c);
            norm += data_[c * d + c].real();
        }
    }
    if (norm < kBranchFloor) {
        return 0.0;
    }
    return std::clamp(acc.real() / norm, -1.0, 1.0);
}

double QuantumState::probability_plus(const PauliString &p) const {
    return 0.5 * (1.0 + expectation(p));
}

void QuantumState::project(const PauliString &p, int outcome, bool renormalize) {
    if (p.is_identity()) {
        throw std::invalid_argument("cannot measure the identity string");
    }
    if (outcome != 1 && outcome != -1) {
        throw std::invalid_argument("outcome must be +1 or -1");
    }
    const double s = outcome;
    QuantumState moved = *this;
    moved.apply_pauli(p);
    if (backend_ == Backend::PureVector) {
        for (size_t i = 0; i < data_.size(); ++i) {
            data_[i] = 0.5 * (data_[i] + s * moved.data_[i]);
        }
    } else {
        // (I + sP) rho (I + sP) / 4 = (rho + s P rho + s rho P + P rho P) / 4.
        const uint64_t x = p.x_mask();
        const size_t d = dim();
        std::vector<Complex> out(d * d);
        for (uint64_t r = 0; r < d; ++r) {
            Complex pr = p.phase(r ^ x);
            for (uint64_t c = 0; c < d; ++c) {
                Complex left = pr * data_[(r ^ x) * d + c];
                Complex right = data_[r * d + (c ^ x)] * p.phase(c);
                out[r * d + c] = 0.25 * (data_[r * d + c] + s * left + s * right + moved.data_[r * d + c]);
            }
        }
        data_ = std::move(out);
    }
    if (renormalize) {
        double t = trace();
        if (t < kBranchFloor) {
            throw std::logic_error("projection onto a zero-probability outcome");
        }
        scale(1.0 / t);
    }
}

int QuantumState::measure(const PauliString &p, Rng &rng) {
    if (p.is_identity()) {
        throw std::invalid_argument("cannot measure the identity string");
    }
    double p_plus = probability_plus(p);
    int outcome = rng.uniform() < p_plus ? 1 : -1;
    project(p, outcome, true);
    return outcome;
}

QuantumState QuantumState::partial_trace(std::span<const size_t> keep) const {
    if (keep.empty()) {
        throw std::invalid_argument("partial trace needs at least one kept qubit");
    }
    uint64_t keep_mask = 0;
    for (size_t q : keep) {
        if (q >= num_qubits_) {
            throw std::out_of_range("kept qubit out of range");
        }
        if (keep_mask & (uint64_t{1} << q)) {
            throw std::invalid_argument("kept qubits must be distinct");
        }
        keep_mask |= uint64_t{1} << q;
    }
    auto compress = [&](uint64_t b) {
        uint64_t out = 0;
        for (size_t j = 0; j < keep.size(); ++j) {
            out |= ((b >> keep[j]) & 1) << j;
        }
        return out;
    };
    const size_t d = dim();
    const auto kd = static_cast<Eigen::Index>(size_t{1} << keep.size());
    Matrix reduced = Matrix::Zero(kd, kd);
    Matrix rho = density_matrix();
    for (uint64_t r = 0; r < d; ++r) {
        for (uint64_t c = 0; c < d; ++c) {
            if ((r & ~keep_mask) == (c & ~keep_mask)) {
                reduced(static_cast<Eigen::Index>(compress(r)), static_cast<Eigen::Index>(compress(c))) +=
                    rho(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
            }
        }
    }
    return from_density_matrix(reduced);
}

std::vector<double> QuantumState::probabilities() const {
    const size_t d = dim();
    std::vector<double> out(d);
    for (size_t b = 0; b < d; ++b) {
        out[b] = backend_ == Backend::PureVector ? std::norm(data_[b]) : data_[b * d + b].real();
    }
    return out;
}

double QuantumState::trace() const {
    double t = 0.0;
    for (double p : probabilities()) {
        t += p;
    }
    return t;
}

double QuantumState::fidelity_to(const std::vector<Complex> &reference) const {
    const size_t d = dim();
    if (reference.size() != d) {
        throw std::invalid_argument("reference state has the wrong dimension");
    }
    if (backend_ == Backend::PureVector) {
        Complex overlap = 0.0;
        for (size_t b = 0; b < d; ++b) {
            overlap += std::conj(reference[b]) * data_[b];
        }
        return std::norm(overlap);
    }
    Complex acc = 0.0;
    for (size_t r = 0; r < d; ++r) {
        for (size_t c = 0; c < d; ++c) {
            acc += std::conj(reference[r]) * data_[r * d + c] * reference[c];
        }
    }
    return acc.real();
}

void QuantumState::scale(double weight) {
    // Amplitudes scale with sqrt(weight) so that trace() scales with weight.
    double f = backend_ == Backend::PureVector ? std::sqrt(weight) : weight;
    for (auto &a : data_) {
        a *= f;
    }
}

void QuantumState::add(const QuantumState &other) {
    if (backend_ != Backend::DensityMatrix || other.backend_ != Backend::DensityMatrix) {
        throw std::logic_error("branch sums need the density-matrix backend");
    }
    if (other.num_qubits_ != num_qubits_) {
        throw std::invalid_argument("register size mismatch");
    }
    for (size_t i = 0; i < data_.size(); ++i) {
        data_[i] += other.data_[i];
    }
}

void QuantumState::validate(double tolerance, double eigen_floor) const {
    if (std::abs(trace() - 1.0) > tolerance) {
        throw std::logic_error("state is not normalized");
    }
    if (backend_ == Backend::PureVector) {
        return;
    }
    Matrix rho = density_matrix();
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tolerance) {
        throw std::logic_error("density matrix is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(rho, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < eigen_floor) {
        throw std::logic_error("density matrix is not positive semidefinite");
    }
}

}  // namespace nvnode
