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

#include "nvnode/ghz.h"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "nvnode/analysis.h"
#include "nvnode/parallel.h"

namespace nvnode {

namespace {

const double kHalfPi = std::numbers::pi / 2;

using Weights = std::array<std::array<std::array<double, 2>, 2>, 2>;

int basis_code(JointBasis b) { return static_cast<int>(b); }

bool photon_in_x(JointBasis b) { return b == JointBasis::XeXcXp; }

ConfusionMatrix mzi_confusion(const NoiseModel &noise) {
    double keep = 1.0 - 0.5 * noise.background_error;
    return ConfusionMatrix(keep, keep);
}

ConfusionMatrix photon_confusion(JointBasis basis, const NoiseModel &noise) {
    return photon_in_x(basis) ? mzi_confusion(noise) : photon_z_confusion(noise);
}

void mzi_optics(QuantumState &state, const NoiseModel &noise, Rng &rng) {
    double p = (1.0 - noise.mzi_visibility) / 2.0;
    if (p > 0.0) {
        state.apply_channel(channels::cached(channels::Kind::PhaseFlip, p), {kPhoton.index}, rng);
    }
    state.apply_unitary(gates::hadamard(), {kPhoton.index});
}

// Mapped electron state m and photon bit p of a coincidence, as recorded in
// variant v: bright (reported 0) in the unflipped run means m = 0, in the
// flipped run m = 1.
RunVariant variant_of(int mapped_electron) {
    return mapped_electron == 0 ? RunVariant::Unflipped : RunVariant::Flipped;
}

std::array<std::array<double, 2>, 2> coincidence_populations(const Weights &w, std::optional<int> photon_bit) {
    std::array<std::array<double, 2>, 2> pop{};
    double total = 0.0;
    for (int m = 0; m < 2; ++m) {
        for (int p = 0; p < 2; ++p) {
            if (photon_bit && *photon_bit != p) {
                continue;
            }
            pop[m][p] = w[static_cast<int>(variant_of(m))][0][p];
            total += pop[m][p];
        }
    }
    if (total <= 0.0) {
        throw std::invalid_argument("no coincidences to normalize");
    }
    for (auto &row : pop) {
        for (auto &x : row) {
            x /= total;
        }
    }
    return pop;
}

Weights weights_of(const CoincidenceTable &t) {
    Weights w{};
    for (int v = 0; v < 2; ++v) {
        for (int e = 0; e < 2; ++e) {
            for (int p = 0; p < 2; ++p) {
                w[v][e][p] = static_cast<double>(t.counts[v][e][p]);
            }
        }
    }
    return w;
}

WitnessTerm term_from(double value, uint64_t n) {
    WitnessTerm t;
    t.value = value;
    t.coincidences = n;
    t.sigma = n > 0 ? std::sqrt(std::max(0.0, 1.0 - value * value) / static_cast<double>(n)) : 0.0;
    return t;
}

}  // namespace

std::string basis_name(JointBasis basis) {
    switch (basis) {
        case JointBasis::ZeIcZp:
            return "ZeIcZp";
        case JointBasis::ZeZcIp:
            return "ZeZcIp";
        case JointBasis::XeXcXp:
            return "XeXcXp";
    }
    return "?";
}

JointBasis parse_basis(const std::string &name) {
    for (auto b : kAllBases) {
        if (basis_name(b) == name) {
            return b;
        }
    }
    throw std::invalid_argument("unknown joint basis '" + name + "'");
}

std::vector<GateSpec> mapping_sequence(JointBasis basis) {
    switch (basis) {
        case JointBasis::ZeIcZp:
            return {};
        case JointBasis::ZeZcIp:
            return {GateSpec::mw(Axis::Y, kHalfPi), GateSpec::nuc(kCarbon1, Axis::Y, kHalfPi),
                    GateSpec::cond_rot(kCarbon1), GateSpec::nuc(kCarbon1, Axis::Y, -kHalfPi),
                    GateSpec::mw(Axis::X, kHalfPi)};
        case JointBasis::XeXcXp:
            return {GateSpec::cond_rot(kCarbon1), GateSpec::nuc(kCarbon1, Axis::Y, -kHalfPi),
                    GateSpec::mw(Axis::X, -kHalfPi)};
    }
    return {};
}

int correlator_value(JointBasis basis, int mapped_electron, int photon_bit) {
    int zp = photon_bit == 0 ? 1 : -1;
    switch (basis) {
        case JointBasis::ZeIcZp:
            return -(mapped_electron == 0 ? 1 : -1) * zp;
        case JointBasis::ZeZcIp:
            return mapped_electron == 0 ? 1 : -1;
        case JointBasis::XeXcXp:
            return (mapped_electron == 1 ? 1 : -1) * zp;
    }
    return 0;
}

std::vector<GateSpec> build_ghz_circuit() {
    return {GateSpec::mw(Axis::Y, kHalfPi), GateSpec::cond_rot(kCarbon1), GateSpec::nuc(kCarbon1, Axis::X, kHalfPi),
            GateSpec::mw(Axis::Z, -kHalfPi), GateSpec::emit(false)};
}

std::vector<Complex> ideal_ghz_amplitudes() {
    std::vector<Complex> a(size_t{1} << kNodeQubits, 0.0);
    const double r = 1.0 / std::sqrt(2.0);
    a[size_t{1} << kPhoton.index] = r;                            // |0>_e |0>_c |l>_p
    a[(size_t{1} << kElectron.index) | (size_t{1} << kCarbon1.index)] = r;  // |1>_e |1>_c |e>_p
    return a;
}

int mzi_photon_x_measurement(QuantumState &state, const NoiseModel &noise, Rng &rng) {
    mzi_optics(state, noise, rng);
    int z = state.measure(PauliString::on(state.num_qubits(), {kPhoton.index}, Pauli::Z), rng);
    if (rng.bernoulli(noise.background_error)) {
        z = rng.bernoulli(0.5) ? 1 : -1;
    }
    return z;
}

uint64_t CoincidenceTable::heralded(RunVariant v) const {
    const auto &c = counts[static_cast<int>(v)];
    return c[0][0] + c[0][1] + c[1][0] + c[1][1];
}

uint64_t CoincidenceTable::coincidences(RunVariant v, int photon_bit) const {
    return counts[static_cast<int>(v)][0][photon_bit];
}

uint64_t CoincidenceTable::total_coincidences() const {
    uint64_t n = 0;
    for (int v = 0; v < 2; ++v) {
        n += counts[v][0][0] + counts[v][0][1];
    }
    return n;
}

double CoincidenceTable::population(int mapped_electron, int photon_bit) const {
    return coincidence_populations(weights_of(*this), std::nullopt)[mapped_electron][photon_bit];
}

double CoincidenceTable::variant_population(RunVariant v, int electron_bit, int photon_bit) const {
    uint64_t h = heralded(v);
    if (h == 0) {
        return 0.0;
    }
    return static_cast<double>(counts[static_cast<int>(v)][electron_bit][photon_bit]) / static_cast<double>(h);
}

void CoincidenceTable::merge(const CoincidenceTable &other) {
    if (other.basis != basis) {
        throw std::invalid_argument("cannot merge tables of different bases");
    }
    for (int v = 0; v < 2; ++v) {
        shots[v] += other.shots[v];
        for (int e = 0; e < 2; ++e) {
            for (int p = 0; p < 2; ++p) {
                counts[v][e][p] += other.counts[v][e][p];
            }
        }
    }
    warnings.insert(warnings.end(), other.warnings.begin(), other.warnings.end());
}

std::optional<std::array<int, 2>> run_ghz_shot(JointBasis basis, RunVariant variant, const NoiseModel &noise,
                                               Rng &rng) {
    NodeState node = NodeState::fresh(Backend::PureVector);
    auto circuit = build_ghz_circuit();
    apply_circuit(node, circuit, noise, rng);
    if (!node.heralded) {
        return std::nullopt;
    }
    auto map = mapping_sequence(basis);
    apply_circuit(node, map, noise, rng);
    if (variant == RunVariant::Flipped) {
        mw_rotation(node.q, Axis::X, std::numbers::pi, noise, rng);
    }
    int e = fluorescence_readout(node.q, noise, rng).reported;
    int z = photon_in_x(basis) ? mzi_photon_x_measurement(node.q, noise, rng) : detect_photon_z(node.q, noise, rng);
    return std::array<int, 2>{e, z == 1 ? 0 : 1};
}

CoincidenceTable measure_joint(JointBasis basis, uint64_t shots, const NoiseModel &noise, uint64_t seed,
                               const MeasureOptions &options) {
    if (shots == 0) {
        throw std::invalid_argument("measure_joint needs at least one shot");
    }
    noise.validate();
    CoincidenceTable total;
    total.basis = basis;
    uint64_t per_variant = shots / 2;
    if (shots % 2 != 0) {
        total.warnings.push_back("odd shot count " + std::to_string(shots) + " rounded down to " +
                                 std::to_string(per_variant) + " per variant");
    }
    for (int v = 0; v < 2; ++v) {
        uint64_t stream = streams::kGhz * 8 + static_cast<uint64_t>(basis_code(basis)) * 2 + v;
        size_t workers = resolve_threads(options.threads, per_variant);
        std::vector<CoincidenceTable> parts(workers);
        parallel_chunks(per_variant, workers, [&](size_t w, uint64_t begin, uint64_t end) {
            auto &part = parts[w];
            part.basis = basis;
            for (uint64_t s = begin; s < end; ++s) {
                Rng rng(seed, stream, s);
                auto r = run_ghz_shot(basis, static_cast<RunVariant>(v), noise, rng);
                part.shots[v] += 1;
                if (r) {
                    part.counts[v][(*r)[0]][(*r)[1]] += 1;
                }
            }
        });
        for (auto &p : parts) {
            p.basis = basis;
            total.merge(p);
        }
    }
    return total;
}

std::array<std::array<std::array<double, 2>, 2>, 2> exact_joint_probabilities(JointBasis basis,
                                                                             const NoiseModel &noise) {
    noise.validate();
    Weights out{};
    Rng unused(0);
    ConfusionMatrix ce = ConfusionMatrix::electron(noise);
    ConfusionMatrix cp = photon_confusion(basis, noise);
    for (int v = 0; v < 2; ++v) {
        NodeState node = NodeState::fresh(Backend::DensityMatrix);
        auto circuit = build_ghz_circuit();
        apply_circuit(node, circuit, noise, unused);
        auto map = mapping_sequence(basis);
        apply_circuit(node, map, noise, unused);
        if (v == 1) {
            mw_rotation(node.q, Axis::X, std::numbers::pi, noise, unused);
        }
        if (photon_in_x(basis)) {
            mzi_optics(node.q, noise, unused);
        }
        auto probs = node.q.probabilities();
        double truth[2][2] = {};
        for (size_t i = 0; i < probs.size(); ++i) {
            truth[(i >> kElectron.index) & 1][(i >> kPhoton.index) & 1] += probs[i];
        }
        for (int e = 0; e < 2; ++e) {
            for (int p = 0; p < 2; ++p) {
                double s = 0.0;
                for (int te = 0; te < 2; ++te) {
                    for (int tp = 0; tp < 2; ++tp) {
                        s += ce(e, te) * cp(p, tp) * truth[te][tp];
                    }
                }
                out[v][e][p] = s;
            }
        }
    }
    return out;
}

double fidelity_lower_bound(double e1, double e2, double e3) { return (e1 + e2 + e3 - 1.0) / 2.0; }

WitnessResult witness_from_values(double e1, double e2, double e3, double s1, double s2, double s3) {
    WitnessResult r;
    r.e1 = {e1, s1, 0};
    r.e2 = {e2, s2, 0};
    r.e3 = {e3, s3, 0};
    r.f_lb = fidelity_lower_bound(e1, e2, e3);
    r.sigma_f_lb = 0.5 * std::sqrt(s1 * s1 + s2 * s2 + s3 * s3);
    return r;
}

double expectation_from_counts(JointBasis basis, const std::array<std::array<std::array<double, 2>, 2>, 2> &w,
                               std::optional<int> photon_bit) {
    auto pop = coincidence_populations(w, photon_bit);
    double e = 0.0;
    for (int m = 0; m < 2; ++m) {
        for (int p = 0; p < 2; ++p) {
            e += pop[m][p] * correlator_value(basis, m, p);
        }
    }
    return std::clamp(e, -1.0, 1.0);
}

double variant_expectation(const CoincidenceTable &table, RunVariant v) {
    uint64_t h = table.heralded(v);
    if (h == 0) {
        throw std::invalid_argument("no heralded shots in this variant");
    }
    double e = 0.0;
    for (int r = 0; r < 2; ++r) {
        int mapped = v == RunVariant::Flipped ? 1 - r : r;
        for (int p = 0; p < 2; ++p) {
            e += table.variant_population(v, r, p) * correlator_value(table.basis, mapped, p);
        }
    }
    return e;
}

WitnessTerm conditional_term(const CoincidenceTable &table, int photon_bit) {
    uint64_t n = table.coincidences(RunVariant::Unflipped, photon_bit) +
                 table.coincidences(RunVariant::Flipped, photon_bit);
    return term_from(expectation_from_counts(table.basis, weights_of(table), photon_bit), n);
}

WitnessResult estimate_witness(const std::map<JointBasis, CoincidenceTable> &tables, const WitnessOptions &options) {
    std::array<WitnessTerm, 3> terms;
    for (auto b : kAllBases) {
        auto it = tables.find(b);
        if (it == tables.end()) {
            throw std::invalid_argument("missing joint basis " + basis_name(b));
        }
        const auto &t = it->second;
        if (t.basis != b) {
            throw std::invalid_argument("table filed under the wrong basis");
        }
        uint64_t n = t.total_coincidences();
        if (n == 0) {
            throw std::invalid_argument("no coincidences in basis " + basis_name(b));
        }
        WitnessTerm term = term_from(expectation_from_counts(b, weights_of(t), std::nullopt), n);
        if (options.bootstrap) {
            // Resample the coincidence events of this basis.
            std::vector<uint8_t> events;
            for (int m = 0; m < 2; ++m) {
                for (int p = 0; p < 2; ++p) {
                    uint64_t c = t.counts[static_cast<int>(variant_of(m))][0][p];
                    events.insert(events.end(), c, static_cast<uint8_t>(m * 2 + p));
                }
            }
            auto stat = [b](const std::vector<uint8_t> &sample) {
                double e = 0.0;
                for (auto ev : sample) {
                    e += correlator_value(b, ev / 2, ev % 2);
                }
                return e / static_cast<double>(sample.size());
            };
            Interval ci = bootstrap_ci(events, stat, options.resamples,
                                       derive_seed(options.seed, streams::kGhz, static_cast<uint64_t>(basis_code(b))));
            term.sigma = ci.width() / 2.0;
        }
        terms[basis_code(b)] = term;
    }
    WitnessResult r = witness_from_values(terms[0].value, terms[1].value, terms[2].value, terms[0].sigma,
                                          terms[1].sigma, terms[2].sigma);
    r.e1.coincidences = terms[0].coincidences;
    r.e2.coincidences = terms[1].coincidences;
    r.e3.coincidences = terms[2].coincidences;
    return r;
}

WitnessResult exact_witness(const NoiseModel &noise) {
    std::array<double, 3> e{};
    for (auto b : kAllBases) {
        e[basis_code(b)] = expectation_from_counts(b, exact_joint_probabilities(b, noise), std::nullopt);
    }
    return witness_from_values(e[0], e[1], e[2]);
}

QuantumState prepare_ghz(const NoiseModel &noise, Backend backend, Rng &rng) {
    NodeState node = NodeState::fresh(backend);
    auto circuit = build_ghz_circuit();
    apply_circuit(node, circuit, noise, rng);
    return node.q;
}

WitnessResult state_witness(const QuantumState &state) {
    double e1 = -state.expectation(PauliString("ZIIIZ"));
    double e2 = state.expectation(PauliString("ZZIII"));
    double e3 = state.expectation(PauliString("XXIIX"));
    return witness_from_values(e1, e2, e3);
}

}  // namespace nvnode
