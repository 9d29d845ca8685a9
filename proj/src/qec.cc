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

#include "nvnode/qec.h"

#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "json.hpp"
#include "nvnode/parallel.h"

namespace nvnode {

namespace {

const double kHalfPi = std::numbers::pi / 2;

void run_gates(QuantumState &q, const std::vector<GateSpec> &gates, const NoiseModel &noise, Rng &rng) {
    NodeState node{std::move(q), true, true};
    apply_circuit(node, gates, noise, rng);
    q = std::move(node.q);
}

bool is_product(const LogicalPrep &p) { return p.kind != PrepKind::PlusEntangled; }

QubitId flip_target(Action a) {
    switch (a) {
        case Action::FlipQ1:
            return kCarbon1;
        case Action::FlipQ2:
            return kCarbon2;
        case Action::FlipQ3:
            return kCarbon3;
        case Action::None:
            break;
    }
    throw std::logic_error("no flip target for Action::None");
}

// Density-backend parity readout: map, then split by reported bit, reset.
std::array<QuantumState, 2> parity_branches(const QuantumState &rho, ParityCheck check, const NoiseModel &noise) {
    Rng unused(0);
    QuantumState mapped = rho;
    run_gates(mapped, parity_map(check), noise, unused);
    auto br = fluorescence_branches(mapped, noise);
    for (auto &b : br) {
        reset_electron(b, noise, unused);
    }
    return br;
}

void check_shot_args(int rounds, const LogicalPrep &prep, const NoiseModel &noise) {
    if (rounds < 0) {
        throw std::invalid_argument("number of rounds must be non-negative");
    }
    prep.validate();
    noise.validate();
}

}  // namespace

LogicalPrep LogicalPrep::zero() { return {PrepKind::ZeroL_EarlyPhoton, 1.0, 0.0}; }

LogicalPrep LogicalPrep::one() { return {PrepKind::OneL_LatePhoton, 0.0, 1.0}; }

LogicalPrep LogicalPrep::plus(Complex alpha, Complex beta) { return {PrepKind::PlusEntangled, alpha, beta}; }

void LogicalPrep::validate() const {
    if (kind == PrepKind::PlusEntangled && std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > 1e-12) {
        throw std::invalid_argument("logical amplitudes must satisfy |alpha|^2 + |beta|^2 = 1");
    }
}

std::string LogicalPrep::str() const {
    switch (kind) {
        case PrepKind::ZeroL_EarlyPhoton:
            return "zero";
        case PrepKind::OneL_LatePhoton:
            return "one";
        case PrepKind::PlusEntangled:
            return "plus";
    }
    return "?";
}

LogicalPrep parse_prep(const std::string &name) {
    if (name == "zero") {
        return LogicalPrep::zero();
    }
    if (name == "one") {
        return LogicalPrep::one();
    }
    if (name == "plus") {
        return LogicalPrep::plus();
    }
    throw std::invalid_argument("unknown prep '" + name + "' (expected zero, one or plus)");
}

std::string check_name(ParityCheck check) {
    switch (check) {
        case ParityCheck::ZIZ:
            return "ZIZ";
        case ParityCheck::IZZ:
            return "IZZ";
        case ParityCheck::ZII:
            return "ZII";
    }
    return "?";
}

std::vector<QubitId> check_support(ParityCheck check) {
    switch (check) {
        case ParityCheck::ZIZ:
            return {kCarbon1, kCarbon3};
        case ParityCheck::IZZ:
            return {kCarbon2, kCarbon3};
        case ParityCheck::ZII:
            return {kCarbon1};
    }
    return {};
}

PauliString check_operator(ParityCheck check) {
    PauliString p(std::vector<Pauli>(kNodeQubits, Pauli::I));
    for (auto q : check_support(check)) {
        p[q.index] = Pauli::Z;
    }
    return p;
}

std::string action_name(Action a) {
    switch (a) {
        case Action::None:
            return "None";
        case Action::FlipQ1:
            return "FlipQ1";
        case Action::FlipQ2:
            return "FlipQ2";
        case Action::FlipQ3:
            return "FlipQ3";
    }
    return "?";
}

Action parse_action(const std::string &name) {
    for (auto a : {Action::None, Action::FlipQ1, Action::FlipQ2, Action::FlipQ3}) {
        if (action_name(a) == name) {
            return a;
        }
    }
    throw std::invalid_argument("unknown action '" + name + "'");
}

Action decode(int ziz, int izz) {
    if ((ziz != 1 && ziz != -1) || (izz != 1 && izz != -1)) {
        throw std::invalid_argument("syndrome values must be +1 or -1");
    }
    if (ziz == -1 && izz == 1) {
        return Action::FlipQ1;
    }
    if (ziz == 1 && izz == -1) {
        return Action::FlipQ2;
    }
    if (ziz == -1 && izz == -1) {
        return Action::FlipQ3;
    }
    return Action::None;
}

std::array<std::pair<std::array<int, 2>, Action>, 4> CorrectionTable::entries() {
    return {{{{-1, 1}, Action::FlipQ1}, {{1, -1}, Action::FlipQ2}, {{-1, -1}, Action::FlipQ3}, {{1, 1}, Action::None}}};
}

int outcome_from_parities(int ziz, int izz, int zii, int zp) {
    int i1 = zii == -1;
    int i3 = i1 ^ (ziz == -1);
    int i2 = i3 ^ (izz == -1);
    return outcome_index(i1, i2, i3, zp == -1);
}

int parity_index(int ziz, int izz, int zii, int zp) {
    return (ziz == -1) | (izz == -1) << 1 | (zii == -1) << 2 | (zp == -1) << 3;
}

int outcome_from_parity_index(int k) {
    auto s = [&](int bit) { return (k >> bit) & 1 ? -1 : 1; };
    return outcome_from_parities(s(0), s(1), s(2), s(3));
}

std::vector<GateSpec> prep_circuit(const LogicalPrep &prep) {
    prep.validate();
    switch (prep.kind) {
        case PrepKind::ZeroL_EarlyPhoton:
            return {GateSpec::emit(true)};
        case PrepKind::OneL_LatePhoton:
            return {GateSpec::flip(kCarbon1), GateSpec::flip(kCarbon2), GateSpec::flip(kCarbon3),
                    GateSpec::mw(Axis::X, std::numbers::pi), GateSpec::emit(true)};
        case PrepKind::PlusEntangled: {
            double theta = 2.0 * std::atan2(std::abs(prep.beta), std::abs(prep.alpha));
            double phi = std::arg(prep.beta) - std::arg(prep.alpha);
            std::vector<GateSpec> c = {GateSpec::mw(Axis::Y, theta)};
            if (phi != 0.0) {
                c.push_back(GateSpec::mw(Axis::Z, phi));
            }
            c.push_back(GateSpec::emit(true));
            c.push_back(GateSpec::cnot(kElectron, kCarbon1));
            c.push_back(GateSpec::cnot(kElectron, kCarbon2));
            c.push_back(GateSpec::swap(kElectron, kCarbon3));
            return c;
        }
    }
    return {};
}

NodeState prepare_logical(const LogicalPrep &prep, const NoiseModel &noise, Rng &rng, Backend backend) {
    NodeState node = NodeState::fresh(backend);
    apply_circuit(node, prep_circuit(prep), noise, rng);
    if (is_product(prep)) {
        reset_electron(node.q, noise, rng);
    }
    return node;
}

std::vector<GateSpec> parity_map(ParityCheck check) {
    auto support = check_support(check);
    std::vector<GateSpec> c = {GateSpec::mw(Axis::Y, kHalfPi)};
    for (auto q : support) {
        // Y(pi/2) conjugation turns the conditional X rotation into
        // exp(-i pi/4 Z_e Z_c).
        c.push_back(GateSpec::nuc(q, Axis::Y, kHalfPi));
        c.push_back(GateSpec::cond_rot(q));
        c.push_back(GateSpec::nuc(q, Axis::Y, -kHalfPi));
    }
    c.push_back(support.size() == 2 ? GateSpec::mw(Axis::Y, -kHalfPi) : GateSpec::mw(Axis::X, -kHalfPi));
    return c;
}

int parity_round(QuantumState &state, ParityCheck check, const NoiseModel &noise, Rng &rng) {
    run_gates(state, parity_map(check), noise, rng);
    int bit = fluorescence_readout(state, noise, rng).reported;
    reset_electron(state, noise, rng);
    return parity_from_bit(bit);
}

FinalMeasurement final_measurement(QuantumState &state, const NoiseModel &noise, Rng &rng) {
    FinalMeasurement m;
    m.ziz = parity_round(state, ParityCheck::ZIZ, noise, rng);
    m.izz = parity_round(state, ParityCheck::IZZ, noise, rng);
    m.zii = parity_round(state, ParityCheck::ZII, noise, rng);
    m.zp = detect_photon_z(state, noise, rng);
    m.outcome = outcome_from_parities(m.ziz, m.izz, m.zii, m.zp);
    return m;
}

ShotRecord run_qec_shot(const LogicalPrep &prep, int rounds, bool feedback, const NoiseModel &noise, uint64_t seed,
                        uint64_t shot, const QecOptions &options) {
    check_shot_args(rounds, prep, noise);
    Rng rng(seed, streams::kQec, shot);
    ShotRecord rec;
    rec.shot = shot;
    NodeState node = prepare_logical(prep, noise, rng);
    rec.heralded = node.heralded;
    if (!rec.heralded) {
        return rec;
    }
    QuantumState &q = node.q;
    for (int k = 1; k <= rounds; ++k) {
        if (options.hook) {
            options.hook(q, k, shot);
        }
        apply_idle_round_noise(q, noise, rng);
        SyndromeRecord s;
        s.round = k;
        s.ziz = parity_round(q, ParityCheck::ZIZ, noise, rng);
        s.izz = parity_round(q, ParityCheck::IZZ, noise, rng);
        s.feedback_applied = feedback;
        s.action = feedback ? decode(s.ziz, s.izz) : Action::None;
        if (s.action != Action::None) {
            nuclear_flip(q, flip_target(s.action), noise, rng);
        }
        rec.syndromes.push_back(s);
    }
    if (options.hook) {
        options.hook(q, rounds + 1, shot);
    }
    if (options.idle_before_final) {
        apply_idle_round_noise(q, noise, rng);
    }
    auto m = final_measurement(q, noise, rng);
    rec.final_outcome = m.outcome;
    rec.final_ziz = m.ziz;
    rec.final_izz = m.izz;
    rec.final_zii = m.zii;
    rec.final_zp = m.zp;
    return rec;
}

std::vector<ShotRecord> run_qec(const LogicalPrep &prep, int rounds, bool feedback, uint64_t shots,
                                const NoiseModel &noise, uint64_t seed, const QecOptions &options) {
    if (shots == 0) {
        throw std::invalid_argument("run_qec needs at least one shot");
    }
    check_shot_args(rounds, prep, noise);
    std::vector<ShotRecord> records(shots);
    parallel_chunks(shots, resolve_threads(options.threads, shots), [&](size_t, uint64_t begin, uint64_t end) {
        for (uint64_t s = begin; s < end; ++s) {
            records[s] = run_qec_shot(prep, rounds, feedback, noise, seed, s, options);
        }
    });
    return records;
}

QecDistribution exact_qec(const LogicalPrep &prep, int rounds, bool feedback, const NoiseModel &noise,
                          const QecOptions &options) {
    check_shot_args(rounds, prep, noise);
    Rng unused(0);
    QecDistribution out;
    QuantumState rho = prepare_logical(prep, noise, unused, Backend::DensityMatrix).q;
    for (int k = 1; k <= rounds; ++k) {
        if (options.hook) {
            options.hook(rho, k, 0);
        }
        apply_idle_round_noise(rho, noise, unused);
        QuantumState next;
        bool first = true;
        double mz = 0.0, mi = 0.0;
        auto b1 = parity_branches(rho, ParityCheck::ZIZ, noise);
        for (int r1 = 0; r1 < 2; ++r1) {
            auto b2 = parity_branches(b1[r1], ParityCheck::IZZ, noise);
            for (int r2 = 0; r2 < 2; ++r2) {
                QuantumState &b = b2[r2];
                int ziz = parity_from_bit(r1), izz = parity_from_bit(r2);
                double w = b.trace();
                mz += w * ziz;
                mi += w * izz;
                Action a = feedback ? decode(ziz, izz) : Action::None;
                if (a != Action::None) {
                    nuclear_flip(b, flip_target(a), noise, unused);
                }
                if (first) {
                    next = std::move(b);
                    first = false;
                } else {
                    next.add(b);
                }
            }
        }
        out.mean_ziz.push_back(mz);
        out.mean_izz.push_back(mi);
        rho = std::move(next);
    }
    if (options.hook) {
        options.hook(rho, rounds + 1, 0);
    }
    if (options.idle_before_final) {
        apply_idle_round_noise(rho, noise, unused);
    }
    ConfusionMatrix cp = photon_z_confusion(noise);
    auto b1 = parity_branches(rho, ParityCheck::ZIZ, noise);
    for (int r1 = 0; r1 < 2; ++r1) {
        auto b2 = parity_branches(b1[r1], ParityCheck::IZZ, noise);
        for (int r2 = 0; r2 < 2; ++r2) {
            auto b3 = parity_branches(b2[r2], ParityCheck::ZII, noise);
            for (int r3 = 0; r3 < 2; ++r3) {
                auto probs = b3[r3].probabilities();
                double photon[2] = {0.0, 0.0};
                for (size_t i = 0; i < probs.size(); ++i) {
                    photon[(i >> kPhoton.index) & 1] += probs[i];
                }
                for (int j = 0; j < 2; ++j) {
                    double pj = cp(j, 0) * photon[0] + cp(j, 1) * photon[1];
                    int idx = parity_index(parity_from_bit(r1), parity_from_bit(r2), parity_from_bit(r3), j ? -1 : 1);
                    out.parity_probs[idx] += pj;
                }
            }
        }
    }
    return out;
}

std::vector<uint64_t> parity_counts(const std::vector<ShotRecord> &records) {
    std::vector<uint64_t> c(16, 0);
    for (const auto &r : records) {
        if (r.heralded) {
            c[parity_index(r.final_ziz, r.final_izz, r.final_zii, r.final_zp)] += 1;
        }
    }
    return c;
}

std::vector<ConfusionMatrix> final_readout_confusion(const NoiseModel &noise) {
    auto p = ConfusionMatrix::parity(noise);
    return {p, p, p, photon_z_confusion(noise)};
}

std::vector<int> target_outcomes(const LogicalPrep &prep) {
    switch (prep.kind) {
        case PrepKind::ZeroL_EarlyPhoton:
            return {outcome_index(0, 0, 0, 0)};
        case PrepKind::OneL_LatePhoton:
            return {outcome_index(1, 1, 1, 1)};
        case PrepKind::PlusEntangled:
            return {outcome_index(0, 0, 0, 0), outcome_index(1, 1, 1, 1)};
    }
    return {};
}

FidelityEstimate logical_fidelity(const std::vector<double> &parity_probs, uint64_t samples,
                                  const LogicalPrep &prep, const NoiseModel &noise) {
    if (parity_probs.size() != 16) {
        throw std::invalid_argument("expected 16 final-outcome probabilities");
    }
    if (samples == 0) {
        throw std::invalid_argument("no heralded samples");
    }
    auto conf = final_readout_confusion(noise);
    auto targets = target_outcomes(prep);
    auto mit = mitigate_readout(PopulationVector(parity_probs, samples), conf);
    FidelityEstimate f;
    f.samples = samples;
    f.slack = mit.slack;
    for (int k = 0; k < 16; ++k) {
        int o = outcome_from_parity_index(k);
        f.mitigated[o] = mit.mitigated[k];
        for (int t : targets) {
            if (t == o) {
                f.value += mit.mitigated[k];
                f.raw += parity_probs[k];
            }
        }
    }
    // Linear weights of the unclipped estimator on each raw outcome.
    double mean = 0.0, second = 0.0;
    for (int k = 0; k < 16; ++k) {
        std::vector<double> unit(16, 0.0);
        unit[k] = 1.0;
        auto col = mitigate_readout(PopulationVector(unit), conf).pre_clip;
        double w = 0.0;
        for (int j = 0; j < 16; ++j) {
            for (int t : targets) {
                w += outcome_from_parity_index(j) == t ? col[j] : 0.0;
            }
        }
        mean += w * parity_probs[k];
        second += w * w * parity_probs[k];
    }
    f.sigma = std::sqrt(std::max(0.0, second - mean * mean) / static_cast<double>(samples));
    return f;
}

FidelityEstimate logical_fidelity(const std::vector<ShotRecord> &records, const LogicalPrep &prep,
                                  const NoiseModel &noise) {
    auto counts = parity_counts(records);
    auto pop = PopulationVector::from_counts(counts);
    return logical_fidelity(pop.p, pop.samples, prep, noise);
}

namespace {

Mean make_mean(double sum, double n) {
    Mean m;
    m.n = static_cast<uint64_t>(std::llround(n));
    if (n <= 0.0) {
        return m;
    }
    m.value = sum / n;
    m.sigma = std::sqrt(std::max(0.0, 1.0 - m.value * m.value) / n);
    return m;
}

}  // namespace

PostSelection post_select_no_error(const std::vector<ShotRecord> &records) {
    double all = 0, all_n = 0, sel = 0, sel_n = 0;
    for (const auto &r : records) {
        if (!r.heralded) {
            continue;
        }
        int v = r.final_zii * r.final_zp;
        all += v;
        all_n += 1;
        if (r.final_ziz == 1 && r.final_izz == 1) {
            sel += v;
            sel_n += 1;
        }
    }
    if (sel_n == 0) {
        throw std::invalid_argument("no heralded record passes the no-error selection");
    }
    return {make_mean(sel, sel_n), make_mean(all, all_n), sel_n / all_n};
}

PostSelection post_select_no_error(const std::array<double, 16> &parity_probs, uint64_t samples) {
    double all = 0, sel = 0, sel_p = 0;
    for (int k = 0; k < 16; ++k) {
        int v = ((k >> 2) & 1) == ((k >> 3) & 1) ? 1 : -1;
        all += v * parity_probs[k];
        if ((k & 3) == 0) {
            sel += v * parity_probs[k];
            sel_p += parity_probs[k];
        }
    }
    if (sel_p <= 0.0) {
        throw std::invalid_argument("no probability passes the no-error selection");
    }
    double n = static_cast<double>(samples);
    PostSelection ps;
    ps.all = make_mean(all * n, n);
    ps.selected = make_mean(sel * n, sel_p * n);
    ps.acceptance = sel_p;
    return ps;
}

void write_shot_records(std::ostream &out, const std::vector<ShotRecord> &records, const std::string &config_json) {
    nlohmann::ordered_json header;
    header["schema"] = "nvnode.shot_records";
    header["version"] = kShotSchemaVersion;
    header["config"] = nlohmann::ordered_json::parse(config_json.empty() ? "{}" : config_json);
    out << header.dump() << '\n';
    for (const auto &r : records) {
        nlohmann::ordered_json j;
        j["shot"] = r.shot;
        j["heralded"] = r.heralded;
        auto syn = nlohmann::ordered_json::array();
        for (const auto &s : r.syndromes) {
            syn.push_back({s.round, s.ziz, s.izz, action_name(s.action), s.feedback_applied});
        }
        j["syndromes"] = syn;
        j["final"] = {r.final_outcome, r.final_ziz, r.final_izz, r.final_zii, r.final_zp};
        out << j.dump() << '\n';
    }
}

std::vector<ShotRecord> read_shot_records(std::istream &in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw std::invalid_argument("empty shot-record stream");
    }
    auto header = nlohmann::json::parse(line);
    if (header.value("schema", "") != "nvnode.shot_records" || header.value("version", 0) != kShotSchemaVersion) {
        throw std::invalid_argument("unsupported shot-record schema");
    }
    std::vector<ShotRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        auto j = nlohmann::json::parse(line);
        ShotRecord r;
        r.shot = j.at("shot").get<uint64_t>();
        r.heralded = j.at("heralded").get<bool>();
        for (const auto &s : j.at("syndromes")) {
            r.syndromes.push_back({s.at(0).get<int>(), s.at(1).get<int>(), s.at(2).get<int>(),
                                   parse_action(s.at(3).get<std::string>()), s.at(4).get<bool>()});
        }
        const auto &f = j.at("final");
        r.final_outcome = f.at(0).get<int>();
        r.final_ziz = f.at(1).get<int>();
        r.final_izz = f.at(2).get<int>();
        r.final_zii = f.at(3).get<int>();
        r.final_zp = f.at(4).get<int>();
        records.push_back(std::move(r));
    }
    return records;
}

}  // namespace nvnode
