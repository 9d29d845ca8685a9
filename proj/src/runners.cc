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


#include "nvnode/runners.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace nvnode {

namespace {

constexpr int kTableVersion = 1;

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::string quote(std::string_view key) { return "'" + std::string(key) + "'"; }

uint64_t parse_u64(std::string_view key, std::string_view v) {
    uint64_t x = 0;
    auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || end != v.data() + v.size() || v.empty()) {
        throw ConfigError(quote(key) + " expects a non-negative integer, got " + quote(v));
    }
    return x;
}

int parse_int(std::string_view key, std::string_view v) {
    int x = 0;
    auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || end != v.data() + v.size() || v.empty()) {
        throw ConfigError(quote(key) + " expects an integer, got " + quote(v));
    }
    return x;
}

double parse_double(std::string_view key, std::string_view v) {
    double x = 0.0;
    auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || end != v.data() + v.size() || v.empty() || !std::isfinite(x)) {
        throw ConfigError(quote(key) + " expects a number, got " + quote(v));
    }
    return x;
}

bool parse_bool(std::string_view key, std::string_view v) {
    if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
    if (v == "off" || v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(quote(key) + " expects on or off, got " + quote(v));
}

double &observable_field(Observables &o, std::string_view name) {
    if (name == "e1") return o.e1;
    if (name == "e2") return o.e2;
    if (name == "e3") return o.e3;
    if (name == "ziz_fidelity") return o.ziz;
    if (name == "izz_fidelity") return o.izz;
    throw ConfigError("unknown calibration observable " + quote(name));
}

std::string join_bases(const std::vector<JointBasis> &bases) {
    std::string s;
    for (size_t i = 0; i < bases.size(); ++i) {
        s += (i ? "," : "") + basis_name(bases[i]);
    }
    return s;
}

std::vector<bool> feedback_flags(FeedbackMode m) {
    switch (m) {
        case FeedbackMode::On:
            return {true};
        case FeedbackMode::Off:
            return {false};
        case FeedbackMode::Sweep:
            return {false, true};
    }
    return {};
}

std::string on_off(bool b) { return b ? "on" : "off"; }

std::filesystem::path prepare_out(const ExperimentConfig &c) {
    std::filesystem::path dir(c.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw ConfigError("cannot create output directory " + quote(c.out_dir) + ": " + ec.message());
    }
    return dir;
}

void write_file(const std::filesystem::path &path, const std::string &text, RunOutput &out) {
    std::ofstream f(path, std::ios::binary);
    f << text;
    if (!f) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out.files.push_back(path.string());
}

uint64_t seed_of(const ExperimentConfig &c) { return *c.seed; }

}  // namespace

std::string feedback_mode_name(FeedbackMode m) {
    switch (m) {
        case FeedbackMode::On:
            return "on";
        case FeedbackMode::Off:
            return "off";
        case FeedbackMode::Sweep:
            return "sweep";
    }
    return "?";
}

std::string injection_name(Injection i) {
    switch (i) {
        case Injection::None:
            return "none";
        case Injection::SingleX:
            return "single_x";
        case Injection::LogicalX:
            return "logical_x";
    }
    return "?";
}

std::string fmt(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", x == 0.0 ? 0.0 : x);
    return buf;
}

void ExperimentConfig::set(std::string_view key, std::string_view value) {
    key = trim(key);
    value = trim(value);
    if (key == "command") {
        command = std::string(value);
    } else if (key == "seed") {
        seed = parse_u64(key, value);
    } else if (key == "shots") {
        shots = parse_u64(key, value);
    } else if (key == "rounds") {
        rounds = parse_int(key, value);
    } else if (key == "feedback") {
        if (value == "on") feedback = FeedbackMode::On;
        else if (value == "off") feedback = FeedbackMode::Off;
        else if (value == "sweep") feedback = FeedbackMode::Sweep;
        else throw ConfigError("feedback must be on, off or sweep");
    } else if (key == "prep") {
        try {
            parse_prep(std::string(value));
        } catch (const std::invalid_argument &e) {
            throw ConfigError(e.what());
        }
        prep = std::string(value);
    } else if (key == "backend") {
        if (value == "trajectory") backend = Backend::PureVector;
        else if (value == "exact") backend = Backend::DensityMatrix;
        else throw ConfigError("backend must be trajectory or exact");
    } else if (key == "noise") {
        noise_path = std::string(value);
    } else if (key == "out") {
        out_dir = std::string(value);
    } else if (key == "bases") {
        std::vector<JointBasis> b;
        std::string_view rest = value;
        while (!rest.empty()) {
            auto comma = rest.find(',');
            auto item = trim(rest.substr(0, comma));
            try {
                b.push_back(parse_basis(std::string(item)));
            } catch (const std::invalid_argument &e) {
                throw ConfigError(e.what());
            }
            rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        }
        if (b.empty()) {
            throw ConfigError("bases must name at least one basis");
        }
        bases = b;
    } else if (key == "inject") {
        if (value == "none") inject = Injection::None;
        else if (value == "single_x") inject = Injection::SingleX;
        else if (value == "logical_x") inject = Injection::LogicalX;
        else throw ConfigError("inject must be none, single_x or logical_x");
    } else if (key == "records") {
        write_records = parse_bool(key, value);
    } else if (key == "idle_before_final") {
        idle_before_final = parse_bool(key, value);
    } else if (key == "bootstrap") {
        bootstrap = parse_bool(key, value);
    } else if (key == "resamples") {
        resamples = parse_u64(key, value);
    } else if (key == "threads") {
        threads = parse_u64(key, value);
    } else if (key == "grid_points") {
        grid_points = parse_u64(key, value);
    } else if (key == "input") {
        input = std::string(value);
    } else if (key.starts_with("noise.")) {
        auto field = key.substr(6);
        double v = parse_double(key, value);
        NoiseModel probe;
        try {
            probe.set_field(field, v);
        } catch (const std::invalid_argument &e) {
            throw ConfigError(e.what());
        }
        for (auto &[k, old] : noise_overrides) {
            if (k == field) {
                old = v;
                return;
            }
        }
        noise_overrides.emplace_back(std::string(field), v);
    } else if (key == "target.readout_bright_fid") {
        targets.readout_bright_fid = parse_double(key, value);
    } else if (key == "target.readout_dark_fid") {
        targets.readout_dark_fid = parse_double(key, value);
    } else if (key.starts_with("target.")) {
        observable_field(targets.value, key.substr(7)) = parse_double(key, value);
    } else if (key.starts_with("target_sigma.")) {
        observable_field(targets.sigma, key.substr(13)) = parse_double(key, value);
    } else {
        throw ConfigError("unknown config key " + quote(key));
    }
}

void ExperimentConfig::validate() const {
    if (command != "ghz" && command != "qec" && command != "calibrate" && command != "fit") {
        throw ConfigError("command must be ghz, qec, calibrate or fit");
    }
    if (!seed) {
        throw ConfigError("a seed is required (--seed)");
    }
    if (shots < 1 || shots > kMaxShots) {
        throw ConfigError("shots must be in [1, 1e8]");
    }
    if (rounds < 0 || rounds > kMaxRounds) {
        throw ConfigError("rounds must be in [0, 64]");
    }
    if (resamples < 100) {
        throw ConfigError("resamples must be at least 100");
    }
    if (grid_points < 2) {
        throw ConfigError("grid_points must be at least 2");
    }
    if (command == "qec" && backend == Backend::DensityMatrix && inject == Injection::SingleX) {
        throw ConfigError("single_x injection needs the trajectory backend");
    }
    if (command == "fit" && input.empty()) {
        throw ConfigError("fit needs an input table (--input)");
    }
    for (double s : targets.sigma.values()) {
        if (!(s > 0.0)) {
            throw ConfigError("target sigmas must be positive");
        }
    }
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::resolved() const {
    std::vector<std::pair<std::string, std::string>> r = {
        {"command", command},
        {"seed", seed ? std::to_string(*seed) : "unset"},
        {"noise", noise_path.empty() ? "builtin" : noise_path},
    };
    for (const auto &[k, v] : noise_overrides) {
        r.emplace_back("noise." + k, fmt(v));
    }
    if (command == "ghz") {
        r.emplace_back("shots", std::to_string(shots));
        r.emplace_back("backend", backend_name(backend));
        r.emplace_back("bases", join_bases(bases));
        r.emplace_back("bootstrap", on_off(bootstrap));
        r.emplace_back("resamples", std::to_string(resamples));
    } else if (command == "qec") {
        r.emplace_back("shots", std::to_string(shots));
        r.emplace_back("rounds", std::to_string(rounds));
        r.emplace_back("feedback", feedback_mode_name(feedback));
        r.emplace_back("prep", prep);
        r.emplace_back("backend", backend_name(backend));
        r.emplace_back("inject", injection_name(inject));
        r.emplace_back("records", on_off(write_records));
        r.emplace_back("idle_before_final", on_off(idle_before_final));
        r.emplace_back("resamples", std::to_string(resamples));
    } else if (command == "calibrate") {
        r.emplace_back("grid_points", std::to_string(grid_points));
        auto v = targets.value.values();
        auto s = targets.sigma.values();
        for (size_t k = 0; k < v.size(); ++k) {
            r.emplace_back(std::string("target.") + kObservableNames[k], fmt(v[k]));
            r.emplace_back(std::string("target_sigma.") + kObservableNames[k], fmt(s[k]));
        }
        r.emplace_back("target.readout_bright_fid", fmt(targets.readout_bright_fid));
        r.emplace_back("target.readout_dark_fid", fmt(targets.readout_dark_fid));
    } else if (command == "fit") {
        r.emplace_back("input", input);
        r.emplace_back("resamples", std::to_string(resamples));
    }
    return r;
}

NoiseModel ExperimentConfig::noise() const {
    NoiseModel n;
    if (!noise_path.empty()) {
        try {
            n = load_noise_model(noise_path);
        } catch (const std::exception &e) {
            throw ConfigError(e.what());
        }
    }
    for (const auto &[k, v] : noise_overrides) {
        n.set_field(k, v);
    }
    try {
        n.validate();
    } catch (const std::invalid_argument &e) {
        throw ConfigError(e.what());
    }
    return n;
}

ExperimentConfig parse_experiment_config(std::string_view text) {
    ExperimentConfig c;
    size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        auto eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        if (auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        }
        c.set(line.substr(0, eq), line.substr(eq + 1));
    }
    return c;
}

ExperimentConfig load_experiment_config(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + quote(path));
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_experiment_config(buf.str());
}

void Table::add(std::vector<std::string> row) {
    if (row.size() != columns.size()) {
        throw std::logic_error("row width does not match the table columns");
    }
    rows.push_back(std::move(row));
}

std::string Table::render(const ExperimentConfig &config, const NoiseModel &noise) const {
    std::string s = "# schema: nvnode." + schema + " v" + std::to_string(kTableVersion) + "\n";
    for (const auto &[k, v] : config.resolved()) {
        s += "# config: " + k + " = " + v + "\n";
    }
    for (const auto &[k, v] : noise.fields()) {
        s += "# noise: " + k + " = " + fmt(v) + "\n";
    }
    for (size_t i = 0; i < columns.size(); ++i) {
        s += (i ? "\t" : "") + columns[i];
    }
    s += "\n";
    for (const auto &row : rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            s += (i ? "\t" : "") + row[i];
        }
        s += "\n";
    }
    return s;
}

RunOutput run_ghz(const ExperimentConfig &config) {
    config.validate();
    NoiseModel noise = config.noise();
    auto dir = prepare_out(config);
    RunOutput out;
    std::ostringstream report;
    const bool exact = config.backend == Backend::DensityMatrix;

    Table counts{"ghz_coincidences",
                 {"basis", "variant", "electron_bit", "photon_bit", exact ? "probability" : "count", "population"},
                 {}};
    std::map<JointBasis, CoincidenceTable> tables;
    for (auto b : config.bases) {
        if (exact) {
            auto p = exact_joint_probabilities(b, noise);
            for (int v = 0; v < 2; ++v)
                for (int e = 0; e < 2; ++e)
                    for (int ph = 0; ph < 2; ++ph)
                        counts.add({basis_name(b), v ? "flipped" : "unflipped", std::to_string(e), std::to_string(ph),
                                    fmt(p[v][e][ph]), fmt(p[v][e][ph])});
        } else {
            MeasureOptions mo;
            mo.threads = config.threads;
            auto t = measure_joint(b, config.shots, noise, seed_of(config), mo);
            for (const auto &w : t.warnings) {
                report << "warning: " << basis_name(b) << ": " << w << "\n";
            }
            for (int v = 0; v < 2; ++v)
                for (int e = 0; e < 2; ++e)
                    for (int ph = 0; ph < 2; ++ph)
                        counts.add({basis_name(b), v ? "flipped" : "unflipped", std::to_string(e), std::to_string(ph),
                                    std::to_string(t.counts[v][e][ph]),
                                    fmt(t.variant_population(static_cast<RunVariant>(v), e, ph))});
            tables[b] = std::move(t);
        }
    }
    write_file(dir / "ghz_coincidences.tsv", counts.render(config, noise), out);

    if (config.bases.size() == 3) {
        WitnessResult w;
        if (exact) {
            w = exact_witness(noise);
        } else {
            WitnessOptions wo;
            wo.bootstrap = config.bootstrap;
            wo.resamples = config.resamples;
            wo.seed = seed_of(config);
            w = estimate_witness(tables, wo);
        }
        Table wt{"ghz_witness", {"quantity", "value", "sigma", "coincidences"}, {}};
        wt.add({"e1_-ZeIcZp", fmt(w.e1.value), fmt(w.e1.sigma), std::to_string(w.e1.coincidences)});
        wt.add({"e2_ZeZcIp", fmt(w.e2.value), fmt(w.e2.sigma), std::to_string(w.e2.coincidences)});
        wt.add({"e3_XeXcXp", fmt(w.e3.value), fmt(w.e3.sigma), std::to_string(w.e3.coincidences)});
        wt.add({"f_lb", fmt(w.f_lb), fmt(w.sigma_f_lb), "-"});
        write_file(dir / "ghz_witness.tsv", wt.render(config, noise), out);
        report << "e1 = " << fmt(w.e1.value) << " +- " << fmt(w.e1.sigma) << "\n"
               << "e2 = " << fmt(w.e2.value) << " +- " << fmt(w.e2.sigma) << "\n"
               << "e3 = " << fmt(w.e3.value) << " +- " << fmt(w.e3.sigma) << "\n"
               << "F_lb = " << fmt(w.f_lb) << " +- " << fmt(w.sigma_f_lb) << "\n";
    } else {
        report << "witness skipped: it needs all three bases\n";
    }
    out.report = report.str();
    return out;
}

QecSweep qec_sweep(const ExperimentConfig &config, const NoiseModel &noise) {
    config.validate();
    const LogicalPrep prep = parse_prep(config.prep);
    const bool exact = config.backend == Backend::DensityMatrix;
    const uint64_t seed = seed_of(config);
    QecSweep sweep;
    for (bool fb : feedback_flags(config.feedback)) {
        std::vector<FitPoint> fit_points;
        for (int m = 0; m <= config.rounds; ++m) {
            const uint64_t point_seed = derive_seed(seed, streams::kSweep, 2 * uint64_t(m) + fb);
            QecOptions opt;
            opt.idle_before_final = config.idle_before_final;
            opt.threads = config.threads;
            if (config.inject == Injection::SingleX) {
                opt.hook = [m, point_seed](QuantumState &q, int round, uint64_t shot) {
                    if (m == 0) {
                        return;
                    }
                    Rng r(point_seed, streams::kInject, shot);
                    int when = 1 + static_cast<int>(r.below(static_cast<uint64_t>(m)));
                    size_t which = kCarbons[r.below(3)].index;
                    if (round == when) {
                        q.apply_pauli(PauliString::on(kNodeQubits, {which}, Pauli::X));
                    }
                };
            } else if (config.inject == Injection::LogicalX) {
                opt.hook = [](QuantumState &q, int round, uint64_t) {
                    if (round == 1) {
                        q.apply_pauli(PauliString::on(
                            kNodeQubits, {kCarbon1.index, kCarbon2.index, kCarbon3.index}, Pauli::X));
                    }
                };
            }
            QecPoint pt;
            pt.feedback = fb;
            pt.rounds = m;
            pt.t_ms = m * noise.round_duration_ms;
            if (exact) {
                auto d = exact_qec(prep, m, fb, noise, opt);
                double expected = std::round(static_cast<double>(config.shots) * noise.herald_prob);
                pt.heralded = std::max<uint64_t>(1, static_cast<uint64_t>(expected));
                std::vector<double> pp(d.parity_probs.begin(), d.parity_probs.end());
                pt.fidelity = logical_fidelity(pp, pt.heralded, prep, noise);
                pt.post = post_select_no_error(d.parity_probs, pt.heralded);
                for (int k = 0; k < 16; ++k) {
                    pt.final_ziz += d.parity_probs[k] * ((k & 1) ? -1.0 : 1.0);
                    pt.final_izz += d.parity_probs[k] * ((k & 2) ? -1.0 : 1.0);
                }
                if (m == config.rounds) {
                    auto &decay = sweep.parity_decay[fb];
                    for (size_t k = 0; k < d.mean_ziz.size(); ++k) {
                        decay.push_back({d.mean_ziz[k], d.mean_izz[k]});
                    }
                }
            } else {
                auto recs = nvnode::run_qec(prep, m, fb, config.shots, noise, point_seed, opt);
                pt.fidelity = logical_fidelity(recs, prep, noise);
                pt.heralded = pt.fidelity.samples;
                pt.post = post_select_no_error(recs);
                std::vector<std::array<double, 2>> sums(static_cast<size_t>(m), {0.0, 0.0});
                for (const auto &r : recs) {
                    if (!r.heralded) {
                        continue;
                    }
                    pt.final_ziz += r.final_ziz;
                    pt.final_izz += r.final_izz;
                    for (size_t k = 0; k < r.syndromes.size(); ++k) {
                        sums[k][0] += r.syndromes[k].ziz;
                        sums[k][1] += r.syndromes[k].izz;
                    }
                }
                const double n = static_cast<double>(pt.heralded);
                pt.final_ziz /= n;
                pt.final_izz /= n;
                if (m == config.rounds) {
                    for (auto &s : sums) {
                        s[0] /= n;
                        s[1] /= n;
                    }
                    sweep.parity_decay[fb] = sums;
                    if (config.write_records) {
                        sweep.final_records[fb] = std::move(recs);
                    }
                }
            }
            fit_points.push_back({pt.t_ms, pt.fidelity.value, pt.fidelity.sigma});
            sweep.points.push_back(pt);
        }
        if (fit_points.size() >= 4) {
            FitOptions fo;
            fo.seed = derive_seed(seed, streams::kFit, fb);
            fo.bootstrap_resamples = config.resamples;
            for (const auto &p : fit_points) {
                fo.weighted = fo.weighted && p.sigma > 0.0;
            }
            try {
                sweep.fits[fb] = fit_exponential(fit_points, fo);
            } catch (const std::exception &e) {
                sweep.fit_errors[fb] = e.what();
            }
        }
    }
    return sweep;
}

RunOutput run_qec(const ExperimentConfig &config) {
    config.validate();
    NoiseModel noise = config.noise();
    auto dir = prepare_out(config);
    auto sweep = qec_sweep(config, noise);
    RunOutput out;
    std::ostringstream report;

    Table summary{"qec_summary",
                  {"feedback", "rounds", "t_ms", "heralded", "fidelity", "fidelity_sigma", "raw_population",
                   "mitigation_slack", "zlzp_all", "zlzp_all_sigma", "zlzp_selected", "zlzp_selected_sigma",
                   "acceptance", "final_ziz", "final_izz"},
                  {}};
    for (const auto &p : sweep.points) {
        summary.add({on_off(p.feedback), std::to_string(p.rounds), fmt(p.t_ms), std::to_string(p.heralded),
                     fmt(p.fidelity.value), fmt(p.fidelity.sigma), fmt(p.fidelity.raw), fmt(p.fidelity.slack),
                     fmt(p.post.all.value), fmt(p.post.all.sigma), fmt(p.post.selected.value),
                     fmt(p.post.selected.sigma), fmt(p.post.acceptance), fmt(p.final_ziz), fmt(p.final_izz)});
        report << "feedback " << on_off(p.feedback) << " M " << p.rounds << ": F = " << fmt(p.fidelity.value)
               << " +- " << fmt(p.fidelity.sigma) << "\n";
    }
    write_file(dir / "qec_summary.tsv", summary.render(config, noise), out);

    Table parity{"qec_parity", {"feedback", "round", "ziz_mean", "izz_mean"}, {}};
    for (const auto &[fb, decay] : sweep.parity_decay) {
        for (size_t k = 0; k < decay.size(); ++k) {
            parity.add({on_off(fb), std::to_string(k + 1), fmt(decay[k][0]), fmt(decay[k][1])});
        }
    }
    write_file(dir / "qec_parity.tsv", parity.render(config, noise), out);

    if (!sweep.fits.empty() || !sweep.fit_errors.empty()) {
        Table fits{"qec_fit",
                   {"feedback", "p_i", "p_i_lo", "p_i_hi", "t1l_ms", "t1l_lo", "t1l_hi", "p_f", "p_f_lo", "p_f_hi",
                    "rss", "t1l_unbounded", "status"},
                   {}};
        for (bool fb : feedback_flags(config.feedback)) {
            if (auto it = sweep.fits.find(fb); it != sweep.fits.end()) {
                const auto &f = it->second;
                fits.add({on_off(fb), fmt(f.p_i), fmt(f.p_i_ci.lo), fmt(f.p_i_ci.hi), fmt(f.t1l_ms),
                          fmt(f.t1l_ci.lo), fmt(f.t1l_ci.hi), fmt(f.p_f), fmt(f.p_f_ci.lo), fmt(f.p_f_ci.hi),
                          fmt(f.rss), f.t1l_unbounded ? "yes" : "no", "ok"});
                report << "feedback " << on_off(fb) << ": T1L = " << fmt(f.t1l_ms) << " ms [" << fmt(f.t1l_ci.lo)
                       << ", " << fmt(f.t1l_ci.hi) << "], p_f = " << fmt(f.p_f) << "\n";
            } else if (auto e = sweep.fit_errors.find(fb); e != sweep.fit_errors.end()) {
                std::vector<std::string> row(13, "nan");
                row[0] = on_off(fb);
                row[11] = "-";
                row[12] = "failed: " + e->second;
                fits.add(row);
                report << "feedback " << on_off(fb) << ": fit failed: " << e->second << "\n";
            }
        }
        write_file(dir / "qec_fit.tsv", fits.render(config, noise), out);
    }

    for (const auto &[fb, recs] : sweep.final_records) {
        nlohmann::ordered_json cfg;
        for (const auto &[k, v] : config.resolved()) {
            cfg[k] = v;
        }
        for (const auto &[k, v] : noise.fields()) {
            cfg["noise_model"][k] = v;
        }
        cfg["rounds_of_records"] = config.rounds;
        cfg["feedback_of_records"] = on_off(fb);
        std::ostringstream os;
        write_shot_records(os, recs, cfg.dump());
        write_file(dir / ("qec_records_feedback_" + on_off(fb) + ".jsonl"), os.str(), out);
    }
    out.report = report.str();
    return out;
}

RunOutput run_calibrate(const ExperimentConfig &config) {
    config.validate();
    NoiseModel start = config.noise();
    auto dir = prepare_out(config);
    CalibrationOptions opt;
    opt.grid_points = config.grid_points;
    auto r = calibrate(config.targets, start, opt);
    RunOutput out;
    std::ostringstream report;

    Table t{"calibration", {"observable", "target", "target_sigma", "achieved", "pull"}, {}};
    auto tv = config.targets.value.values();
    auto ts = config.targets.sigma.values();
    auto a = r.achieved.values();
    std::string residuals;
    for (size_t k = 0; k < a.size(); ++k) {
        t.add({kObservableNames[k], fmt(tv[k]), fmt(ts[k]), fmt(a[k]), fmt(r.pulls[k])});
        residuals += std::string("# residual: ") + kObservableNames[k] + " achieved " + fmt(a[k]) + " target " +
                     fmt(tv[k]) + " pull " + fmt(r.pulls[k]) + "\n";
        report << kObservableNames[k] << ": " << fmt(a[k]) << " (target " << fmt(tv[k]) << ", pull "
               << fmt(r.pulls[k]) << ")\n";
    }
    write_file(dir / "calibration.tsv", t.render(config, start), out);

    std::string noise_text = "# schema: nvnode.noise_model v" + std::to_string(kTableVersion) + "\n";
    for (const auto &[k, v] : config.resolved()) {
        noise_text += "# config: " + k + " = " + v + "\n";
    }
    noise_text += residuals;
    noise_text += "# chi2: " + fmt(r.chi2) + " after " + std::to_string(r.evaluations) + " evaluations\n";
    noise_text += format_noise_model(r.noise);
    write_file(dir / "calibrated_noise.txt", noise_text, out);

    report << "chi2 = " << fmt(r.chi2) << " after " << r.evaluations << " evaluations\n";
    if (!r.within_one_sigma) {
        report << "calibration failed: at least one observable is more than 1 sigma from its target\n";
        out.exit_code = 1;
    }
    out.report = report.str();
    return out;
}

RunOutput run_fit(const ExperimentConfig &config) {
    config.validate();
    std::ifstream in(config.input);
    if (!in) {
        throw ConfigError("cannot open fit input " + quote(config.input));
    }
    std::vector<FitPoint> points;
    std::string line;
    while (std::getline(in, line)) {
        std::string_view l = trim(line);
        if (l.empty() || l.front() == '#') {
            continue;
        }
        std::istringstream fields{std::string(l)};
        std::string a, b, c;
        fields >> a >> b >> c;
        double t = 0.0;
        auto [end, ec] = std::from_chars(a.data(), a.data() + a.size(), t);
        if (ec != std::errc() || end != a.data() + a.size()) {
            continue;  // column header
        }
        FitPoint p;
        p.t_ms = t;
        p.p = parse_double("p", b);
        p.sigma = c.empty() ? 0.0 : parse_double("sigma", c);
        points.push_back(p);
    }
    FitOptions fo;
    fo.seed = seed_of(config);
    fo.bootstrap_resamples = config.resamples;
    for (const auto &p : points) {
        fo.weighted = fo.weighted && p.sigma > 0.0;
    }
    NoiseModel noise = config.noise();
    auto dir = prepare_out(config);
    auto r = fit_exponential(points, fo);
    RunOutput out;
    Table t{"fit", {"parameter", "estimate", "ci_lo", "ci_hi"}, {}};
    t.add({"p_i", fmt(r.p_i), fmt(r.p_i_ci.lo), fmt(r.p_i_ci.hi)});
    t.add({"t1l_ms", fmt(r.t1l_ms), fmt(r.t1l_ci.lo), fmt(r.t1l_ci.hi)});
    t.add({"p_f", fmt(r.p_f), fmt(r.p_f_ci.lo), fmt(r.p_f_ci.hi)});
    t.add({"rss", fmt(r.rss), "-", "-"});
    t.add({"t1l_unbounded", r.t1l_unbounded ? "yes" : "no", "-", "-"});
    t.add({"weighted", fo.weighted ? "yes" : "no", "-", "-"});
    write_file(dir / "fit.tsv", t.render(config, noise), out);
    std::ostringstream report;
    report << "p_i = " << fmt(r.p_i) << ", T1L = " << fmt(r.t1l_ms) << " ms [" << fmt(r.t1l_ci.lo) << ", "
           << fmt(r.t1l_ci.hi) << "], p_f = " << fmt(r.p_f) << (r.t1l_unbounded ? " (no decay found)" : "")
           << "\n";
    out.report = report.str();
    return out;
}

RunOutput run_experiment(const ExperimentConfig &config) {
    if (config.command == "ghz") return run_ghz(config);
    if (config.command == "qec") return run_qec(config);
    if (config.command == "calibrate") return run_calibrate(config);
    if (config.command == "fit") return run_fit(config);
    throw ConfigError("unknown command " + quote(config.command));
}

}  // namespace nvnode
