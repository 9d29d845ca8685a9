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

#include "nvnode/noise_model.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace nvnode {

NoiseModel NoiseModel::ideal() {
    NoiseModel n;
    n.readout_bright_fid = 1.0;
    n.readout_dark_fid = 1.0;
    n.p_gate_e = 0.0;
    n.p_gate_ec = 0.0;
    n.p_flip_round = 0.0;
    n.p_phase_round = 0.0;
    n.herald_prob = 1.0;
    n.mzi_visibility = 1.0;
    n.reset_error = 0.0;
    n.p_nuc_flip = 0.0;
    n.background_error = 0.0;
    n.bin_overlap_error = 0.0;
    return n;
}

std::vector<std::pair<std::string, double>> NoiseModel::fields() const {
    return {
        {"readout_bright_fid", readout_bright_fid},
        {"readout_dark_fid", readout_dark_fid},
        {"p_gate_e", p_gate_e},
        {"p_gate_ec", p_gate_ec},
        {"p_flip_round", p_flip_round},
        {"p_phase_round", p_phase_round},
        {"round_duration_ms", round_duration_ms},
        {"herald_prob", herald_prob},
        {"mzi_visibility", mzi_visibility},
        {"reset_error", reset_error},
        {"p_nuc_flip", p_nuc_flip},
        {"background_error", background_error},
        {"bin_overlap_error", bin_overlap_error},
    };
}

void NoiseModel::set_field(std::string_view name, double value) {
    if (name == "readout_bright_fid") readout_bright_fid = value;
    else if (name == "readout_dark_fid") readout_dark_fid = value;
    else if (name == "p_gate_e") p_gate_e = value;
    else if (name == "p_gate_ec") p_gate_ec = value;
    else if (name == "p_flip_round") p_flip_round = value;
    else if (name == "p_phase_round") p_phase_round = value;
    else if (name == "round_duration_ms") round_duration_ms = value;
    else if (name == "herald_prob") herald_prob = value;
    else if (name == "mzi_visibility") mzi_visibility = value;
    else if (name == "reset_error") reset_error = value;
    else if (name == "p_nuc_flip") p_nuc_flip = value;
    else if (name == "background_error") background_error = value;
    else if (name == "bin_overlap_error") bin_overlap_error = value;
    else throw std::invalid_argument("unknown noise parameter '" + std::string(name) + "'");
}

void NoiseModel::validate() const {
    for (const auto &[name, value] : fields()) {
        if (name == "round_duration_ms") {
            if (!(value > 0.0) || !std::isfinite(value)) {
                throw std::invalid_argument("round_duration_ms must be positive");
            }
        } else if (!(value >= 0.0 && value <= 1.0)) {
            throw std::invalid_argument("noise parameter " + name + " must be in [0, 1]");
        }
    }
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace

NoiseModel parse_noise_model(std::string_view text) {
    NoiseModel noise;
    std::set<std::string, std::less<>> seen;
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
            throw std::invalid_argument("line " + std::to_string(line_no) + ": expected key = value");
        }
        auto key = trim(line.substr(0, eq));
        auto val = trim(line.substr(eq + 1));
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(val.data(), val.data() + val.size(), value);
        if (ec != std::errc{} || ptr != val.data() + val.size()) {
            throw std::invalid_argument("line " + std::to_string(line_no) + ": bad number '" + std::string(val) + "'");
        }
        if (!seen.insert(std::string(key)).second) {
            throw std::invalid_argument("line " + std::to_string(line_no) + ": duplicate key '" + std::string(key) + "'");
        }
        noise.set_field(key, value);
    }
    noise.validate();
    return noise;
}

NoiseModel load_noise_model(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open noise file '" + path + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_noise_model(buf.str());
}

std::string format_noise_model(const NoiseModel &noise) {
    std::string out;
    char line[128];
    for (const auto &[name, value] : noise.fields()) {
        std::snprintf(line, sizeof line, "%s = %.17g\n", name.c_str(), value);
        out += line;
    }
    return out;
}

ConfusionMatrix::ConfusionMatrix(double fid0, double fid1) {
    if (!(fid0 >= 0.0 && fid0 <= 1.0 && fid1 >= 0.0 && fid1 <= 1.0)) {
        throw std::invalid_argument("readout fidelities must be in [0, 1]");
    }
    m_[0][0] = fid0;
    m_[1][0] = 1.0 - fid0;
    m_[1][1] = fid1;
    m_[0][1] = 1.0 - fid1;
}

ConfusionMatrix ConfusionMatrix::electron(const NoiseModel &noise) {
    return ConfusionMatrix(noise.readout_bright_fid, noise.readout_dark_fid);
}

ConfusionMatrix ConfusionMatrix::parity(const NoiseModel &noise) {
    // Parity +1 is written to the dark state.
    return ConfusionMatrix(noise.readout_dark_fid, noise.readout_bright_fid);
}

std::array<std::array<double, 2>, 2> ConfusionMatrix::inverse() const {
    double det = determinant();
    if (std::abs(det) < 1e-12) {
        throw std::domain_error("confusion matrix is singular");
    }
    return {{{m_[1][1] / det, -m_[0][1] / det}, {-m_[1][0] / det, m_[0][0] / det}}};
}

}  // namespace nvnode
