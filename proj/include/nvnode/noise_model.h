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

#ifndef NVNODE_NOISE_MODEL_H
#define NVNODE_NOISE_MODEL_H

#include <array>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nvnode {

/// Calibrated error parameters of the node. Immutable after load.
struct NoiseModel {
    // Fluorescence readout: P(report 0 | |0>_e) and P(report 1 | |1>_e).
    double readout_bright_fid = 0.809;
    double readout_dark_fid = 0.988;
    // Depolarizing strength (rho -> (1-p) rho + p I/d) per electron
    // microwave gate and per electron-nuclear entangling step.
    double p_gate_e = 0.005;
    double p_gate_ec = 0.03;
    // Per memory qubit, per error-correction round.
    double p_flip_round = 0.02;
    double p_phase_round = 0.05;
    double round_duration_ms = 5.0;
    double herald_prob = 0.01;
    double mzi_visibility = 0.9;
    double reset_error = 0.0;
    // Single-qubit depolarizing after each nuclear flip (feedback and
    // product-state preparation).
    double p_nuc_flip = 0.005;
    // Photon detection: probability that a detection is a background count
    // with a uniformly random outcome, and that the time bin is misassigned.
    double background_error = 0.0;
    double bin_overlap_error = 0.0;

    /// Every error probability zero, perfect readout, unit visibility, and
    /// every shot heralded.
    static NoiseModel ideal();

    /// Throws std::invalid_argument when a probability is outside [0, 1] or
    /// round_duration_ms <= 0.
    void validate() const;

    /// (name, value) pairs in file order.
    std::vector<std::pair<std::string, double>> fields() const;
    void set_field(std::string_view name, double value);

    bool operator==(const NoiseModel &other) const = default;
};

/// Parses `key = value` lines; `#` starts a comment. Unknown keys, duplicate
/// keys and malformed numbers are errors. Missing keys keep their defaults.
NoiseModel parse_noise_model(std::string_view text);
NoiseModel load_noise_model(const std::string &path);
std::string format_noise_model(const NoiseModel &noise);

/// 2x2 column-stochastic readout model, element (observed, true) is
/// P(observed | true).
class ConfusionMatrix {
   public:
    ConfusionMatrix() : ConfusionMatrix(1.0, 1.0) {}
    /// fid0 = P(0 | 0), fid1 = P(1 | 1).
    ConfusionMatrix(double fid0, double fid1);

    static ConfusionMatrix identity() { return ConfusionMatrix(1.0, 1.0); }
    /// Electron fluorescence readout in the |0>_e / |1>_e basis.
    static ConfusionMatrix electron(const NoiseModel &noise);
    /// Parity bit (0 for eigenvalue +1) read through the electron with the
    /// +1 -> dark mapping polarity.
    static ConfusionMatrix parity(const NoiseModel &noise);

    double operator()(int observed, int truth) const { return m_[observed][truth]; }
    double determinant() const { return m_[0][0] * m_[1][1] - m_[0][1] * m_[1][0]; }
    /// Inverse matrix entries (not stochastic).
    std::array<std::array<double, 2>, 2> inverse() const;

   private:
    std::array<std::array<double, 2>, 2> m_;
};

}  // namespace nvnode

#endif
