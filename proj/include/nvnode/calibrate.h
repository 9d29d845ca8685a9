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

#ifndef NVNODE_CALIBRATE_H
#define NVNODE_CALIBRATE_H

#include <array>
#include <string>
#include <vector>

#include "nvnode/noise_model.h"
#include "nvnode/qec.h"

namespace nvnode {

/// Observables the microscopic noise rates are fitted to.
struct Observables {
    double e1 = 0.0;
    double e2 = 0.0;
    double e3 = 0.0;
    double ziz = 0.0;
    double izz = 0.0;

    std::array<double, 5> values() const { return {e1, e2, e3, ziz, izz}; }
};

inline constexpr std::array<const char *, 5> kObservableNames = {"e1", "e2", "e3", "ziz_fidelity", "izz_fidelity"};

struct CalibrationTargets {
    Observables value{0.97, 0.88, 0.82, 0.85, 0.84};
    Observables sigma{0.01, 0.02, 0.05, 0.01, 0.01};
    double readout_bright_fid = 0.809;
    double readout_dark_fid = 0.988;
};

/// Average over the eight memory basis states of the mapped parity times its
/// ideal sign, with fluorescence errors excluded. Each eigenstate is made by
/// nuclear flips and sits through one idle round before the map.
double parity_characterization(ParityCheck check, const NoiseModel &noise);

/// Exact-backend witness terms and parity characterizations.
Observables model_observables(const NoiseModel &noise);

/// The searched rates, in order p_gate_e, p_gate_ec, p_flip_round,
/// p_phase_round, mzi_visibility.
inline constexpr std::array<const char *, 5> kCalibratedFields = {"p_gate_e", "p_gate_ec", "p_flip_round",
                                                                  "p_phase_round", "mzi_visibility"};

struct CalibrationOptions {
    /// Coarse grid points per searched field.
    size_t grid_points = 9;
    /// Pattern-search refinement stops below this step (in field units).
    double min_step = 1e-6;
    size_t max_evaluations = 20000;
};

struct CalibrationResult {
    NoiseModel noise;
    Observables achieved;
    std::array<double, 5> pulls{};  // (achieved - target) / sigma
    double chi2 = 0.0;
    size_t evaluations = 0;
    bool within_one_sigma = false;
};

/// Grid search then compass-pattern refinement of the searched rates,
/// minimizing the sum of squared pulls. Readout fidelities are set from the
/// targets. p_phase_round leaves every observable unchanged and keeps its
/// value from `start`.
CalibrationResult calibrate(const CalibrationTargets &targets, const NoiseModel &start,
                            const CalibrationOptions &options = {});

}  // namespace nvnode

#endif
