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

#include "nvnode/calibrate.h"

#include <cmath>
#include <limits>

#include "nvnode/ghz.h"

namespace nvnode {

double parity_characterization(ParityCheck check, const NoiseModel &noise) {
    NoiseModel n = noise;
    n.readout_bright_fid = 1.0;
    n.readout_dark_fid = 1.0;
    Rng unused(0);
    auto map = parity_map(check);
    auto support = check_support(check);
    double total = 0.0;
    for (int b = 0; b < 8; ++b) {
        NodeState node = NodeState::fresh(Backend::DensityMatrix);
        int ideal = 1;
        for (int k = 0; k < 3; ++k) {
            if ((b >> k) & 1) {
                nuclear_flip(node.q, kCarbons[k], n, unused);
            }
        }
        for (auto q : support) {
            if ((b >> (q.index - kCarbon1.index)) & 1) {
                ideal = -ideal;
            }
        }
        apply_idle_round_noise(node.q, n, unused);
        apply_circuit(node, map, n, unused);
        // Dark (|1>_e) reports +1.
        double mapped = -node.q.expectation(PauliString::on(kNodeQubits, {kElectron.index}, Pauli::Z));
        total += mapped * ideal;
    }
    return total / 8.0;
}

Observables model_observables(const NoiseModel &noise) {
    auto w = exact_witness(noise);
    Observables o;
    o.e1 = w.e1.value;
    o.e2 = w.e2.value;
    o.e3 = w.e3.value;
    o.ziz = parity_characterization(ParityCheck::ZIZ, noise);
    o.izz = parity_characterization(ParityCheck::IZZ, noise);
    return o;
}

namespace {

struct Box {
    double lo, hi;
};

// Searched coordinates: p_gate_e, p_gate_ec, p_flip_round, mzi_visibility.
constexpr std::array<Box, 4> kBox = {{{0.0, 0.05}, {0.0, 0.15}, {0.0, 0.08}, {0.5, 1.0}}};

NoiseModel with(const NoiseModel &base, const std::array<double, 4> &x) {
    NoiseModel n = base;
    n.p_gate_e = x[0];
    n.p_gate_ec = x[1];
    n.p_flip_round = x[2];
    n.mzi_visibility = x[3];
    return n;
}

}  // namespace

CalibrationResult calibrate(const CalibrationTargets &targets, const NoiseModel &start,
                            const CalibrationOptions &options) {
    auto tv = targets.value.values();
    auto ts = targets.sigma.values();
    for (double s : ts) {
        if (!(s > 0.0)) {
            throw std::invalid_argument("calibration target sigmas must be positive");
        }
    }
    if (options.grid_points < 2) {
        throw std::invalid_argument("calibration grid needs at least 2 points per field");
    }
    NoiseModel base = start;
    base.readout_bright_fid = targets.readout_bright_fid;
    base.readout_dark_fid = targets.readout_dark_fid;
    base.validate();

    size_t evaluations = 0;
    auto chi2_of = [&](const std::array<double, 4> &x) {
        ++evaluations;
        auto o = model_observables(with(base, x)).values();
        double c = 0.0;
        for (size_t k = 0; k < o.size(); ++k) {
            double pull = (o[k] - tv[k]) / ts[k];
            c += pull * pull;
        }
        return c;
    };

    // Coarse grid over all four coordinates, then compass refinement.
    std::array<double, 4> best = {start.p_gate_e, start.p_gate_ec, start.p_flip_round, start.mzi_visibility};
    double best_chi2 = chi2_of(best);
    const size_t g = options.grid_points;
    auto at = [&](size_t k, size_t i) { return kBox[k].lo + (kBox[k].hi - kBox[k].lo) * i / (g - 1); };
    for (size_t i = 0; i < g; ++i) {
        for (size_t j = 0; j < g; ++j) {
            for (size_t l = 0; l < g; ++l) {
                for (size_t v = 0; v < g; ++v) {
                    std::array<double, 4> x = {at(0, i), at(1, j), at(2, l), at(3, v)};
                    double c = chi2_of(x);
                    if (c < best_chi2) {
                        best_chi2 = c;
                        best = x;
                    }
                }
            }
        }
    }

    // Compass search.
    std::array<double, 4> step;
    for (size_t k = 0; k < 4; ++k) {
        step[k] = (kBox[k].hi - kBox[k].lo) / (g - 1) / 2;
    }
    while (evaluations < options.max_evaluations) {
        bool moved = false;
        for (size_t k = 0; k < 4; ++k) {
            for (double dir : {1.0, -1.0}) {
                auto x = best;
                x[k] = std::clamp(x[k] + dir * step[k], kBox[k].lo, kBox[k].hi);
                if (x[k] == best[k]) {
                    continue;
                }
                double c = chi2_of(x);
                if (c < best_chi2) {
                    best_chi2 = c;
                    best = x;
                    moved = true;
                }
            }
        }
        if (!moved) {
            double largest = 0.0;
            for (auto &s : step) {
                s /= 2;
                largest = std::max(largest, s);
            }
            if (largest < options.min_step) {
                break;
            }
        }
    }

    CalibrationResult r;
    r.noise = with(base, best);
    r.achieved = model_observables(r.noise);
    r.chi2 = best_chi2;
    r.evaluations = evaluations;
    auto a = r.achieved.values();
    r.within_one_sigma = true;
    for (size_t k = 0; k < a.size(); ++k) {
        r.pulls[k] = (a[k] - tv[k]) / ts[k];
        r.within_one_sigma = r.within_one_sigma && std::abs(r.pulls[k]) <= 1.0;
    }
    return r;
}

}  // namespace nvnode
