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


#include <gtest/gtest.h>

#include "nvnode/calibrate.h"

using namespace nvnode;

TEST(parity_characterization, ideal_and_noisy) {
    EXPECT_NEAR(parity_characterization(ParityCheck::ZIZ, NoiseModel::ideal()), 1.0, 1e-12);
    EXPECT_NEAR(parity_characterization(ParityCheck::IZZ, NoiseModel::ideal()), 1.0, 1e-12);
    NoiseModel n = NoiseModel::ideal();
    n.readout_bright_fid = 0.6;
    EXPECT_NEAR(parity_characterization(ParityCheck::ZIZ, n), 1.0, 1e-12);
    n.p_flip_round = 0.05;
    // Two supported carbons, each flipped independently by the idle round.
    EXPECT_NEAR(parity_characterization(ParityCheck::ZIZ, n), 0.9 * 0.9, 1e-12);
    n.p_phase_round = 0.3;
    EXPECT_NEAR(parity_characterization(ParityCheck::ZIZ, n), 0.9 * 0.9, 1e-12);
    n.p_gate_ec = 0.05;
    EXPECT_LT(parity_characterization(ParityCheck::ZIZ, n), 0.81);
}

TEST(model_observables, ideal_node_gives_ones) {
    auto o = model_observables(NoiseModel::ideal());
    for (double v : o.values()) {
        EXPECT_NEAR(v, 1.0, 1e-10);
    }
}

TEST(calibrate, perfect_targets_give_zero_noise) {
    CalibrationTargets t;
    t.value = {1.0, 1.0, 1.0, 1.0, 1.0};
    t.sigma = {1e-4, 1e-4, 1e-4, 1e-4, 1e-4};
    t.readout_bright_fid = 1.0;
    t.readout_dark_fid = 1.0;
    CalibrationOptions opt;
    opt.grid_points = 3;
    opt.max_evaluations = 400;
    NoiseModel start = NoiseModel::ideal();
    start.p_gate_e = 0.01;
    start.p_gate_ec = 0.02;
    start.p_flip_round = 0.03;
    start.p_phase_round = 0.04;
    start.mzi_visibility = 0.8;
    auto r = calibrate(t, start, opt);
    EXPECT_TRUE(r.within_one_sigma);
    EXPECT_NEAR(r.noise.p_gate_e, 0.0, 1e-9);
    EXPECT_NEAR(r.noise.p_gate_ec, 0.0, 1e-9);
    EXPECT_NEAR(r.noise.p_flip_round, 0.0, 1e-9);
    EXPECT_NEAR(r.noise.mzi_visibility, 1.0, 1e-9);
    EXPECT_EQ(r.noise.p_phase_round, start.p_phase_round);
    EXPECT_NEAR(r.chi2, 0.0, 1e-12);
}

TEST(calibrate, infeasible_targets_are_reported) {
    CalibrationTargets t;
    // Parity fidelities this low cannot coexist with an e1 this high.
    t.value = {0.99, 0.95, 0.9, 0.2, 0.2};
    CalibrationOptions opt;
    opt.grid_points = 3;
    opt.max_evaluations = 200;
    auto r = calibrate(t, NoiseModel{}, opt);
    EXPECT_FALSE(r.within_one_sigma);
    EXPECT_GT(r.chi2, 1.0);
}

TEST(calibrate, rejects_bad_options) {
    CalibrationTargets t;
    t.sigma.e1 = 0.0;
    EXPECT_THROW(calibrate(t, NoiseModel{}), std::invalid_argument);
    CalibrationOptions opt;
    opt.grid_points = 1;
    EXPECT_THROW(calibrate(CalibrationTargets{}, NoiseModel{}, opt), std::invalid_argument);
}
