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

// Long-running statistical properties of the error-correction loop.

#include <gtest/gtest.h>

#include <cmath>

#include "nvnode/qec.h"

using namespace nvnode;

TEST(qec_property, feedback_separation_grows_with_flip_rate) {
    const uint64_t shots = 100000;
    for (double p : {0.01, 0.02, 0.05}) {
        NoiseModel n;
        n.herald_prob = 1.0;
        n.p_flip_round = p;
        auto fb = logical_fidelity(run_qec(LogicalPrep::zero(), 12, true, shots, n, 31), LogicalPrep::zero(), n);
        auto open = logical_fidelity(run_qec(LogicalPrep::zero(), 12, false, shots, n, 32), LogicalPrep::zero(), n);
        double z = (fb.value - open.value) / std::hypot(fb.sigma, open.sigma);
        EXPECT_GE(z, 5.0) << "p_flip_round " << p << ": " << fb.value << " vs " << open.value;
    }
}
