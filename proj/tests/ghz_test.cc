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

#include <cmath>
#include <numbers>

#include "nvnode/ghz.h"

using namespace nvnode;

namespace {

const double kPi = std::numbers::pi;

NoiseModel readout_only() {
    NoiseModel n = NoiseModel::ideal();
    n.readout_bright_fid = 0.809;
    n.readout_dark_fid = 0.988;
    return n;
}

std::map<JointBasis, CoincidenceTable> run_all(const NoiseModel &n, uint64_t shots, uint64_t seed) {
    std::map<JointBasis, CoincidenceTable> t;
    for (auto b : kAllBases) {
        t[b] = measure_joint(b, shots, n, seed);
    }
    return t;
}

// 2x2 rotation exp(-i theta sigma / 2) built from cos/sin.
Eigen::Matrix2cd rot(char axis, double theta) {
    double c = std::cos(theta / 2), s = std::sin(theta / 2);
    Eigen::Matrix2cd m;
    const Complex i(0, 1);
    switch (axis) {
        case 'x':
            m << c, -i * s, -i * s, c;
            break;
        case 'y':
            m << c, -s, s, c;
            break;
        default:
            m << std::exp(-i * theta / 2.0), 0, 0, std::exp(i * theta / 2.0);
    }
    return m;
}

}  // namespace

TEST(ghz_circuit, structure) {
    auto c = build_ghz_circuit();
    ASSERT_EQ(c.size(), 5u);
    EXPECT_EQ(c[0].kind, GateKind::MwRot);
    EXPECT_EQ(c[0].axis, Axis::Y);
    EXPECT_EQ(c[1].kind, GateKind::CondNucRot);
    EXPECT_EQ(c[1].b, kCarbon1);
    EXPECT_EQ(c[2].kind, GateKind::NucRot);
    EXPECT_EQ(c[2].a, kCarbon1);
    EXPECT_EQ(c[3].kind, GateKind::MwRot);
    EXPECT_EQ(c[4].kind, GateKind::OpticalPiEmit);
    for (const auto &g : c) {
        EXPECT_NO_THROW(g.validate());
    }
    for (auto b : kAllBases) {
        for (const auto &g : mapping_sequence(b)) {
            EXPECT_NE(g.a, kPhoton);
            EXPECT_NE(g.b, kPhoton);
            EXPECT_NE(g.kind, GateKind::OpticalPiEmit);
        }
    }
}

TEST(ghz_circuit, noiseless_state_is_target) {
    Rng rng(1);
    for (auto b : {Backend::PureVector, Backend::DensityMatrix}) {
        auto s = prepare_ghz(NoiseModel::ideal(), b, rng);
        EXPECT_NEAR(s.fidelity_to(ideal_ghz_amplitudes()), 1.0, 1e-10);
        auto w = state_witness(s);
        EXPECT_NEAR(w.e1.value, 1.0, 1e-10);
        EXPECT_NEAR(s.expectation(PauliString("ZIIIZ")), -1.0, 1e-10);
        EXPECT_NEAR(w.e2.value, 1.0, 1e-10);
        EXPECT_NEAR(w.e3.value, 1.0, 1e-10);
        EXPECT_NEAR(w.f_lb, 1.0, 1e-10);
    }
}

TEST(ghz_circuit, matches_brute_force_matrix_product) {
    // 8x8 matrices on (e, c, p), index e + 2c + 4p, composed by hand.
    auto on = [](int q, const Eigen::Matrix2cd &u) {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(8, 8);
        for (int r = 0; r < 8; ++r) {
            for (int c = 0; c < 8; ++c) {
                if ((r & ~(1 << q)) != (c & ~(1 << q))) {
                    continue;
                }
                m(r, c) = u((r >> q) & 1, (c >> q) & 1);
            }
        }
        return m;
    };
    Eigen::MatrixXcd cond = Eigen::MatrixXcd::Zero(8, 8);
    for (int r = 0; r < 8; ++r) {
        for (int c = 0; c < 8; ++c) {
            if ((r & 1) != (c & 1) || (r & 4) != (c & 4)) {
                continue;
            }
            auto u = rot('x', (c & 1) ? -kPi / 2 : kPi / 2);
            cond(r, c) = u((r >> 1) & 1, (c >> 1) & 1);
        }
    }
    Eigen::MatrixXcd late = Eigen::MatrixXcd::Zero(8, 8);
    for (int c = 0; c < 8; ++c) {
        int r = (c & 1) == 0 ? c ^ 4 : c;
        late(r, c) = 1.0;
    }
    Eigen::MatrixXcd total = late * on(0, rot('x', kPi)) * on(0, rot('z', -kPi / 2)) * on(1, rot('x', kPi / 2)) *
                             cond * on(0, rot('y', kPi / 2));
    Eigen::VectorXcd out = total.col(0);

    Rng rng(1);
    auto s = prepare_ghz(NoiseModel::ideal(), Backend::PureVector, rng);
    for (int k = 0; k < 8; ++k) {
        int e = k & 1, c = (k >> 1) & 1, p = (k >> 2) & 1;
        size_t full = e | c << 1 | p << 4;
        EXPECT_LT(std::abs(s.amplitudes()[full] - out(k)), 1e-10) << k;
    }
}

TEST(ghz_mapping, correlators_map_onto_electron) {
    // Noiselessly, the mapped electron population encodes the correlator.
    NoiseModel n = NoiseModel::ideal();
    for (auto b : kAllBases) {
        auto w = exact_joint_probabilities(b, n);
        EXPECT_NEAR(expectation_from_counts(b, w), 1.0, 1e-10) << basis_name(b);
    }
    // ZeZc even parity is bright, XeXc even parity is dark.
    auto zz = exact_joint_probabilities(JointBasis::ZeZcIp, n);
    EXPECT_NEAR(zz[0][0][0] + zz[0][0][1], 1.0, 1e-10);
    auto xx = exact_joint_probabilities(JointBasis::XeXcXp, n);
    EXPECT_NEAR(xx[0][1][0] + xx[0][0][1], 1.0, 1e-10);
}

TEST(ghz_measure, zeiczp_noiseless_populations) {
    auto t = measure_joint(JointBasis::ZeIcZp, 20000, NoiseModel::ideal(), 3);
    EXPECT_GT(t.total_coincidences(), 0u);
    double target = t.population(0, 1) + t.population(1, 0);
    EXPECT_NEAR(target, 1.0, 1e-12);
    double sum = 0.0;
    for (int m = 0; m < 2; ++m) {
        for (int p = 0; p < 2; ++p) {
            sum += t.population(m, p);
        }
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(ghz_measure, zezcip_even_parity_in_both_bins) {
    auto t = measure_joint(JointBasis::ZeZcIp, 20000, NoiseModel::ideal(), 4);
    for (int p = 0; p < 2; ++p) {
        auto term = conditional_term(t, p);
        EXPECT_GT(term.coincidences, 0u);
        EXPECT_NEAR(term.value, 1.0, 1e-12);
    }
    EXPECT_NEAR(t.population(1, 0) + t.population(1, 1), 0.0, 1e-12);
}

TEST(ghz_measure, zero_and_odd_shots) {
    EXPECT_THROW(measure_joint(JointBasis::ZeIcZp, 0, NoiseModel{}, 1), std::invalid_argument);
    auto t = measure_joint(JointBasis::ZeIcZp, 11, NoiseModel{}, 1);
    EXPECT_EQ(t.shots[0], 5u);
    EXPECT_EQ(t.shots[1], 5u);
    EXPECT_EQ(t.warnings.size(), 1u);
}

TEST(ghz_measure, variant_populations_normalized) {
    auto t = measure_joint(JointBasis::XeXcXp, 40000, NoiseModel{}, 8);
    for (auto v : {RunVariant::Unflipped, RunVariant::Flipped}) {
        double s = 0.0;
        for (int e = 0; e < 2; ++e) {
            for (int p = 0; p < 2; ++p) {
                s += t.variant_population(v, e, p);
            }
        }
        EXPECT_NEAR(s, 1.0, 1e-12);
    }
}

TEST(ghz_measure, merge_is_order_independent) {
    NoiseModel n;
    n.herald_prob = 0.2;
    auto a = measure_joint(JointBasis::ZeZcIp, 2000, n, 1);
    auto b = measure_joint(JointBasis::ZeZcIp, 2000, n, 2);
    auto c = measure_joint(JointBasis::ZeZcIp, 2000, n, 3);
    CoincidenceTable ab = a;
    ab.merge(b);
    ab.merge(c);
    CoincidenceTable cb = c;
    cb.merge(b);
    cb.merge(a);
    EXPECT_EQ(ab.counts, cb.counts);
    EXPECT_EQ(ab.shots, cb.shots);
    EXPECT_THROW(ab.merge(measure_joint(JointBasis::ZeIcZp, 2, n, 1)), std::invalid_argument);
}

TEST(ghz_measure, thread_count_does_not_change_results) {
    NoiseModel n;
    n.herald_prob = 0.1;
    auto a = measure_joint(JointBasis::XeXcXp, 5000, n, 9, {1});
    auto b = measure_joint(JointBasis::XeXcXp, 5000, n, 9, {4});
    EXPECT_EQ(a.counts, b.counts);
}

TEST(mzi, visibility_limits) {
    NoiseModel n = NoiseModel::ideal();
    const int shots = 4000;
    int plus = 0, plus0 = 0;
    NoiseModel zero = n;
    zero.mzi_visibility = 0.0;
    for (int k = 0; k < shots; ++k) {
        Rng rng(5, streams::kTest, k);
        auto s = QuantumState::zero(kNodeQubits, Backend::PureVector);
        s.apply_unitary(gates::hadamard(), {kPhoton.index});
        auto s0 = s;
        plus += mzi_photon_x_measurement(s, n, rng) == 1;
        plus0 += mzi_photon_x_measurement(s0, zero, rng) == 1;
    }
    EXPECT_EQ(plus, shots);
    EXPECT_NEAR(static_cast<double>(plus0) / shots, 0.5, 4 * std::sqrt(0.25 / shots));
}

TEST(mzi, visibility_scales_xxx) {
    NoiseModel a = NoiseModel::ideal(), b = NoiseModel::ideal();
    b.mzi_visibility = 0.9;
    double ea = expectation_from_counts(JointBasis::XeXcXp, exact_joint_probabilities(JointBasis::XeXcXp, a));
    double eb = expectation_from_counts(JointBasis::XeXcXp, exact_joint_probabilities(JointBasis::XeXcXp, b));
    EXPECT_NEAR(eb, 0.9 * ea, 1e-12);
}

TEST(witness, arithmetic) {
    auto r = witness_from_values(0.97, 0.88, 0.82, 0.01, 0.02, 0.05);
    EXPECT_NEAR(r.f_lb, 0.835, 1e-12);
    EXPECT_NEAR(r.f_lb, 0.84, 0.03);
    EXPECT_NEAR(r.sigma_f_lb, 0.5 * std::sqrt(0.0001 + 0.0004 + 0.0025), 1e-15);
    EXPECT_DOUBLE_EQ(witness_from_values(1, 1, 1).f_lb, 1.0);
    EXPECT_DOUBLE_EQ(witness_from_values(0, 0, 0).f_lb, -0.5);
}

TEST(witness, requires_all_bases) {
    auto t = run_all(NoiseModel::ideal(), 400, 1);
    auto missing = t;
    missing.erase(JointBasis::XeXcXp);
    EXPECT_THROW(estimate_witness(missing), std::invalid_argument);
    auto empty = t;
    empty[JointBasis::ZeZcIp] = CoincidenceTable{};
    empty[JointBasis::ZeZcIp].basis = JointBasis::ZeZcIp;
    EXPECT_THROW(estimate_witness(empty), std::invalid_argument);
}

TEST(witness, noiseless_trajectory_gives_one) {
    auto w = estimate_witness(run_all(NoiseModel::ideal(), 100000, 21));
    EXPECT_NEAR(w.e1.value, 1.0, 1e-12);
    EXPECT_NEAR(w.e2.value, 1.0, 1e-12);
    EXPECT_NEAR(w.e3.value, 1.0, 1e-12);
    EXPECT_NEAR(w.f_lb, 1.0, 1e-12);
}

TEST(witness, readout_only_matches_exact_value) {
    NoiseModel n = readout_only();
    auto exact = exact_witness(n);
    double e = (0.809 - 0.012) / (0.809 + 0.012);
    EXPECT_NEAR(exact.e1.value, e, 1e-12);
    EXPECT_NEAR(exact.f_lb, (3 * e - 1) / 2, 1e-12);
    n.herald_prob = 1.0;
    auto w = estimate_witness(run_all(n, 100000, 22));
    EXPECT_NEAR(w.f_lb, exact.f_lb, 4 * w.sigma_f_lb);
}

TEST(witness, averaged_estimator_unbiased_at_default_noise) {
    NoiseModel n;
    n.herald_prob = 1.0;
    auto exact = exact_witness(n);
    auto w = estimate_witness(run_all(n, 60000, 23));
    EXPECT_NEAR(w.e1.value, exact.e1.value, 4 * w.e1.sigma);
    EXPECT_NEAR(w.e2.value, exact.e2.value, 4 * w.e2.sigma);
    EXPECT_NEAR(w.e3.value, exact.e3.value, 4 * w.e3.sigma);
    EXPECT_NEAR(w.f_lb, exact.f_lb, 4 * w.sigma_f_lb);
}

TEST(witness, symmetric_readout_variants_agree) {
    NoiseModel n;
    n.herald_prob = 1.0;
    n.readout_bright_fid = n.readout_dark_fid = 0.93;
    for (auto b : kAllBases) {
        auto t = measure_joint(b, 40000, n, 30 + static_cast<int>(b));
        double u = variant_expectation(t, RunVariant::Unflipped);
        double f = variant_expectation(t, RunVariant::Flipped);
        double sigma = std::sqrt((1 - u * u) / t.heralded(RunVariant::Unflipped) +
                                 (1 - f * f) / t.heralded(RunVariant::Flipped));
        EXPECT_NEAR(u, f, 4 * sigma) << basis_name(b);
    }
}

TEST(witness, photon_bin_conditioning_is_consistent) {
    NoiseModel n;
    n.herald_prob = 1.0;
    auto t = measure_joint(JointBasis::ZeZcIp, 40000, n, 41);
    auto early = conditional_term(t, 0), late = conditional_term(t, 1);
    double sigma = std::hypot(early.sigma, late.sigma);
    EXPECT_LT(std::abs(early.value - late.value), 4 * sigma);
}

TEST(witness, bootstrap_sigma_close_to_binomial) {
    NoiseModel n;
    n.herald_prob = 1.0;
    auto tables = run_all(n, 8000, 51);
    auto plain = estimate_witness(tables);
    auto boot = estimate_witness(tables, {true, 1000, 7});
    auto again = estimate_witness(tables, {true, 1000, 7});
    EXPECT_DOUBLE_EQ(boot.e3.sigma, again.e3.sigma);
    EXPECT_DOUBLE_EQ(boot.f_lb, plain.f_lb);
    for (auto [a, b] : {std::pair{plain.e1.sigma, boot.e1.sigma}, std::pair{plain.e2.sigma, boot.e2.sigma},
                        std::pair{plain.e3.sigma, boot.e3.sigma}}) {
        EXPECT_NEAR(b / a, 1.0, 0.2);
    }
}

TEST(witness, lower_bound_below_state_fidelity) {
    Rng pick(77);
    for (int k = 0; k < 60; ++k) {
        NoiseModel n;
        n.p_gate_e = 0.05 * pick.uniform();
        n.p_gate_ec = 0.1 * pick.uniform();
        n.mzi_visibility = 0.7 + 0.3 * pick.uniform();
        n.readout_bright_fid = 0.75 + 0.25 * pick.uniform();
        n.readout_dark_fid = 0.9 + 0.1 * pick.uniform();
        n.background_error = 0.05 * pick.uniform();
        n.bin_overlap_error = 0.05 * pick.uniform();
        Rng rng(1);
        auto state = prepare_ghz(n, Backend::DensityMatrix, rng);
        double fidelity = state.fidelity_to(ideal_ghz_amplitudes());
        EXPECT_LE(state_witness(state).f_lb, fidelity + 1e-12) << k;
        EXPECT_LE(exact_witness(n).f_lb, fidelity + 1e-12) << k;
    }
}
