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

#ifndef NVNODE_ANALYSIS_H
#define NVNODE_ANALYSIS_H

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "nvnode/noise_model.h"
#include "nvnode/rng.h"

namespace nvnode {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double width() const { return hi - lo; }
    bool contains(double x) const { return lo <= x && x <= hi; }
};

/// Quantile levels of the reported 68% intervals.
inline constexpr double kCiLower = 0.16;
inline constexpr double kCiUpper = 0.84;

/// Linear-interpolation quantile of an unsorted sample (q in [0, 1]).
double quantile(std::vector<double> values, double q);

/// Probabilities over 2^n outcome indices; bit k of an index is readout k.
struct PopulationVector {
    std::vector<double> p;
    uint64_t samples = 0;

    PopulationVector() = default;
    explicit PopulationVector(std::vector<double> probabilities, uint64_t samples = 0);
    static PopulationVector from_counts(const std::vector<uint64_t> &counts);

    size_t size() const { return p.size(); }
    size_t num_bits() const;
    double sum() const;
    double operator[](size_t i) const { return p[i]; }
};

/// Pushes true populations through independent per-bit readout confusion.
std::vector<double> apply_confusion(const std::vector<double> &truth, const std::vector<ConfusionMatrix> &per_bit);

struct MitigationResult {
    PopulationVector mitigated;
    std::vector<double> pre_clip;
    double slack = 0.0;  // magnitude of the most negative pre-clip entry
};

/// Inverts the tensor product of per-bit confusion matrices (bit k of the
/// outcome index uses per_bit[k]), clips negatives and renormalizes.
MitigationResult mitigate_readout(const PopulationVector &raw, const std::vector<ConfusionMatrix> &per_bit);

/// Multinomial standard error of each unclipped mitigated entry, evaluated at
/// the raw populations with raw.samples shots.
std::vector<double> mitigation_sigma(const PopulationVector &raw, const std::vector<ConfusionMatrix> &per_bit);

/// Percentile bootstrap over records resampled with replacement. Resample r
/// draws from Rng(seed, streams::kBootstrap, r).
template <class Record, class Statistic>
Interval bootstrap_ci(const std::vector<Record> &records, Statistic statistic, size_t resamples, uint64_t seed) {
    if (records.empty()) {
        throw std::invalid_argument("bootstrap needs at least one record");
    }
    if (resamples < 100) {
        throw std::invalid_argument("bootstrap needs at least 100 resamples");
    }
    std::vector<double> values;
    values.reserve(resamples);
    std::vector<Record> sample(records.size());
    for (size_t r = 0; r < resamples; ++r) {
        Rng rng(seed, streams::kBootstrap, r);
        for (auto &s : sample) {
            s = records[rng.below(records.size())];
        }
        values.push_back(statistic(sample));
    }
    return {quantile(values, kCiLower), quantile(values, kCiUpper)};
}

struct FitPoint {
    double t_ms = 0.0;
    double p = 0.0;
    double sigma = 0.0;
};

struct FitOptions {
    bool weighted = true;
    size_t starts = 25;
    double t1l_min_ms = 1.0;
    double t1l_max_ms = 1000.0;
    bool compute_ci = true;
    size_t bootstrap_resamples = 1000;
    uint64_t seed = 0;
};

/// p(t) = p_i exp(-t / T1L) + p_f.
struct FitResult {
    double p_i = 0.0;
    double t1l_ms = 0.0;
    double p_f = 0.0;
    Interval p_i_ci;
    Interval t1l_ci;
    Interval p_f_ci;
    double rss = 0.0;
    bool t1l_unbounded = false;
    size_t resamples = 0;
};

double exponential_model(double t_ms, double p_i, double t1l_ms, double p_f);

/// Least squares over (p_i, T1L, p_f): for each of `starts` log-spaced T1L
/// seeds a bounded Brent search of the projected residual, then a
/// Gauss-Newton polish. Ties go to the lowest residual, then the smallest
/// T1L. Confidence intervals come from a parametric bootstrap. Data with no
/// decay within the search range sets t1l_unbounded.
FitResult fit_exponential(const std::vector<FitPoint> &points, const FitOptions &options = {});

}  // namespace nvnode

#endif
