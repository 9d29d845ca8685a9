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

#include "nvnode/analysis.h"

#include <Eigen/Dense>
#include <array>
#include <boost/math/tools/minima.hpp>
#include <numeric>

namespace nvnode {

double quantile(std::vector<double> values, double q) {
    if (values.empty()) {
        throw std::invalid_argument("quantile of an empty sample");
    }
    std::sort(values.begin(), values.end());
    double h = (static_cast<double>(values.size()) - 1.0) * std::clamp(q, 0.0, 1.0);
    size_t lo = static_cast<size_t>(std::floor(h));
    size_t hi = std::min(lo + 1, values.size() - 1);
    if (values[lo] == values[hi]) {
        return values[lo];
    }
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

PopulationVector::PopulationVector(std::vector<double> probabilities, uint64_t n) : p(std::move(probabilities)), samples(n) {
    num_bits();
}

PopulationVector PopulationVector::from_counts(const std::vector<uint64_t> &counts) {
    uint64_t total = std::accumulate(counts.begin(), counts.end(), uint64_t{0});
    if (total == 0) {
        throw std::invalid_argument("population from zero counts");
    }
    std::vector<double> p(counts.size());
    for (size_t i = 0; i < counts.size(); ++i) {
        p[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
    }
    return PopulationVector(std::move(p), total);
}

size_t PopulationVector::num_bits() const {
    size_t n = 0;
    while ((size_t{1} << n) < p.size()) {
        ++n;
    }
    if (p.empty() || (size_t{1} << n) != p.size()) {
        throw std::invalid_argument("population vector length must be a power of two");
    }
    return n;
}

double PopulationVector::sum() const { return std::accumulate(p.begin(), p.end(), 0.0); }

namespace {

// Applies the 2x2 matrix m on bit `bit` of every index.
void apply_bit_matrix(std::vector<double> &v, size_t bit, const std::array<std::array<double, 2>, 2> &m) {
    size_t stride = size_t{1} << bit;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i & stride) {
            continue;
        }
        double a = v[i], b = v[i | stride];
        v[i] = m[0][0] * a + m[0][1] * b;
        v[i | stride] = m[1][0] * a + m[1][1] * b;
    }
}

void check_layout(size_t entries, const std::vector<ConfusionMatrix> &per_bit) {
    if (entries == 0 || (size_t{1} << per_bit.size()) != entries) {
        throw std::invalid_argument("need one confusion matrix per outcome bit");
    }
}

}  // namespace

std::vector<double> apply_confusion(const std::vector<double> &truth, const std::vector<ConfusionMatrix> &per_bit) {
    check_layout(truth.size(), per_bit);
    std::vector<double> v = truth;
    for (size_t k = 0; k < per_bit.size(); ++k) {
        const auto &c = per_bit[k];
        apply_bit_matrix(v, k, {{{c(0, 0), c(0, 1)}, {c(1, 0), c(1, 1)}}});
    }
    return v;
}

MitigationResult mitigate_readout(const PopulationVector &raw, const std::vector<ConfusionMatrix> &per_bit) {
    check_layout(raw.size(), per_bit);
    std::vector<double> v = raw.p;
    for (size_t k = 0; k < per_bit.size(); ++k) {
        apply_bit_matrix(v, k, per_bit[k].inverse());
    }
    MitigationResult out;
    out.pre_clip = v;
    double lowest = *std::min_element(v.begin(), v.end());
    out.slack = lowest < 0.0 ? -lowest : 0.0;
    for (auto &x : v) {
        x = std::max(0.0, x);
    }
    double total = std::accumulate(v.begin(), v.end(), 0.0);
    if (total <= 0.0) {
        throw std::domain_error("mitigated populations vanish after clipping");
    }
    for (auto &x : v) {
        x /= total;
    }
    out.mitigated = PopulationVector(std::move(v), raw.samples);
    return out;
}

std::vector<double> mitigation_sigma(const PopulationVector &raw, const std::vector<ConfusionMatrix> &per_bit) {
    check_layout(raw.size(), per_bit);
    if (raw.samples == 0) {
        throw std::invalid_argument("standard errors need a sample count");
    }
    const size_t n = raw.size();
    std::vector<double> first(n, 0.0), second(n, 0.0);
    for (size_t j = 0; j < n; ++j) {
        std::vector<double> col(n, 0.0);
        col[j] = 1.0;
        for (size_t k = 0; k < per_bit.size(); ++k) {
            apply_bit_matrix(col, k, per_bit[k].inverse());
        }
        for (size_t i = 0; i < n; ++i) {
            first[i] += col[i] * raw.p[j];
            second[i] += col[i] * col[i] * raw.p[j];
        }
    }
    std::vector<double> sigma(n);
    for (size_t i = 0; i < n; ++i) {
        sigma[i] = std::sqrt(std::max(0.0, second[i] - first[i] * first[i]) / static_cast<double>(raw.samples));
    }
    return sigma;
}

double exponential_model(double t_ms, double p_i, double t1l_ms, double p_f) {
    return p_i * std::exp(-t_ms / t1l_ms) + p_f;
}

namespace {

// Times are measured in units of t1l_min so that rescaling the data together
// with the search range leaves every intermediate value bit-identical.
struct Problem {
    std::vector<double> u, y, w;
    double tau_max = 1.0;
};

struct Candidate {
    double rss = std::numeric_limits<double>::infinity();
    double tau = 0.0;
    double p_i = 0.0;
    double p_f = 0.0;
};

Candidate constant_fit(const Problem &pr) {
    double sw = 0.0, swy = 0.0;
    for (size_t i = 0; i < pr.y.size(); ++i) {
        sw += pr.w[i];
        swy += pr.w[i] * pr.y[i];
    }
    Candidate c;
    c.p_f = swy / sw;
    c.rss = 0.0;
    for (size_t i = 0; i < pr.y.size(); ++i) {
        c.rss += pr.w[i] * (pr.y[i] - c.p_f) * (pr.y[i] - c.p_f);
    }
    c.tau = std::numeric_limits<double>::infinity();
    return c;
}

Candidate project(const Problem &pr, double tau) {
    double saa = 0, sa = 0, s1 = 0, say = 0, sy = 0;
    for (size_t i = 0; i < pr.u.size(); ++i) {
        double a = std::exp(-pr.u[i] / tau);
        saa += pr.w[i] * a * a;
        sa += pr.w[i] * a;
        s1 += pr.w[i];
        say += pr.w[i] * a * pr.y[i];
        sy += pr.w[i] * pr.y[i];
    }
    double det = saa * s1 - sa * sa;
    if (!(det > 1e-14 * saa * s1)) {
        Candidate c = constant_fit(pr);
        c.tau = tau;
        return c;
    }
    Candidate c;
    c.tau = tau;
    c.p_i = (say * s1 - sa * sy) / det;
    c.p_f = (saa * sy - sa * say) / det;
    c.rss = 0.0;
    for (size_t i = 0; i < pr.u.size(); ++i) {
        double r = pr.y[i] - (c.p_i * std::exp(-pr.u[i] / tau) + c.p_f);
        c.rss += pr.w[i] * r * r;
    }
    return c;
}

double rss_of(const Problem &pr, double p_i, double tau, double p_f) {
    double rss = 0.0;
    for (size_t i = 0; i < pr.u.size(); ++i) {
        double r = pr.y[i] - (p_i * std::exp(-pr.u[i] / tau) + p_f);
        rss += pr.w[i] * r * r;
    }
    return rss;
}

Candidate polish(const Problem &pr, Candidate c) {
    const size_t n = pr.u.size();
    for (int iter = 0; iter < 50; ++iter) {
        Eigen::MatrixXd jac(n, 3);
        Eigen::VectorXd res(n);
        for (size_t i = 0; i < n; ++i) {
            double sw = std::sqrt(pr.w[i]);
            double a = std::exp(-pr.u[i] / c.tau);
            res(i) = sw * (pr.y[i] - (c.p_i * a + c.p_f));
            jac(i, 0) = sw * a;
            jac(i, 1) = sw * c.p_i * a * pr.u[i] / c.tau;  // d/d(log tau)
            jac(i, 2) = sw;
        }
        Eigen::Vector3d step = jac.colPivHouseholderQr().solve(res);
        if (!step.allFinite()) {
            break;
        }
        bool improved = false;
        for (double scale = 1.0; scale > 1e-4; scale *= 0.5) {
            Candidate t = c;
            t.p_i += scale * step(0);
            t.tau = std::clamp(c.tau * std::exp(scale * step(1)), 1.0, pr.tau_max);
            t.p_f += scale * step(2);
            t.rss = rss_of(pr, t.p_i, t.tau, t.p_f);
            if (t.rss < c.rss) {
                c = t;
                improved = true;
                break;
            }
        }
        if (!improved) {
            break;
        }
    }
    return c;
}

Candidate best_fit(const Problem &pr, size_t starts) {
    const double log_max = std::log(pr.tau_max);
    std::vector<double> grid(starts);
    for (size_t k = 0; k < starts; ++k) {
        grid[k] = starts == 1 ? 0.0 : log_max * static_cast<double>(k) / static_cast<double>(starts - 1);
    }
    auto objective = [&](double s) { return project(pr, std::exp(s)).rss; };
    Candidate best;
    for (size_t k = 0; k < starts; ++k) {
        double lo = grid[k == 0 ? 0 : k - 1];
        double hi = grid[k + 1 < starts ? k + 1 : k];
        double s = grid[k];
        if (hi > lo) {
            boost::uintmax_t max_iter = 200;
            auto r = boost::math::tools::brent_find_minima(objective, lo, hi, std::numeric_limits<double>::digits / 2,
                                                           max_iter);
            s = r.first;
        }
        Candidate c = project(pr, std::exp(s));
        if (!std::isfinite(c.rss)) {
            continue;
        }
        double tol = 1e-12 * std::max(1.0, best.rss);
        if (!std::isfinite(best.rss) || c.rss < best.rss - tol ||
            (std::abs(c.rss - best.rss) <= tol && c.tau < best.tau)) {
            best = c;
        }
    }
    if (!std::isfinite(best.rss)) {
        throw std::runtime_error("exponential fit did not converge from any start");
    }
    Candidate polished = polish(pr, best);
    return polished.rss <= best.rss ? polished : best;
}

bool is_flat(const std::vector<double> &y) {
    auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    double scale = std::max({1.0, std::abs(*lo), std::abs(*hi)});
    return *hi - *lo <= 1e-12 * scale;
}

struct PointFit {
    Candidate c;
    bool unbounded = false;
};

PointFit fit_point(const Problem &pr, size_t starts) {
    PointFit f;
    if (is_flat(pr.y)) {
        f.c = constant_fit(pr);
        f.unbounded = true;
        return f;
    }
    f.c = best_fit(pr, starts);
    if (f.c.tau >= pr.tau_max * (1.0 - 1e-6)) {
        f.c = constant_fit(pr);
        f.unbounded = true;
    }
    return f;
}

Interval widen(Interval ci, double estimate) {
    ci.lo = std::min(ci.lo, estimate);
    ci.hi = std::max(ci.hi, estimate);
    return ci;
}

}  // namespace

FitResult fit_exponential(const std::vector<FitPoint> &points, const FitOptions &options) {
    if (points.size() < 4) {
        throw std::invalid_argument("exponential fit needs at least 4 points");
    }
    if (!(options.t1l_min_ms > 0.0) || !(options.t1l_max_ms > options.t1l_min_ms)) {
        throw std::invalid_argument("T1L search range must satisfy 0 < min < max");
    }
    if (options.starts == 0) {
        throw std::invalid_argument("need at least one start");
    }
    std::vector<double> ts;
    Problem pr;
    pr.tau_max = options.t1l_max_ms / options.t1l_min_ms;
    for (const auto &p : points) {
        if (!std::isfinite(p.t_ms) || !std::isfinite(p.p)) {
            throw std::invalid_argument("fit points must be finite");
        }
        if (options.weighted && !(p.sigma > 0.0)) {
            throw std::invalid_argument("weighted fit needs positive sigmas");
        }
        ts.push_back(p.t_ms);
        pr.u.push_back(p.t_ms / options.t1l_min_ms);
        pr.y.push_back(p.p);
        pr.w.push_back(options.weighted ? 1.0 / (p.sigma * p.sigma) : 1.0);
    }
    std::sort(ts.begin(), ts.end());
    if (std::adjacent_find(ts.begin(), ts.end()) != ts.end()) {
        throw std::invalid_argument("fit times must be distinct");
    }

    PointFit f = fit_point(pr, options.starts);
    FitResult out;
    out.p_i = f.c.p_i;
    out.p_f = f.c.p_f;
    out.t1l_unbounded = f.unbounded;
    out.t1l_ms = f.unbounded ? std::numeric_limits<double>::infinity() : f.c.tau * options.t1l_min_ms;
    out.rss = f.c.rss;
    out.p_i_ci = {out.p_i, out.p_i};
    out.t1l_ci = {out.t1l_ms, out.t1l_ms};
    out.p_f_ci = {out.p_f, out.p_f};
    if (!options.compute_ci) {
        return out;
    }
    if (options.bootstrap_resamples < 100) {
        throw std::invalid_argument("bootstrap needs at least 100 resamples");
    }

    const size_t n = points.size();
    double rms = std::sqrt(f.c.rss / static_cast<double>(n - 3));
    std::vector<double> sig(n);
    for (size_t i = 0; i < n; ++i) {
        sig[i] = options.weighted || points[i].sigma > 0.0 ? points[i].sigma : rms;
    }
    std::vector<double> bi, bt, bf;
    Problem boot = pr;
    for (size_t r = 0; r < options.bootstrap_resamples; ++r) {
        Rng rng(options.seed, streams::kFit, r);
        for (size_t i = 0; i < n; ++i) {
            double mean = f.unbounded ? f.c.p_f : f.c.p_i * std::exp(-pr.u[i] / f.c.tau) + f.c.p_f;
            boot.y[i] = mean + sig[i] * rng.normal();
        }
        PointFit b = fit_point(boot, options.starts);
        bi.push_back(b.c.p_i);
        bf.push_back(b.c.p_f);
        bt.push_back(b.unbounded ? std::numeric_limits<double>::infinity() : b.c.tau * options.t1l_min_ms);
    }
    out.resamples = options.bootstrap_resamples;
    out.p_i_ci = widen({quantile(bi, kCiLower), quantile(bi, kCiUpper)}, out.p_i);
    out.t1l_ci = widen({quantile(bt, kCiLower), quantile(bt, kCiUpper)}, out.t1l_ms);
    out.p_f_ci = widen({quantile(bf, kCiLower), quantile(bf, kCiUpper)}, out.p_f);
    return out;
}

}  // namespace nvnode
