#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "structhash/bounds.hpp"
#include "structhash/parallel.hpp"
#include "structhash/pipeline.hpp"
#include "structhash/rng.hpp"

namespace structhash {

// Empirical bias/variance report for one (matrix kind, mode, angle) cell.
struct McReport {
    MatrixKind kind = MatrixKind::Toeplitz;
    HashMode mode = HashMode::Short;
    std::size_t n = 0;
    std::size_t k = 0;
    double theta_true = 0.0;
    double theta_over_pi = 0.0;
    std::size_t m_trials = 0;
    double mean_est = 0.0;
    double var_est = 0.0;
    double std_err = 0.0;
    double bound_thm3 = 0.0;
    bool pass_unbiased = false;
    bool variance_applicable = false;  // Toeplitz short mode only
    bool pass_variance = true;
};

// Unit vectors at an exact angle: u and cos(theta) u + sin(theta) v for a
// seeded random orthonormal pair (u, v).
inline std::pair<std::vector<double>, std::vector<double>> make_angled_pair(
    std::size_t n, double theta, std::uint64_t seed) {
    if (!(theta >= 0.0 && theta <= std::numbers::pi))
        throw std::invalid_argument("make_angled_pair: theta must be in [0, pi]");
    if (n < 2 && theta != 0.0 && theta != std::numbers::pi)
        throw std::invalid_argument("make_angled_pair: n >= 2 required for interior angles");
    rng::GaussianStream gs(rng::derive_stream(seed, rng::kStreamVectors));
    std::vector<double> u(n), v(n);
    double norm_u = 0.0;
    do {
        norm_u = 0.0;
        for (auto& x : u) {
            x = gs.next();
            norm_u += x * x;
        }
    } while (norm_u == 0.0);
    norm_u = std::sqrt(norm_u);
    for (auto& x : u) x /= norm_u;

    // Gram-Schmidt; redraw in the (measure-zero) collinear case.
    double norm_v = 0.0;
    do {
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = gs.next();
            dot += v[i] * u[i];
        }
        norm_v = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            v[i] -= dot * u[i];
            norm_v += v[i] * v[i];
        }
    } while (n >= 2 && norm_v < 1e-12);
    if (n >= 2) {
        norm_v = std::sqrt(norm_v);
        for (auto& x : v) x /= norm_v;
    }

    std::vector<double> r(n);
    const double c = std::cos(theta), s = std::sin(theta);
    for (std::size_t i = 0; i < n; ++i) r[i] = c * u[i] + s * v[i];
    return {std::move(u), std::move(r)};
}

// Mean and variance of theta~ over m_trials independently drawn pipelines
// (fresh pool, diagonals and permutations per trial; p and r stay fixed, as
// in the unbiasedness statement). Trials run in parallel; per-trial seeds are
// derived by counter so the report does not depend on the schedule.
inline McReport mc_estimate(std::span<const double> p, std::span<const double> r,
                            const MatrixSpec& spec, HashMode mode, std::size_t m_trials,
                            std::uint64_t seed, unsigned threads = 0) {
    if (m_trials < 100) throw std::invalid_argument("mc_estimate: m_trials must be >= 100");
    if (p.size() != spec.n || r.size() != spec.n)
        throw std::invalid_argument("mc_estimate: vector dimension must match spec.n");
    const double theta = true_angle(p, r);  // throws on zero vectors

    const std::uint64_t trial_base = rng::derive_stream(seed, rng::kStreamTrials);
    std::vector<double> estimates(m_trials);
    parallel_for(m_trials, threads, [&](std::size_t i) {
        Pipeline pipeline(spec, mode, rng::derive_stream(trial_base, i));
        estimates[i] = approx_angle(pipeline.hash(p), pipeline.hash(r));
    });

    McReport report;
    report.kind = spec.kind;
    report.mode = mode;
    report.n = spec.n;
    report.k = spec.k;
    report.theta_true = theta;
    report.theta_over_pi = theta / std::numbers::pi;
    report.m_trials = m_trials;

    double mean = 0.0;
    for (double e : estimates) mean += e;
    mean /= static_cast<double>(m_trials);
    double ss = 0.0;
    for (double e : estimates) ss += (e - mean) * (e - mean);
    const double var = ss / static_cast<double>(m_trials - 1);

    report.mean_est = mean;
    report.var_est = var;
    report.std_err = std::sqrt(var / static_cast<double>(m_trials));
    report.bound_thm3 = spec.k >= 2 ? variance_upper_bound(theta, spec.k) : 0.0;
    report.pass_unbiased = std::abs(mean - report.theta_over_pi) <= 4.0 * report.std_err;
    report.variance_applicable = spec.kind == MatrixKind::Toeplitz && mode == HashMode::Short;
    if (report.variance_applicable)
        report.pass_variance = var <= report.bound_thm3 * 1.1;
    return report;
}

// Cartesian product of specs and angles; each cell embeds a fresh seeded
// unit-vector pair at the requested angle.
inline std::vector<McReport> sweep(const std::vector<MatrixSpec>& specs,
                                   const std::vector<double>& angles, HashMode mode,
                                   std::size_t m_trials, std::uint64_t seed,
                                   unsigned threads = 0) {
    if (specs.empty() || angles.empty())
        throw std::invalid_argument("sweep: specs and angles must be nonempty");
    for (double theta : angles)
        if (!(theta >= 0.0 && theta <= std::numbers::pi))
            throw std::invalid_argument("sweep: angle outside [0, pi]");
    std::vector<McReport> reports;
    reports.reserve(specs.size() * angles.size());
    std::size_t cell = 0;
    for (const auto& spec : specs) {
        for (double theta : angles) {
            const std::uint64_t cell_seed = rng::derive_stream(seed, 1000 + cell);
            auto [p, r] = make_angled_pair(spec.n, theta, cell_seed);
            reports.push_back(mc_estimate(p, r, spec, mode, m_trials, cell_seed, threads));
            ++cell;
        }
    }
    return reports;
}

}  // namespace structhash
