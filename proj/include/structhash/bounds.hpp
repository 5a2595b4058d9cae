#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace structhash {

// ---------------------------------------------------------------------------
// Variance bound for the short Toeplitz model
// ---------------------------------------------------------------------------

enum class LogBase { Natural, Two };

// Upper bound on Var(theta~): theta*(pi-theta)/(k*pi^2) + (log(k)/k^2)^(1/3).
// log is natural by default; base 2 is available for sensitivity checks.
inline double variance_upper_bound(double theta, std::size_t k,
                                   LogBase base = LogBase::Natural) {
    if (k < 2) throw std::invalid_argument("variance_upper_bound: k must be >= 2");
    if (!(theta >= 0.0 && theta <= std::numbers::pi))
        throw std::invalid_argument("variance_upper_bound: theta must be in [0, pi]");
    const double kd = static_cast<double>(k);
    const double log_k = base == LogBase::Natural ? std::log(kd) : std::log2(kd);
    const double first = theta * (std::numbers::pi - theta) / (kd * std::numbers::pi * std::numbers::pi);
    return first + std::cbrt(log_k / (kd * kd));
}

// ---------------------------------------------------------------------------
// Concentration bound for the extended model
// ---------------------------------------------------------------------------

// Inputs of the extended-model concentration bound. f_n and f_t are the
// values of the chosen function f evaluated at n and at t (the failure
// exponent uses f(t) exactly as the bound is stated; f_t defaults to f_n).
struct BoundParams {
    std::size_t n = 0;
    std::size_t k = 0;
    std::size_t t = 0;
    std::size_t N = 0;
    double eps = 0.0;
    double a = 0.0;
    double f_n = 0.0;
    double f_t = 0.0;
    double psi = 0.0;
    double chi = 1.0;
    double theta = 0.0;

    void validate() const {
        if (n == 0 || k == 0 || t == 0 || N == 0)
            throw std::invalid_argument("BoundParams: counts must be positive");
        // k*n may exceed 64 bits for the asymptotic regimes; compare as doubles.
        if (!(k <= n && n <= t &&
              static_cast<double>(t) <= static_cast<double>(k) * static_cast<double>(n)))
            throw std::invalid_argument("BoundParams: need k <= n <= t <= k*n");
        if (!(eps > 0.0)) throw std::invalid_argument("BoundParams: eps must be positive");
        if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("BoundParams: a must be in (0,1)");
        if (!(f_n > 0.0)) throw std::invalid_argument("BoundParams: f_n must be positive");
        if (psi < 0.0) throw std::invalid_argument("BoundParams: psi must be >= 0");
        if (!(chi >= 1.0)) throw std::invalid_argument("BoundParams: chi must be >= 1");
        if (!(theta > 0.0 && theta < std::numbers::pi))
            throw std::invalid_argument("BoundParams: theta must be in (0, pi)");
    }
};

struct ConcentrationReport {
    double mu = 0.0;
    double lambda = 0.0;
    double prob_lower = 0.0;
    bool valid = false;
};

namespace detail {

// log(sum(exp(terms))) without overflow.
inline double log_sum_exp(const std::vector<double>& log_terms) {
    if (log_terms.empty()) return -std::numeric_limits<double>::infinity();
    double m = -std::numeric_limits<double>::infinity();
    for (double v : log_terms) m = std::max(m, v);
    if (!std::isfinite(m)) return m;
    double acc = 0.0;
    for (double v : log_terms) acc += std::exp(v - m);
    return m + std::log(acc);
}

// Lambda = (1/pi) sum_{j=max(1, floor(eps*k/2))}^{k} j^{-1/2} (k e / j)^j
//          mu^j (1-mu)^{k-j}  +  2 exp(-eps^2 k / 2),
// summed in log space. Requires mu in (0, 1).
inline double lambda_log_space(double mu, double eps, std::size_t k) {
    const double kd = static_cast<double>(k);
    std::size_t j_begin = static_cast<std::size_t>(std::floor(eps * kd / 2.0));
    if (j_begin == 0) j_begin = 1;  // the j = 0 term is undefined (1/sqrt(j))
    std::vector<double> log_terms;
    if (mu > 0.0 && j_begin <= k) {
        log_terms.reserve(k - j_begin + 1);
        const double log_mu = std::log(mu);
        const double log_1mu = std::log1p(-mu);
        for (std::size_t j = j_begin; j <= k; ++j) {
            const double jd = static_cast<double>(j);
            const double lt = -0.5 * std::log(jd) + jd * (std::log(kd) + 1.0 - std::log(jd)) +
                              jd * log_mu + (kd - jd) * log_1mu;
            log_terms.push_back(lt);
        }
    }
    const double log_sum = log_sum_exp(log_terms);
    const double sum = std::isfinite(log_sum) ? std::exp(log_sum) / std::numbers::pi
                                              : (log_sum > 0 ? std::numeric_limits<double>::infinity() : 0.0);
    return sum + 2.0 * std::exp(-eps * eps * kd / 2.0);
}

}  // namespace detail

// Evaluates the extended-model concentration bound:
//   mu   = 8 (sqrt(a) chi + psi f(n)^2 / sqrt(n)) / theta,
//   P    >= [1 - 4 C(N,2) e^{-f(n)^2/2} - 4 chi C(k,2) e^{-2 a^2 t / f(t)^4}]
//           * (1 - Lambda).
// The report is flagged invalid when mu >= 1/2 (the regime the tail lemma
// requires) or when any factor is negative; nothing is clamped.
inline ConcentrationReport extended_concentration_bound(const BoundParams& p) {
    p.validate();
    ConcentrationReport report;
    const double nd = static_cast<double>(p.n);
    const double kd = static_cast<double>(p.k);
    const double td = static_cast<double>(p.t);
    const double Nd = static_cast<double>(p.N);
    const double f_t = p.f_t > 0.0 ? p.f_t : p.f_n;

    report.mu = 8.0 * (std::sqrt(p.a) * p.chi + p.psi * p.f_n * p.f_n / std::sqrt(nd)) / p.theta;

    if (report.mu < 1.0) {
        report.lambda = detail::lambda_log_space(report.mu, p.eps, p.k);
    } else {
        // (1 - mu)^{k-j} is no longer a probability; the sum is meaningless.
        report.lambda = std::numeric_limits<double>::quiet_NaN();
    }

    const double pairs_N = Nd * (Nd - 1.0) / 2.0;
    const double pairs_k = kd * (kd - 1.0) / 2.0;
    const double first = 1.0 - 4.0 * pairs_N * std::exp(-p.f_n * p.f_n / 2.0) -
                         4.0 * p.chi * pairs_k * std::exp(-2.0 * p.a * p.a * td / std::pow(f_t, 4));
    const double second = 1.0 - report.lambda;
    report.prob_lower = first * second;
    report.valid = report.mu < 0.5 && first > 0.0 && second > 0.0 &&
                   std::isfinite(report.prob_lower);
    return report;
}

// ---------------------------------------------------------------------------
// Bound curves (variance bound tabulation)
// ---------------------------------------------------------------------------

enum class CurveMode { VsTheta, VsK };

struct CurvePoint {
    double theta = 0.0;
    std::size_t k = 0;
    double bound = 0.0;
};

// Tabulates the variance bound over a grid: vs_theta holds k fixed and walks
// the thetas; vs_k holds theta fixed and walks the hash sizes.
inline std::vector<CurvePoint> bound_curves(CurveMode mode, double fixed,
                                            const std::vector<double>& grid) {
    if (grid.empty()) throw std::invalid_argument("bound_curves: empty grid");
    std::vector<CurvePoint> points;
    points.reserve(grid.size());
    for (double g : grid) {
        CurvePoint pt;
        if (mode == CurveMode::VsTheta) {
            pt.theta = g;
            pt.k = static_cast<std::size_t>(fixed);
        } else {
            pt.theta = fixed;
            pt.k = static_cast<std::size_t>(std::llround(g));
        }
        pt.bound = variance_upper_bound(pt.theta, pt.k);
        points.push_back(pt);
    }
    return points;
}

}  // namespace structhash
