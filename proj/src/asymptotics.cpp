#include "cbe/asymptotics.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>

#include "cbe/errors.hpp"
#include "cbe/specfun.hpp"
#include "cbe/transform.hpp"

namespace cbe::asymptotics {

namespace {

constexpr double kLog2 = 0.693147180559945309417232121458176568;
constexpr double kPi = 3.141592653589793238462643383279502884;

double sq(double x) { return x * x; }

} // namespace

double theta(double x) {
    if (x < 0.0) throw std::domain_error("theta: requires x >= 0");
    if (x == 0.0) return 0.0;
    return (1.0 + 2.0 * x) * std::log1p(2.0 * x) - (1.0 + x) * std::log1p(x) -
           x * std::log(4.0 * x);
}

double theta_prime(double x) {
    if (!(x > 0.0)) throw std::domain_error("theta_prime: requires x > 0");
    return std::log1p(1.0 / (4.0 * x * (1.0 + x)));
}

double theta_inv(double y) {
    if (y < 0.0 || y >= kLog2) throw std::domain_error("theta_inv: requires y in [0, log 2)");
    if (y == 0.0) return 0.0;

    double lo = 0.0;
    double hi = 1.0;
    while (theta(hi) < y) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) throw NumericalError("theta_inv: bracket overflow");
    }
    double x = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        const double f = theta(x) - y;
        if (std::fabs(f) <= 1e-12 * std::max(1.0, std::fabs(y))) return x;
        if (f > 0.0) hi = x; else lo = x;
        double next = x - f / theta_prime(x);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        x = next;
        if (hi - lo < 1e-15 * std::max(1.0, x)) return x;
    }
    return x;
}

double theta_n_beta(double x, long n, double beta) {
    if (n < 1) throw std::invalid_argument("theta_n_beta: n must be >= 1");
    if (!(beta > 0.0)) throw std::domain_error("theta_n_beta: requires beta > 0");
    const double bp = 0.5 * beta;
    const double corr = (bp - 1.0) / (2.0 * bp * static_cast<double>(n));
    return theta(x) + corr * (kLog2 + std::log1p(x) - std::log1p(2.0 * x));
}

namespace {

double theta_n_beta_prime(double x, long n, double beta) {
    const double bp = 0.5 * beta;
    const double corr = (bp - 1.0) / (2.0 * bp * static_cast<double>(n));
    return theta_prime(x) - corr / ((1.0 + x) * (1.0 + 2.0 * x));
}

} // namespace

double theta_n_beta_inv(double y, long n, double beta) {
    if (n < 1) throw std::invalid_argument("theta_n_beta_inv: n must be >= 1");
    if (!(beta > 0.0)) throw std::domain_error("theta_n_beta_inv: requires beta > 0");
    const double bp = 0.5 * beta;
    const double endpoint = (bp - 1.0) / (2.0 * bp * static_cast<double>(n)) * kLog2;
    if (y < endpoint || y >= kLog2)
        throw std::domain_error("theta_n_beta_inv: y outside [theta_{N,beta}(0), log 2)");
    if (y == endpoint) return 0.0;

    double lo = 0.0;
    double hi = 1.0;
    while (theta_n_beta(hi, n, beta) < y) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) throw NumericalError("theta_n_beta_inv: bracket overflow");
    }
    double x = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        const double f = theta_n_beta(x, n, beta) - y;
        if (std::fabs(f) <= 1e-12 * std::max(1.0, std::fabs(y))) return x;
        const double slope = theta_n_beta_prime(x, n, beta);
        if (!(slope > 0.0))
            throw NumericalError("theta_n_beta_inv: theta_{N,beta} not increasing here "
                                 "(N too small for this beta)");
        if (f > 0.0) hi = x; else lo = x;
        double next = x - f / slope;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        x = next;
        if (hi - lo < 1e-15 * std::max(1.0, x)) return x;
    }
    return x;
}

double psi_haar(double z) {
    if (!(z > -1.0)) throw std::domain_error("psi_haar: requires z > -1");
    return 2.0 * specfun::log_barnes_g(1.0 + 0.5 * z) - specfun::log_barnes_g(1.0 + z);
}

double log_psi_beta(double z, double beta, const specfun::QuadratureSpec& spec) {
    if (!(z > 0.0)) throw std::domain_error("log_psi_beta: requires z > 0");
    if (!(beta > 0.0)) throw std::domain_error("log_psi_beta: requires beta > 0");
    const double bp = 0.5 * beta;
    if (beta == 2.0) return psi_haar(z);
    return bp * psi_haar(z / bp) + exact::m_func(z) - 0.5 * (bp + 1.0) * exact::m_func(z / bp) +
           (1.0 - bp * bp) / (12.0 * bp) * exact::f_beta(z, beta, spec);
}

double a_beta_const(double beta, const specfun::QuadratureSpec& spec) {
    if (!(beta > 0.0)) throw std::domain_error("a_beta_const: requires beta > 0");
    if (beta == 2.0) return 0.0; // eta_2 = 0

    static std::mutex mtx;
    static std::map<double, double> cache;
    {
        std::scoped_lock lock(mtx);
        auto it = cache.find(beta);
        if (it != cache.end()) return it->second;
    }

    // First part: F_beta(1).
    const double part1 = exact::f_beta(1.0, beta, spec);

    // Second part, with the t-integration outermost as displayed. The outer
    // variable is substituted t = 1/u so the domain is [0, 1]; the inner
    // s-integral is rescaled by the kernel width:
    //   Int_1^inf (1/t) Int_0^inf (2 e^{-st/2} - e^{-st}) eta'(s) ds dt
    //     = Int_0^1 [ 2 Int_0^inf (2 e^{-sig} - e^{-2 sig}) eta'(2 sig u) dsig ] du.
    auto outer = [&](double u) {
        auto inner = [&](double sig) {
            return (2.0 * std::exp(-sig) - std::exp(-2.0 * sig)) *
                   exact::eta_beta_prime(2.0 * sig * u, beta);
        };
        return 2.0 * specfun::integrate_semi_infinite(inner, spec).value;
    };
    const double part2 = specfun::integrate_finite(outer, 0.0, 1.0, spec).value;

    const double value = part1 + part2;
    std::scoped_lock lock(mtx);
    cache.emplace(beta, value);
    return value;
}

double b_beta_const(double beta, const specfun::QuadratureSpec& spec) {
    const double bp = 0.5 * beta;
    const double a = a_beta_const(beta, spec);
    const double zp = specfun::constants().zeta_prime_minus_one;
    return (1.0 - bp * bp) / (12.0 * bp) * a + (3.0 * bp - 1.0 - bp * bp) / (8.0 * bp) +
           (3.0 - bp) / 12.0 * kLog2 - (3.0 + 2.0 * bp) / 12.0 * std::log(bp) +
           (bp - 1.0) / 4.0 * std::log(kPi) + bp * zp;
}

double c_beta_const(double beta, const specfun::QuadratureSpec& spec) {
    const double bp = 0.5 * beta;
    const double a = a_beta_const(beta, spec);
    const double zp = specfun::constants().zeta_prime_minus_one;
    return std::pow(2.0, 1.0 / (12.0 * bp)) * std::pow(kPi, (bp - 3.0) / 4.0) / beta *
           std::exp((1.0 - bp * bp) / (12.0 * bp) * (a + std::log(bp)) + bp * zp);
}

double rate_i(double x) {
    if (!(x > 0.0)) {
        if (x == 0.0) return 0.0;
        throw std::domain_error("rate_i: requires x >= 0");
    }
    return -0.5 * (1.0 - 4.0 * x * x) * std::log1p(2.0 * x) - x * x * std::log(4.0 * x) +
           (1.0 - x * x) * std::log1p(x);
}

double hko_lambda(double s) {
    if (s < 0.0) return std::numeric_limits<double>::infinity();
    if (s == 0.0) return 0.0;
    return 0.5 * sq(1.0 + s) * std::log1p(s) - sq(1.0 + 0.5 * s) * std::log1p(0.5 * s) -
           0.25 * s * s * std::log(2.0 * s);
}

double hko_rate(double x) {
    if (!(x > 0.0)) {
        if (x == 0.0) return 0.0;
        throw std::domain_error("hko_rate: requires x >= 0");
    }
    if (!(x < kLog2)) throw std::domain_error("hko_rate: requires x < log 2");

    auto objective = [&](double s) { return x * s - hko_lambda(s); };

    // Grow the search interval until the concave objective starts decreasing.
    double s_max = 1.0;
    while (objective(2.0 * s_max) > objective(s_max)) {
        s_max *= 2.0;
        if (s_max > 1e12) throw NumericalError("hko_rate: maximizer escaped to infinity");
    }
    s_max *= 2.0;

    // Golden-section maximization.
    const double inv_phi = 0.6180339887498948482045868343656381;
    double a = 0.0, b = s_max;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = objective(c), fd = objective(d);
    while (b - a > 1e-12 * std::max(1.0, b)) {
        if (fc > fd) {
            b = d; d = c; fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d);
        }
    }
    return objective(0.5 * (a + b));
}

namespace {

DeviationEstimate assemble(double prefactor, double exponent, EstimatorMethod method,
                           EstimateQuality quality) {
    DeviationEstimate est;
    est.prefactor = prefactor;
    est.exponent = exponent;
    est.method = method;
    est.quality = quality;
    est.log_probability = std::log(prefactor) + exponent;
    est.probability = std::min(1.0, std::exp(est.log_probability));
    return est;
}

void require_estimator_inputs(long n, double beta, double x, const char* who) {
    if (n < 3) throw std::invalid_argument(std::string(who) + ": requires n >= 3");
    if (!(beta > 0.0)) throw std::domain_error(std::string(who) + ": requires beta > 0");
    if (!(x > 0.0)) throw std::domain_error(std::string(who) + ": requires x > 0");
}

// Exponents of x and log(N/x) in the true-moderate estimate.
double exponent_x(double bp) { return (bp * bp - 15.0 * bp + 1.0) / (12.0 * bp); }
double exponent_log(double bp) { return (9.0 * bp - 1.0 - bp * bp) / (12.0 * bp); }

} // namespace

DeviationEstimate estimate_clt_tail(long n, double beta, double x) {
    require_estimator_inputs(n, beta, x, "estimate_clt_tail");
    const double log_n = std::log(static_cast<double>(n));
    const double sigma = std::sqrt(log_n / beta);
    const double p = specfun::gaussian_upper_tail(x / sigma);
    const double exponent = -0.5 * sq(x / sigma);
    DeviationEstimate est;
    est.method = EstimatorMethod::CLT;
    est.quality = (x <= std::sqrt(log_n)) ? EstimateQuality::Equivalent : EstimateQuality::Heuristic;
    est.probability = p;
    est.log_probability = std::log(p);
    est.exponent = exponent;
    est.prefactor = std::exp(est.log_probability - exponent);
    return est;
}

DeviationEstimate estimate_small_moderate(long n, double beta, double x,
                                          const specfun::QuadratureSpec& spec) {
    require_estimator_inputs(n, beta, x, "estimate_small_moderate");
    const double bp = 0.5 * beta;
    const double log_n = std::log(static_cast<double>(n));
    const double exponent = -bp * x * x / log_n;
    const double psi = std::exp(log_psi_beta(beta * x / log_n, beta, spec));
    const double prefactor = std::sqrt(log_n / (2.0 * kPi * beta)) / x * psi;
    const double ratio = x / log_n;
    const auto quality = (ratio <= 3.0 && x * x >= log_n)
                             ? EstimateQuality::Equivalent
                             : EstimateQuality::Heuristic;
    return assemble(prefactor, exponent, EstimatorMethod::SmallModerate, quality);
}

DeviationEstimate estimate_true_moderate(long n, double beta, double x,
                                         const specfun::QuadratureSpec& spec) {
    require_estimator_inputs(n, beta, x, "estimate_true_moderate");
    const double bp = 0.5 * beta;
    const double nd = static_cast<double>(n);
    const double log_ratio = std::log(nd / x);
    const double th = theta_n_beta_inv(x / nd, n, beta);
    const double nth = nd * th;

    const double f = bp * sq(nth) * std::log1p(1.0 / (4.0 * th * (1.0 + th))) +
                     0.5 * (nd * nd * bp - nd * (bp - 1.0)) *
                         std::log1p(th * th / (1.0 + 2.0 * th));
    const double prefactor = c_beta_const(beta, spec) * std::pow(x, exponent_x(bp)) *
                             std::pow(log_ratio, exponent_log(bp));
    const double log_n = std::log(nd);
    const auto quality = (x > log_n && x < 0.25 * nd) ? EstimateQuality::Equivalent
                                                      : EstimateQuality::Heuristic;
    return assemble(prefactor, -f, EstimatorMethod::TrueModerate, quality);
}

DeviationEstimate estimate_simplified(long n, double beta, double x,
                                      const specfun::QuadratureSpec& spec) {
    require_estimator_inputs(n, beta, x, "estimate_simplified");
    const double bp = 0.5 * beta;
    const double nd = static_cast<double>(n);
    const double log_ratio = std::log(nd / x);
    const double b = nd * theta_n_beta_inv(x / nd, n, beta);

    const double exponent = bp * (-x * b + 0.5 * b * b);
    const double prefactor = c_beta_const(beta, spec) * std::pow(x, exponent_x(bp)) *
                             std::pow(log_ratio, exponent_log(bp));
    const double log_n = std::log(nd);
    const auto quality = (x > log_n && x <= std::cbrt(nd) * 4.0) ? EstimateQuality::Equivalent
                                                                 : EstimateQuality::Heuristic;
    return assemble(prefactor, exponent, EstimatorMethod::Simplified, quality);
}

std::pair<LargeDevExpansion, DeviationEstimate> large_dev(long n, double beta, double alpha0) {
    if (n < 2) throw std::invalid_argument("large_dev: requires n >= 2");
    if (!(beta > 0.0)) throw std::domain_error("large_dev: requires beta > 0");
    if (alpha0 < 0.02 || alpha0 > 0.66)
        throw std::domain_error("large_dev: alpha0 outside the guard band [0.02, 0.66]");

    const double bp = 0.5 * beta;
    const double nd = static_cast<double>(n);

    LargeDevExpansion exp_part;
    exp_part.l0 = theta_inv(alpha0);
    exp_part.rate = bp * rate_i(exp_part.l0);
    const double l0 = exp_part.l0;
    if (beta != 2.0) {
        exp_part.l1_star = (bp - 1.0) / (2.0 * bp) *
                           (std::log1p(2.0 * l0) - std::log1p(l0) - kLog2) / theta_prime(l0);
    } else {
        exp_part.l1_star = 0.0;
        exp_part.l2_star = (1.0 / (1.0 + l0) - 1.0 / (2.0 * l0) - 1.0 / (1.0 + 2.0 * l0)) /
                           (12.0 * theta_prime(l0));
    }

    DeviationEstimate bound = tilt::scheme_estimate(n, beta, alpha0 * nd);
    bound.method = EstimatorMethod::LargeUpperBound;
    bound.quality = EstimateQuality::UpperBound;

    if (beta == 2.0) {
        const double legendre = -bound.exponent; // Lambda*(alpha0 N) from the solver
        exp_part.o1_residual = legendre - nd * nd * rate_i(l0) - std::log(nd) / 12.0;
    }
    return {exp_part, bound};
}

double kolmogorov_bound(long n, double beta, double delta) {
    if (n < 1) throw std::invalid_argument("kolmogorov_bound: n must be >= 1");
    if (!(beta > 0.0)) throw std::domain_error("kolmogorov_bound: requires beta > 0");
    if (!(delta >= 1.0))
        throw std::domain_error("kolmogorov_bound: requires delta >= 1 (uniformity hypothesis)");

    const double v = exact::log_laplace(EnsembleParams{n, beta, 0.0}, 2.0 * delta, 2);
    const double bp = 0.5 * beta;

    // M = sup over the control zone 0 < xi <= delta of (remainder display)/xi^3.
    // The display's unquantified absolute constants are taken as 1.
    auto remainder_over_cube = [&](double xi) {
        if (beta == 2.0) {
            return 0.25 * (std::log1p(xi / delta) / xi +
                           1.0 / (delta * delta * std::sqrt(delta * delta + xi * xi)));
        }
        return (0.25 / bp) * (std::log1p(xi / delta) / xi +
                              std::atan(xi / delta) / (delta * xi) +
                              1.0 / (delta * delta * delta));
    };
    double m_const = 0.0;
    const int grid = 400;
    for (int i = 0; i <= grid; ++i) {
        const double xi = delta * std::pow(10.0, -6.0 + 6.0 * static_cast<double>(i) / grid);
        m_const = std::max(m_const, remainder_over_cube(xi));
    }

    const double c_be = 14.0; // Berry-Esseen constant of the zone-of-control bound
    return c_be * m_const / (delta * std::pow(v, 1.5));
}

} // namespace cbe::asymptotics
