#include "cbe/transform.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "cbe/errors.hpp"
#include "cbe/specfun.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cbe::exact {

namespace {

using specfun::log_gamma;
using specfun::polygamma;

// Taylor switch-over radii. The direct forms lose ~eps/s^2 to cancellation,
// so the cuts sit where the series is still exact to ~1e-16.
constexpr double kVarphiSeriesCut = 0.2;
constexpr double kVarphiPrimeSeriesCut = 0.35;
constexpr double kEtaSeriesCut = 1e-3;

// Deterministic chunked reduction: the chunk layout is fixed by n alone, so
// results are bit-identical for any number of threads.
template <typename Term>
double sum_terms(long n, const Term& term) {
    constexpr long kChunk = 16384;
    const long n_chunks = (n + kChunk - 1) / kChunk;
    if (n_chunks <= 1) {
        double acc = 0.0;
        for (long k = 0; k < n; ++k) acc += term(k);
        return acc;
    }
    std::vector<double> partial(static_cast<size_t>(n_chunks), 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long c = 0; c < n_chunks; ++c) {
        const long lo = c * kChunk;
        const long hi = std::min(n, lo + kChunk);
        double acc = 0.0;
        for (long k = lo; k < hi; ++k) acc += term(k);
        partial[static_cast<size_t>(c)] = acc;
    }
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

void require_domain(const EnsembleParams& p, double re_z) {
    p.validate();
    if (!(2.0 * p.delta + re_z > -1.0))
        throw std::domain_error("log_laplace: requires 2*delta + Re(z) > -1");
}

// 1 / (e^s - 1) for s > 0, without overflow.
double inv_expm1(double s) {
    const double e = std::exp(-s);
    return e / (-std::expm1(-s));
}

// (1 - e^{-s b (N-1)}) / (1 - e^{-s b}): the geometric sum over k = 0..N-2.
double geom_ratio(double s, double beta_prime, long n) {
    if (n <= 1) return 0.0;
    const double num = -std::expm1(-s * beta_prime * static_cast<double>(n - 1));
    const double den = -std::expm1(-s * beta_prime);
    if (den == 0.0) return static_cast<double>(n - 1);
    return num / den;
}

double sq(double x) { return x * x; }

} // namespace

TransformValue log_laplace(const EnsembleParams& p, std::complex<double> z, int order) {
    require_domain(p, z.real());
    if (order < 0 || order > 3) throw std::domain_error("log_laplace: order must be in {0,1,2,3}");

    if (z.imag() == 0.0) {
        const double v = log_laplace(p, z.real(), order);
        return {order, z, {v, 0.0}};
    }

    const double bp = p.beta_prime();
    const double d = p.delta;
    std::complex<double> acc = 0.0;
    for (long k = 0; k < p.n; ++k) {
        const double base = bp * static_cast<double>(k) + 1.0;
        const double y1 = base + d;       // argument of the delta terms
        const double y2 = base + 2.0 * d; // argument of the 2*delta terms
        switch (order) {
            case 0:
                acc += 2.0 * log_gamma(y1) + log_gamma(y2 + z) - log_gamma(y2) -
                       2.0 * log_gamma(y1 + 0.5 * z);
                break;
            case 1:
                acc += polygamma(0, y2 + z) - polygamma(0, y1 + 0.5 * z);
                break;
            case 2:
                acc += polygamma(1, y2 + z) - 0.5 * polygamma(1, y1 + 0.5 * z);
                break;
            default:
                acc += polygamma(2, y2 + z) - 0.25 * polygamma(2, y1 + 0.5 * z);
                break;
        }
    }
    return {order, z, acc};
}

double log_laplace(const EnsembleParams& p, double z, int order) {
    require_domain(p, z);
    if (order < 0 || order > 3) throw std::domain_error("log_laplace: order must be in {0,1,2,3}");

    const double bp = p.beta_prime();
    const double d = p.delta;
    const auto term = [&](long k) -> double {
        const double base = bp * static_cast<double>(k) + 1.0;
        const double y1 = base + d;
        const double y2 = base + 2.0 * d;
        switch (order) {
            case 0:
                // 2 l(y1) + l(y2+z) - l(y2) - 2 l(y1+z/2) as paired ratios;
                // keeps the per-term error at the scale of the term.
                return specfun::log_gamma_ratio(y2, z) -
                       2.0 * specfun::log_gamma_ratio(y1, 0.5 * z);
            case 1:
                return polygamma(0, y2 + z) - polygamma(0, y1 + 0.5 * z);
            case 2:
                return polygamma(1, y2 + z) - 0.5 * polygamma(1, y1 + 0.5 * z);
            default:
                return polygamma(2, y2 + z) - 0.25 * polygamma(2, y1 + 0.5 * z);
        }
    };
    return sum_terms(p.n, term);
}

double varphi(double s) {
    if (s < 0.0) throw std::domain_error("varphi: requires s >= 0");
    if (s < kVarphiSeriesCut) {
        const double s2 = s * s;
        return 1.0 / 12.0 +
               s2 * (-1.0 / 720.0 +
                     s2 * (1.0 / 30240.0 +
                           s2 * (-1.0 / 1209600.0 +
                                 s2 * (1.0 / 47900160.0 - s2 * 691.0 / 1307674368000.0))));
    }
    return (0.5 - 1.0 / s + inv_expm1(s)) / s;
}

double varphi_prime(double s) {
    if (s < 0.0) throw std::domain_error("varphi_prime: requires s >= 0");
    if (s < kVarphiPrimeSeriesCut) {
        const double s2 = s * s;
        return s * (-1.0 / 360.0 +
                    s2 * (1.0 / 7560.0 + s2 * (-1.0 / 201600.0 + s2 / 5987520.0)));
    }
    // d/ds [A(s)/s] with A = 1/2 - 1/s + 1/(e^s-1).
    const double em = -std::expm1(-s);             // 1 - e^{-s}
    const double dA = 1.0 / (s * s) - std::exp(-s) / (em * em);
    return (dA - varphi(s)) / s;
}

double phi_beta(double s, double beta) {
    if (!(beta > 0.0)) throw std::domain_error("phi_beta: requires beta > 0");
    const double bp = 0.5 * beta;
    return varphi(s) - bp * bp * varphi(s * bp);
}

namespace {

double phi_beta_prime(double s, double beta) {
    const double bp = 0.5 * beta;
    return varphi_prime(s) - bp * bp * bp * varphi_prime(s * bp);
}

// Quadratic/cubic Taylor coefficients of eta_beta at 0.
struct EtaSeries {
    double c1, c2, c3;
};

EtaSeries eta_series_coeffs(double beta_prime) {
    const double c2phi = -(1.0 + beta_prime * beta_prime) / 60.0;
    return {-0.5 * beta_prime, beta_prime * beta_prime / 12.0 + c2phi,
            -0.5 * beta_prime * c2phi};
}

} // namespace

double eta_beta(double s, double beta) {
    if (!(beta > 0.0)) throw std::domain_error("eta_beta: requires beta > 0");
    if (s < 0.0) throw std::domain_error("eta_beta: requires s >= 0");
    if (beta == 2.0) return 0.0; // eta_2 is identically zero
    const double bp = 0.5 * beta;
    if (s < kEtaSeriesCut) {
        const auto c = eta_series_coeffs(bp);
        return 1.0 + s * (c.c1 + s * (c.c2 + s * c.c3));
    }
    const double phi0 = (1.0 - bp * bp) / 12.0;
    const double e = std::exp(-bp * s);
    const double den = -std::expm1(-bp * s); // 1 - e^{-bp s}
    return bp * s * phi_beta(s, beta) * e / (phi0 * den);
}

double eta_beta_prime(double s, double beta) {
    if (!(beta > 0.0)) throw std::domain_error("eta_beta_prime: requires beta > 0");
    if (s < 0.0) throw std::domain_error("eta_beta_prime: requires s >= 0");
    if (beta == 2.0)
        throw std::domain_error("eta_beta_prime: beta = 2 degenerates (eta_2 = 0); "
                                "callers must special-case A_2 = 0");
    const double bp = 0.5 * beta;
    if (s < kEtaSeriesCut) {
        const auto c = eta_series_coeffs(bp);
        return c.c1 + s * (2.0 * c.c2 + s * 3.0 * c.c3);
    }
    const double phi0 = (1.0 - bp * bp) / 12.0;
    const double pb = phi_beta(s, beta);
    const double pbd = phi_beta_prime(s, beta);
    const double e = std::exp(-bp * s);
    const double den = -std::expm1(-bp * s);
    // Quotient rule on  s phi_beta(s) e^{-bp s} / (1 - e^{-bp s}).
    const double num = (pb * (1.0 - bp * s) + s * pbd) * den - bp * s * pb * e;
    return bp / phi0 * e * num / (den * den);
}

double m_func(double z) {
    if (!(z > -1.0)) throw std::domain_error("m_func: requires z > -1");
    return log_gamma(1.0 + z) - 2.0 * log_gamma(1.0 + 0.5 * z);
}

std::complex<double> m_func(std::complex<double> z) {
    if (!(z.real() > -1.0)) throw std::domain_error("m_func: requires Re(z) > -1");
    return log_gamma(std::complex<double>(1.0, 0.0) + z) -
           2.0 * log_gamma(std::complex<double>(1.0, 0.0) + 0.5 * z);
}

double k_n_beta(const EnsembleParams& p, double z) {
    p.validate();
    if (!(z > 0.0)) throw std::domain_error("k_n_beta: requires z > 0");
    const double bp = p.beta_prime();
    const auto kappa = [](double y) { return (y + 0.5) * std::log(y); };
    return sum_terms(p.n - 1, [&](long j) {
        const double y = bp * static_cast<double>(j + 1);
        return kappa(y) + kappa(y + z) - 2.0 * kappa(y + 0.5 * z);
    });
}

double g_n_beta(const EnsembleParams& p, double z, const specfun::QuadratureSpec& spec) {
    p.validate();
    if (!(z > 0.0)) throw std::domain_error("g_n_beta: requires z > 0");
    if (p.n == 1) return 0.0;
    const double bp = p.beta_prime();
    const long n = p.n;
    const double s0 = std::min(1.0, 2.0 / z); // kernel rise scale
    auto integrand = [&](double sig) {
        const double s = s0 * sig;
        return s0 * geom_ratio(s, bp, n) * sq(-std::expm1(-0.5 * s * z)) *
               std::exp(-s * bp) * varphi(s);
    };
    return specfun::integrate_semi_infinite(integrand, spec).value;
}

double comparison_rhs(const EnsembleParams& p, double z, const specfun::QuadratureSpec& spec) {
    p.validate();
    if (p.delta != 0.0)
        throw std::domain_error("comparison_rhs: stated for delta = 0");
    if (!(z > 0.0)) throw std::domain_error("comparison_rhs: requires z > 0");

    const double bp = p.beta_prime();
    const EnsembleParams haar{p.n, 2.0, 0.0};
    double result = bp * log_laplace(haar, z / bp, 0);
    if (p.beta == 2.0) return result;

    const double n = static_cast<double>(p.n);
    result += 0.5 * (bp - 1.0) *
              (2.0 * log_gamma(n + 0.5 * z / bp) - log_gamma(n) - log_gamma(n + z / bp));
    result += m_func(z) - 0.5 * (bp + 1.0) * m_func(z / bp);

    const double s0 = std::min(1.0, 2.0 / z);
    auto integrand = [&](double sig) {
        const double s = s0 * sig;
        return s0 * geom_ratio(s, bp, p.n) * sq(-std::expm1(-0.5 * s * z)) *
               std::exp(-s * bp) * phi_beta(s, p.beta);
    };
    result += specfun::integrate_semi_infinite(integrand, spec).value;
    return result;
}

double g_big_n_beta(const EnsembleParams& p, double z, int order,
                    const specfun::QuadratureSpec& spec) {
    p.validate();
    if (p.beta == 2.0)
        throw std::domain_error("g_big_n_beta: beta = 2 degenerates (prefactor singular)");
    if (!(z > 0.0)) throw std::domain_error("g_big_n_beta: requires z > 0");
    if (order < 0 || order > 3) throw std::domain_error("g_big_n_beta: order must be in {0,1,2,3}");

    const double bp = p.beta_prime();
    const long n = p.n;
    const double beta = p.beta;
    const double s0 = std::min(1.0, (order == 0 ? 2.0 : 1.0) / z);

    auto integrand = [&](double sig) {
        const double s = s0 * sig;
        const double gate = -std::expm1(-s * bp * static_cast<double>(n - 1));
        const double e_half = std::exp(-0.5 * s * z);
        const double e_full = std::exp(-s * z);
        double kernel;
        switch (order) {
            case 0: kernel = sq(-std::expm1(-0.5 * s * z)) / s; break;
            case 1: kernel = e_half - e_full; break;
            case 2: kernel = s * (e_full - 0.5 * e_half); break;
            default: kernel = s * s * (0.25 * e_half - e_full); break;
        }
        return s0 * eta_beta(s, beta) * gate * kernel;
    };
    return specfun::integrate_semi_infinite(integrand, spec).value;
}

double f_beta(double z, double beta, const specfun::QuadratureSpec& spec) {
    if (!(z > 0.0)) throw std::domain_error("f_beta: requires z > 0");
    if (!(beta > 0.0)) throw std::domain_error("f_beta: requires beta > 0");
    if (beta == 2.0) return 0.0; // eta_2 = 0
    const double s0 = std::min(1.0, 2.0 / z);
    auto integrand = [&](double sig) {
        const double s = s0 * sig;
        return s0 * sq(-std::expm1(-0.5 * s * z)) * eta_beta(s, beta) / s;
    };
    return specfun::integrate_semi_infinite(integrand, spec).value;
}

double h_beta(double z, double beta, const specfun::QuadratureSpec& spec) {
    if (!(z > 0.0)) throw std::domain_error("h_beta: requires z > 0");
    if (!(beta > 0.0)) throw std::domain_error("h_beta: requires beta > 0");
    if (beta == 2.0) return 0.0;
    const double s0 = std::min(1.0, 1.0 / z);
    auto integrand = [&](double sig) {
        const double s = s0 * sig;
        return s0 * eta_beta(s, beta) * (std::exp(-0.5 * s * z) - std::exp(-s * z));
    };
    return specfun::integrate_semi_infinite(integrand, spec).value;
}

} // namespace cbe::exact
