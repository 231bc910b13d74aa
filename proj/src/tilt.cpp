#include "cbe/tilt.hpp"

#include <cmath>
#include <stdexcept>

#include "cbe/errors.hpp"
#include "cbe/transform.hpp"

namespace cbe::tilt {

namespace {

constexpr double kLog2 = 0.693147180559945309417232121458176568;

double lambda_prime(long n, double beta, double h) {
    return exact::log_laplace(EnsembleParams{n, beta, 0.0}, h, 1);
}

double lambda_second(long n, double beta, double h) {
    return exact::log_laplace(EnsembleParams{n, beta, 0.0}, h, 2);
}

void require_target(long n, double a) {
    if (n < 1) throw std::invalid_argument("solve_tilt: n must be >= 1");
    if (!(a > 0.0) || !(a < static_cast<double>(n) * kLog2))
        throw std::domain_error("solve_tilt: target mean outside (0, N log 2)");
}

} // namespace

std::string to_string(RegimeTag t) {
    switch (t) {
        case RegimeTag::GaussianCLT: return "GaussianCLT";
        case RegimeTag::SmallModerate: return "SmallModerate";
        case RegimeTag::TrueModerate: return "TrueModerate";
        case RegimeTag::LargeDeviation: return "LargeDeviation";
        default: return "OutOfRange";
    }
}

TiltSolution solve_tilt(long n, double beta, double a) {
    require_target(n, a);

    // Bracket the root of Lambda'(h) = a by doubling. Lambda' is a strictly
    // increasing bijection from R_+ onto [0, N log 2).
    double lo = 0.0;
    double hi = 1.0;
    double f_hi = lambda_prime(n, beta, hi) - a;
    int growth = 0;
    while (f_hi < 0.0) {
        lo = hi;
        hi *= 2.0;
        f_hi = lambda_prime(n, beta, hi) - a;
        if (++growth > 200)
            throw NumericalError("solve_tilt: bracketing exceeded iteration cap");
    }

    const double tol = 1e-10 * std::max(1.0, a);
    double h = 0.5 * (lo + hi);
    double f = lambda_prime(n, beta, h) - a;
    for (int iter = 0; iter < 200; ++iter) {
        if (std::fabs(f) <= tol) break;
        if (f > 0.0) hi = h; else lo = h;
        const double slope = lambda_second(n, beta, h);
        double next = h - f / slope;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi); // bisection fallback
        h = next;
        f = lambda_prime(n, beta, h) - a;
        if (iter == 199)
            throw NumericalError("solve_tilt: Newton did not converge");
    }

    TiltSolution sol;
    sol.h = h;
    sol.lambda = h / beta;
    sol.a = a;
    sol.v = lambda_second(n, beta, h);
    // a h - Lambda(h) is >= 0 by convex duality; clip summation noise at 0.
    sol.legendre =
        std::max(0.0, a * h - exact::log_laplace(EnsembleParams{n, beta, 0.0}, h, 0));
    return sol;
}

double legendre_conjugate(long n, double beta, double a) {
    if (a == 0.0) return 0.0;
    return solve_tilt(n, beta, a).legendre;
}

RegimeClass classify_regime(long n, double beta, double a) {
    if (n < 2) throw std::invalid_argument("classify_regime: n must be >= 2");
    (void)beta;
    const double nd = static_cast<double>(n);
    const double log_n = std::log(nd);
    if (a <= 0.0 || a >= nd * kLog2)
        return {RegimeTag::OutOfRange, "target outside the support (0, N log 2)"};
    if (a / nd >= 0.05)
        return {RegimeTag::LargeDeviation, "a/N >= 0.05: deviations at scale N"};
    if (a <= std::sqrt(log_n))
        return {RegimeTag::GaussianCLT, "a <= sqrt(log N): central-limit scale"};
    if (a <= 10.0 * log_n)
        return {RegimeTag::SmallModerate, "a of order log N"};
    return {RegimeTag::TrueModerate, "log N << a << N"};
}

DeviationEstimate scheme_estimate(long n, double beta, double a) {
    const TiltSolution sol = solve_tilt(n, beta, a);

    DeviationEstimate est;
    est.method = EstimatorMethod::SchemeExact;
    est.exponent = -sol.legendre;
    est.prefactor = 1.0 / (sol.h * std::sqrt(2.0 * M_PI * sol.v));
    est.log_probability = est.exponent + std::log(est.prefactor);
    est.probability = std::min(1.0, std::exp(est.log_probability));

    est.quality = EstimateQuality::Equivalent;
    if (n >= 2 && classify_regime(n, beta, a).tag == RegimeTag::LargeDeviation)
        est.quality = EstimateQuality::UpperBound;
    if (sol.h * std::sqrt(sol.v) < 3.0)
        est.quality = EstimateQuality::Heuristic; // scheme error term 1/(h sqrt(v)) is large
    return est;
}

} // namespace cbe::tilt

namespace cbe {

std::string to_string(EstimatorMethod m) {
    switch (m) {
        case EstimatorMethod::CLT: return "CLT";
        case EstimatorMethod::SmallModerate: return "SmallModerate";
        case EstimatorMethod::TrueModerate: return "TrueModerate";
        case EstimatorMethod::Simplified: return "Simplified";
        case EstimatorMethod::SchemeExact: return "SchemeExact";
        default: return "LargeUpperBound";
    }
}

std::string to_string(EstimateQuality q) {
    switch (q) {
        case EstimateQuality::Equivalent: return "Equivalent";
        case EstimateQuality::UpperBound: return "UpperBound";
        default: return "Heuristic";
    }
}

} // namespace cbe
