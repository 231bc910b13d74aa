#pragma once

#include <string>

#include "cbe/ensemble.hpp"
#include "cbe/estimates.hpp"

namespace cbe::tilt {

/// Solution of Lambda'_{N,beta}(h) = a: the exponential tilt reaching mean a.
struct TiltSolution {
    double h = 0.0;        // tilt parameter, equals 2*delta of the tilted ensemble
    double lambda = 0.0;   // h / beta
    double a = 0.0;        // target mean
    double v = 0.0;        // tilted variance Lambda''(h)
    double legendre = 0.0; // Legendre-Fenchel conjugate a*h - Lambda(h)
};

enum class RegimeTag {
    GaussianCLT,
    SmallModerate,
    TrueModerate,
    LargeDeviation,
    OutOfRange,
};

struct RegimeClass {
    RegimeTag tag = RegimeTag::OutOfRange;
    std::string rationale;
};

std::string to_string(RegimeTag t);

/// Solves Lambda'_{N,beta}(h) = a for the unique h >= 0, a in (0, N log 2).
/// Bracketing by doubling, then safeguarded Newton; |Lambda'(h) - a| <=
/// 1e-10 * max(1, a) at return.
TiltSolution solve_tilt(long n, double beta, double a);

/// Legendre-Fenchel conjugate Lambda*_{N,beta}(a) = sup_h (a h - Lambda(h)).
double legendre_conjugate(long n, double beta, double a);

/// Advisory classification of (N, a) into a deviation regime. Finite-N
/// surrogates for the asymptotic relations: OutOfRange outside (0, N log 2),
/// LargeDeviation when a/N >= 0.05, GaussianCLT when a <= sqrt(log N),
/// SmallModerate when a <= 10 log N, else TrueModerate.
RegimeClass classify_regime(long n, double beta, double a);

/// The tilted-Gaussian estimate exp(-Lambda*(a)) / (h sqrt(2 pi v)).
/// Quality is UpperBound in the large-deviation regime and Heuristic when
/// h sqrt(v) < 3 (the scheme's error term is then large).
DeviationEstimate scheme_estimate(long n, double beta, double a);

} // namespace cbe::tilt
