#pragma once

#include <string>

namespace cbe {

enum class EstimatorMethod {
    CLT,
    SmallModerate,
    TrueModerate,
    Simplified,
    SchemeExact,
    LargeUpperBound,
};

enum class EstimateQuality {
    Equivalent,  // asymptotic (1+o(1)) equivalent in its intended regime
    UpperBound,  // sharp up to a multiplicative constant
    Heuristic,   // outside the estimator's stated regime
};

/// A tail probability P[X_N >= x] with its prefactor/exponent decomposition:
/// log_probability = log(prefactor) + exponent.
struct DeviationEstimate {
    double probability = 0.0;     // clamped to [0, 1]
    double log_probability = 0.0; // unclamped
    double prefactor = 0.0;
    double exponent = 0.0;
    EstimatorMethod method = EstimatorMethod::SchemeExact;
    EstimateQuality quality = EstimateQuality::Equivalent;
};

std::string to_string(EstimatorMethod m);
std::string to_string(EstimateQuality q);

} // namespace cbe
