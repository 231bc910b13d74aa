#pragma once

#include <stdexcept>

namespace cbe {

/// Identifies one circular Jacobi (beta, delta) ensemble instance of order n.
/// delta = 0 gives the plain circular beta ensemble.
struct EnsembleParams {
    long n = 1;
    double beta = 2.0;
    double delta = 0.0;

    double beta_prime() const { return 0.5 * beta; }
    double h() const { return 2.0 * delta; }
    double lambda() const { return h() / beta; }

    void validate() const {
        if (n < 1) throw std::invalid_argument("EnsembleParams: n must be >= 1");
        if (!(beta > 0.0)) throw std::invalid_argument("EnsembleParams: beta must be > 0");
        if (!(delta >= 0.0)) throw std::invalid_argument("EnsembleParams: delta must be >= 0");
    }
};

} // namespace cbe
