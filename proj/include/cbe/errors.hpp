#pragma once

#include <stdexcept>
#include <string>

namespace cbe {

/// Thrown when an iterative numerical procedure (quadrature, root finding,
/// Newton inversion) fails to reach its tolerance within its iteration cap.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace cbe
