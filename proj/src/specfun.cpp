#include "cbe/specfun.hpp"

#include <cmath>
#include <stdexcept>

namespace cbe::specfun {

const SpecialConstants& constants() {
    static const SpecialConstants c;
    return c;
}

namespace {

using cplx = std::complex<double>;

// Bernoulli numbers B_2 .. B_20.
constexpr double kBern[10] = {
    1.0 / 6.0,    -1.0 / 30.0,     1.0 / 42.0,      -1.0 / 30.0,      5.0 / 66.0,
    -691.0 / 2730.0, 7.0 / 6.0,    -3617.0 / 510.0, 43867.0 / 798.0,  -174611.0 / 330.0};

constexpr double kStirlingRadius = 12.0;

void require_right_half_plane(cplx z, const char* who) {
    if (!(z.real() > 0.0))
        throw std::domain_error(std::string(who) + ": requires Re(z) > 0");
}

// Stirling series for log Gamma and psi_m, valid for |z| >= kStirlingRadius
// with Re(z) > 0. Templated over double / complex<double> so the real path
// stays free of complex arithmetic.
template <typename T>
T log_gamma_stirling(T z) {
    T result = (z - 0.5) * std::log(z) - z + 0.5 * constants().log_two_pi;
    const T z2 = z * z;
    T zp = z;
    for (int k = 0; k < 10; ++k) {
        const double n = 2.0 * (k + 1);
        result += kBern[k] / (n * (n - 1.0) * zp);
        zp *= z2;
    }
    return result;
}

template <typename T>
T polygamma_stirling(int m, T z) {
    const T z2 = z * z;
    if (m == 0) {
        T result = std::log(z) - 0.5 / z;
        T zp = z2;
        for (int k = 0; k < 10; ++k) {
            const double n = 2.0 * (k + 1);
            result -= kBern[k] / (n * zp);
            zp *= z2;
        }
        return result;
    }
    if (m == 1) {
        T result = 1.0 / z + 0.5 / z2;
        T zp = z * z2;
        for (int k = 0; k < 10; ++k) {
            result += kBern[k] / zp;
            zp *= z2;
        }
        return result;
    }
    // m == 2
    T result = -1.0 / z2 - 1.0 / (z * z2);
    T zp = z2 * z2;
    for (int k = 0; k < 10; ++k) {
        const double n = 2.0 * (k + 1);
        result -= kBern[k] * (n + 1.0) / zp;
        zp *= z2;
    }
    return result;
}

template <typename T>
T polygamma_recurrence_term(int m, T z) {
    switch (m) {
        case 0: return 1.0 / z;
        case 1: return -1.0 / (z * z);
        default: return 2.0 / (z * z * z);
    }
}

} // namespace

std::complex<double> log_gamma(cplx z) {
    require_right_half_plane(z, "log_gamma");
    cplx shift = 0.0;
    while (std::abs(z) < kStirlingRadius) {
        shift += std::log(z);
        z += 1.0;
    }
    return log_gamma_stirling(z) - shift;
}

double log_gamma(double x) {
    if (!(x > 0.0)) throw std::domain_error("log_gamma: requires x > 0");
    double shift = 0.0;
    while (x < kStirlingRadius) {
        shift += std::log(x);
        x += 1.0;
    }
    return log_gamma_stirling(x) - shift;
}

namespace {

// Tail of the Stirling series, valid for w >= kStirlingRadius.
double stirling_tail(double w) {
    const double w2 = w * w;
    double acc = 0.0;
    double wp = w;
    for (int k = 0; k < 10; ++k) {
        const double n = 2.0 * (k + 1);
        acc += kBern[k] / (n * (n - 1.0) * wp);
        wp *= w2;
    }
    return acc;
}

} // namespace

double log_gamma_ratio(double w, double a) {
    if (!(w > 0.0) || !(w + a > 0.0))
        throw std::domain_error("log_gamma_ratio: requires w > 0 and w + a > 0");
    if (a == 0.0) return 0.0;
    if (w < kStirlingRadius || w + a < kStirlingRadius)
        return log_gamma(w + a) - log_gamma(w);
    // (w + a - 1/2) log(w + a) - (w - 1/2) log w - a, regrouped so every part
    // has the size of the result.
    return (w - 0.5) * std::log1p(a / w) + a * std::log(w + a) - a +
           (stirling_tail(w + a) - stirling_tail(w));
}

std::complex<double> polygamma(int m, cplx z) {
    if (m < 0 || m > 2) throw std::domain_error("polygamma: order must be in {0,1,2}");
    require_right_half_plane(z, "polygamma");
    cplx shift = 0.0;
    while (std::abs(z) < kStirlingRadius) {
        shift += polygamma_recurrence_term(m, z);
        z += 1.0;
    }
    return polygamma_stirling(m, z) - shift;
}

double polygamma(int m, double x) {
    if (m < 0 || m > 2) throw std::domain_error("polygamma: order must be in {0,1,2}");
    if (!(x > 0.0)) throw std::domain_error("polygamma: requires x > 0");
    double shift = 0.0;
    while (x < kStirlingRadius) {
        shift += polygamma_recurrence_term(m, x);
        x += 1.0;
    }
    return polygamma_stirling(m, x) - shift;
}

namespace detail {

double log_barnes_g(double z, double threshold) {
    if (!(z > 0.0)) throw std::domain_error("log_barnes_g: requires z > 0");

    // Recurse upward: log G(z) = log G(z+m) - sum_j log Gamma(z+j).
    double acc = 0.0;
    while (z < threshold) {
        acc -= specfun::log_gamma(z);
        z += 1.0;
    }

    // Stirling expansion of log G(1+w) at w = z-1, with the
    // B_{2k+2}/(4k(k+1) w^{2k}) correction series.
    const double w = z - 1.0;
    const double lw = std::log(w);
    double result = w * w * (0.5 * lw - 0.75) + 0.5 * w * constants().log_two_pi -
                    lw / 12.0 + constants().zeta_prime_minus_one;
    const double w2 = w * w;
    double wp = w2;
    for (int k = 1; k <= 6; ++k) {
        result += kBern[k] / (4.0 * k * (k + 1.0) * wp); // kBern[k] = B_{2k+2}
        wp *= w2;
    }
    return result + acc;
}

} // namespace detail

double log_barnes_g(double z) { return detail::log_barnes_g(z, 20.0); }

double gaussian_upper_tail(double m) {
    // (1/2) erfc(m / sqrt(2))
    return 0.5 * std::erfc(m * 0.7071067811865475244008443621048490);
}

} // namespace cbe::specfun
