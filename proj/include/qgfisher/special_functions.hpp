#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "qgfisher/errors.hpp"

namespace qgfisher {

namespace detail {

inline void require_positive(double x, const char* fn) {
    if (!std::isfinite(x) || !(x > 0.0)) {
        throw DomainError(std::string(fn) + ": argument must be finite and > 0, got " + std::to_string(x));
    }
}

} // namespace detail

//! ln Gamma(x) for x > 0.
inline double log_gamma(double x) {
    detail::require_positive(x, "log_gamma");
    return boost::math::lgamma(x);
}

//! ln B(a, b). The direct Lanczos ratio is used while B is representable; the
//! lgamma difference loses ~|lgamma(b)| * eps absolutely when b is large (b = 1/(q-1)).
inline double log_beta(double a, double b) {
    detail::require_positive(a, "beta_fn");
    detail::require_positive(b, "beta_fn");
    const double direct = boost::math::beta(a, b);
    if (direct > std::numeric_limits<double>::min() && std::isfinite(direct)) return std::log(direct);
    return boost::math::lgamma(a) + boost::math::lgamma(b) - boost::math::lgamma(a + b);
}

//! B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b), evaluated in log space.
inline double beta_fn(double a, double b) { return std::exp(log_beta(a, b)); }

inline double log_unit_ball_volume(int n) {
    if (n < 1) throw DomainError("unit_ball_volume: dimension must be >= 1, got " + std::to_string(n));
    return 0.5 * n * std::log(std::numbers::pi) - boost::math::lgamma(0.5 * n + 1.0);
}

//! Volume omega_n of the unit ball in R^n.
inline double unit_ball_volume(int n) { return std::exp(log_unit_ball_volume(n)); }

//! Surface area n * omega_n of the unit sphere S^{n-1}; the angular factor of polar integrals.
inline double unit_sphere_area(int n) { return n * unit_ball_volume(n); }

} // namespace qgfisher
