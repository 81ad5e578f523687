#pragma once

#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <gtest/gtest.h>

#include "qgfisher/special_functions.hpp"

namespace qgfisher::testing {

inline double rel_err(double actual, double expected) {
    if (expected == 0.0) return std::abs(actual);
    return std::abs(actual - expected) / std::abs(expected);
}

inline ::testing::AssertionResult RelNear(const char* a_expr, const char* e_expr, const char*, double actual,
                                          double expected, double tol) {
    const double err = rel_err(actual, expected);
    if (err <= tol) return ::testing::AssertionSuccess();
    return ::testing::AssertionFailure() << a_expr << " = " << std::setprecision(17) << actual << " vs " << e_expr
                                         << " = " << expected << ": relative error " << err << " > " << tol;
}

#define EXPECT_REL_NEAR(actual, expected, tol) \
    EXPECT_PRED_FORMAT3(::qgfisher::testing::RelNear, actual, expected, tol)

/// Test-only radial oracle: n omega_n int_0^R r^{n-1} g(r) dr by double-exponential
/// quadrature (tanh-sinh on [0, R], exp-sinh on [0, inf)). Independent of the library's
/// Gauss-Kronrod engine.
inline double oracle_radial(int n, const std::function<double(double)>& g,
                            double radius = std::numeric_limits<double>::infinity()) {
    const double area = unit_sphere_area(n);
    // The double-exponential rules probe r = inf-ish abscissae where 0 * inf would appear.
    auto h = [&](double r) {
        if (!std::isfinite(r)) return 0.0;
        const double v = g(r);
        if (v == 0.0) return 0.0;
        const double out = std::pow(r, n - 1) * v;
        return std::isfinite(out) ? out : 0.0;
    };
    if (std::isfinite(radius)) {
        boost::math::quadrature::tanh_sinh<double> ts(15);
        return area * ts.integrate(h, 0.0, radius, 1e-13);
    }
    boost::math::quadrature::exp_sinh<double> es(12);
    return area * es.integrate(h, 0.0, std::numeric_limits<double>::infinity(), 1e-13);
}

} // namespace qgfisher::testing
