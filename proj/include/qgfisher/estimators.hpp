#pragma once

#include <cmath>
#include <string>

#include "qgfisher/errors.hpp"
#include "qgfisher/measures.hpp"
#include "qgfisher/quadrature.hpp"
#include "qgfisher/radial_density.hpp"

// Information measures of arbitrary radial densities by one-dimensional adaptive
// quadrature in polar coordinates. Nothing here consults the q-Gaussian closed forms.

namespace qgfisher {

struct EstimatorOptions {
    double rel_tol = 1e-10;
    int max_intervals = 20000;

    quad::Options quad() const { return {rel_tol, 1e-300, max_intervals}; }
};

namespace detail {

inline double checked(const quad::Result& res, const std::string& what) {
    if (!res.converged) {
        throw DivergenceError(what + ": quadrature did not converge (value " + std::to_string(res.value) +
                                  ", error " + std::to_string(res.error) + ")",
                              res.value, res.error);
    }
    return res.value;
}

} // namespace detail

//! n omega_n int r^{n-1} f_r(r) dr; 1 for a normalized density.
inline double quad_normalization(const RadialDensity& f, const EstimatorOptions& opt = {}) {
    return detail::checked(detail::radial_quadrature(f, [&](double r) { return f(r); }, opt.quad()), "normalization");
}

//! M_q[f] = int f^q dx.
inline double quad_Mq(const RadialDensity& f, double q, const EstimatorOptions& opt = {}) {
    if (!(q >= 0.0) || !std::isfinite(q)) throw DomainError("quad_Mq: q must be finite and >= 0");
    auto g = [&](double r) {
        const double v = f(r);
        return v > 0.0 ? std::exp(q * std::log(v)) : 0.0;
    };
    return detail::checked(detail::radial_quadrature(f, g, opt.quad()), "M_q");
}

//! m_alpha[f] = int |x|^alpha f dx.
inline double quad_moment(const RadialDensity& f, double alpha, const EstimatorOptions& opt = {}) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("quad_moment: alpha must be finite and > 0");
    auto g = [&](double r) {
        const double v = f(r);
        return v > 0.0 ? std::pow(r, alpha) * v : 0.0;
    };
    return detail::checked(detail::radial_quadrature(f, g, opt.quad()), "m_alpha");
}

//! Shannon entropy -int f ln f dx.
inline double quad_shannon(const RadialDensity& f, const EstimatorOptions& opt = {}) {
    auto g = [&](double r) {
        const double v = f(r);
        return v > 0.0 ? -v * std::log(v) : 0.0;
    };
    return detail::checked(detail::radial_quadrature(f, g, opt.quad()), "Shannon entropy");
}

/// I_{beta,q}[f] = n omega_n int r^{n-1} f^{beta(q-1)+1} |f'/f|^beta dr.
///
/// The integrand is evaluated in log space so the product of a vanishing power of f and a
/// diverging log-derivative near a compact support edge stays finite. A zero of the profile
/// followed by positive values further out is an interior zero and is rejected.
inline double quad_fisher(const RadialDensity& f, double beta, double q, const EstimatorOptions& opt = {}) {
    if (!(beta > 1.0) || !std::isfinite(beta)) throw DomainError("quad_fisher: beta must be finite and > 1");
    if (!(q >= 0.0) || !std::isfinite(q)) throw DomainError("quad_fisher: q must be finite and >= 0");
    const double power = beta * (q - 1.0) + 1.0;
    auto g = [&](double r) -> double {
        const double v = f(r);
        if (v <= 0.0) {
            const double limit = f.compact() ? f.support_radius() : std::numeric_limits<double>::infinity();
            for (double factor : {1.25, 1.5, 2.0, 4.0}) {
                const double probe = r * factor + 1e-12;
                if (probe < limit && f(probe) > 0.0) {
                    throw DomainError("quad_fisher: profile vanishes at interior radius " + std::to_string(r) +
                                      " (zero-density region)");
                }
            }
            return 0.0;  // beyond the numerical tail
        }
        const double d = f.derivative(r);
        if (d == 0.0) return 0.0;
        return std::exp(power * std::log(v) + beta * (std::log(std::abs(d)) - std::log(v)));
    };
    return detail::checked(detail::radial_quadrature(f, g, opt.quad()), "I_{beta,q}");
}

/// All measures of f at (alpha, q) by quadrature. Hq/Sq/Nq follow from M_q, or from the
/// Shannon entropy when q == 1. I_bq is filled when alpha > 1.
inline MeasureSet measure_all(const RadialDensity& f, double alpha, double q, const EstimatorOptions& opt = {}) {
    if (!(alpha > 0.0)) throw DomainError("measure_all: alpha must be > 0");
    MeasureSet set;
    set.n = f.dim();
    set.alpha = alpha;
    set.beta = alpha > 1.0 ? alpha / (alpha - 1.0) : std::numeric_limits<double>::quiet_NaN();
    set.q = is_unit_q(q) ? 1.0 : q;
    auto field = [](const char* name, auto&& fn) {
        try {
            return fn();
        } catch (const DivergenceError& e) {
            throw DivergenceError(std::string("field ") + name + ": " + e.what(), e.partial_value(), e.error_estimate());
        }
    };
    const bool unit = is_unit_q(set.q);
    set.Mq = {field("Mq", [&] { return quad_Mq(f, set.q, opt); }), Method::quadrature};
    const double shannon = unit ? field("Hq", [&] { return quad_shannon(f, opt); }) : 0.0;
    complete_entropies(set, shannon, Method::quadrature);
    set.m_alpha = {field("m_alpha", [&] { return quad_moment(f, alpha, opt); }), Method::quadrature};
    if (alpha > 1.0) set.I_bq = Measure{field("I_bq", [&] { return quad_fisher(f, set.beta, set.q, opt); }), Method::quadrature};
    return set;
}

} // namespace qgfisher
