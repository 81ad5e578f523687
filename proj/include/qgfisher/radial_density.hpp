#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qgfisher/errors.hpp"
#include "qgfisher/qgaussian.hpp"
#include "qgfisher/quadrature.hpp"
#include "qgfisher/special_functions.hpp"

namespace qgfisher {

/// A radially symmetric density f(x) = f_r(|x|) on R^n, described by its radial profile.
///
/// The profile must be safe to call concurrently. When no analytic derivative is
/// supplied, derivative() falls back to a Richardson-extrapolated central difference
/// with step h = max(1e-6, 1e-6 r) (one-sided at the support edge).
class RadialDensity {
public:
    using Profile = std::function<double(double)>;

    RadialDensity(int dim, Profile profile, std::string descriptor)
        : dim_(dim), profile_(std::move(profile)), descriptor_(std::move(descriptor)) {
        if (dim < 1) throw DomainError("RadialDensity: dimension must be >= 1");
        if (!profile_) throw DomainError("RadialDensity: empty profile");
    }

    RadialDensity& with_derivative(Profile d) {
        derivative_ = std::move(d);
        return *this;
    }
    //! Profile vanishes for r >= radius.
    RadialDensity& with_support(double radius) {
        if (!(radius > 0.0)) throw DomainError("RadialDensity: support radius must be > 0");
        support_ = radius;
        return *this;
    }
    //! Characteristic radius, used to split quadrature ranges.
    RadialDensity& with_scale(double scale) {
        if (!(scale > 0.0) || !std::isfinite(scale)) throw DomainError("RadialDensity: scale must be finite and > 0");
        scale_ = scale;
        return *this;
    }
    //! Profile is not continuously differentiable on R^n (e.g. a jump at the support edge);
    //! Fisher-based checks refuse such densities.
    RadialDensity& mark_nonsmooth() {
        smooth_ = false;
        return *this;
    }
    //! Declares the density to be exactly this q-Gaussian, enabling closed-form shortcuts.
    RadialDensity& tag(const QGaussianParams& p) {
        tag_ = p;
        return *this;
    }

    int dim() const noexcept { return dim_; }
    const std::string& descriptor() const noexcept { return descriptor_; }
    double support_radius() const noexcept { return support_; }
    bool compact() const noexcept { return std::isfinite(support_); }
    double scale() const noexcept { return scale_; }
    bool smooth() const noexcept { return smooth_; }
    bool has_analytic_derivative() const noexcept { return static_cast<bool>(derivative_); }
    const std::optional<QGaussianParams>& qgaussian_tag() const noexcept { return tag_; }

    double operator()(double r) const {
        r = std::abs(r);
        if (r >= support_) return 0.0;
        return profile_(r);
    }

    double derivative(double r) const {
        r = std::abs(r);
        if (r >= support_) return 0.0;
        if (derivative_) return derivative_(r);
        return finite_difference(r);
    }

    double finite_difference(double r) const {
        const double h = std::max(1e-6, 1e-6 * r);
        const auto& f = *this;
        if (r + h >= support_) {
            auto one_sided = [&](double step) { return (f(r) - f(r - step)) / step; };
            return 2.0 * one_sided(0.5 * h) - one_sided(h);
        }
        auto central = [&](double step) { return (f(r + step) - f(r - step)) / (2.0 * step); };
        return (4.0 * central(0.5 * h) - central(h)) / 3.0;
    }

    //! Copy of this density with the analytic derivative dropped.
    RadialDensity without_analytic_derivative() const {
        RadialDensity copy = *this;
        copy.derivative_ = nullptr;
        return copy;
    }

private:
    int dim_;
    Profile profile_;
    Profile derivative_;
    std::string descriptor_;
    double support_ = std::numeric_limits<double>::infinity();
    double scale_ = 1.0;
    bool smooth_ = true;
    std::optional<QGaussianParams> tag_;
};

namespace detail {

//! n omega_n int_0^R r^{n-1} g(r) dr for a profile-like g; R from `density`.
template <class G>
quad::Result radial_quadrature(const RadialDensity& density, G&& g, const quad::Options& opt) {
    const double area = unit_sphere_area(density.dim());
    const int n = density.dim();
    auto integrand = [&](double r) -> double {
        const double v = g(r);
        if (v == 0.0) return 0.0;
        return area * (n == 1 ? v : std::pow(r, n - 1) * v);
    };
    if (density.compact()) return quad::integrate(integrand, 0.0, density.support_radius(), opt);
    return quad::integrate_to_infinity(integrand, 0.0, 4.0 * density.scale(), opt);
}

} // namespace detail

/// G_gamma as a tagged RadialDensity, normalized by the closed-form partition function and
/// carrying the analytic derivative. Inequality checks may use closed forms for it.
inline RadialDensity qgaussian_density(const QGaussianParams& p) {
    const double z = partition_fn(p);
    RadialDensity d(p.n(), [p, z](double r) { return qgaussian_kernel(p, r) / z; }, p.describe());
    d.with_derivative([p](double r) { return density_radial_derivative(p, r); })
        .with_scale(std::pow(p.gamma(), -1.0 / p.alpha()))
        .tag(p);
    if (p.q() > 1.0) d.with_support(p.support_radius());
    return d;
}

/// G_gamma rebuilt without any closed form: the kernel is normalized by radial quadrature
/// and the derivative is finite-differenced unless `analytic_derivative` is set (in which
/// case the derivative of the kernel is divided by the same numerical normalizer).
/// The result is untagged, so every measure of it is computed by quadrature.
inline RadialDensity qgaussian_numeric(const QGaussianParams& p, bool analytic_derivative = true) {
    const double scale = std::pow(p.gamma(), -1.0 / p.alpha());
    RadialDensity kernel(p.n(), [p](double r) { return qgaussian_kernel(p, r); }, "kernel");
    kernel.with_scale(scale);
    if (p.q() > 1.0) kernel.with_support(p.support_radius());
    quad::Options opt;
    opt.rel_tol = 1e-13;
    opt.max_intervals = 20000;
    const auto z = detail::radial_quadrature(kernel, [&](double r) { return kernel(r); }, opt);
    if (!z.converged) throw DivergenceError("qgaussian_numeric: normalization did not converge", z.value, z.error);
    const double zv = z.value;
    RadialDensity d(p.n(), [p, zv](double r) { return qgaussian_kernel(p, r) / zv; }, p.describe() + "[numeric]");
    d.with_scale(scale);
    if (p.q() > 1.0) d.with_support(p.support_radius());
    if (analytic_derivative) {
        const double z_closed = partition_fn(p);
        d.with_derivative([p, zv, z_closed](double r) { return density_radial_derivative(p, r) * z_closed / zv; });
    }
    return d;
}

struct MixtureComponent {
    double weight;
    double variance;  // per-coordinate variance sigma^2 of the centered Gaussian
};

//! Centered isotropic Gaussian mixture sum_j w_j N(0, v_j I_n) on R^n.
inline RadialDensity gaussian_mixture(int dim, std::vector<MixtureComponent> components) {
    if (components.empty()) throw DomainError("gaussian_mixture: no components");
    double total = 0.0, max_var = 0.0;
    for (const auto& c : components) {
        if (!(c.weight > 0.0) || !(c.variance > 0.0) || !std::isfinite(c.weight) || !std::isfinite(c.variance)) {
            throw DomainError("gaussian_mixture: weights and variances must be finite and > 0");
        }
        total += c.weight;
        max_var = std::max(max_var, c.variance);
    }
    if (std::abs(total - 1.0) > 1e-9) throw DomainError("gaussian_mixture: weights must sum to 1");
    struct Term {
        double coef, inv2v, inv_v;
    };
    std::vector<Term> terms;
    std::string desc = "mixture(n=" + std::to_string(dim);
    for (const auto& c : components) {
        const double coef = c.weight * std::pow(2.0 * std::numbers::pi * c.variance, -0.5 * dim);
        terms.push_back({coef, 0.5 / c.variance, 1.0 / c.variance});
        desc += ";" + std::to_string(c.weight) + ",0," + std::to_string(c.variance);
    }
    desc += ")";
    auto shared = std::make_shared<const std::vector<Term>>(std::move(terms));
    RadialDensity d(dim,
                    [shared](double r) {
                        double v = 0.0;
                        for (const auto& t : *shared) v += t.coef * std::exp(-r * r * t.inv2v);
                        return v;
                    },
                    desc);
    d.with_derivative([shared](double r) {
         double v = 0.0;
         for (const auto& t : *shared) v -= t.coef * r * t.inv_v * std::exp(-r * r * t.inv2v);
         return v;
     }).with_scale(std::sqrt(max_var));
    return d;
}

//! Isotropic Gaussian N(0, sigma^2 I_n); the q = 1, alpha = 2 member with gamma = 1/(2 sigma^2).
inline RadialDensity gaussian(int dim, double sigma) {
    return gaussian_mixture(dim, {{1.0, sigma * sigma}});
}

//! Uniform density on the ball of the given radius. Discontinuous at the edge.
inline RadialDensity uniform_ball(int dim, double radius = 1.0) {
    const double value = 1.0 / (unit_ball_volume(dim) * std::pow(radius, dim));
    RadialDensity d(dim, [value](double) { return value; },
                    "uniform-ball(n=" + std::to_string(dim) + ",radius=" + std::to_string(radius) + ")");
    d.with_derivative([](double) { return 0.0; }).with_support(radius).with_scale(radius).mark_nonsmooth();
    return d;
}

/// Exponential profile exp(-rate r) cut off at `cutoff` by the factor (1 - r/cutoff)^2, so the
/// density and its derivative vanish continuously at the edge. Normalized by quadrature.
inline RadialDensity truncated_exponential(int dim, double rate, double cutoff) {
    if (!(rate > 0.0) || !(cutoff > 0.0)) throw DomainError("truncated_exponential: rate and cutoff must be > 0");
    auto kernel = [rate, cutoff](double r) {
        const double t = 1.0 - r / cutoff;
        return t > 0.0 ? std::exp(-rate * r) * t * t : 0.0;
    };
    RadialDensity raw(dim, kernel, "kernel");
    raw.with_support(cutoff).with_scale(std::min(cutoff, 1.0 / rate));
    quad::Options opt;
    opt.rel_tol = 1e-13;
    const double z = detail::radial_quadrature(raw, [&](double r) { return raw(r); }, opt).value;
    RadialDensity d(dim, [kernel, z](double r) { return kernel(r) / z; },
                    "truncated-exponential(n=" + std::to_string(dim) + ",rate=" + std::to_string(rate) +
                        ",cutoff=" + std::to_string(cutoff) + ")");
    d.with_derivative([rate, cutoff, z](double r) {
         const double t = 1.0 - r / cutoff;
         if (t <= 0.0) return 0.0;
         return std::exp(-rate * r) * (-rate * t * t - 2.0 * t / cutoff) / z;
     })
        .with_support(cutoff)
        .with_scale(std::min(cutoff, 1.0 / rate));
    return d;
}

/// Profile tabulated at increasing radii r_0 = 0 < ... < r_m, linearly interpolated and zero
/// beyond r_m. The derivative is the slope of the enclosing segment.
inline RadialDensity tabulated_profile(int dim, std::vector<double> radii, std::vector<double> values,
                                       std::string descriptor = "tabulated") {
    if (radii.size() != values.size() || radii.size() < 2) {
        throw DomainError("tabulated_profile: need at least two (r, f) pairs of equal length");
    }
    if (radii.front() != 0.0) throw DomainError("tabulated_profile: first radius must be 0");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (i > 0 && !(radii[i] > radii[i - 1])) throw DomainError("tabulated_profile: radii must increase strictly");
        if (!(values[i] >= 0.0) || !std::isfinite(values[i])) throw DomainError("tabulated_profile: values must be >= 0");
    }
    auto table = std::make_shared<const std::pair<std::vector<double>, std::vector<double>>>(std::move(radii),
                                                                                             std::move(values));
    auto segment = [table](double r) -> std::size_t {
        const auto& rs = table->first;
        auto it = std::upper_bound(rs.begin(), rs.end(), r);
        std::size_t i = static_cast<std::size_t>(it - rs.begin());
        return i == 0 ? 0 : std::min(i - 1, rs.size() - 2);
    };
    const double rmax = table->first.back();
    RadialDensity d(dim,
                    [table, segment](double r) {
                        const auto i = segment(r);
                        const auto& rs = table->first;
                        const auto& fs = table->second;
                        const double t = (r - rs[i]) / (rs[i + 1] - rs[i]);
                        return fs[i] + t * (fs[i + 1] - fs[i]);
                    },
                    std::move(descriptor));
    d.with_derivative([table, segment](double r) {
         const auto i = segment(r);
         const auto& rs = table->first;
         const auto& fs = table->second;
         return (fs[i + 1] - fs[i]) / (rs[i + 1] - rs[i]);
     })
        .with_support(rmax)
        .with_scale(rmax);
    if (table->second.back() > 0.0) d.mark_nonsmooth();
    return d;
}

} // namespace qgfisher
