#pragma once

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "qgfisher/errors.hpp"
#include "qgfisher/qgaussian.hpp"

// Exact q-Gaussian sampling: x = r u with u uniform on the sphere and r drawn by inverting
// the radial law. With t = gamma |q-1| r^alpha the radial variable is
//   q > 1: t ~ Beta(n/alpha, 1/(q-1) + 1)
//   q < 1: t ~ BetaPrime(n/alpha, 1/(1-q) - n/alpha)
//   q = 1: gamma r^alpha ~ Gamma(n/alpha)

namespace qgfisher {

inline constexpr const char* kRngName = "mt19937_64";

struct SampleBatch {
    QGaussianParams params;
    std::uint64_t seed = 0;
    std::size_t count = 0;
    std::vector<double> coords;  // count rows of n coordinates

    int dim() const { return params.n(); }
    std::span<const double> point(std::size_t i) const {
        return {coords.data() + i * static_cast<std::size_t>(dim()), static_cast<std::size_t>(dim())};
    }
    double norm(std::size_t i) const {
        double s = 0.0;
        for (double c : point(i)) s += c * c;
        return std::sqrt(s);
    }
};

namespace detail {

// Uniforms are built from raw 64-bit words rather than std::uniform_real_distribution,
// whose output is implementation-defined; batches must match across standard libraries.
class UniformStream {
public:
    explicit UniformStream(std::uint64_t seed) : engine_(seed) {}

    //! Uniform on the open interval (0, 1).
    double open() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = open(), u2 = open();
        const double rad = std::sqrt(-2.0 * std::log(u1));
        spare_ = rad * std::sin(2.0 * std::numbers::pi * u2);
        has_spare_ = true;
        return rad * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace detail

/// Radius with P(|X| <= r) = u for X ~ G_gamma.
inline double radial_quantile(const QGaussianParams& p, double u) {
    if (!(u > 0.0 && u < 1.0)) throw DomainError("radial_quantile: u must lie in (0, 1)");
    const double a = p.n() / p.alpha();
    const double s = p.q() - 1.0;
    double t;  // gamma |q-1| r^alpha, or gamma r^alpha at q = 1
    if (p.unit_q()) {
        t = boost::math::gamma_p_inv(a, u);
    } else if (s > 0.0) {
        t = boost::math::ibeta_inv(a, 1.0 / s + 1.0, u);
    } else {
        double one_minus_x = 0.0;
        const double x = boost::math::ibeta_inv(a, -1.0 / s - a, u, &one_minus_x);
        t = x / one_minus_x;
    }
    const double denom = p.unit_q() ? p.gamma() : p.gamma() * std::abs(s);
    return std::pow(t / denom, 1.0 / p.alpha());
}

/// P(|X| <= r) for X ~ G_gamma, through the regularized incomplete Beta/Gamma functions.
inline double radial_cdf(const QGaussianParams& p, double r) {
    if (!(r > 0.0)) return 0.0;
    const double a = p.n() / p.alpha();
    const double s = p.q() - 1.0;
    const double ra = std::pow(r, p.alpha());
    if (p.unit_q()) return boost::math::gamma_p(a, p.gamma() * ra);
    const double t = p.gamma() * std::abs(s) * ra;
    if (s > 0.0) return t >= 1.0 ? 1.0 : boost::math::ibeta(a, 1.0 / s + 1.0, t);
    if (!std::isfinite(t)) return 1.0;
    return boost::math::ibeta(a, -1.0 / s - a, t / (1.0 + t));
}

inline SampleBatch sample(const QGaussianParams& p, std::size_t count, std::uint64_t seed) {
    if (count == 0) throw DomainError("sample: count must be positive");
    SampleBatch batch{p, seed, count, {}};
    const int n = p.n();
    batch.coords.resize(count * static_cast<std::size_t>(n));
    detail::UniformStream rng(seed);
    std::vector<double> dir(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < count; ++i) {
        const double r = radial_quantile(p, rng.open());
        double len2 = 0.0;
        if (n == 1) {
            dir[0] = rng.open() < 0.5 ? -1.0 : 1.0;
            len2 = 1.0;
        } else {
            do {
                len2 = 0.0;
                for (auto& d : dir) {
                    d = rng.normal();
                    len2 += d * d;
                }
            } while (len2 == 0.0);
        }
        const double scale = r / std::sqrt(len2);
        for (int j = 0; j < n; ++j) batch.coords[i * n + j] = dir[j] * scale;
    }
    return batch;
}

struct MomentEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
};

//! Sample mean of |x|^alpha and its standard error.
inline MomentEstimate empirical_moment(const SampleBatch& batch, double alpha) {
    if (batch.count == 0) throw DomainError("empirical_moment: empty batch");
    if (!(alpha > 0.0)) throw DomainError("empirical_moment: alpha must be > 0");
    // Welford accumulation.
    double mean = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < batch.count; ++i) {
        const double v = std::pow(batch.norm(i), alpha);
        const double delta = v - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (v - mean);
    }
    const double n = static_cast<double>(batch.count);
    const double var = batch.count > 1 ? m2 / (n - 1.0) : 0.0;
    return {mean, std::sqrt(var / n)};
}

//! Writes x1..xn columns, one row per point, with round-trip precision.
inline void write_csv(const SampleBatch& batch, std::ostream& os) {
    for (int j = 1; j <= batch.dim(); ++j) os << (j > 1 ? "," : "") << 'x' << j;
    os << '\n' << std::setprecision(17);
    for (std::size_t i = 0; i < batch.count; ++i) {
        auto pt = batch.point(i);
        for (std::size_t j = 0; j < pt.size(); ++j) os << (j ? "," : "") << pt[j];
        os << '\n';
    }
}

} // namespace qgfisher
