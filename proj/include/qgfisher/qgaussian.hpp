#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <sstream>
#include <string>

#include "qgfisher/errors.hpp"
#include "qgfisher/measures.hpp"
#include "qgfisher/special_functions.hpp"

namespace qgfisher {

//! Which validity condition of the q-Gaussian family a computation needs.
enum class Validity {
    existence,          // q > (n - alpha) / n: the density is normalizable
    mq_finite,          // q > n / (n + alpha): M_q, entropies and m_alpha are finite
    fisher_finite,      // alpha > 1 and q > max{1 - alpha, n / (n + alpha)}
};

inline const char* to_string(Validity v) {
    switch (v) {
        case Validity::existence: return "existence";
        case Validity::mq_finite: return "mq-finiteness";
        case Validity::fisher_finite: return "fisher-finiteness";
    }
    return "unknown";
}

/// One member G_gamma of the generalized q-Gaussian family on R^n:
///
///     G_gamma(x) = (1 - (q-1) gamma |x|^alpha)_+^{1/(q-1)} / Z(gamma)    (q != 1)
///     G_gamma(x) = exp(-gamma |x|^alpha) / Z(gamma)                      (q == 1)
///
/// Construction enforces existence; the finiteness conditions are exposed as flags
/// and enforced by the closed forms that need them.
class QGaussianParams {
public:
    QGaussianParams(int n, double alpha, double q, double gamma) : n_(n), alpha_(alpha), q_(q), gamma_(gamma) {
        if (n < 1) fail(Validity::existence, "dimension n must be >= 1");
        if (!std::isfinite(alpha) || !(alpha > 0.0)) fail(Validity::existence, "alpha must be > 0");
        if (!std::isfinite(gamma) || !(gamma > 0.0)) fail(Validity::existence, "gamma must be > 0");
        if (!std::isfinite(q)) fail(Validity::existence, "q must be finite");
        if (!(q > (n - alpha) / n)) fail(Validity::existence, "q must exceed (n - alpha)/n = " + fmt((n - alpha) / n));
        if (is_unit_q(q_)) q_ = 1.0;
    }

    int n() const noexcept { return n_; }
    double alpha() const noexcept { return alpha_; }
    double q() const noexcept { return q_; }
    double gamma() const noexcept { return gamma_; }

    bool has_conjugate() const noexcept { return alpha_ > 1.0; }
    //! Hoelder conjugate of alpha; NaN when alpha <= 1.
    double beta() const noexcept {
        return has_conjugate() ? alpha_ / (alpha_ - 1.0) : std::numeric_limits<double>::quiet_NaN();
    }
    //! Exponent of the substitution f = u^k.
    double k() const noexcept { return beta() / (beta() * (q_ - 1.0) + 1.0); }
    double lambda() const noexcept { return n_ * (q_ - 1.0) + 1.0; }
    bool unit_q() const noexcept { return q_ == 1.0; }

    double mq_threshold() const noexcept { return n_ / (n_ + alpha_); }
    bool mq_finite() const noexcept { return q_ > mq_threshold(); }
    bool fisher_finite() const noexcept {
        return has_conjugate() && q_ > std::max(1.0 - alpha_, mq_threshold());
    }
    bool satisfies(Validity v) const noexcept {
        switch (v) {
            case Validity::existence: return true;
            case Validity::mq_finite: return mq_finite();
            case Validity::fisher_finite: return fisher_finite();
        }
        return false;
    }
    void require(Validity v) const {
        if (satisfies(v)) return;
        if (v == Validity::fisher_finite && !has_conjugate()) fail(v, "alpha must be > 1 for a Hoelder conjugate beta");
        fail(v, "q = " + fmt(q_) + " must exceed n/(n+alpha) = " + fmt(mq_threshold()));
    }

    //! Radius of the support; infinite for q <= 1.
    double support_radius() const noexcept {
        if (q_ <= 1.0) return std::numeric_limits<double>::infinity();
        return std::pow(gamma_ * (q_ - 1.0), -1.0 / alpha_);
    }

    QGaussianParams with_gamma(double gamma) const { return {n_, alpha_, q_, gamma}; }

    std::string describe() const {
        return "qgaussian(n=" + std::to_string(n_) + ",alpha=" + fmt(alpha_) + ",q=" + fmt(q_) +
               ",gamma=" + fmt(gamma_) + ")";
    }

private:
    static std::string fmt(double v) {
        std::ostringstream os;
        os.precision(12);
        os << v;
        return os.str();
    }
    [[noreturn]] static void fail(Validity v, const std::string& msg) { throw ValidityError(to_string(v), msg); }

    int n_;
    double alpha_;
    double q_;
    double gamma_;
};

/// ln mu_{p,nu} where
///
///     mu_{p,nu} = int_{R^n} |x|^p (1 - s gamma |x|^alpha)_+^{nu/s} dx
///               = (n omega_n / alpha) gamma^{-(p+n)/alpha} * { |s|^{-(p+n)/alpha} B((p+n)/alpha, -nu/s - (p+n)/alpha)  s < 0
///                                                            { s^{-(p+n)/alpha} B((p+n)/alpha, nu/s + 1)             s > 0
///                                                            { nu^{-(p+n)/alpha} Gamma((p+n)/alpha)                   s = 0
///
/// Only n, alpha and gamma are taken from `params`.
inline double log_mu_pnu(const QGaussianParams& params, double p, double nu, double s) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw DomainError("mu_pnu: p must be finite and >= 0");
    if (!std::isfinite(nu) || !std::isfinite(s)) throw DomainError("mu_pnu: nu and s must be finite");
    const double n = params.n();
    const double alpha = params.alpha();
    const double a = (p + n) / alpha;
    const double prefactor = std::log(unit_sphere_area(params.n())) - std::log(alpha) - a * std::log(params.gamma());
    auto divergent = [&](const std::string& cond) -> double {
        throw ValidityError("divergent-integral", "mu_{p,nu} diverges: " + cond);
    };
    if (std::abs(s) < kUnitQTolerance) {
        if (!(nu > 0.0)) divergent("s = 0 requires nu > 0");
        return prefactor - a * std::log(nu) + log_gamma(a);
    }
    if (s > 0.0) {
        const double b = nu / s + 1.0;
        if (!(b > 0.0)) divergent("s > 0 requires nu/s + 1 > 0");
        return prefactor - a * std::log(s) + log_beta(a, b);
    }
    const double b = -nu / s - a;
    if (!(b > 0.0)) divergent("s < 0 requires -nu*alpha/(p+n) < s (strict)");
    return prefactor - a * std::log(-s) + log_beta(a, b);
}

inline double mu_pnu(const QGaussianParams& params, double p, double nu, double s) {
    return std::exp(log_mu_pnu(params, p, nu, s));
}

inline double log_partition_fn(const QGaussianParams& params) {
    return log_mu_pnu(params, 0.0, 1.0, params.q() - 1.0);
}

//! Normalizer Z(gamma) = mu_{0,1} with s = q - 1.
inline double partition_fn(const QGaussianParams& params) { return std::exp(log_partition_fn(params)); }

//! Unnormalized radial profile (1 - (q-1) gamma r^alpha)_+^{1/(q-1)} or exp(-gamma r^alpha).
inline double qgaussian_kernel(const QGaussianParams& params, double r) {
    const double t = params.gamma() * std::pow(r, params.alpha());
    if (params.unit_q()) return std::exp(-t);
    const double s = params.q() - 1.0;
    const double base = 1.0 - s * t;
    if (base <= 0.0 || (s > 0.0 && r >= params.support_radius())) return 0.0;
    return std::exp(std::log(base) / s);
}

//! Value of G_gamma at radius r = |x|.
inline double density_radial(const QGaussianParams& params, double r) {
    const double g = qgaussian_kernel(params, std::abs(r));
    return g == 0.0 ? 0.0 : g / partition_fn(params);
}

//! Value of G_gamma at a point of R^n.
inline double density(const QGaussianParams& params, std::span<const double> x) {
    if (static_cast<int>(x.size()) != params.n()) {
        throw DomainError("density: point has dimension " + std::to_string(x.size()) + ", expected " +
                          std::to_string(params.n()));
    }
    double r2 = 0.0;
    for (double xi : x) {
        if (!std::isfinite(xi)) throw DomainError("density: point must be finite");
        r2 += xi * xi;
    }
    return density_radial(params, std::sqrt(r2));
}

//! d/dr of the radial profile of G_gamma (zero outside the support).
inline double density_radial_derivative(const QGaussianParams& params, double r) {
    r = std::abs(r);
    const double f = density_radial(params, r);
    if (f == 0.0 || r == 0.0) return 0.0;
    const double ag = params.alpha() * params.gamma() * std::pow(r, params.alpha() - 1.0);
    if (params.unit_q()) return -f * ag;
    const double base = 1.0 - (params.q() - 1.0) * params.gamma() * std::pow(r, params.alpha());
    return -f * ag / base;
}

inline double log_closed_Mq(const QGaussianParams& params) {
    params.require(Validity::mq_finite);
    const double s = params.q() - 1.0;
    return log_mu_pnu(params, 0.0, params.q(), s) - params.q() * log_mu_pnu(params, 0.0, 1.0, s);
}

//! M_q[G_gamma] = mu_{0,q} / mu_{0,1}^q.
inline double closed_Mq(const QGaussianParams& params) { return std::exp(log_closed_Mq(params)); }

/// m_alpha[G_gamma] = (n/alpha) / (gamma (q-1) (1/(q-1) + n/alpha + 1)).
/// Written as (n/alpha) / (gamma (1 + (q-1)(n/alpha + 1))), which is regular at q = 1
/// where it reduces to n / (alpha gamma).
inline double closed_moment_alpha(const QGaussianParams& params) {
    params.require(Validity::mq_finite);
    const double na = params.n() / params.alpha();
    if (params.unit_q()) return na / params.gamma();
    return na / (params.gamma() * (1.0 + (params.q() - 1.0) * (na + 1.0)));
}

//! Shannon entropy of G_gamma at q = 1: ln Z + gamma m_alpha = ln Z + n/alpha.
inline double closed_shannon(const QGaussianParams& params) {
    if (!params.unit_q()) throw DomainError("closed_shannon: defined for the q = 1 member only");
    return log_partition_fn(params) + params.n() / params.alpha();
}

//! I_{beta,q}[G_gamma] = (alpha gamma)^beta mu_{alpha,1} / mu_{0,1}^{beta(q-1)+1}, s = q - 1.
inline double closed_fisher(const QGaussianParams& params) {
    params.require(Validity::fisher_finite);
    const double s = params.q() - 1.0;
    const double beta = params.beta();
    const double log_i = beta * std::log(params.alpha() * params.gamma()) + log_mu_pnu(params, params.alpha(), 1.0, s) -
                         (beta * s + 1.0) * log_mu_pnu(params, 0.0, 1.0, s);
    return std::exp(log_i);
}

/// Explicit Beta-function expression of I_{beta,q}[G_gamma], used as a cross-check of
/// closed_fisher. Prefactor (n omega_n / alpha)^{beta(1-q)}; the q < 1 denominator is
/// B(n/alpha, -1/(q-1) - n/alpha), matching the partition function.
inline double closed_fisher_beta_form(const QGaussianParams& params) {
    params.require(Validity::fisher_finite);
    const double n = params.n(), alpha = params.alpha(), q = params.q(), beta = params.beta();
    const double na = n / alpha;
    const double log_gamma_part = (beta / alpha) * params.lambda() * std::log(params.gamma());
    if (params.unit_q()) return std::exp(beta * std::log(alpha) + log_gamma_part + std::log(na));
    const double s = q - 1.0;
    const double log_pref = beta * std::log(alpha) + beta * (1.0 - q) * std::log(unit_sphere_area(params.n()) / alpha) +
                            (-n * (beta / alpha) * (1.0 - q) - 1.0) * std::log(std::abs(s)) + log_gamma_part;
    double log_ratio;
    if (q > 1.0) {
        log_ratio = log_beta(1.0 + na, q / s) - (beta * s + 1.0) * log_beta(na, q / s);
    } else {
        log_ratio = log_beta(1.0 + na, -q / s - na) - (beta * s + 1.0) * log_beta(na, -1.0 / s - na);
    }
    return std::exp(log_pref + log_ratio);
}

//! Closed-form H_q / S_q / N_q: algebraic in M_q for q != 1, Shannon limit at q = 1.
inline double closed_renyi(const QGaussianParams& p) {
    return p.unit_q() ? closed_shannon(p) : log_closed_Mq(p) / (1.0 - p.q());
}
inline double closed_tsallis(const QGaussianParams& p) {
    return p.unit_q() ? closed_shannon(p) : -std::expm1(log_closed_Mq(p)) / (p.q() - 1.0);
}
inline double closed_entropy_power(const QGaussianParams& p) { return std::exp(closed_renyi(p)); }

//! Every closed-form measure of G_gamma (I_bq only when fisher-finite).
inline MeasureSet closed_measures(const QGaussianParams& p) {
    p.require(Validity::mq_finite);
    MeasureSet set;
    set.n = p.n();
    set.alpha = p.alpha();
    set.beta = p.beta();
    set.q = p.q();
    set.Mq = {p.unit_q() ? 1.0 : closed_Mq(p), Method::closed_form};
    set.Hq = {closed_renyi(p), Method::closed_form};
    set.Sq = {closed_tsallis(p), Method::closed_form};
    set.Nq = {closed_entropy_power(p), Method::closed_form};
    set.m_alpha = {closed_moment_alpha(p), Method::closed_form};
    if (p.fisher_finite()) set.I_bq = Measure{closed_fisher(p), Method::closed_form};
    return set;
}

/// Measures of G_{gamma_new} obtained from those of G_1 through the scaling laws
///
///     M_q[G_gamma] = gamma^{(n/alpha)(q-1)} M_q[G]
///     I_{beta,q}[G_gamma] = gamma^{(beta/alpha)(n(q-1)+1)} I_{beta,q}[G]
///     m_alpha[G_gamma] = gamma^{-1} m_alpha[G]
inline MeasureSet rescale(const QGaussianParams& params, double gamma_new) {
    if (!std::isfinite(gamma_new) || !(gamma_new > 0.0)) throw DomainError("rescale: gamma_new must be > 0");
    const auto unit = params.with_gamma(1.0);
    MeasureSet set = closed_measures(unit);
    const double lg = std::log(gamma_new);
    const double na = params.n() / params.alpha();
    set.m_alpha.value /= gamma_new;
    if (set.I_bq) set.I_bq->value *= std::exp((params.beta() / params.alpha()) * params.lambda() * lg);
    if (params.unit_q()) {
        const double h = set.Hq.value - na * lg;  // limit of the M_q law at q = 1
        set.Hq.value = h;
        set.Sq.value = h;
        set.Nq.value = std::exp(h);
    } else {
        set.Mq.value *= std::exp(na * (params.q() - 1.0) * lg);
        complete_entropies(set, 0.0, Method::closed_form);
    }
    return set;
}

} // namespace qgfisher
