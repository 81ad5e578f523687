#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qgfisher/errors.hpp"
#include "qgfisher/estimators.hpp"
#include "qgfisher/measures.hpp"
#include "qgfisher/qgaussian.hpp"
#include "qgfisher/radial_density.hpp"

// Both sides of the four information inequalities. The reference side is always the
// closed-form q-Gaussian at gamma = 1; each product is scale invariant, so any gamma would do.

namespace qgfisher {

enum class InequalityKind { fisher_moment_entropy, moment_entropy, stam, cramer_rao };

inline std::string to_string(InequalityKind k) {
    switch (k) {
    case InequalityKind::fisher_moment_entropy: return "fisher-moment-entropy";
    case InequalityKind::moment_entropy: return "moment-entropy";
    case InequalityKind::stam: return "stam";
    case InequalityKind::cramer_rao: return "cramer-rao";
    }
    return "?";
}

inline InequalityKind inequality_from_string(const std::string& s) {
    for (auto k : {InequalityKind::fisher_moment_entropy, InequalityKind::moment_entropy, InequalityKind::stam,
                   InequalityKind::cramer_rao})
        if (to_string(k) == s) return k;
    throw DomainError("unknown inequality '" + s + "'");
}

struct Tolerances {
    double rel_tol = 1e-6;
    double eq_tol = 1e-5;
};

struct InequalityReport {
    InequalityKind kind{};
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    double deficit = 0.0;
    bool passes = false;
    bool equality = false;
    int n = 0;
    double alpha = 0.0, beta = 0.0, q = 0.0, lambda = 0.0;
    std::optional<double> gamma;  // set when the density is a tagged q-Gaussian
    std::string density;
    Tolerances tolerances;
    std::map<std::string, std::string> method_tags;

    std::string name() const { return to_string(kind); }
};

/// The measures of one density at (alpha, q), evaluated once and shared by the checks.
/// Tagged q-Gaussians with matching (alpha, q) use closed forms; everything else goes
/// through the quadrature estimators. Fisher information is computed on first use.
class DensityMeasures {
public:
    DensityMeasures(const RadialDensity& f, double alpha, double q, EstimatorOptions opt = {})
        : f_(f), alpha_(alpha), q_(is_unit_q(q) ? 1.0 : q), opt_(opt) {
        if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be finite and > 0");
        if (!std::isfinite(q)) throw DomainError("q must be finite");
        const auto& tag = f.qgaussian_tag();
        if (tag && tag->alpha() == alpha_ && tag->q() == q_) closed_ = tag;
    }

    const RadialDensity& density() const { return f_; }
    int n() const { return f_.dim(); }
    double alpha() const { return alpha_; }
    double beta() const { return alpha_ > 1.0 ? alpha_ / (alpha_ - 1.0) : std::numeric_limits<double>::quiet_NaN(); }
    double q() const { return q_; }
    double lambda() const { return n() * (q_ - 1.0) + 1.0; }
    std::optional<double> gamma() const {
        if (const auto& tag = f_.qgaussian_tag()) return tag->gamma();
        return std::nullopt;
    }
    Method method() const { return closed_ ? Method::closed_form : Method::quadrature; }

    double moment() {
        if (!m_) m_ = closed_ ? closed_moment_alpha(*closed_) : quad_moment(f_, alpha_, opt_);
        return *m_;
    }
    double Mq() {
        if (!mq_) mq_ = closed_ ? closed_Mq(*closed_) : quad_Mq(f_, q_, opt_);
        return *mq_;
    }
    //! N_q, with N_1 = exp(Shannon entropy).
    double Nq() {
        if (!nq_) {
            if (closed_) nq_ = closed_entropy_power(*closed_);
            else if (is_unit_q(q_)) nq_ = std::exp(quad_shannon(f_, opt_));
            else nq_ = entropy_power(Mq(), q_);
        }
        return *nq_;
    }
    double fisher() {
        if (!fisher_) {
            if (!(alpha_ > 1.0)) throw PreconditionError("alpha > 1", "Fisher information needs a finite beta");
            if (!f_.smooth()) {
                throw PreconditionError("smoothness", "density '" + f_.descriptor() +
                                                          "' is not continuously differentiable; Fisher information is undefined");
            }
            fisher_ = closed_ ? closed_fisher(*closed_) : quad_fisher(f_, beta(), q_, opt_);
        }
        return *fisher_;
    }

private:
    RadialDensity f_;
    double alpha_;
    double q_;
    EstimatorOptions opt_;
    std::optional<QGaussianParams> closed_;
    std::optional<double> m_, mq_, nq_, fisher_;
};

namespace detail {

inline void require_mq_finite(const DensityMeasures& d) {
    const double bound = d.n() / (d.n() + d.alpha());
    if (!(d.q() > bound)) {
        throw PreconditionError("q > n/(n+alpha)", "q = " + std::to_string(d.q()) + " must exceed " + std::to_string(bound));
    }
}

inline void require_stam_domain(const DensityMeasures& d) {
    if (!(d.alpha() > 1.0)) throw PreconditionError("alpha > 1", "alpha = " + std::to_string(d.alpha()));
    const double bound = (d.n() - 1.0) / d.n();
    if (!(d.q() > bound)) {
        throw PreconditionError("q > (n-1)/n", "q = " + std::to_string(d.q()) + " must exceed " + std::to_string(bound));
    }
    require_mq_finite(d);
}

inline InequalityReport make_report(InequalityKind kind, DensityMeasures& d, double lhs, double rhs, const Tolerances& tol,
                                    std::map<std::string, std::string> tags) {
    InequalityReport r;
    r.kind = kind;
    r.lhs = lhs;
    r.rhs = rhs;
    r.ratio = lhs / rhs;
    r.deficit = r.ratio - 1.0;
    r.passes = r.ratio >= 1.0 - tol.rel_tol;
    r.equality = std::abs(r.deficit) <= tol.eq_tol;
    r.n = d.n();
    r.alpha = d.alpha();
    r.beta = d.beta();
    r.q = d.q();
    r.lambda = d.lambda();
    r.gamma = d.gamma();
    r.density = d.density().descriptor();
    r.tolerances = tol;
    r.method_tags = std::move(tags);
    return r;
}

inline QGaussianParams reference_gaussian(const DensityMeasures& d) { return QGaussianParams(d.n(), d.alpha(), d.q(), 1.0); }

} // namespace detail

/// I^{1/beta} m^{1/alpha} >= (n/q) M_q, all on f. Requires the caller to ensure
/// r^n f_r(r)^q -> 0 as r -> infinity (not verified).
inline InequalityReport check_fisher_moment_entropy(DensityMeasures& d, const Tolerances& tol = {}) {
    if (!(d.alpha() > 1.0)) throw PreconditionError("alpha > 1", "alpha = " + std::to_string(d.alpha()));
    detail::require_mq_finite(d);
    const double lhs = std::pow(d.fisher(), 1.0 / d.beta()) * std::pow(d.moment(), 1.0 / d.alpha());
    const double rhs = d.n() / d.q() * d.Mq();
    const std::string m(to_string(d.method()));
    return detail::make_report(InequalityKind::fisher_moment_entropy, d, lhs, rhs, tol,
                               {{"I_bq", m}, {"m_alpha", m}, {"Mq", m}});
}

//! m^{1/alpha} / N_q^{1/n} on f against the same on G.
inline InequalityReport check_moment_entropy(DensityMeasures& d, const Tolerances& tol = {}) {
    detail::require_mq_finite(d);
    const auto g = detail::reference_gaussian(d);
    const double n = d.n();
    const double lhs = std::pow(d.moment(), 1.0 / d.alpha()) / std::pow(d.Nq(), 1.0 / n);
    const double rhs = std::pow(closed_moment_alpha(g), 1.0 / d.alpha()) / std::pow(closed_entropy_power(g), 1.0 / n);
    const std::string m(to_string(d.method()));
    return detail::make_report(InequalityKind::moment_entropy, d, lhs, rhs, tol,
                               {{"m_alpha", m}, {"Nq", m}, {"reference", "closed-form"}});
}

//! N_q I^{n/(beta lambda)} on f against the same on G.
inline InequalityReport check_stam(DensityMeasures& d, const Tolerances& tol = {}) {
    detail::require_stam_domain(d);
    const auto g = detail::reference_gaussian(d);
    const double e = d.n() / (d.beta() * d.lambda());
    const double lhs = d.Nq() * std::pow(d.fisher(), e);
    const double rhs = closed_entropy_power(g) * std::pow(closed_fisher(g), e);
    const std::string m(to_string(d.method()));
    return detail::make_report(InequalityKind::stam, d, lhs, rhs, tol,
                               {{"Nq", m}, {"I_bq", m}, {"reference", "closed-form"}});
}

//! I^{1/(beta lambda)} m^{1/alpha} on f against the same on G.
inline InequalityReport check_cramer_rao(DensityMeasures& d, const Tolerances& tol = {}) {
    detail::require_stam_domain(d);
    const auto g = detail::reference_gaussian(d);
    const double e = 1.0 / (d.beta() * d.lambda());
    const double lhs = std::pow(d.fisher(), e) * std::pow(d.moment(), 1.0 / d.alpha());
    const double rhs = std::pow(closed_fisher(g), e) * std::pow(closed_moment_alpha(g), 1.0 / d.alpha());
    const std::string m(to_string(d.method()));
    return detail::make_report(InequalityKind::cramer_rao, d, lhs, rhs, tol,
                               {{"I_bq", m}, {"m_alpha", m}, {"reference", "closed-form"}});
}

inline InequalityReport check(InequalityKind kind, DensityMeasures& d, const Tolerances& tol = {}) {
    switch (kind) {
    case InequalityKind::fisher_moment_entropy: return check_fisher_moment_entropy(d, tol);
    case InequalityKind::moment_entropy: return check_moment_entropy(d, tol);
    case InequalityKind::stam: return check_stam(d, tol);
    case InequalityKind::cramer_rao: return check_cramer_rao(d, tol);
    }
    throw DomainError("unknown inequality");
}

// Convenience overloads on a bare density.
inline InequalityReport check_fisher_moment_entropy(const RadialDensity& f, double alpha, double q, const Tolerances& tol = {}) {
    DensityMeasures d(f, alpha, q);
    return check_fisher_moment_entropy(d, tol);
}
inline InequalityReport check_moment_entropy(const RadialDensity& f, double alpha, double q, const Tolerances& tol = {}) {
    DensityMeasures d(f, alpha, q);
    return check_moment_entropy(d, tol);
}
inline InequalityReport check_stam(const RadialDensity& f, double alpha, double q, const Tolerances& tol = {}) {
    DensityMeasures d(f, alpha, q);
    return check_stam(d, tol);
}
inline InequalityReport check_cramer_rao(const RadialDensity& f, double alpha, double q, const Tolerances& tol = {}) {
    DensityMeasures d(f, alpha, q);
    return check_cramer_rao(d, tol);
}

/// The Cramer-Rao product is the moment-entropy product times the 1/n-th power of the Stam
/// product, so the same holds for the ratios. Returns the relative gap of that identity.
inline double product_identity_gap(const InequalityReport& cramer_rao, const InequalityReport& moment_entropy,
                                   const InequalityReport& stam) {
    const double composed = moment_entropy.ratio * std::pow(stam.ratio, 1.0 / stam.n);
    return std::abs(cramer_rao.ratio - composed) / std::abs(composed);
}

inline nlohmann::json to_json(const InequalityReport& r) {
    nlohmann::json params{{"n", r.n}, {"alpha", r.alpha}, {"beta", r.beta}, {"q", r.q}, {"lambda", r.lambda}};
    if (r.gamma) params["gamma"] = *r.gamma;
    return {{"name", r.name()},
            {"lhs", r.lhs},
            {"rhs", r.rhs},
            {"ratio", r.ratio},
            {"deficit", r.deficit},
            {"passes", r.passes},
            {"equality", r.equality},
            {"params", params},
            {"density", r.density},
            {"tolerances", {{"rel_tol", r.tolerances.rel_tol}, {"eq_tol", r.tolerances.eq_tol}}},
            {"method_tags", r.method_tags}};
}

} // namespace qgfisher
