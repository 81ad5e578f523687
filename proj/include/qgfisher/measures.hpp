#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "qgfisher/errors.hpp"

namespace qgfisher {

//! Below this distance from 1 the entropic index is treated as exactly 1
//! (exponential branch, Shannon entropy, analytic limits).
inline constexpr double kUnitQTolerance = 1e-12;

inline bool is_unit_q(double q) { return std::abs(q - 1.0) < kUnitQTolerance; }

enum class Method { closed_form, quadrature, monte_carlo };

inline std::string_view to_string(Method m) {
    switch (m) {
        case Method::closed_form: return "closed-form";
        case Method::quadrature: return "quadrature";
        case Method::monte_carlo: return "monte-carlo";
    }
    return "unknown";
}

struct Measure {
    double value = 0.0;
    Method method = Method::closed_form;
};

//! Information measures of one density at one (alpha, q). `I_bq` is empty when
//! alpha <= 1, i.e. when alpha has no Hoelder conjugate beta.
struct MeasureSet {
    Measure Mq, Hq, Sq, Nq, m_alpha;
    std::optional<Measure> I_bq;
    int n = 1;
    double alpha = 2.0;
    double beta = 2.0;
    double q = 1.0;
};

namespace detail {

inline void require_usable_mq(double mq) {
    if (!std::isfinite(mq) || !(mq > 0.0)) {
        throw DomainError("information generating function must be finite and > 0, got " + std::to_string(mq));
    }
}

inline void require_not_unit(double q, const char* fn) {
    if (is_unit_q(q)) {
        throw DomainError(std::string(fn) + ": q = 1 needs the Shannon entropy of the density, not M_q alone");
    }
}

} // namespace detail

//! H_q = log(M_q) / (1 - q), q != 1.
inline double renyi_entropy(double mq, double q) {
    detail::require_usable_mq(mq);
    detail::require_not_unit(q, "renyi_entropy");
    return std::log(mq) / (1.0 - q);
}

//! S_q = (1 - M_q) / (q - 1), q != 1. Positive, and tends to the Shannon entropy as q -> 1.
inline double tsallis_entropy(double mq, double q) {
    detail::require_usable_mq(mq);
    detail::require_not_unit(q, "tsallis_entropy");
    return (1.0 - mq) / (q - 1.0);
}

//! N_q = M_q^{1/(1-q)}, q != 1.
inline double entropy_power(double mq, double q) {
    detail::require_usable_mq(mq);
    detail::require_not_unit(q, "entropy_power");
    return std::exp(std::log(mq) / (1.0 - q));
}

//! Fill Hq, Sq, Nq of `set` from Mq, or from the Shannon entropy when q == 1.
inline void complete_entropies(MeasureSet& set, double shannon_if_unit, Method shannon_method) {
    if (is_unit_q(set.q)) {
        set.Hq = {shannon_if_unit, shannon_method};
        set.Sq = {shannon_if_unit, shannon_method};
        set.Nq = {std::exp(shannon_if_unit), shannon_method};
        return;
    }
    const Method m = set.Mq.method;
    set.Hq = {renyi_entropy(set.Mq.value, set.q), m};
    set.Sq = {tsallis_entropy(set.Mq.value, set.q), m};
    set.Nq = {entropy_power(set.Mq.value, set.q), m};
}

} // namespace qgfisher
