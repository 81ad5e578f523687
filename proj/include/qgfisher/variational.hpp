#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qgfisher/errors.hpp"
#include "qgfisher/qgaussian.hpp"
#include "qgfisher/sampler.hpp"
#include "qgfisher/special_functions.hpp"

// Minimization of the beta-Dirichlet energy  int |grad u|^beta dx  over radial profiles u >= 0
// subject to  int u^k dx = 1  and  int |x|^alpha u^k dx = m.  With f = u^k the energy is
// |k|^{-beta} I_{beta,q}[f], so the minimizer should be u = G^{1/k} for the q-Gaussian G whose
// alpha-moment is m.
//
// Discretization: nodes r_i = i h on [0, R], u(R) = 0. The energy uses the exact radial weight
// of each cell with the forward difference on that cell (piecewise-linear u); the constraints
// use trapezoidal weights. A centered difference at the nodes would leave the alternating
// (checkerboard) profile with zero energy, so the cell-based difference is used instead.

namespace qgfisher {

enum class Init { flat, exponential, qgaussian_detuned };

inline std::string to_string(Init i) {
    switch (i) {
    case Init::flat: return "flat";
    case Init::exponential: return "exponential";
    case Init::qgaussian_detuned: return "qgaussian-detuned";
    }
    return "?";
}

inline Init init_from_string(const std::string& s) {
    for (auto i : {Init::flat, Init::exponential, Init::qgaussian_detuned})
        if (to_string(i) == s) return i;
    throw DomainError("unknown initialization '" + s + "' (flat | exponential | qgaussian-detuned)");
}

struct VariationalProblem {
    int n = 1;
    double alpha = 2.0, beta = 2.0, q = 1.0, k = 2.0;
    double m_target = 1.0;
    double gamma_star = 0.5;  // q-Gaussian scale whose alpha-moment is m_target
    double R = 0.0;
    std::vector<double> grid;

    QGaussianParams reference() const { return QGaussianParams(n, alpha, q, gamma_star); }
    //! |k|^{-beta} I_{beta,q}[G_{gamma*}], the value the minimum should take.
    double expected_objective() const { return std::pow(std::abs(k), -beta) * closed_fisher(reference()); }
};

/// Builds the grid and truncation radius: R = 1.05 x support radius for q > 1, otherwise the
/// radius outside which G_{gamma*} has mass below 1e-10.
inline VariationalProblem make_problem(int n, double alpha, double q, double m_target, int nodes = 800) {
    if (!(m_target > 0.0) || !std::isfinite(m_target)) {
        throw DomainError("variational: moment target must be finite and > 0, got " + std::to_string(m_target));
    }
    if (!(alpha > 1.0)) throw DomainError("variational: alpha must be > 1");
    if (nodes < 16) throw DomainError("variational: need at least 16 grid nodes");
    const QGaussianParams unit(n, alpha, q, 1.0);
    unit.require(Validity::fisher_finite);
    VariationalProblem p;
    p.n = n;
    p.alpha = alpha;
    p.beta = unit.beta();
    p.q = unit.q();
    p.k = unit.k();
    if (!(p.k > 0.0) || !std::isfinite(p.k)) {
        throw DomainError("variational: k = beta/(beta(q-1)+1) must be finite and positive, got " + std::to_string(p.k));
    }
    p.m_target = m_target;
    p.gamma_star = closed_moment_alpha(unit) / m_target;
    const auto g = p.reference();
    p.R = g.q() > 1.0 ? 1.05 * g.support_radius() : radial_quantile(g, 1.0 - 1e-10);
    p.grid.resize(static_cast<std::size_t>(nodes) + 1);
    for (int i = 0; i <= nodes; ++i) p.grid[i] = p.R * i / nodes;
    return p;
}

//! u = G_{gamma*}^{1/k} on the grid.
inline std::vector<double> closed_form_profile(const VariationalProblem& p) {
    const auto g = p.reference();
    std::vector<double> u(p.grid.size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::pow(density_radial(g, p.grid[i]), 1.0 / p.k);
    return u;
}

struct SolverOptions {
    double constraint_tol = 1e-10;
    int max_outer = 60;
    int max_inner = 200;
    double epsilon = 1e-8;  // smoothing of |u'|^beta for beta < 2
    double rho0 = 10.0;
};

struct IterateRecord {
    double objective = 0.0;
    double violation = 0.0;  // max |constraint residual|, moment constraint divided by m
};

struct VariationalSolution {
    std::vector<double> grid;
    std::vector<double> u_values;
    double objective = 0.0;
    double normalization = 0.0;
    double moment = 0.0;
    double a = 0.0, b = 0.0;
    int iterations = 0;  // inner Newton steps, all outer rounds
    int outer_iterations = 0;
    bool converged = false;
    double epsilon = 0.0;  // 0 when no smoothing was needed
    Init init = Init::flat;
    std::vector<IterateRecord> history;
};

class VariationalConvergenceError : public ConvergenceError {
public:
    VariationalConvergenceError(const std::string& what, VariationalSolution last)
        : ConvergenceError(what), last_(std::move(last)) {}
    const VariationalSolution& last_iterate() const noexcept { return last_; }

private:
    VariationalSolution last_;
};

namespace detail {

class Tridiagonal {
public:
    std::vector<double> diag, off;  // off[i] couples i and i + 1

    explicit Tridiagonal(std::size_t n) : diag(n, 0.0), off(n > 0 ? n - 1 : 0, 0.0) {}

    //! LDL^T; false if a pivot is not safely positive (or, when indefinite
    //! matrices are allowed, if a pivot vanishes).
    bool factor(bool require_positive = true) {
        const std::size_t n = diag.size();
        piv_.assign(n, 0.0);
        double scale = 0.0;
        for (double d : diag) scale = std::max(scale, std::abs(d));
        for (std::size_t i = 0; i < n; ++i) {
            piv_[i] = diag[i] - (i > 0 ? off[i - 1] * off[i - 1] / piv_[i - 1] : 0.0);
            const bool ok = require_positive ? piv_[i] > 1e-14 * scale : std::abs(piv_[i]) > 1e-14 * scale;
            if (!ok) return false;
        }
        return true;
    }

    std::vector<double> solve(std::vector<double> b) const {
        const std::size_t n = diag.size();
        for (std::size_t i = 1; i < n; ++i) b[i] -= off[i - 1] / piv_[i - 1] * b[i - 1];
        for (std::size_t i = n; i-- > 0;) {
            b[i] = (b[i] - (i + 1 < n ? off[i] * b[i + 1] : 0.0)) / piv_[i];
        }
        return b;
    }

private:
    std::vector<double> piv_;
};

// Discrete functional on the free nodes u_0 .. u_{N-1} (u_N = 0).
class DirichletProblem {
public:
    DirichletProblem(const VariationalProblem& p, const SolverOptions& opt)
        : beta_(p.beta), k_(p.k), smooth_eps_(p.beta < 2.0 ? opt.epsilon : 0.0) {
        const std::size_t nodes = p.grid.size();
        size_ = nodes - 1;
        h_ = p.grid[1] - p.grid[0];
        const double area = unit_sphere_area(p.n);
        cell_.resize(size_);
        for (std::size_t i = 0; i < size_; ++i) {
            cell_[i] = area * (std::pow(p.grid[i + 1], p.n) - std::pow(p.grid[i], p.n)) / p.n;
        }
        w_[0].resize(size_);
        w_[1].resize(size_);
        for (std::size_t i = 0; i < size_; ++i) {
            const double r = p.grid[i];
            const double trap = (i == 0 ? 0.5 : 1.0) * h_;
            w_[0][i] = area * trap * (p.n == 1 ? 1.0 : std::pow(r, p.n - 1));
            w_[1][i] = w_[0][i] * std::pow(r, p.alpha) / p.m_target;
        }
    }

    std::size_t size() const { return size_; }
    double smoothing() const { return smooth_eps_; }

    double diff(const std::vector<double>& u, std::size_t i) const {
        return ((i + 1 < size_ ? u[i + 1] : 0.0) - u[i]) / h_;
    }
    double phi(double d) const {
        if (smooth_eps_ > 0.0) return std::pow(d * d + smooth_eps_ * smooth_eps_, 0.5 * beta_);
        return std::pow(std::abs(d), beta_);
    }
    double dphi(double d) const {
        if (smooth_eps_ > 0.0) return beta_ * d * std::pow(d * d + smooth_eps_ * smooth_eps_, 0.5 * beta_ - 1.0);
        return beta_ * std::pow(std::abs(d), beta_ - 1.0) * (d < 0.0 ? -1.0 : 1.0);
    }
    double ddphi(double d) const {
        if (smooth_eps_ > 0.0) {
            const double s = d * d + smooth_eps_ * smooth_eps_;
            return beta_ * std::pow(s, 0.5 * beta_ - 2.0) * ((beta_ - 1.0) * d * d + smooth_eps_ * smooth_eps_);
        }
        return beta_ * (beta_ - 1.0) * std::pow(std::abs(d), beta_ - 2.0);
    }

    double energy(const std::vector<double>& u) const {
        double e = 0.0;
        for (std::size_t i = 0; i < size_; ++i) e += cell_[i] * phi(diff(u, i));
        return e;
    }
    void energy_gradient(const std::vector<double>& u, std::vector<double>& g) const {
        g.assign(size_, 0.0);
        for (std::size_t i = 0; i < size_; ++i) {
            const double t = cell_[i] * dphi(diff(u, i)) / h_;
            g[i] -= t;
            if (i + 1 < size_) g[i + 1] += t;
        }
    }
    void energy_hessian(const std::vector<double>& u, Tridiagonal& t) const {
        for (std::size_t i = 0; i < size_; ++i) {
            const double c = cell_[i] * ddphi(diff(u, i)) / (h_ * h_);
            t.diag[i] += c;
            if (i + 1 < size_) {
                t.diag[i + 1] += c;
                t.off[i] -= c;
            }
        }
    }

    //! Constraint j (0: mass, 1: moment / m) value minus 1.
    double constraint(int j, const std::vector<double>& u) const {
        double s = 0.0;
        for (std::size_t i = 0; i < size_; ++i)
            if (u[i] > 0.0) s += w_[j][i] * std::pow(u[i], k_);
        return s - 1.0;
    }
    double constraint_grad(int j, const std::vector<double>& u, std::size_t i) const {
        if (u[i] > 0.0) return w_[j][i] * k_ * std::pow(u[i], k_ - 1.0);
        return k_ == 1.0 ? w_[j][i] : 0.0;
    }
    double constraint_hess(int j, const std::vector<double>& u, std::size_t i) const {
        if (u[i] > 0.0 && k_ != 1.0) return w_[j][i] * k_ * (k_ - 1.0) * std::pow(u[i], k_ - 2.0);
        return 0.0;
    }

    //! Rescales u so that the mass constraint holds exactly.
    void normalize(std::vector<double>& u) const {
        const double mass = constraint(0, u) + 1.0;
        const double s = std::pow(mass, -1.0 / k_);
        for (auto& v : u) v *= s;
    }

private:
    double beta_, k_, smooth_eps_;
    std::size_t size_ = 0;
    double h_ = 0.0;
    std::vector<double> cell_;
    std::array<std::vector<double>, 2> w_;
};

// Hessian of E + sum_j mult_j g_j. Nodes in `fixed` are decoupled (unit diagonal).
// With clamp_negative, negative constraint curvature is limited to half the stiffness
// diagonal; it only bites where u is tiny and k < 2 makes u^{k-2} blow up.
inline Tridiagonal lagrangian_hessian(const DirichletProblem& dp, const std::vector<double>& u, std::array<double, 2> mult,
                                      const std::vector<bool>& fixed, bool clamp_negative) {
    const std::size_t n = u.size();
    Tridiagonal t(n);
    dp.energy_hessian(u, t);
    for (std::size_t i = 0; i < n; ++i) {
        double c = mult[0] * dp.constraint_hess(0, u, i) + mult[1] * dp.constraint_hess(1, u, i);
        if (clamp_negative) c = std::max(c, -0.5 * t.diag[i]);
        t.diag[i] += c;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!fixed[i]) continue;
        t.diag[i] = 1.0;
        if (i > 0) t.off[i - 1] = 0.0;
        if (i + 1 < n) t.off[i] = 0.0;
    }
    return t;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

//! Solves (T + U0 U0^T + U1 U1^T) x = b with T already factored.
inline std::vector<double> woodbury_solve(const Tridiagonal& t, const std::vector<double>& b,
                                          const std::array<std::vector<double>, 2>& U) {
    const auto y = t.solve(b);
    const std::array<std::vector<double>, 2> Z{t.solve(U[0]), t.solve(U[1])};
    double M[2][2];
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) M[i][j] = (i == j ? 1.0 : 0.0) + dot(U[i], Z[j]);
    const double uy0 = dot(U[0], y), uy1 = dot(U[1], y);
    const double det = M[0][0] * M[1][1] - M[0][1] * M[1][0];
    const double c0 = (M[1][1] * uy0 - M[0][1] * uy1) / det;
    const double c1 = (-M[1][0] * uy0 + M[0][0] * uy1) / det;
    std::vector<double> x(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) x[i] = y[i] - c0 * Z[0][i] - c1 * Z[1][i];
    return x;
}

class AugmentedLagrangian {
public:
    AugmentedLagrangian(const DirichletProblem& dp, std::array<double, 2> lambda, double rho)
        : dp_(dp), lambda_(lambda), rho_(rho) {}

    double value(const std::vector<double>& u) const {
        double v = dp_.energy(u);
        for (int j = 0; j < 2; ++j) {
            const double c = dp_.constraint(j, u);
            v += lambda_[j] * c + 0.5 * rho_ * c * c;
        }
        return v;
    }

    void gradient(const std::vector<double>& u, std::vector<double>& g) const {
        dp_.energy_gradient(u, g);
        for (int j = 0; j < 2; ++j) {
            const double mult = lambda_[j] + rho_ * dp_.constraint(j, u);
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += mult * dp_.constraint_grad(j, u, i);
        }
    }

    struct Step {
        std::vector<double> direction;
        double decrement = 0.0;  // -g_F . d_F
    };

    /// Projected Newton direction: Newton on the free nodes (tridiagonal plus the rank-two
    /// penalty term, solved by Sherman-Morrison-Woodbury), scaled gradient on the active ones.
    Step newton_step(const std::vector<double>& u, const std::vector<double>& g, const std::vector<bool>& active) const {
        const std::size_t n = u.size();
        std::array<double, 2> mult{};
        for (int j = 0; j < 2; ++j) mult[j] = lambda_[j] + rho_ * dp_.constraint(j, u);
        const Tridiagonal t = lagrangian_hessian(dp_, u, mult, active, true);
        Tridiagonal full(n);
        dp_.energy_hessian(u, full);
        double dscale = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (!active[i]) dscale = std::max(dscale, std::abs(t.diag[i]));
        std::vector<double> rhs(n, 0.0);
        std::array<std::vector<double>, 2> U{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
        const double sr = std::sqrt(rho_);
        for (std::size_t i = 0; i < n; ++i) {
            if (active[i]) continue;
            rhs[i] = -g[i];
            for (int j = 0; j < 2; ++j) U[j][i] = sr * dp_.constraint_grad(j, u, i);
        }
        Step s;
        for (double mu = 0.0;; mu = mu == 0.0 ? 1e-12 * std::max(dscale, 1e-300) : 10.0 * mu) {
            Tridiagonal shifted = t;
            for (std::size_t i = 0; i < n; ++i)
                if (!active[i]) shifted.diag[i] += mu;
            if (!shifted.factor()) continue;
            s.direction = woodbury_solve(shifted, rhs, U);
            s.decrement = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                if (!active[i]) s.decrement -= g[i] * s.direction[i];
            if (s.decrement >= 0.0 || mu > 1e300) break;
        }
        for (std::size_t i = 0; i < n; ++i)
            if (active[i]) s.direction[i] = -g[i] / std::max(std::abs(full.diag[i]), 1e-300);
        return s;
    }

private:
    const DirichletProblem& dp_;
    std::array<double, 2> lambda_;
    double rho_;
};

inline std::vector<double> initial_profile(const VariationalProblem& p, Init init) {
    const std::size_t n = p.grid.size() - 1;
    std::vector<double> u(n);
    switch (init) {
    case Init::flat: std::fill(u.begin(), u.end(), 1.0); break;
    case Init::exponential:
        for (std::size_t i = 0; i < n; ++i) u[i] = std::exp(-6.0 * p.grid[i] / p.R);
        break;
    case Init::qgaussian_detuned: {
        const auto g = p.reference().with_gamma(2.0 * p.gamma_star);
        for (std::size_t i = 0; i < n; ++i) u[i] = std::pow(density_radial(g, p.grid[i]), 1.0 / p.k);
        break;
    }
    }
    return u;
}

} // namespace detail

/// Augmented-Lagrangian solve of the discretized problem with a projected Newton inner
/// solver, finished by Newton iterations on the KKT system once the iterate is close. The
/// multipliers of the mass and moment constraints are returned as (a, b) with the convention
///   grad E + a grad int u^k + b grad int |x|^alpha u^k = 0.
inline VariationalSolution solve(const VariationalProblem& p, Init init, const SolverOptions& opt = {}) {
    if (p.grid.size() < 16) throw DomainError("variational: grid too small");
    detail::DirichletProblem dp(p, opt);
    std::vector<double> u = detail::initial_profile(p, init);
    dp.normalize(u);

    VariationalSolution sol;
    sol.init = init;
    sol.epsilon = dp.smoothing();
    std::array<double, 2> lambda{0.0, 0.0};
    double rho = opt.rho0;
    double prev_violation = std::numeric_limits<double>::infinity();
    std::vector<double> g;
    auto violation = [&](const std::vector<double>& v) {
        return std::max(std::abs(dp.constraint(0, v)), std::abs(dp.constraint(1, v)));
    };
    for (int outer = 0; outer < opt.max_outer && !sol.converged; ++outer) {
        sol.outer_iterations = outer + 1;
        detail::AugmentedLagrangian al(dp, lambda, rho);
        bool inner_ok = false;
        for (int it = 0; it < opt.max_inner; ++it) {
            ++sol.iterations;
            al.gradient(u, g);
            double pg = 0.0;
            for (std::size_t i = 0; i < u.size(); ++i) pg = std::max(pg, std::abs(u[i] - std::max(0.0, u[i] - g[i])));
            const double eps_active = std::min(1e-6, pg);
            std::vector<bool> active(u.size());
            for (std::size_t i = 0; i < u.size(); ++i) active[i] = u[i] <= eps_active && g[i] > 0.0;
            const auto step = al.newton_step(u, g, active);
            const double f0 = al.value(u);
            double active_move = 0.0;
            for (std::size_t i = 0; i < u.size(); ++i)
                if (active[i]) active_move = std::max(active_move, u[i]);
            if (step.decrement <= 1e-16 * std::max(1.0, std::abs(f0)) && active_move == 0.0) {
                inner_ok = true;
                break;
            }
            std::vector<double> trial(u.size());
            bool accepted = false;
            double f1 = f0;
            for (double t = 1.0; t > 1e-14; t *= 0.5) {
                double model = -t * step.decrement;
                for (std::size_t i = 0; i < u.size(); ++i) {
                    trial[i] = std::max(0.0, u[i] + t * step.direction[i]);
                    if (active[i]) model += g[i] * (trial[i] - u[i]);
                }
                f1 = al.value(trial);
                if (f1 <= f0 + 1e-4 * model) {
                    accepted = true;
                    break;
                }
            }
            if (!accepted || (f1 >= f0 && active_move == 0.0)) {
                // No representable decrease left: solved to rounding.
                inner_ok = true;
                break;
            }
            if (f0 - f1 <= 1e-15 * std::max(1.0, std::abs(f0))) {
                // Only nodes at the support edge still move, by amounts that no longer change f.
                u.swap(trial);
                sol.history.push_back({dp.energy(u), violation(u)});
                inner_ok = true;
                break;
            }
            u.swap(trial);
            sol.history.push_back({dp.energy(u), violation(u)});
        }
        const double c0 = dp.constraint(0, u), c1 = dp.constraint(1, u);
        lambda[0] += rho * c0;
        lambda[1] += rho * c1;
        const double viol = std::max(std::abs(c0), std::abs(c1));
        if (inner_ok && viol <= opt.constraint_tol) {
            sol.converged = true;
            break;
        }
        if (viol > 0.25 * prev_violation) rho = std::min(rho * 10.0, 1e6);
        prev_violation = viol;
    }

    sol.grid = p.grid;
    sol.u_values = u;
    sol.u_values.push_back(0.0);
    sol.objective = dp.energy(u);
    sol.normalization = dp.constraint(0, u) + 1.0;
    sol.moment = (dp.constraint(1, u) + 1.0) * p.m_target;
    sol.a = lambda[0];
    sol.b = lambda[1] / p.m_target;
    if (!sol.converged) {
        throw VariationalConvergenceError("variational: no convergence after " + std::to_string(sol.outer_iterations) +
                                              " outer rounds (constraint violation " +
                                              std::to_string(violation(u)) + ")",
                                          sol);
    }
    return sol;
}

/// Relative L2 distance (radial weight r^{n-1}) between the solved and closed-form profiles.
inline double relative_l2_error(const VariationalProblem& p, const VariationalSolution& s) {
    const auto exact = closed_form_profile(p);
    double num = 0.0, den = 0.0;
    const double h = p.grid[1] - p.grid[0];
    for (std::size_t i = 0; i < exact.size(); ++i) {
        const double w = (i == 0 || i + 1 == exact.size() ? 0.5 : 1.0) * h * std::pow(p.grid[i], p.n - 1);
        num += w * (s.u_values[i] - exact[i]) * (s.u_values[i] - exact[i]);
        den += w * exact[i] * exact[i];
    }
    return std::sqrt(num / den);
}

//! Relative L2 distance between two solutions on the same grid.
inline double relative_l2_distance(const VariationalProblem& p, const VariationalSolution& x, const VariationalSolution& y) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < p.grid.size(); ++i) {
        const double w = std::pow(p.grid[i], p.n - 1);
        num += w * (x.u_values[i] - y.u_values[i]) * (x.u_values[i] - y.u_values[i]);
        den += w * y.u_values[i] * y.u_values[i];
    }
    return std::sqrt(num / den);
}

struct Multipliers {
    double a = 0.0, b = 0.0, A = 0.0;
};

/// Closed-form multipliers making u = G_gamma^{1/k} a solution of
///   (r^{n-1} |u'|^{beta-2} u')' = (k/beta) r^{n-1} (a + b r^alpha) u^{k-1}:
///   A = (beta/k)^beta (gamma/(beta-1))^{beta-1} Z^{(k-beta)/k},  a = -A n,  b = A lambda gamma.
inline Multipliers analytic_multipliers(const QGaussianParams& p) {
    const double beta = p.beta(), k = p.k();
    if (!(beta > 1.0) || !std::isfinite(beta)) throw DomainError("analytic_multipliers: needs alpha > 1");
    const double logA = beta * std::log(beta / k) + (beta - 1.0) * std::log(p.gamma() / (beta - 1.0)) +
                        (k - beta) / k * log_partition_fn(p);
    Multipliers m;
    m.A = std::exp(logA);
    m.a = -m.A * p.n();
    m.b = m.A * p.lambda() * p.gamma();
    return m;
}

struct ResidualReport {
    double max_residual = 0.0;  // normalized by the largest magnitude of either term
    Multipliers multipliers;
    int points = 0;
};

struct ResidualOptions {
    int points = 400;
    bool finite_difference_flux = false;  // differentiate r^{n-1}|u'|^{beta-2}u' numerically
};

/// Left side of the radial Euler-Lagrange equation at u = G^{1/k}, on interior points of the
/// support (or of the radius holding all but 1e-8 of the mass), with the given multipliers.
inline ResidualReport euler_lagrange_residual(const QGaussianParams& p, const Multipliers& mult,
                                              const ResidualOptions& opt = {}) {
    const double beta = p.beta(), k = p.k(), alpha = p.alpha(), gamma = p.gamma();
    if (!(beta > 1.0) || !std::isfinite(beta)) throw DomainError("euler_lagrange_residual: needs alpha > 1");
    p.require(Validity::fisher_finite);
    const int n = p.n();
    const double s = p.q() - 1.0;
    const double logc = -log_partition_fn(p) / k;  // u = c * phi^e (or c * exp(-gamma r^alpha / k))
    const double e = p.unit_q() ? 0.0 : 1.0 / (s * k);

    struct Derivs {
        double u, du, ddu;
    };
    auto derivs = [&](double r) -> Derivs {
        if (p.unit_q()) {
            const double g1 = gamma * alpha / k;
            const double u = std::exp(logc - gamma * std::pow(r, alpha) / k);
            const double du = -u * g1 * std::pow(r, alpha - 1.0);
            const double ddu = u * (g1 * g1 * std::pow(r, 2.0 * alpha - 2.0) - g1 * (alpha - 1.0) * std::pow(r, alpha - 2.0));
            return {u, du, ddu};
        }
        const double phi = 1.0 - s * gamma * std::pow(r, alpha);
        const double dphi = -s * gamma * alpha * std::pow(r, alpha - 1.0);
        const double ddphi = -s * gamma * alpha * (alpha - 1.0) * std::pow(r, alpha - 2.0);
        const double c = std::exp(logc);
        const double u = c * std::pow(phi, e);
        const double du = c * e * std::pow(phi, e - 1.0) * dphi;
        const double ddu = c * e * ((e - 1.0) * std::pow(phi, e - 2.0) * dphi * dphi + std::pow(phi, e - 1.0) * ddphi);
        return {u, du, ddu};
    };
    auto flux = [&](double r) {
        const auto d = derivs(r);
        return std::pow(r, n - 1) * std::pow(std::abs(d.du), beta - 2.0) * d.du;
    };

    const double R = p.q() > 1.0 ? p.support_radius() : radial_quantile(p, 1.0 - 1e-8);
    double worst = 0.0, scale = 0.0;
    for (int j = 1; j <= opt.points; ++j) {
        const double r = R * j / (opt.points + 1.0);
        const auto d = derivs(r);
        double lhs;
        if (opt.finite_difference_flux) {
            const double h = 1e-4 * std::min(r, R - r);
            lhs = (8.0 * (flux(r + h) - flux(r - h)) - (flux(r + 2 * h) - flux(r - 2 * h))) / (12.0 * h);
        } else {
            const double w = std::pow(std::abs(d.du), beta - 2.0);
            lhs = (n > 1 ? (n - 1.0) * std::pow(r, n - 2) * w * d.du : 0.0) + std::pow(r, n - 1) * (beta - 1.0) * w * d.ddu;
        }
        const double rhs = k / beta * std::pow(r, n - 1) * (mult.a + mult.b * std::pow(r, alpha)) * std::pow(d.u, k - 1.0);
        worst = std::max(worst, std::abs(lhs - rhs));
        scale = std::max({scale, std::abs(lhs), std::abs(rhs)});
    }
    return {worst / scale, mult, opt.points};
}

inline ResidualReport euler_lagrange_residual(const QGaussianParams& p, const ResidualOptions& opt = {}) {
    return euler_lagrange_residual(p, analytic_multipliers(p), opt);
}

struct EnergyIdentityCheck {
    double lhs = 0.0;  // |k|^{-beta} I = minimal energy
    double rhs = 0.0;  // -(k/beta)(a + b m)
    double rel_gap = 0.0;
};

/// Energy against -(k/beta)(a + b m) with the multipliers recovered by the solver.
inline EnergyIdentityCheck check_energy_identity(const VariationalSolution& s, const VariationalProblem& p) {
    if (!s.converged) throw ConvergenceError("energy identity check: the solution did not converge");
    if (s.u_values.back() != 0.0) throw DomainError("energy identity check: profile must vanish at R");
    EnergyIdentityCheck c;
    c.lhs = s.objective;
    c.rhs = -(p.k / p.beta) * (s.a + s.b * p.m_target);
    c.rel_gap = std::abs(c.lhs - c.rhs) / std::abs(c.lhs);
    return c;
}

//! The same identity evaluated entirely in closed form at G_gamma.
inline EnergyIdentityCheck analytic_energy_identity(const QGaussianParams& p) {
    const auto mult = analytic_multipliers(p);
    EnergyIdentityCheck c;
    c.lhs = std::pow(std::abs(p.k()), -p.beta()) * closed_fisher(p);
    c.rhs = -(p.k() / p.beta()) * (mult.a + mult.b * closed_moment_alpha(p));
    c.rel_gap = std::abs(c.lhs - c.rhs) / std::abs(c.lhs);
    return c;
}

inline nlohmann::json to_json(const VariationalSolution& s) {
    return {{"grid", s.grid},
            {"u_values", s.u_values},
            {"objective", s.objective},
            {"multipliers", {{"a", s.a}, {"b", s.b}}},
            {"constraints", {{"normalization", s.normalization}, {"moment", s.moment}}},
            {"converged", s.converged},
            {"iterations", s.iterations},
            {"diagnostics", {{"outer_iterations", s.outer_iterations}, {"epsilon", s.epsilon}, {"init", to_string(s.init)}}}};
}

//! Columns r, u, closed_form_u.
inline void write_csv(const VariationalProblem& p, const VariationalSolution& s, std::ostream& os) {
    const auto exact = closed_form_profile(p);
    os << "r,u,closed_form_u\n" << std::setprecision(17);
    for (std::size_t i = 0; i < p.grid.size(); ++i) os << p.grid[i] << ',' << s.u_values[i] << ',' << exact[i] << '\n';
}

} // namespace qgfisher
