#include <cmath>
#include <sstream>
#include <tuple>
#include <vector>

#include <gtest/gtest.h>

#include "qgfisher/variational.hpp"
#include "test_support.hpp"

using namespace qgfisher;

namespace {

// mpmath values of |k|^{-beta} I_{beta,q}[G_gamma] for (n, alpha, q, gamma).
struct PropCase {
    int n;
    double alpha, q, gamma, energy;
};
const std::vector<PropCase> kPropCases{{2, 2.0, 1.2, 1.0, 0.952665822756294337},
                                       {1, 3.0, 1.1, 2.0, 1.38136073005982113},
                                       {2, 2.0, 1.5, 1.0, 0.954929658551372015},
                                       {3, 1.5, 0.85, 2.0, 0.532928714064058061}};

struct SolveCase {
    int n;
    double alpha, q;
};
const std::vector<SolveCase> kSolveCases{{1, 2.0, 1.0}, {1, 2.0, 1.5}, {2, 2.0, 1.2}, {3, 2.0, 1.1}};

} // namespace

TEST(Variational, StandardNormalFromExponentialInit) {
    const auto p = make_problem(1, 2.0, 1.0, 1.0);
    EXPECT_DOUBLE_EQ(p.k, 2.0);
    EXPECT_REL_NEAR(p.gamma_star, 0.5, 1e-14);
    EXPECT_REL_NEAR(p.expected_objective(), 0.25, 1e-14);
    const auto s = solve(p, Init::exponential);
    EXPECT_TRUE(s.converged);
    EXPECT_REL_NEAR(s.objective, 0.25, 1e-4);
    EXPECT_LE(relative_l2_error(p, s), 1e-3);
    EXPECT_NEAR(s.normalization, 1.0, 1e-9);
    EXPECT_NEAR(s.moment, 1.0, 1e-9);
    EXPECT_LE(check_energy_identity(s, p).rel_gap, 1e-4);
}

TEST(Variational, ScaledNormal) {
    const double sigma = 2.0;
    const auto p = make_problem(1, 2.0, 1.0, sigma * sigma);
    const auto s = solve(p, Init::flat);
    EXPECT_REL_NEAR(s.objective, 0.25 * 0.25, 1e-4);
}

TEST(Variational, PlanarCaseMatchesClosedProfile) {
    const QGaussianParams unit(2, 2.0, 1.2, 1.0);
    const auto p = make_problem(2, 2.0, 1.2, closed_moment_alpha(unit));
    EXPECT_REL_NEAR(p.gamma_star, 1.0, 1e-14);
    const auto s = solve(p, Init::qgaussian_detuned);
    EXPECT_LE(relative_l2_error(p, s), 1e-3);
    EXPECT_LE(check_energy_identity(s, p).rel_gap, 1e-3);
}

TEST(Variational, MinimizerObjectiveAndIdentityOnTheListedCases) {
    for (const auto& c : kSolveCases) {
        const auto p = make_problem(c.n, c.alpha, c.q, 1.0);
        std::vector<VariationalSolution> sols;
        for (Init init : {Init::flat, Init::exponential, Init::qgaussian_detuned}) {
            const auto s = solve(p, init);
            const std::string ctx = "n=" + std::to_string(c.n) + " q=" + std::to_string(c.q) + " init=" + to_string(init);
            EXPECT_TRUE(s.converged) << ctx;
            EXPECT_LE(relative_l2_error(p, s), 1e-3) << ctx;
            EXPECT_REL_NEAR(s.objective, p.expected_objective(), 1e-4) << ctx;
            EXPECT_LE(check_energy_identity(s, p).rel_gap, 1e-3) << ctx;
            sols.push_back(s);
        }
        for (std::size_t i = 1; i < sols.size(); ++i) EXPECT_LE(relative_l2_distance(p, sols[i], sols[0]), 1e-3);
    }
}

TEST(Variational, NoFeasibleIterateBeatsTheQGaussian) {
    for (const auto& c : kSolveCases) {
        const auto p = make_problem(c.n, c.alpha, c.q, 1.0);
        const double best = p.expected_objective();
        for (Init init : {Init::flat, Init::exponential, Init::qgaussian_detuned}) {
            const auto s = solve(p, init);
            int feasible = 0;
            for (const auto& rec : s.history) {
                if (rec.violation > 1e-8) continue;
                ++feasible;
                EXPECT_GE(rec.objective, best * (1.0 - 1e-4)) << "n=" << c.n << " q=" << c.q;
            }
            EXPECT_GT(feasible, 0);
        }
    }
}

TEST(Variational, RejectsBadTargets) {
    EXPECT_THROW(make_problem(1, 2.0, 1.0, -1.0), DomainError);
    EXPECT_THROW(make_problem(1, 2.0, 1.0, 0.0), DomainError);
    EXPECT_THROW(make_problem(1, 1.0, 1.0, 1.0), DomainError);
    // k = beta / (beta (q - 1) + 1) < 0 for q < 1 - 1/beta.
    EXPECT_THROW(make_problem(1, 3.0, 0.3, 1.0), DomainError);
}

TEST(Variational, UnconvergedSolveReportsLastIterate) {
    SolverOptions opt;
    opt.max_outer = 1;
    opt.max_inner = 2;
    const auto p = make_problem(1, 2.0, 1.2, 1.0);
    try {
        solve(p, Init::flat, opt);
        FAIL();
    } catch (const VariationalConvergenceError& e) {
        EXPECT_FALSE(e.last_iterate().converged);
        EXPECT_EQ(e.last_iterate().u_values.size(), p.grid.size());
        EXPECT_THROW(check_energy_identity(e.last_iterate(), p), ConvergenceError);
    }
}

TEST(EulerLagrange, Examples) {
    EXPECT_LE(euler_lagrange_residual(QGaussianParams(1, 2.0, 1.0, 0.5)).max_residual, 1e-8);
    EXPECT_LE(euler_lagrange_residual(QGaussianParams(2, 2.0, 1.5, 1.0)).max_residual, 1e-8);
    EXPECT_LE(euler_lagrange_residual(QGaussianParams(1, 3.0, 1.1, 2.0), ResidualOptions{400, true}).max_residual, 1e-6);
    EXPECT_LE(euler_lagrange_residual(QGaussianParams(1, 3.0, 1.1, 2.0)).max_residual, 1e-8);
}

TEST(EulerLagrange, GridOfParameters) {
    int count = 0;
    for (int n : {1, 2, 3})
        for (double alpha : {1.5, 2.0, 3.0})
            for (double q : {0.85, 1.0, 1.2, 1.5, 2.0})
                for (double gamma : {0.5, 2.0}) {
                    const QGaussianParams p(n, alpha, q, gamma);
                    if (!p.fisher_finite() || !(p.k() > 0.0)) continue;
                    EXPECT_LE(euler_lagrange_residual(p).max_residual, 1e-8) << p.describe();
                    EXPECT_LE(euler_lagrange_residual(p, ResidualOptions{400, true}).max_residual, 1e-6) << p.describe();
                    ++count;
                }
    EXPECT_GE(count, 20);
}

TEST(EulerLagrange, PartitionExponentWithoutTheOneOverKFails) {
    // Taking Z^{k-beta} instead of Z^{(k-beta)/k} in A only agrees when k is 1 or beta.
    for (const auto& p : {QGaussianParams(2, 2.0, 1.2, 1.0), QGaussianParams(3, 1.5, 0.85, 2.0)}) {
        auto m = analytic_multipliers(p);
        const double k = p.k(), beta = p.beta();
        const double wrong = m.A * std::exp(((k - beta) - (k - beta) / k) * log_partition_fn(p));
        const Multipliers bad{-wrong * p.n(), wrong * p.lambda() * p.gamma(), wrong};
        EXPECT_GT(euler_lagrange_residual(p, bad).max_residual, 1e-2) << p.describe();
        EXPECT_LE(euler_lagrange_residual(p, m).max_residual, 1e-8) << p.describe();
    }
}

TEST(EnergyIdentity, AnalyticIdentityOnTheGrid) {
    for (int n : {1, 2, 3})
        for (double alpha : {1.5, 2.0, 3.0})
            for (double q : {0.85, 1.0, 1.2, 1.5, 2.0})
                for (double gamma : {0.5, 1.0, 2.0}) {
                    const QGaussianParams p(n, alpha, q, gamma);
                    if (!p.fisher_finite() || !(p.k() > 0.0)) continue;
                    EXPECT_LE(analytic_energy_identity(p).rel_gap, 1e-10) << p.describe();
                }
    for (const auto& c : kPropCases) {
        const auto chk = analytic_energy_identity(QGaussianParams(c.n, c.alpha, c.q, c.gamma));
        EXPECT_REL_NEAR(chk.lhs, c.energy, 1e-12);
        EXPECT_REL_NEAR(chk.rhs, c.energy, 1e-12);
    }
}

TEST(Variational, Export) {
    const auto p = make_problem(1, 2.0, 1.0, 1.0, 400);
    const auto s = solve(p, Init::qgaussian_detuned);
    const auto j = to_json(s);
    for (const char* key : {"grid", "u_values", "objective", "multipliers", "constraints", "converged", "iterations"})
        EXPECT_TRUE(j.contains(key)) << key;
    EXPECT_TRUE(j["multipliers"].contains("a"));
    EXPECT_TRUE(j["multipliers"].contains("b"));
    EXPECT_EQ(j["u_values"].size(), 401u);
    std::ostringstream os;
    write_csv(p, s, os);
    EXPECT_EQ(os.str().substr(0, 18), std::string("r,u,closed_form_u\n"));
    EXPECT_EQ(init_from_string("qgaussian-detuned"), Init::qgaussian_detuned);
    EXPECT_THROW(init_from_string("random"), DomainError);
}
