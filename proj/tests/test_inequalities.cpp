#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "qgfisher/inequalities.hpp"
#include "test_support.hpp"

using namespace qgfisher;

namespace {

// mpmath reference ratios for 1/2 N(0,1) + 1/2 N(0,4), alpha = 2, q = 1.
constexpr double kMixFme = 1.07413818109222144;
constexpr double kMixStam = 1.05409254941120101;
constexpr double kMixMe = 1.01901695604642837;

RadialDensity mixture(double scale = 1.0) {
    return gaussian_mixture(1, {{0.5, scale * scale}, {0.5, 4.0 * scale * scale}});
}

const std::vector<InequalityKind> kAll{InequalityKind::fisher_moment_entropy, InequalityKind::moment_entropy,
                                       InequalityKind::stam, InequalityKind::cramer_rao};

bool stam_domain(int n, double alpha, double q) { return alpha > 1.0 && q > (n - 1.0) / n && q > n / (n + alpha); }

} // namespace

TEST(FisherMomentEntropy, Examples) {
    const auto g = check_fisher_moment_entropy(gaussian(1, 1.0), 2.0, 1.0);
    EXPECT_REL_NEAR(g.lhs, 1.0, 1e-10);
    EXPECT_REL_NEAR(g.rhs, 1.0, 1e-12);
    EXPECT_TRUE(g.equality);
    EXPECT_TRUE(g.passes);
    for (double gamma : {0.1, 1.0, 10.0}) {
        const auto r = check_fisher_moment_entropy(qgaussian_numeric(QGaussianParams(2, 2.0, 1.2, gamma)), 2.0, 1.2);
        EXPECT_LE(std::abs(r.deficit), 1e-5) << gamma;
    }
    const auto mix = check_fisher_moment_entropy(mixture(), 2.0, 1.0);
    EXPECT_REL_NEAR(mix.ratio, kMixFme, 1e-8);
    EXPECT_FALSE(mix.equality);
}

TEST(FisherMomentEntropy, UnitQRightSideIsTheDimension) {
    for (int n : {1, 2, 3}) {
        const auto r = check_fisher_moment_entropy(gaussian(n, 1.7), 2.0, 1.0);
        EXPECT_REL_NEAR(r.rhs, static_cast<double>(n), 1e-10);
        EXPECT_LE(std::abs(r.deficit), 1e-8);
    }
}

TEST(MomentEntropy, Examples) {
    for (double gamma : {0.1, 1.0, 10.0}) {
        const auto r = check_moment_entropy(qgaussian_numeric(QGaussianParams(3, 1.5, 0.9, gamma)), 1.5, 0.9);
        EXPECT_LE(std::abs(r.deficit), 1e-6) << gamma;
    }
    EXPECT_TRUE(check_moment_entropy(gaussian(1, 1.0), 2.0, 1.0).equality);
    const auto disk = check_moment_entropy(uniform_ball(2), 2.0, 1.0);
    EXPECT_REL_NEAR(disk.ratio, std::sqrt(std::numbers::e / 2.0), 1e-9);
    EXPECT_REL_NEAR(check_moment_entropy(mixture(), 2.0, 1.0).ratio, kMixMe, 1e-8);
}

TEST(Stam, Examples) {
    const auto g = check_stam(gaussian(1, 1.0), 2.0, 1.0);
    EXPECT_REL_NEAR(g.lhs, 4.13273135412249294, 1e-9);
    EXPECT_REL_NEAR(g.rhs, 4.13273135412249294, 1e-12);
    EXPECT_TRUE(g.equality);
    EXPECT_DOUBLE_EQ(g.lambda, 1.0);
    const auto c = check_stam(qgaussian_numeric(QGaussianParams(1, 2.0, 2.0, 3.0)), 2.0, 2.0);
    EXPECT_LE(std::abs(c.deficit), 1e-6);
    EXPECT_DOUBLE_EQ(c.lambda, 2.0);
    EXPECT_REL_NEAR(check_stam(mixture(), 2.0, 1.0).ratio, kMixStam, 1e-8);
}

TEST(CramerRao, Examples) {
    const auto g = check_cramer_rao(gaussian(1, 1.0), 2.0, 1.0);
    EXPECT_REL_NEAR(g.lhs, 1.0, 1e-10);
    EXPECT_REL_NEAR(g.rhs, 1.0, 1e-12);
    const auto s = check_cramer_rao(gaussian(1, 2.0), 2.0, 1.0);
    EXPECT_REL_NEAR(s.lhs, 1.0, 1e-10);
    EXPECT_TRUE(s.equality);
    const auto c = check_cramer_rao(qgaussian_numeric(QGaussianParams(3, 2.0, 1.1, 0.7)), 2.0, 1.1);
    EXPECT_LE(std::abs(c.deficit), 1e-5);
}

TEST(Inequalities, EqualityOnEveryQGaussianOfTheGrid) {
    for (int n : {1, 2, 3})
        for (double alpha : {1.5, 2.0, 3.0})
            for (double q : {0.85, 1.0, 1.2, 1.5, 2.0})
                for (double gamma : {0.5, 2.0}) {
                    const QGaussianParams p(n, alpha, q, gamma);
                    if (!p.fisher_finite()) continue;
                    for (bool numeric : {false, true}) {
                        DensityMeasures d(numeric ? qgaussian_numeric(p) : qgaussian_density(p), alpha, q);
                        EXPECT_EQ(d.method(), numeric ? Method::quadrature : Method::closed_form);
                        for (auto kind : kAll) {
                            if ((kind == InequalityKind::stam || kind == InequalityKind::cramer_rao) &&
                                !stam_domain(n, alpha, q))
                                continue;
                            const auto r = check(kind, d);
                            EXPECT_LE(std::abs(r.deficit), 1e-5) << r.name() << " " << p.describe() << " numeric=" << numeric;
                            EXPECT_TRUE(r.equality);
                        }
                    }
                }
}

TEST(Inequalities, StrictForOtherDensities) {
    struct Case {
        RadialDensity f;
        double alpha, q;
    };
    std::vector<Case> cases{{mixture(), 2.0, 1.0},
                            {mixture(), 2.0, 1.5},
                            {mixture(), 3.0, 0.9},
                            {gaussian_mixture(2, {{0.3, 0.5}, {0.7, 2.0}}), 2.0, 1.2},
                            {gaussian_mixture(3, {{0.5, 1.0}, {0.25, 3.0}, {0.25, 9.0}}), 1.5, 1.0},
                            {truncated_exponential(1, 1.0, 3.0), 2.0, 1.0},
                            {truncated_exponential(2, 2.0, 5.0), 2.0, 1.3},
                            {truncated_exponential(3, 1.0, 2.0), 3.0, 1.0},
                            {gaussian(2, 1.0), 3.0, 1.0},
                            {gaussian(1, 1.0), 2.0, 1.5}};
    for (auto& c : cases) {
        DensityMeasures d(c.f, c.alpha, c.q);
        for (auto kind : kAll) {
            if ((kind == InequalityKind::stam || kind == InequalityKind::cramer_rao) && !stam_domain(c.f.dim(), c.alpha, c.q))
                continue;
            const auto r = check(kind, d);
            EXPECT_GE(r.ratio, 1.0 + 1e-6) << r.name() << " " << c.f.descriptor() << " alpha=" << c.alpha << " q=" << c.q;
            EXPECT_TRUE(r.passes);
        }
    }
    // Nonsmooth: only the moment-entropy inequality applies.
    for (double q : {0.8, 1.0, 2.0}) EXPECT_GE(check_moment_entropy(uniform_ball(3), 2.0, q).ratio, 1.0 + 1e-6);
}

TEST(Inequalities, RatiosAreScaleInvariant) {
    for (double s : {0.1, 3.0}) {
        for (auto kind : kAll) {
            DensityMeasures a(mixture(), 2.0, 1.3), b(mixture(s), 2.0, 1.3);
            EXPECT_REL_NEAR(check(kind, b).ratio, check(kind, a).ratio, 1e-8) << to_string(kind) << " s=" << s;
        }
        EXPECT_REL_NEAR(check_moment_entropy(uniform_ball(2, s), 2.0, 0.9).ratio,
                        check_moment_entropy(uniform_ball(2), 2.0, 0.9).ratio, 1e-8);
    }
}

TEST(Inequalities, CramerRaoIsTheProductOfMomentEntropyAndStam) {
    std::vector<std::tuple<RadialDensity, double, double>> cases{
        {mixture(), 2.0, 1.0}, {gaussian_mixture(2, {{0.3, 0.5}, {0.7, 2.0}}), 2.0, 1.2},
        {truncated_exponential(3, 1.0, 2.0), 3.0, 1.0}, {qgaussian_numeric(QGaussianParams(2, 1.5, 1.4, 0.3)), 1.5, 1.4}};
    for (auto& [f, alpha, q] : cases) {
        DensityMeasures d(f, alpha, q);
        const auto cr = check_cramer_rao(d), me = check_moment_entropy(d), st = check_stam(d);
        EXPECT_LE(product_identity_gap(cr, me, st), 1e-9) << f.descriptor();
        if (f.dim() == 1) EXPECT_REL_NEAR(cr.ratio, me.ratio * st.ratio, 1e-9);
    }
}

TEST(Inequalities, PreconditionsNameTheFailingBound) {
    try {
        check_stam(gaussian(3, 1.0), 2.0, 0.65);
        FAIL();
    } catch (const PreconditionError& e) {
        EXPECT_EQ(e.bound(), "q > (n-1)/n");
    }
    try {
        check_moment_entropy(gaussian(1, 1.0), 2.0, 0.3);
        FAIL();
    } catch (const PreconditionError& e) {
        EXPECT_EQ(e.bound(), "q > n/(n+alpha)");
    }
    try {
        check_cramer_rao(gaussian(1, 1.0), 0.8, 1.0);
        FAIL();
    } catch (const PreconditionError& e) {
        EXPECT_EQ(e.bound(), "alpha > 1");
    }
    try {
        check_stam(uniform_ball(2), 2.0, 1.0);
        FAIL();
    } catch (const PreconditionError& e) {
        EXPECT_EQ(e.bound(), "smoothness");
    }
}

TEST(Inequalities, ReportConsistencyAndJson) {
    Tolerances tol{1e-3, 0.5};
    const auto r = check_stam(mixture(), 2.0, 1.0, tol);
    EXPECT_EQ(r.ratio, r.lhs / r.rhs);
    EXPECT_EQ(r.deficit, r.ratio - 1.0);
    EXPECT_TRUE(r.equality);  // loose eq_tol
    const auto j = to_json(r);
    for (const char* key : {"name", "lhs", "rhs", "ratio", "deficit", "passes", "equality", "params", "density",
                            "tolerances", "method_tags"})
        EXPECT_TRUE(j.contains(key)) << key;
    for (const char* key : {"n", "alpha", "beta", "q", "lambda"}) EXPECT_TRUE(j["params"].contains(key)) << key;
    EXPECT_FALSE(j["params"].contains("gamma"));
    EXPECT_EQ(j["name"], "stam");
    EXPECT_EQ(j["tolerances"]["eq_tol"], 0.5);
    EXPECT_EQ(j["method_tags"]["I_bq"], "quadrature");
    const auto tagged = to_json(check_stam(qgaussian_density(QGaussianParams(1, 2.0, 1.0, 0.5)), 2.0, 1.0));
    EXPECT_EQ(tagged["params"]["gamma"], 0.5);
    EXPECT_EQ(tagged["method_tags"]["I_bq"], "closed-form");
    EXPECT_EQ(inequality_from_string("cramer-rao"), InequalityKind::cramer_rao);
    EXPECT_THROW(inequality_from_string("holder"), DomainError);
}
