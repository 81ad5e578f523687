#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "qgfisher/estimators.hpp"
#include "test_support.hpp"

using namespace qgfisher;

namespace {

// Reference values for 1/2 N(0,1) + 1/2 N(0,4) on the line, from a 30-digit mpmath run.
constexpr double kMixShannon = 1.85824550515105793;
constexpr double kMixPower = 6.41247623951388562;
constexpr double kMixFisher = 0.461509132832042357;
constexpr double kMixM2 = 0.194991752722842860;
constexpr double kMixM15 = 0.423207340667453071;

RadialDensity mixture() { return gaussian_mixture(1, {{0.5, 1.0}, {0.5, 4.0}}); }

} // namespace

TEST(QuadMq, Examples) {
    EXPECT_REL_NEAR(quad_Mq(gaussian(1, 1.0), 1.0), 1.0, 1e-10);
    EXPECT_REL_NEAR(quad_Mq(qgaussian_numeric(QGaussianParams(1, 2.0, 2.0, 1.0)), 2.0), 0.6, 1e-10);
    EXPECT_REL_NEAR(quad_Mq(uniform_ball(2), 2.0), 1.0 / std::numbers::pi, 1e-12);
}

TEST(QuadMoment, Examples) {
    EXPECT_REL_NEAR(quad_moment(gaussian(1, 1.0), 2.0), 1.0, 1e-10);
    EXPECT_REL_NEAR(quad_moment(uniform_ball(3), 2.0), 0.6, 1e-12);
    EXPECT_REL_NEAR(quad_moment(qgaussian_numeric(QGaussianParams(1, 2.0, 2.0, 1.0)), 2.0), 0.2, 1e-10);
}

TEST(QuadFisher, Examples) {
    EXPECT_REL_NEAR(quad_fisher(gaussian(1, 1.0), 2.0, 1.0), 1.0, 1e-10);
    for (double sigma : {0.5, 2.0}) EXPECT_REL_NEAR(quad_fisher(gaussian(1, sigma), 2.0, 1.0), 1.0 / (sigma * sigma), 1e-10);
    const QGaussianParams p(2, 2.0, 1.2, 1.0);
    EXPECT_REL_NEAR(quad_fisher(qgaussian_numeric(p), 2.0, 1.2), closed_fisher(p), 1e-6);
}

TEST(QuadFisher, RejectsInteriorZeros) {
    auto f = tabulated_profile(1, {0.0, 1.0, 2.0, 3.0, 4.0}, {0.3, 0.0, 0.0, 0.2, 0.0});
    EXPECT_THROW(quad_fisher(f, 2.0, 1.0), DomainError);
}

TEST(QuadFisher, AnalyticAndFiniteDifferenceDerivativesAgree) {
    for (int n : {1, 2, 3})
        for (double alpha : {1.5, 2.0, 3.0})
            for (double q : {0.85, 1.0, 1.2, 1.5, 2.0}) {
                const QGaussianParams p(n, alpha, q, 1.0);
                if (!p.fisher_finite()) continue;
                const auto f = qgaussian_density(p);
                const double exact = quad_fisher(f, p.beta(), q);
                const double fd = quad_fisher(f.without_analytic_derivative(), p.beta(), q);
                EXPECT_REL_NEAR(fd, exact, 1e-5) << p.describe();
            }
    const auto mix = mixture();
    EXPECT_REL_NEAR(quad_fisher(mix.without_analytic_derivative(), 2.0, 1.0), quad_fisher(mix, 2.0, 1.0), 1e-5);
}

TEST(QuadMoment, HeavyTailRaisesDivergence) {
    // m_2 needs q > 1/3 in one dimension; the density itself exists down to q > -1.
    const auto f = qgaussian_numeric(QGaussianParams(1, 2.0, 0.3, 1.0));
    EXPECT_THROW(quad_moment(f, 2.0), DivergenceError);
    try {
        measure_all(f, 2.0, 1.0);
        FAIL() << "expected a divergence";
    } catch (const DivergenceError& e) {
        EXPECT_NE(std::string(e.what()).find("m_alpha"), std::string::npos) << e.what();
    }
}

TEST(MeasureAll, StandardNormal) {
    const auto s = measure_all(gaussian(1, 1.0), 2.0, 1.0);
    EXPECT_REL_NEAR(s.Mq.value, 1.0, 1e-10);
    EXPECT_REL_NEAR(s.Hq.value, 1.41893853320467274, 1e-10);
    EXPECT_REL_NEAR(s.Sq.value, 1.41893853320467274, 1e-10);
    EXPECT_REL_NEAR(s.Nq.value, 4.13273135412249294, 1e-10);
    EXPECT_REL_NEAR(s.m_alpha.value, 1.0, 1e-10);
    ASSERT_TRUE(s.I_bq.has_value());
    EXPECT_REL_NEAR(s.I_bq->value, 1.0, 1e-10);
    EXPECT_EQ(s.Mq.method, Method::quadrature);
    EXPECT_DOUBLE_EQ(s.beta, 2.0);
}

TEST(MeasureAll, GaussianMixture) {
    const auto f = mixture();
    EXPECT_REL_NEAR(quad_normalization(f), 1.0, 1e-12);
    const auto s = measure_all(f, 2.0, 1.0);
    EXPECT_REL_NEAR(s.Hq.value, kMixShannon, 1e-10);
    EXPECT_REL_NEAR(s.Nq.value, kMixPower, 1e-10);
    EXPECT_REL_NEAR(s.m_alpha.value, 2.5, 1e-10);
    EXPECT_REL_NEAR(s.I_bq->value, kMixFisher, 1e-9);
    EXPECT_REL_NEAR(measure_all(f, 2.0, 2.0).Mq.value, kMixM2, 1e-10);
    EXPECT_REL_NEAR(measure_all(f, 2.0, 1.5).Mq.value, kMixM15, 1e-10);
}

TEST(MeasureAll, MatchesClosedFormsOnTheGrid) {
    for (int n : {1, 2, 3})
        for (double alpha : {1.5, 2.0, 3.0})
            for (double q : {0.85, 1.0, 1.2, 1.5, 2.0})
                for (double gamma : {0.5, 2.0}) {
                    const QGaussianParams p(n, alpha, q, gamma);
                    if (!p.mq_finite()) continue;
                    const auto numeric = measure_all(qgaussian_numeric(p), alpha, q);
                    const auto closed = closed_measures(p);
                    const std::string ctx = p.describe();
                    EXPECT_REL_NEAR(numeric.Mq.value, closed.Mq.value, 1e-6) << ctx;
                    EXPECT_REL_NEAR(numeric.Hq.value, closed.Hq.value, 1e-6) << ctx;
                    EXPECT_REL_NEAR(numeric.Sq.value, closed.Sq.value, 1e-6) << ctx;
                    EXPECT_REL_NEAR(numeric.Nq.value, closed.Nq.value, 1e-6) << ctx;
                    EXPECT_REL_NEAR(numeric.m_alpha.value, closed.m_alpha.value, 1e-6) << ctx;
                    if (p.fisher_finite()) {
                        ASSERT_TRUE(numeric.I_bq && closed.I_bq) << ctx;
                        EXPECT_REL_NEAR(numeric.I_bq->value, closed.I_bq->value, 1e-6) << ctx;
                    }
                }
}

TEST(MeasureAll, EntropyPowerIsNonIncreasingInQ) {
    const std::array<double, 7> qs{0.8, 0.9, 1.0, 1.2, 1.5, 2.0, 3.0};
    std::vector<RadialDensity> densities{mixture(), gaussian(2, 1.3), truncated_exponential(3, 1.0, 4.0),
                                         qgaussian_numeric(QGaussianParams(2, 2.0, 1.4, 1.0))};
    for (const auto& f : densities) {
        double previous = INFINITY;
        for (double q : qs) {
            const double nq = measure_all(f, 2.0, q).Nq.value;
            EXPECT_LE(nq, previous * (1.0 + 1e-12)) << f.descriptor() << " q=" << q;
            previous = nq;
        }
    }
}

TEST(MeasureAll, InternalConsistencyOfDerivedEntropies) {
    const auto s = measure_all(mixture(), 2.0, 1.7);
    EXPECT_REL_NEAR(s.Nq.value, std::pow(s.Mq.value, 1.0 / (1.0 - 1.7)), 1e-12);
    EXPECT_REL_NEAR(s.Hq.value, std::log(s.Mq.value) / (1.0 - 1.7), 1e-12);
    EXPECT_REL_NEAR(s.Sq.value, (1.0 - s.Mq.value) / (1.7 - 1.0), 1e-12);
}

TEST(RadialReduction, OneDimensionalHalfLineMatchesTwoSidedLine) {
    quad::Options opt{1e-13, 1e-300, 5000};
    // Gaussian: direct integral over the whole line, started far in the left tail.
    const auto g = gaussian(1, 1.0);
    for (double q : {0.7, 1.0, 2.5}) {
        auto line = quad::integrate_to_infinity([&](double x) { return std::pow(g(x), q); }, -45.0, 45.0, opt);
        EXPECT_REL_NEAR(quad_Mq(g, q), line.value, 1e-10) << "q=" << q;
    }
    // Compact q-Gaussian: direct integral over [-1, 1].
    const auto c = qgaussian_numeric(QGaussianParams(1, 2.0, 2.0, 1.0));
    auto line = quad::integrate([&](double x) { return c(x) * c(x); }, -1.0, 1.0, opt);
    EXPECT_REL_NEAR(quad_Mq(c, 2.0), line.value, 1e-10);
    auto mom = quad::integrate([&](double x) { return std::pow(std::abs(x), 3.0) * c(x); }, -1.0, 1.0, opt);
    EXPECT_REL_NEAR(quad_moment(c, 3.0), mom.value, 1e-10);
}

TEST(RadialDensity, ConstructionErrors) {
    EXPECT_THROW(gaussian_mixture(1, {{0.5, 1.0}, {0.4, 2.0}}), DomainError);
    EXPECT_THROW(gaussian_mixture(1, {}), DomainError);
    EXPECT_THROW(tabulated_profile(1, {0.1, 1.0}, {1.0, 0.0}), DomainError);
    EXPECT_THROW(uniform_ball(0), DomainError);
    EXPECT_THROW(quad_Mq(gaussian(1, 1.0), -1.0), DomainError);
    EXPECT_THROW(quad_fisher(gaussian(1, 1.0), 1.0, 1.0), DomainError);
}
