#include <cmath>
#include <limits>
#include <numbers>

#include <gtest/gtest.h>

#include "plcp/coverage.hpp"

using namespace plcp;

namespace {

// alpha = 4: the interference integral is elementary,
// P = 1 / (1 + sqrt(beta) (pi/2 - arctan(1/sqrt(beta)))).
double coverage_alpha4(double beta)
{
    const double r = std::sqrt(beta);
    return 1.0 / (1.0 + r * (0.5 * std::numbers::pi - std::atan(1.0 / r)));
}

const NetworkParams kFig{1.0, 5.0, 2.0};

} // namespace

TEST(Coverage, ZeroThreshold)
{
    EXPECT_EQ(coverage_probability(1.0, 4.0, 0.0), 1.0);
    EXPECT_EQ(coverage_probability(1.0, 4.0, std::numeric_limits<double>::infinity()), 0.0);
}

TEST(Coverage, UnitThresholdAlpha4)
{
    const double p = coverage_probability(1.0, 4.0, 1.0);
    EXPECT_NEAR(p, 1.0 / (1.0 + std::numbers::pi / 4.0), 1e-9);
    EXPECT_NEAR(p, 0.5602, 1e-3);
}

TEST(Coverage, MatchesClosedFormAcrossThresholds)
{
    for (double beta : {1e-3, 0.1, 0.5, 2.0, 10.0, 100.0, 1e4})
        EXPECT_NEAR(coverage_probability(1.0, 4.0, beta), coverage_alpha4(beta), 1e-8) << beta;
}

TEST(Coverage, IndependentOfDensity)
{
    for (double alpha : {3.0, 4.0, 5.5})
    {
        const double ref = coverage_probability(1.0, alpha, 1.0);
        for (double lb : {0.5, 4.0})
            EXPECT_NEAR(coverage_probability(lb, alpha, 1.0), ref, 1e-6) << alpha << ' ' << lb;
    }
}

TEST(Coverage, DecreasingInThreshold)
{
    double prev = 1.0;
    for (double beta = 0.01; beta < 1000.0; beta *= 1.7)
    {
        const double p = coverage_probability(1.0, 3.5, beta);
        EXPECT_LT(p, prev);
        prev = p;
    }
}

TEST(Coverage, InvalidArguments)
{
    EXPECT_THROW(coverage_probability(0.0, 4.0, 1.0), std::invalid_argument);
    EXPECT_THROW(coverage_probability(1.0, 2.0, 1.0), std::invalid_argument);
    EXPECT_THROW(coverage_probability(1.0, 4.0, -1.0), std::invalid_argument);
}

TEST(RateThreshold, Values)
{
    EXPECT_EQ(sir_threshold_for_rate(0.0, 7, 10e6), 0.0);
    EXPECT_NEAR(sir_threshold_for_rate(1e6, 10, 10e6), 1.0, 1e-15);
    EXPECT_TRUE(std::isinf(sir_threshold_for_rate(1e9, 100, 1e6)));
}

TEST(RateCoverage, ZeroThresholdIsOneMinusTail)
{
    RateQuery q;
    const auto pmf = pmf_tagged(kFig, 40);
    const auto r = rate_coverage(pmf, 1.0, q);
    EXPECT_NEAR(r.value, 1.0 - pmf.tail_mass, 1e-12);
    EXPECT_GT(r.tail_mass, 1e-3);
    EXPECT_FALSE(r.warning.empty());
}

TEST(RateCoverage, MonotoneInThresholdAndBandwidth)
{
    const auto pmf = pmf_tagged(kFig, 80);
    RateQuery q;
    double prev = 1.0;
    for (double T = 0.0; T <= 5e6; T += 2.5e5)
    {
        q.rate_threshold_T = T;
        const auto r = rate_coverage(pmf, 1.0, q);
        EXPECT_LE(r.value, prev + 1e-12);
        EXPECT_GE(r.value, 0.0);
        EXPECT_TRUE(r.warning.empty());
        prev = r.value;
    }
    q.rate_threshold_T = 1e6;
    const double narrow = rate_coverage(pmf, 1.0, q).value;
    q.bandwidth_B = 20e6;
    EXPECT_GT(rate_coverage(pmf, 1.0, q).value, narrow);
}

TEST(RateCoverage, SingleUserReducesToSirCoverage)
{
    Pmf one;
    one.probs = {0.0, 1.0};
    RateQuery q;
    q.rate_threshold_T = 10e6; // gamma = 1 at m = 1
    EXPECT_NEAR(rate_coverage(one, 1.0, q).value, coverage_alpha4(1.0), 1e-9);
}

TEST(RateCoverage, FromParams)
{
    RateQuery q;
    q.rate_threshold_T = 5e5;
    const auto a = rate_coverage(kFig, q);
    const auto b = rate_coverage(pmf_tagged(kFig, q.m_max), 1.0, q);
    EXPECT_EQ(a.value, b.value);
    q.bandwidth_B = -1.0;
    EXPECT_THROW(rate_coverage(kFig, q), std::invalid_argument);
}
