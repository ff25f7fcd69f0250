#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "plcp/processes.hpp"
#include "plcp/stats.hpp"

using namespace plcp;

TEST(Params, Validation)
{
    NetworkParams p;
    EXPECT_NO_THROW(p.validate());
    EXPECT_NEAR(p.lambda_l(), 5.0 / std::numbers::pi, 1e-15);
    p.lambda_b = 0.0;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p = {};
    p.lambda_v = -1.0;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p = {};
    p.alpha_pl = 2.0;
    EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(Ppp, ZeroDensityIsEmpty)
{
    auto rng = make_rng({1, 0});
    EXPECT_TRUE(sample_ppp_disc(0.0, 10.0, {}, rng).empty());
}

TEST(Ppp, MeanCountAndSupport)
{
    auto rng = make_rng({2, 0});
    const double mean = std::numbers::pi * 100.0;
    const int n = 10000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i)
    {
        const auto pts = sample_ppp_disc(1.0, 10.0, {3.0, -1.0}, rng);
        sum += static_cast<double>(pts.size());
        if (i < 50)
            for (const auto& p : pts)
                EXPECT_LE(distance(p, {3.0, -1.0}), 10.0);
    }
    EXPECT_NEAR(sum / n, mean, 3.0 * std::sqrt(mean / n));
}

TEST(Ppp, RadialLawIsUniformOnDisc)
{
    auto rng = make_rng({3, 0});
    std::vector<double> r;
    while (r.size() < 20000)
        for (const auto& p : sample_ppp_disc(1.0, 4.0, {}, rng))
            r.push_back(norm(p));
    const double d = ks_distance(r, [](double x) { return std::clamp(x * x / 16.0, 0.0, 1.0); });
    EXPECT_GT(ks_pvalue(d, r.size()), 1e-3);
}

TEST(Plp, MeanLineCount)
{
    NetworkParams p;
    auto rng = make_rng({4, 0});
    const int n = 20000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i)
        sum += static_cast<double>(sample_plp_disc(p, 2.0, rng).size());
    // 2 pi (mu_l / pi) r = 20.
    EXPECT_NEAR(sum / n, 20.0, 3.0 * std::sqrt(20.0 / n));
}

TEST(Plp, TinyDiscIsUsuallyEmpty)
{
    NetworkParams p;
    auto rng = make_rng({5, 0});
    int empty = 0;
    for (int i = 0; i < 1000; ++i)
        empty += sample_plp_disc(p, 1e-6, rng).empty();
    EXPECT_GE(empty, 999);
}

// Mean line length per unit area equals mu_l.
TEST(Plp, LengthDensityEqualsMuL)
{
    NetworkParams p;
    const double R = 3.0;
    auto rng = make_rng({6, 0});
    const int n = 100000;
    double total = 0.0;
    for (int i = 0; i < n; ++i)
        for (const auto& l : sample_plp_disc(p, R, rng))
            total += 2.0 * std::sqrt(R * R - l.rho * l.rho);
    EXPECT_NEAR(total / n / (std::numbers::pi * R * R), p.mu_l, 0.02 * p.mu_l);
}

TEST(Vehicles, CountMeanAndPlacement)
{
    const auto sq = ConvexPolygon::rectangle(0, 0, 3, 1);
    const Line l(0.5, std::numbers::pi / 2); // y = 0.5, chord 3
    auto rng = make_rng({7, 0});
    const int n = 20000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i)
    {
        const auto pts = sample_vehicles_on_chord(l, sq, 2.0, rng);
        sum += static_cast<double>(pts.size());
        for (const auto& q : pts)
        {
            EXPECT_NEAR(q.y, 0.5, 1e-12);
            EXPECT_GE(q.x, -1e-12);
            EXPECT_LE(q.x, 3.0 + 1e-12);
        }
    }
    EXPECT_NEAR(sum / n, 6.0, 3.0 * std::sqrt(6.0 / n));
    EXPECT_TRUE(sample_vehicles_on_chord(Line(5.0, 0.0), sq, 2.0, rng).empty());
}

TEST(PalmLine, ThroughOriginWithUniformAngle)
{
    auto rng = make_rng({8, 0});
    std::vector<double> th;
    for (int i = 0; i < 10000; ++i)
    {
        const Line l = sample_palm_plcp_line(rng);
        EXPECT_NEAR(l.signed_distance({0.0, 0.0}), 0.0, 1e-12);
        th.push_back(l.theta);
    }
    const double d = ks_distance(th, [](double x) { return x / (2.0 * std::numbers::pi); });
    EXPECT_GT(ks_pvalue(d, th.size()), 0.01);
    // Any polygon with the origin inside has a positive chord.
    const auto p = ConvexPolygon::regular(5, 0.1, {0.02, 0.01});
    EXPECT_GT(chord_length(p, sample_palm_plcp_line(rng)), 0.0);
}

TEST(Rng, DeterministicPerReplication)
{
    NetworkParams p;
    auto a = make_rng({42, 3}, 17);
    auto b = make_rng({42, 3}, 17);
    const auto la = sample_plp_disc(p, 5.0, a);
    const auto lb = sample_plp_disc(p, 5.0, b);
    ASSERT_EQ(la.size(), lb.size());
    for (std::size_t i = 0; i < la.size(); ++i)
    {
        EXPECT_EQ(la[i].rho, lb[i].rho);
        EXPECT_EQ(la[i].theta, lb[i].theta);
    }
    auto c = make_rng({42, 4}, 17);
    auto d = make_rng({42, 3}, 18);
    const auto first = make_rng({42, 3}, 17)();
    EXPECT_NE(c(), first);
    EXPECT_NE(d(), first);
}
