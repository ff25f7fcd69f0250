#include <cmath>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "plcp/montecarlo.hpp"

using namespace plcp;

namespace {

const NetworkParams kFig{1.0, 5.0, 2.0};

void expect_same(const SimReport& a, const SimReport& b)
{
    EXPECT_EQ(a.n_discarded_truncated, b.n_discarded_truncated);
    EXPECT_EQ(a.n_resampled_empty, b.n_resampled_empty);
    EXPECT_EQ(a.loads, b.loads);
    EXPECT_EQ(a.replication, b.replication);
    EXPECT_EQ(a.total_chord, b.total_chord);
    EXPECT_EQ(a.rate_samples, b.rate_samples);
    EXPECT_EQ(a.sir_samples, b.sir_samples);
    EXPECT_EQ(a.empirical_pmf.probs, b.empirical_pmf.probs);
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_EQ(a.variance, b.variance);
}

} // namespace

TEST(Replications, OrderedAcrossThreads)
{
    for (unsigned t : {1u, 3u, 8u})
    {
        const auto v = run_replications<std::size_t>(100, t, [](std::size_t i) { return i * i; });
        for (std::size_t i = 0; i < v.size(); ++i)
            EXPECT_EQ(v[i], i * i);
    }
}

TEST(Replications, ExceptionsPropagate)
{
    auto body = [](std::size_t i) -> int {
        if (i == 37)
            throw std::runtime_error("boom");
        return 0;
    };
    EXPECT_THROW(run_replications<int>(100, 4, body), std::runtime_error);
}

TEST(Simulation, NoUsersMeansZeroLoad)
{
    NetworkParams p = kFig;
    p.lambda_v = 0.0;
    const auto rep = simulate_typical_load(p, 500, {1, 0});
    for (auto l : rep.loads)
        EXPECT_EQ(l, 0u);
    const auto tag = simulate_tagged_load(p, 500, {1, 0});
    for (auto l : tag.loads)
        EXPECT_EQ(l, 1u);
}

TEST(Simulation, DeterministicAcrossThreadCounts)
{
    SimOptions one, many;
    one.threads = 1;
    many.threads = 4;
    expect_same(simulate_typical_load(kFig, 400, {5, 2}, one), simulate_typical_load(kFig, 400, {5, 2}, many));
    expect_same(simulate_tagged_load(kFig, 400, {5, 2}, one), simulate_tagged_load(kFig, 400, {5, 2}, many));
    RateQuery q;
    expect_same(simulate_rate_coverage(kFig, q, 400, {5, 2}, one), simulate_rate_coverage(kFig, q, 400, {5, 2}, many));
}

TEST(Simulation, SeedsMatter)
{
    const auto a = simulate_typical_load(kFig, 200, {5, 0});
    const auto b = simulate_typical_load(kFig, 200, {6, 0});
    const auto c = simulate_typical_load(kFig, 200, {5, 1});
    EXPECT_NE(a.loads, b.loads);
    EXPECT_NE(a.loads, c.loads);
}

TEST(Simulation, TypicalLoadMeanAndOverdispersion)
{
    const auto rep = simulate_typical_load(kFig, 20000, {8, 0});
    EXPECT_EQ(rep.n_replications, 20000u);
    EXPECT_EQ(rep.loads.size() + rep.n_discarded_truncated, rep.n_replications);
    EXPECT_NEAR(rep.mean, 10.0, 3.0 * std::sqrt(rep.variance / rep.loads.size()));
    // Cox counts are overdispersed.
    EXPECT_GT(rep.variance, rep.mean);
    double s = 0.0;
    for (double p : rep.empirical_pmf.probs)
        s += p;
    EXPECT_NEAR(s, 1.0, 1e-12);
}

TEST(Simulation, TaggedLoadNeverZero)
{
    const auto rep = simulate_tagged_load(kFig, 5000, {9, 0});
    EXPECT_EQ(rep.empirical_pmf.probs[0], 0.0);
    EXPECT_GT(rep.mean, 11.0);
}

TEST(Simulation, RateCoverageEndpoints)
{
    RateQuery q;
    const auto rep = simulate_rate_coverage(kFig, q, 20000, {10, 0});
    EXPECT_EQ(rep.rate_coverage(0.0), 1.0);
    // SIR alone, ignoring load.
    EXPECT_NEAR(rep.sir_coverage(1.0), 1.0 / (1.0 + std::acos(-1.0) / 4.0), 0.012);
    EXPECT_EQ(rep.rate_coverage(1e12), 0.0);
}

TEST(Simulation, InvalidArguments)
{
    EXPECT_THROW(simulate_typical_load(kFig, 0, {1, 0}), std::invalid_argument);
    NetworkParams bad = kFig;
    bad.mu_l = -1.0;
    EXPECT_THROW(simulate_tagged_load(bad, 10, {1, 0}), std::invalid_argument);
}

TEST(Simulation, CsvDumps)
{
    const auto rep = simulate_rate_coverage(kFig, RateQuery{}, 20, {11, 0});
    std::ostringstream a, b;
    write_load_csv(rep, a);
    write_rate_csv(rep, b);
    std::istringstream la(a.str()), lb(b.str());
    std::string line;
    std::getline(la, line);
    EXPECT_EQ(line, "replication,load");
    std::getline(lb, line);
    EXPECT_EQ(line, "replication,sir_db,load,rate_bps");
    int rows = 0;
    while (std::getline(lb, line))
        ++rows;
    EXPECT_EQ(rows, static_cast<int>(rep.rate_samples.size()));
}
