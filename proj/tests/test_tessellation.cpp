#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "plcp/laws.hpp"
#include "plcp/montecarlo.hpp"
#include "plcp/tessellation.hpp"

using namespace plcp;

namespace {

// Cell of `nucleus` clipped by every other point, no early exit.
ConvexPolygon brute_force_cell(Point2 nucleus, const std::vector<Point2>& others, double w)
{
    auto cell = ConvexPolygon::rectangle(-w, -w, w, w);
    for (const auto& q : others)
        if (!(q == nucleus))
            cell = cell.clipped(HalfPlane::bisector(nucleus, q));
    return cell;
}

bool same_polygon(const ConvexPolygon& a, const ConvexPolygon& b, double tol)
{
    return std::abs(a.area() - b.area()) <= tol && std::abs(a.perimeter() - b.perimeter()) <= tol &&
           a.size() == b.size();
}

const SimReport& typical_geometry()
{
    static const SimReport rep = [] {
        SimOptions opts;
        opts.keep_geometry = true;
        return simulate_typical_load(NetworkParams{}, 100000, {2718, 1}, opts);
    }();
    return rep;
}

} // namespace

TEST(Voronoi, MatchesBruteForce)
{
    NetworkParams p;
    const WindowConfig win;
    for (std::uint64_t i = 0; i < 300; ++i)
    {
        auto rng = make_rng({9, 0}, i);
        const auto pts = sample_ppp_disc(p.lambda_b, win.radius(p.lambda_b), {}, rng);
        const auto fast = typical_cell_from_points(pts, p, win);
        const auto slow = brute_force_cell({0, 0}, pts, win.radius(p.lambda_b));
        EXPECT_TRUE(same_polygon(fast.cell, slow, 1e-10)) << "replication " << i;
        EXPECT_TRUE(fast.cell.contains({0, 0}));
    }
}

TEST(Voronoi, CellPointsAreNearestToNucleus)
{
    NetworkParams p;
    auto rng = make_rng({10, 0});
    const auto pts = sample_ppp_disc(1.0, 12.0, {}, rng);
    const auto cell = typical_cell_from_points(pts, p).cell;
    for (const auto& v : cell.vertices())
    {
        const double d0 = norm(v);
        for (const auto& q : pts)
            EXPECT_GE(distance(v, q), d0 - 1e-9);
    }
}

// A cell certified exact in the small window must not change when the
// window grows and more far-away stations appear.
TEST(Voronoi, CertifiedCellsAreWindowIndependent)
{
    NetworkParams p;
    const WindowConfig small{6.0, 1.0};
    const double big_radius = 20.0;
    int certified = 0, flagged = 0;
    for (std::uint64_t i = 0; i < 400; ++i)
    {
        auto rng = make_rng({11, 0}, i);
        const auto all = sample_ppp_disc(p.lambda_b, big_radius, {}, rng);
        std::vector<Point2> inner;
        for (const auto& q : all)
            if (norm(q) <= small.radius(p.lambda_b))
                inner.push_back(q);
        const auto s = typical_cell_from_points(inner, p, small);
        const auto ref = brute_force_cell({0, 0}, all, big_radius);
        if (s.truncated)
        {
            ++flagged;
            continue;
        }
        ++certified;
        EXPECT_TRUE(same_polygon(s.cell, ref, 1e-10)) << "replication " << i;
    }
    EXPECT_GT(certified, 350);
    (void)flagged;
}

TEST(Voronoi, NoStationsGivesTruncatedWindow)
{
    NetworkParams p;
    const auto s = typical_cell_from_points({}, p);
    EXPECT_TRUE(s.truncated);
}

TEST(ZeroCell, ContainsOriginAndNucleusIsNearest)
{
    NetworkParams p;
    for (std::uint64_t i = 0; i < 200; ++i)
    {
        auto rng = make_rng({12, 0}, i);
        const auto s = zero_cell(p, rng);
        EXPECT_EQ(s.kind, CellKind::zero);
        EXPECT_TRUE(s.cell.contains({0, 0}, 1e-9));
        EXPECT_TRUE(s.cell.contains(s.nucleus, 1e-9));
    }
    EXPECT_THROW(zero_cell_from_points({}, p), std::invalid_argument);
}

TEST(ZeroCell, EmptySamplesAreRedrawn)
{
    NetworkParams p;
    p.lambda_b = 1.0;
    // Tiny window: the station sample is often empty.
    const WindowConfig tiny{0.5, 0.1};
    int redraws = 0;
    for (std::uint64_t i = 0; i < 200; ++i)
    {
        auto rng = make_rng({13, 0}, i);
        redraws += zero_cell(p, rng, tiny).resamples;
    }
    EXPECT_GT(redraws, 0);
}

TEST(TypicalCell, MeanAreaAndPerimeter)
{
    const auto& rep = typical_geometry();
    EXPECT_EQ(rep.n_discarded_truncated, 0u);
    const auto a = mean_variance(rep.cell_areas);
    const auto u = mean_variance(rep.cell_perimeters);
    EXPECT_NEAR(a.mean, 1.0, 0.01);
    EXPECT_NEAR(u.mean, 4.0, 0.04);
}

TEST(TypicalCell, AreaLawMatchesFit)
{
    const auto& rep = typical_geometry();
    const double d = ks_distance(rep.cell_areas, [](double z) {
        return integral([](double x) { return area_pdf(1.0, x); }, 0.0, z);
    });
    EXPECT_LT(d, 0.01);
}

TEST(TypicalCell, PerimeterLawMatchesFit)
{
    const auto& rep = typical_geometry();
    const double d = ks_distance(rep.cell_perimeters, [](double u) {
        return integral([](double x) { return perimeter_pdf(1.0, x); }, 0.0, u);
    });
    EXPECT_LT(d, 0.01);
}

TEST(TypicalCell, TotalChordMean)
{
    // Line length per unit area times mean area: mu_l / lambda_b.
    const auto& rep = typical_geometry();
    EXPECT_NEAR(mean_variance(rep.total_chord).mean, 5.0, 0.1);
}

TEST(TypicalCell, NoLinesNoChords)
{
    NetworkParams p;
    auto rng = make_rng({14, 0});
    const auto s = typical_cell(p, rng);
    EXPECT_TRUE(cell_chords(s, {}).empty());
}

TEST(ZeroCell, MeanAreaIsAreaBiased)
{
    NetworkParams p;
    const int n = 20000;
    std::vector<double> areas;
    for (int i = 0; i < n; ++i)
    {
        auto rng = make_rng({15, 0}, i);
        const auto s = zero_cell(p, rng);
        if (!s.truncated)
            areas.push_back(s.cell.area());
    }
    const auto mv = mean_variance(areas);
    const double want = integral([](double z) { return z * zero_area_pdf(1.0, z); }, 0.0,
                                 std::numeric_limits<double>::infinity());
    EXPECT_NEAR(mv.mean, want, 3.0 * std::sqrt(mv.variance / areas.size()) + 0.005);
}
