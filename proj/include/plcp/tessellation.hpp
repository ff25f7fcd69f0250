#pragma once

// Focal Voronoi cells of the base-station PPP: the typical cell (Palm
// version, station at the origin) and the zero cell (cell covering the
// origin), built by bisector clipping inside a finite simulation window.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "plcp/geometry.hpp"
#include "plcp/processes.hpp"

namespace plcp {

enum class CellKind
{
    typical,
    zero
};

struct CellSample
{
    ConvexPolygon cell;
    Point2 nucleus;
    CellKind kind = CellKind::typical;
    // The cell could not be certified exact inside the window; callers
    // discard such replications.
    bool truncated = false;
    // Number of empty base-station samples redrawn (zero cell only).
    int resamples = 0;
};

// Window of radius k / sqrt(lambda_b) centred on the focal point, with a
// guard band of guard_k / sqrt(lambda_b) inside its rim.
struct WindowConfig
{
    double k = 12.0;
    double guard_k = 2.0;

    double radius(double lambda_b) const { return k / std::sqrt(lambda_b); }
    double guard(double lambda_b) const { return guard_k / std::sqrt(lambda_b); }
};

// Voronoi cell of `nucleus` with respect to `others`, all of which were
// sampled in the disc B(window_centre, window_radius).
//
// Neighbours are processed nearest first; once the next one is farther than
// twice the cell's circumradius about the nucleus no further bisector can cut
// the cell, so the loop stops. The result is exact when that disc of radius
// 2 * circumradius lies inside the window and no vertex enters the guard band.
inline CellSample build_voronoi_cell(Point2 nucleus, std::span<const Point2> others, Point2 window_centre,
                                     double window_radius, double guard)
{
    std::vector<std::size_t> order(others.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> d2(others.size());
    for (std::size_t i = 0; i < others.size(); ++i)
    {
        const Point2 q = others[i] - nucleus;
        d2[i] = dot(q, q);
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return d2[a] < d2[b] || (d2[a] == d2[b] && a < b);
    });

    const double w = window_radius;
    ConvexPolygon cell = ConvexPolygon::rectangle(window_centre.x - w, window_centre.y - w, window_centre.x + w,
                                                  window_centre.y + w);
    double circum = cell.max_distance_from(nucleus);
    for (std::size_t idx : order)
    {
        if (d2[idx] == 0.0)
            continue;
        if (std::sqrt(d2[idx]) > 2.0 * circum)
            break;
        cell = cell.clipped(HalfPlane::bisector(nucleus, others[idx]));
        if (cell.empty())
            throw std::logic_error("build_voronoi_cell: nucleus cell became empty");
        circum = cell.max_distance_from(nucleus);
    }

    CellSample out;
    out.nucleus = nucleus;
    bool truncated = distance(nucleus, window_centre) + 2.0 * circum >= window_radius;
    for (const auto& v : cell.vertices())
        if (distance(v, window_centre) >= window_radius - guard)
            truncated = true;
    out.truncated = truncated;
    out.cell = std::move(cell);
    return out;
}

inline CellSample typical_cell_from_points(std::span<const Point2> stations, const NetworkParams& params,
                                           const WindowConfig& window = {})
{
    auto s = build_voronoi_cell({0.0, 0.0}, stations, {0.0, 0.0}, window.radius(params.lambda_b),
                                window.guard(params.lambda_b));
    s.kind = CellKind::typical;
    return s;
}

// Typical cell: a station added at the origin to an independent PPP.
inline CellSample typical_cell(const NetworkParams& params, Rng& rng, const WindowConfig& window = {})
{
    const auto pts = sample_ppp_disc(params.lambda_b, window.radius(params.lambda_b), {0.0, 0.0}, rng);
    return typical_cell_from_points(pts, params, window);
}

// Index of the station nearest the origin; stations must be non-empty.
inline std::size_t nearest_to_origin(std::span<const Point2> stations)
{
    std::size_t best = 0;
    double best_d = dot(stations[0], stations[0]);
    for (std::size_t i = 1; i < stations.size(); ++i)
    {
        const double d = dot(stations[i], stations[i]);
        if (d < best_d)
        {
            best_d = d;
            best = i;
        }
    }
    return best;
}

inline CellSample zero_cell_from_points(std::span<const Point2> stations, const NetworkParams& params,
                                        const WindowConfig& window = {})
{
    if (stations.empty())
        throw std::invalid_argument("zero_cell_from_points: no stations");
    const std::size_t tagged = nearest_to_origin(stations);
    std::vector<Point2> others;
    others.reserve(stations.size() - 1);
    for (std::size_t i = 0; i < stations.size(); ++i)
        if (i != tagged)
            others.push_back(stations[i]);
    auto s = build_voronoi_cell(stations[tagged], others, {0.0, 0.0}, window.radius(params.lambda_b),
                                window.guard(params.lambda_b));
    s.kind = CellKind::zero;
    return s;
}

// Zero cell: the cell of the station nearest the origin. An empty station
// sample is redrawn and counted in `resamples`.
inline CellSample zero_cell(const NetworkParams& params, Rng& rng, const WindowConfig& window = {})
{
    int redraws = 0;
    for (;;)
    {
        const auto pts = sample_ppp_disc(params.lambda_b, window.radius(params.lambda_b), {0.0, 0.0}, rng);
        if (pts.empty())
        {
            ++redraws;
            continue;
        }
        auto s = zero_cell_from_points(pts, params, window);
        s.resamples = redraws;
        return s;
    }
}

// Chord lengths of `lines` through the cell; non-intersecting lines omitted.
inline std::vector<double> cell_chords(const CellSample& cell, std::span<const Line> lines)
{
    std::vector<double> out;
    for (const auto& l : lines)
    {
        const double c = chord_length(cell.cell, l);
        if (c > 0.0)
            out.push_back(c);
    }
    return out;
}

} // namespace plcp
