#pragma once

// Network parameters and seeded samplers for the base-station PPP, the
// Poisson line process and the Cox process of vehicles on its lines.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "plcp/geometry.hpp"

namespace plcp {

// Densities in km^-2 (base stations), km^-1 (line density, vehicles per line),
// bandwidth in Hz.
struct NetworkParams
{
    double lambda_b = 1.0;
    double mu_l = 5.0;
    double lambda_v = 2.0;
    double alpha_pl = 4.0;
    double bandwidth_B = 10e6;
    double tx_power_Pt = 1.0;

    // Intensity of the line process in (rho, theta) space.
    double lambda_l() const { return mu_l / std::numbers::pi; }

    void validate() const
    {
        auto bad = [](const char* what) { throw std::invalid_argument(std::string("NetworkParams: ") + what); };
        if (!(lambda_b > 0.0) || !std::isfinite(lambda_b))
            bad("lambda_b must be > 0");
        if (!(mu_l > 0.0) || !std::isfinite(mu_l))
            bad("mu_l must be > 0");
        if (!(lambda_v >= 0.0) || !std::isfinite(lambda_v))
            bad("lambda_v must be >= 0");
        if (!(alpha_pl > 2.0) || !std::isfinite(alpha_pl))
            bad("alpha must be > 2");
        if (!(bandwidth_B > 0.0))
            bad("bandwidth must be > 0");
        if (!(tx_power_Pt > 0.0))
            bad("transmit power must be > 0");
    }
};

struct RngSeed
{
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
};

using Rng = std::mt19937_64;

// Independent generator for one replication. (seed, stream, replication)
// fully determines the state, so results do not depend on scheduling.
inline Rng make_rng(RngSeed s, std::uint64_t replication = 0)
{
    auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
    auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
    std::seed_seq seq{lo(s.seed), hi(s.seed), lo(s.stream_id), hi(s.stream_id), lo(replication), hi(replication)};
    return Rng(seq);
}

inline double uniform01(Rng& rng)
{
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline std::uint64_t poisson_draw(double mean, Rng& rng)
{
    if (!(mean > 0.0))
        return 0;
    return std::poisson_distribution<std::uint64_t>(mean)(rng);
}

inline std::vector<Point2> sample_ppp_disc(double density, double radius, Point2 centre, Rng& rng)
{
    if (density < 0.0 || !(radius > 0.0))
        throw std::invalid_argument("sample_ppp_disc: density >= 0 and radius > 0 required");
    const auto n = poisson_draw(density * std::numbers::pi * radius * radius, rng);
    std::vector<Point2> pts;
    pts.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i)
    {
        const double r = radius * std::sqrt(uniform01(rng));
        const double a = 2.0 * std::numbers::pi * uniform01(rng);
        pts.push_back({centre.x + r * std::cos(a), centre.y + r * std::sin(a)});
    }
    return pts;
}

// Lines of the PLP meeting the disc B(o, radius): Poisson(2 pi lambda_l radius)
// of them, rho ~ U(0, radius), theta ~ U[0, 2 pi).
inline std::vector<Line> sample_plp_disc(const NetworkParams& params, double radius, Rng& rng)
{
    if (!(radius > 0.0))
        throw std::invalid_argument("sample_plp_disc: radius must be > 0");
    const auto n = poisson_draw(2.0 * std::numbers::pi * params.lambda_l() * radius, rng);
    std::vector<Line> lines;
    lines.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i)
    {
        const double rho = radius * uniform01(rng);
        const double theta = 2.0 * std::numbers::pi * uniform01(rng);
        lines.emplace_back(rho, theta);
    }
    return lines;
}

// 1D PPP of density lambda_v on poly intersected with line.
inline std::vector<Point2> sample_vehicles_on_chord(const Line& line, const ConvexPolygon& poly, double lambda_v, Rng& rng)
{
    if (lambda_v < 0.0)
        throw std::invalid_argument("sample_vehicles_on_chord: lambda_v must be >= 0");
    const auto seg = chord(poly, line);
    std::vector<Point2> pts;
    if (!seg)
        return pts;
    const auto n = poisson_draw(lambda_v * seg->length(), rng);
    pts.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i)
    {
        const double t = uniform01(rng);
        pts.push_back(seg->a + t * (seg->b - seg->a));
    }
    return pts;
}

// The typical line of the Palm version of the PLCP: through the origin with
// uniform orientation.
inline Line sample_palm_plcp_line(Rng& rng)
{
    return Line(0.0, 2.0 * std::numbers::pi * uniform01(rng));
}

} // namespace plcp
