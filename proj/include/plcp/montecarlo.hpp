#pragma once

// Monte-Carlo estimators for the typical-cell load, the tagged-cell load and
// the rate coverage of the typical receiver. Replication i always draws from
// make_rng(seed, i) and results are reduced in index order, so a report is a
// function of (params, n, seed) only, whatever the thread count.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <functional>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include "plcp/coverage.hpp"
#include "plcp/load.hpp"
#include "plcp/processes.hpp"
#include "plcp/stats.hpp"
#include "plcp/tessellation.hpp"

namespace plcp {

struct SimOptions
{
    // 0 selects std::thread::hardware_concurrency().
    unsigned threads = 0;
    WindowConfig window{};
    bool keep_chords = false;
    bool keep_geometry = false;
};

struct SimReport
{
    std::size_t n_replications = 0;
    std::size_t n_discarded_truncated = 0;
    std::size_t n_resampled_empty = 0;
    Pmf empirical_pmf;
    double mean = 0.0;
    double variance = 0.0;
    RngSeed seed{};

    // Per accepted replication, in replication order.
    std::vector<std::uint64_t> replication;
    std::vector<std::uint64_t> loads;
    std::vector<double> total_chord;
    // Optional payloads.
    std::vector<double> chord_samples;
    std::vector<double> cell_areas;
    std::vector<double> cell_perimeters;
    std::vector<double> sir_samples;
    std::vector<double> rate_samples;

    // Fraction of accepted replications with rate > T.
    double rate_coverage(double T) const
    {
        if (rate_samples.empty())
            return 0.0;
        std::size_t k = 0;
        for (double r : rate_samples)
            if (r > T)
                ++k;
        return static_cast<double>(k) / static_cast<double>(rate_samples.size());
    }

    double sir_coverage(double beta) const
    {
        if (sir_samples.empty())
            return 0.0;
        std::size_t k = 0;
        for (double s : sir_samples)
            if (s > beta)
                ++k;
        return static_cast<double>(k) / static_cast<double>(sir_samples.size());
    }
};

inline unsigned resolve_threads(unsigned requested)
{
    if (requested > 0)
        return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

// Runs body(i) for i in [0, n) on `threads` workers; out[i] = body(i).
template <class Record, class Body>
std::vector<Record> run_replications(std::size_t n, unsigned threads, const Body& body)
{
    std::vector<Record> out(n);
    threads = std::max(1u, std::min<unsigned>(resolve_threads(threads), static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (threads == 1)
    {
        for (std::size_t i = 0; i < n; ++i)
            out[i] = body(i);
        return out;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            try
            {
                for (std::size_t i = t; i < n; i += threads)
                    out[i] = body(i);
            }
            catch (...)
            {
                errors[t] = std::current_exception();
            }
        });
    for (auto& th : pool)
        th.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    return out;
}

namespace detail {

struct LoadRecord
{
    bool truncated = false;
    int resamples = 0;
    std::uint64_t load = 0;
    double total_chord = 0.0;
    double area = 0.0;
    double perimeter = 0.0;
    double sir = 0.0;
    double rate = 0.0;
    std::vector<double> chords;
};

inline void finish_report(SimReport& rep, const std::vector<LoadRecord>& recs, const SimOptions& opts, bool with_rate)
{
    rep.n_replications = recs.size();
    std::vector<double> counts;
    for (std::size_t i = 0; i < recs.size(); ++i)
    {
        const auto& r = recs[i];
        rep.n_resampled_empty += static_cast<std::size_t>(r.resamples);
        if (r.truncated)
        {
            ++rep.n_discarded_truncated;
            continue;
        }
        rep.replication.push_back(i);
        rep.loads.push_back(r.load);
        rep.total_chord.push_back(r.total_chord);
        if (opts.keep_chords)
            rep.chord_samples.insert(rep.chord_samples.end(), r.chords.begin(), r.chords.end());
        if (opts.keep_geometry)
        {
            rep.cell_areas.push_back(r.area);
            rep.cell_perimeters.push_back(r.perimeter);
        }
        if (with_rate)
        {
            rep.sir_samples.push_back(r.sir);
            rep.rate_samples.push_back(r.rate);
        }
        counts.push_back(static_cast<double>(r.load));
    }
    std::uint64_t max_load = 0;
    for (auto l : rep.loads)
        max_load = std::max(max_load, l);
    rep.empirical_pmf.probs.assign(rep.loads.empty() ? 0 : max_load + 1, 0.0);
    std::vector<std::uint64_t> hist(rep.empirical_pmf.probs.size(), 0);
    for (auto l : rep.loads)
        ++hist[l];
    const double total = static_cast<double>(rep.loads.size());
    for (std::size_t m = 0; m < hist.size(); ++m)
        rep.empirical_pmf.probs[m] = static_cast<double>(hist[m]) / total;
    rep.empirical_pmf.tail_mass = 0.0;
    const auto mv = mean_variance(counts);
    rep.mean = mv.mean;
    rep.variance = mv.variance;
}

// Users on every chord: sum of Poisson(lambda_v c) draws.
inline std::uint64_t users_on_chords(std::span<const double> chords, double lambda_v, Rng& rng)
{
    std::uint64_t k = 0;
    for (double c : chords)
        k += poisson_draw(lambda_v * c, rng);
    return k;
}

inline double sum_of(std::span<const double> v)
{
    double s = 0.0;
    for (double x : v)
        s += x;
    return s;
}

} // namespace detail

// Load on the typical station: typical cell, PLP lines over the window disc,
// Poisson(lambda_v c) users per chord.
inline SimReport simulate_typical_load(const NetworkParams& params, std::size_t n, RngSeed seed, const SimOptions& opts = {})
{
    params.validate();
    if (n < 1)
        throw std::invalid_argument("simulate_typical_load: n must be >= 1");
    const double radius = opts.window.radius(params.lambda_b);
    auto recs = run_replications<detail::LoadRecord>(n, opts.threads, [&](std::size_t i) {
        auto rng = make_rng(seed, i);
        detail::LoadRecord r;
        const auto cell = typical_cell(params, rng, opts.window);
        const auto lines = sample_plp_disc(params, radius, rng);
        r.truncated = cell.truncated;
        r.chords = cell_chords(cell, lines);
        r.total_chord = detail::sum_of(r.chords);
        r.load = detail::users_on_chords(r.chords, params.lambda_v, rng);
        r.area = cell.cell.area();
        r.perimeter = cell.cell.perimeter();
        if (!opts.keep_chords)
            r.chords.clear();
        return r;
    });
    SimReport rep;
    rep.seed = seed;
    detail::finish_report(rep, recs, opts, false);
    return rep;
}

namespace detail {

// Zero cell plus PLP lines and the typical line through the origin. The
// load counts the typical user itself.
inline LoadRecord tagged_replication(const NetworkParams& params, std::span<const Point2> stations, double radius,
                                     const WindowConfig& window, Rng& rng, CellSample& cell_out)
{
    LoadRecord r;
    cell_out = zero_cell_from_points(stations, params, window);
    auto lines = sample_plp_disc(params, radius, rng);
    lines.push_back(sample_palm_plcp_line(rng));
    r.truncated = cell_out.truncated;
    r.chords = cell_chords(cell_out, lines);
    r.total_chord = sum_of(r.chords);
    r.load = 1 + users_on_chords(r.chords, params.lambda_v, rng);
    r.area = cell_out.cell.area();
    r.perimeter = cell_out.cell.perimeter();
    return r;
}

inline std::vector<Point2> nonempty_stations(const NetworkParams& params, double radius, Rng& rng, int& redraws)
{
    for (;;)
    {
        auto pts = sample_ppp_disc(params.lambda_b, radius, {0.0, 0.0}, rng);
        if (!pts.empty())
            return pts;
        ++redraws;
    }
}

} // namespace detail

// Load on the station serving a user at the origin.
inline SimReport simulate_tagged_load(const NetworkParams& params, std::size_t n, RngSeed seed, const SimOptions& opts = {})
{
    params.validate();
    if (n < 1)
        throw std::invalid_argument("simulate_tagged_load: n must be >= 1");
    const double radius = opts.window.radius(params.lambda_b);
    auto recs = run_replications<detail::LoadRecord>(n, opts.threads, [&](std::size_t i) {
        auto rng = make_rng(seed, i);
        int redraws = 0;
        const auto stations = detail::nonempty_stations(params, radius, rng, redraws);
        CellSample cell;
        auto r = detail::tagged_replication(params, stations, radius, opts.window, rng, cell);
        r.resamples = redraws;
        if (!opts.keep_chords)
            r.chords.clear();
        return r;
    });
    SimReport rep;
    rep.seed = seed;
    detail::finish_report(rep, recs, opts, false);
    return rep;
}

// Interference window for the SIR: 15 / sqrt(lambda_b).
inline constexpr double kInterferenceWindowK = 15.0;

// Rate of the typical receiver, with load and SIR taken from the same
// replication: R = (B / M) log2(1 + SIR).
inline SimReport simulate_rate_coverage(const NetworkParams& params, const RateQuery& query, std::size_t n, RngSeed seed,
                                        const SimOptions& opts = {})
{
    params.validate();
    query.validate();
    if (n < 1)
        throw std::invalid_argument("simulate_rate_coverage: n must be >= 1");
    WindowConfig window = opts.window;
    window.k = std::max(window.k, kInterferenceWindowK);
    const double radius = window.radius(params.lambda_b);
    const double alpha = query.pathloss_alpha;
    auto recs = run_replications<detail::LoadRecord>(n, opts.threads, [&](std::size_t i) {
        auto rng = make_rng(seed, i);
        int redraws = 0;
        const auto stations = detail::nonempty_stations(params, radius, rng, redraws);
        CellSample cell;
        auto r = detail::tagged_replication(params, stations, radius, window, rng, cell);
        r.resamples = redraws;
        if (!opts.keep_chords)
            r.chords.clear();
        const std::size_t serving = nearest_to_origin(stations);
        std::exponential_distribution<double> fading(1.0);
        double signal = 0.0, interference = 0.0;
        for (std::size_t j = 0; j < stations.size(); ++j)
        {
            const double g = fading(rng) * std::pow(norm(stations[j]), -alpha);
            if (j == serving)
                signal = g;
            else
                interference += g;
        }
        r.sir = interference > 0.0 ? signal / interference : std::numeric_limits<double>::infinity();
        r.rate = query.bandwidth_B / static_cast<double>(r.load) * std::log2(1.0 + r.sir);
        return r;
    });
    SimReport rep;
    rep.seed = seed;
    detail::finish_report(rep, recs, opts, true);
    return rep;
}

// Raw dumps: `replication,load` and `replication,sir_db,load,rate_bps`.
inline void write_load_csv(const SimReport& rep, std::ostream& os)
{
    os << "replication,load\n";
    for (std::size_t i = 0; i < rep.loads.size(); ++i)
        os << rep.replication[i] << ',' << rep.loads[i] << '\n';
}

inline void write_rate_csv(const SimReport& rep, std::ostream& os)
{
    os << "replication,sir_db,load,rate_bps\n";
    char buf[160];
    for (std::size_t i = 0; i < rep.rate_samples.size(); ++i)
    {
        std::snprintf(buf, sizeof buf, "%llu,%.10g,%llu,%.10g\n", static_cast<unsigned long long>(rep.replication[i]),
                      10.0 * std::log10(rep.sir_samples[i]), static_cast<unsigned long long>(rep.loads[i]),
                      rep.rate_samples[i]);
        os << buf;
    }
}

} // namespace plcp
