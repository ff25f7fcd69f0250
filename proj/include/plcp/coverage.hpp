#pragma once

// SIR coverage of the typical receiver (interference limited, Rayleigh
// fading, nearest-station association) and its rate coverage under equal
// bandwidth sharing among the tagged station's load.

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "plcp/load.hpp"
#include "plcp/numerics/quadrature.hpp"

namespace plcp {

struct RateQuery
{
    double rate_threshold_T = 0.0; // bits/s
    double bandwidth_B = 10e6;     // Hz
    double pathloss_alpha = 4.0;
    std::size_t m_max = 80;

    void validate() const
    {
        if (!(rate_threshold_T >= 0.0))
            throw std::invalid_argument("RateQuery: T must be >= 0");
        if (!(bandwidth_B > 0.0))
            throw std::invalid_argument("RateQuery: B must be > 0");
        if (!(pathloss_alpha > 2.0))
            throw std::invalid_argument("RateQuery: alpha must be > 2");
        if (m_max < 1)
            throw std::invalid_argument("RateQuery: m_max must be >= 1");
    }
};

// int_1^inf t / (beta + t^alpha) dt, the interference integral after y = r t.
inline double interference_integral(double alpha, double beta, const QuadratureConfig& cfg = {})
{
    const double scale = std::max(1.0, std::pow(beta, 1.0 / alpha));
    return integral([&](double t) { return t / (beta + std::pow(t, alpha)); }, 1.0,
                    std::numeric_limits<double>::infinity(), cfg.with_scale(scale));
}

// P(SIR > beta) = 2 pi lambda_b int_0^inf r exp[-lambda_b pi r^2
//                  - int_r^inf 2 pi lambda_b beta y / (beta + r^-alpha y^alpha) dy] dr
inline double coverage_probability(double lambda_b, double alpha, double beta,
                                   const QuadratureConfig& cfg = QuadratureConfig{}.with_rel(1e-10).with_abs(1e-14))
{
    if (!(lambda_b > 0.0) || !(alpha > 2.0))
        throw std::invalid_argument("coverage_probability: lambda_b > 0 and alpha > 2 required");
    if (!(beta >= 0.0))
        throw std::invalid_argument("coverage_probability: beta must be >= 0");
    if (beta == 0.0)
        return 1.0;
    if (std::isinf(beta))
        return 0.0;
    // Inner integral is r^2 times a constant under y = r t.
    const double inner_unit = 2.0 * std::numbers::pi * lambda_b * beta * interference_integral(alpha, beta, cfg);
    if (!std::isfinite(inner_unit))
        return 0.0;
    const double pl = std::numbers::pi * lambda_b;
    auto f = [&](double r) {
        const double r2 = r * r;
        return 2.0 * pl * r * std::exp(-pl * r2 - inner_unit * r2);
    };
    const double spread = 1.0 / std::sqrt(pl + inner_unit);
    return integral(f, 0.0, std::numeric_limits<double>::infinity(), cfg.with_scale(spread));
}

// gamma = 2^(T m / B) - 1, +inf once it overflows.
inline double sir_threshold_for_rate(double T, std::size_t m, double B)
{
    const double e = T * static_cast<double>(m) / B;
    if (e * std::numbers::ln2 > 700.0)
        return std::numeric_limits<double>::infinity();
    return std::expm1(e * std::numbers::ln2);
}

struct RateCoverageResult
{
    double value = 0.0;
    // Mass of the load law beyond m_max; bounds the truncation error.
    double tail_mass = 0.0;
    std::string warning;
};

// R_c = sum_m P(M = m) P(SIR > 2^(T m / B) - 1), load and SIR independent.
inline RateCoverageResult rate_coverage(const Pmf& tagged_load, double lambda_b, const RateQuery& query)
{
    query.validate();
    RateCoverageResult out;
    for (std::size_t m = 1; m < tagged_load.probs.size(); ++m)
    {
        const double p = tagged_load.probs[m];
        if (p == 0.0)
            continue;
        const double gamma = sir_threshold_for_rate(query.rate_threshold_T, m, query.bandwidth_B);
        out.value += p * coverage_probability(lambda_b, query.pathloss_alpha, gamma);
    }
    out.tail_mass = tagged_load.tail_mass;
    if (out.tail_mass > 1e-3)
        out.warning = "load PMF tail mass " + std::to_string(out.tail_mass) + " exceeds 1e-3; raise m_max";
    return out;
}

inline RateCoverageResult rate_coverage(const NetworkParams& params, const RateQuery& query, const LoadConfig& cfg = {})
{
    params.validate();
    const auto pmf = pmf_tagged(params, query.m_max, cfg);
    return rate_coverage(pmf, params.lambda_b, query);
}

} // namespace plcp
