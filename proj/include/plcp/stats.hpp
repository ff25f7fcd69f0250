#pragma once

// Distances between laws used by the validation suites.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "plcp/load.hpp"

namespace plcp {

// Total variation distance. Entries past the shorter vector are lumped with
// its tail mass so both laws live on {0..K} plus one overflow atom.
inline double total_variation(const Pmf& a, const Pmf& b)
{
    const std::size_t k = std::min(a.probs.size(), b.probs.size());
    double s = 0.0;
    for (std::size_t m = 0; m < k; ++m)
        s += std::abs(a.probs[m] - b.probs[m]);
    double ta = a.tail_mass, tb = b.tail_mass;
    for (std::size_t m = k; m < a.probs.size(); ++m)
        ta += a.probs[m];
    for (std::size_t m = k; m < b.probs.size(); ++m)
        tb += b.probs[m];
    s += std::abs(ta - tb);
    return 0.5 * s;
}

// Kolmogorov-Smirnov distance between a sample and a continuous CDF.
template <class Cdf>
double ks_distance(std::span<const double> samples, const Cdf& cdf)
{
    std::vector<double> x(samples.begin(), samples.end());
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        const double f = cdf(x[i]);
        d = std::max({d, std::abs(f - static_cast<double>(i) / n), std::abs(static_cast<double>(i + 1) / n - f)});
    }
    return d;
}

// Asymptotic Kolmogorov p-value for statistic d from n samples.
inline double ks_pvalue(double d, std::size_t n)
{
    const double sn = std::sqrt(static_cast<double>(n));
    const double lam = (sn + 0.12 + 0.11 / sn) * d;
    if (lam < 1e-3)
        return 1.0;
    double sum = 0.0;
    for (int j = 1; j <= 100; ++j)
    {
        const double term = 2.0 * ((j % 2) ? 1.0 : -1.0) * std::exp(-2.0 * j * j * lam * lam);
        sum += term;
        if (std::abs(term) < 1e-12)
            break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

struct MeanVar
{
    double mean = 0.0;
    double variance = 0.0;
};

inline MeanVar mean_variance(std::span<const double> x)
{
    MeanVar mv;
    if (x.empty())
        return mv;
    for (double v : x)
        mv.mean += v;
    mv.mean /= static_cast<double>(x.size());
    if (x.size() > 1)
    {
        for (double v : x)
            mv.variance += (v - mv.mean) * (v - mv.mean);
        mv.variance /= static_cast<double>(x.size() - 1);
    }
    return mv;
}

} // namespace plcp
