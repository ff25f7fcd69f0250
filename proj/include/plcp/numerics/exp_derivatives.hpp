#pragma once

// Derivatives of G(s) = exp(h(s)) from the derivatives of h, by the
// recurrence G^(m) = sum_{k=0}^{m-1} C(m-1, k) h^(k+1) G^(m-1-k).

#include <cmath>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace plcp {

class NumericalError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// h_derivs = [h'(s), ..., h^(m)(s)], g0 = exp(h(s)).
// Returns [G(s), G'(s), ..., G^(m)(s)].
inline std::vector<double> exp_composition_derivatives(std::span<const double> h_derivs, double g0)
{
    if (!(g0 > 0.0) || !std::isfinite(g0))
        throw std::invalid_argument("exp_composition_derivatives: g0 must be positive and finite");
    for (double v : h_derivs)
        if (!std::isfinite(v))
            throw std::invalid_argument("exp_composition_derivatives: non-finite derivative of h");

    const std::size_t m = h_derivs.size();
    std::vector<double> g(m + 1, 0.0);
    g[0] = g0;
    // Pascal row C(n-1, .) built incrementally.
    std::vector<double> binom{1.0};
    for (std::size_t n = 1; n <= m; ++n)
    {
        if (n > 1)
        {
            std::vector<double> next(n, 1.0);
            for (std::size_t k = 1; k + 1 < n; ++k)
                next[k] = binom[k - 1] + binom[k];
            binom.swap(next);
        }
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            acc += binom[k] * h_derivs[k] * g[n - 1 - k];
        if (!std::isfinite(acc))
        {
            std::ostringstream os;
            os << "exp_composition_derivatives: overflow at order " << n
               << "; evaluate in scaled (Taylor-coefficient / log) form instead";
            throw NumericalError(os.str());
        }
        g[n] = acc;
    }
    return g;
}

// Same recurrence on scaled coefficients. With a_k = x^k h^(k)(s) / k! and
// b_m = x^m G^(m)(s) / m! it reads
//     m b_m = sum_{j=1}^{m} j a_j b_{m-j},   b_0 = exp(a_0),
// which keeps the factorials out of the arithmetic. `a` holds a_0..a_m.
// When every a_j (j >= 1) is nonnegative, all terms are nonnegative and the
// recursion is free of cancellation.
inline std::vector<double> exp_composition_taylor(std::span<const double> a)
{
    if (a.empty())
        throw std::invalid_argument("exp_composition_taylor: need at least a_0");
    const std::size_t m = a.size() - 1;
    std::vector<double> b(m + 1, 0.0);
    b[0] = std::exp(a[0]);
    for (std::size_t n = 1; n <= m; ++n)
    {
        double acc = 0.0;
        for (std::size_t j = 1; j <= n; ++j)
            acc += static_cast<double>(j) * a[j] * b[n - j];
        b[n] = acc / static_cast<double>(n);
        if (!std::isfinite(b[n]))
        {
            std::ostringstream os;
            os << "exp_composition_taylor: non-finite coefficient at order " << n;
            throw NumericalError(os.str());
        }
    }
    return b;
}

// log(k!) for k = 0..n.
inline std::vector<double> log_factorials(std::size_t n)
{
    std::vector<double> out(n + 1, 0.0);
    for (std::size_t k = 1; k <= n; ++k)
        out[k] = out[k - 1] + std::log(static_cast<double>(k));
    return out;
}

// Poisson probabilities P(N = k), k = 0..kmax, for mean mu, computed in the
// log domain.
inline void poisson_pmf(double mu, std::span<double> out, std::span<const double> log_fact)
{
    if (mu <= 0.0)
    {
        for (std::size_t k = 0; k < out.size(); ++k)
            out[k] = (k == 0) ? 1.0 : 0.0;
        return;
    }
    const double lmu = std::log(mu);
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = std::exp(static_cast<double>(k) * lmu - mu - log_fact[k]);
}

} // namespace plcp
