#pragma once

// Laplace transforms of the total chord length in the typical and zero cell,
// and the resulting load PMFs.
//
// Every PMF is computed by the same pattern: conditioned on the mixing
// variable (typical-cell perimeter u, disc radius r), the transform of W is
// exp(h(s)); the scaled derivatives (-lambda_v)^m / m! d^m/ds^m exp(h) at
// s = lambda_v are produced by exp_composition_taylor from the scaled
// derivatives of h, then integrated against the mixing density.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "plcp/laws.hpp"
#include "plcp/numerics/exp_derivatives.hpp"
#include "plcp/numerics/quadrature.hpp"
#include "plcp/processes.hpp"

namespace plcp {

// Truncated law on {0, ..., m_max} with the remaining mass kept explicitly.
struct Pmf
{
    std::vector<double> probs;
    double tail_mass = 0.0;

    std::size_t m_max() const { return probs.empty() ? 0 : probs.size() - 1; }

    double at(std::size_t m) const { return m < probs.size() ? probs[m] : 0.0; }

    double mean() const
    {
        double s = 0.0;
        for (std::size_t m = 0; m < probs.size(); ++m)
            s += static_cast<double>(m) * probs[m];
        return s;
    }

    double variance() const
    {
        const double mu = mean();
        double s = 0.0, mass = 0.0;
        for (std::size_t m = 0; m < probs.size(); ++m)
        {
            s += (static_cast<double>(m) - mu) * (static_cast<double>(m) - mu) * probs[m];
            mass += probs[m];
        }
        return mass > 0.0 ? s / mass : 0.0;
    }

    double pgf(double z) const
    {
        double s = 0.0;
        for (std::size_t m = probs.size(); m-- > 0;)
            s = s * z + probs[m];
        return s;
    }

    // Sets tail_mass = 1 - sum(probs); small negative rounding is clamped.
    void close(double tol = 1e-9)
    {
        double s = 0.0;
        for (double p : probs)
            s += p;
        tail_mass = 1.0 - s;
        if (tail_mass < 0.0 && tail_mass >= -tol)
            tail_mass = 0.0;
    }
};

enum class TypicalMethod
{
    exact, // perimeter mixing with the chord-length law
    disc   // equal-area disc approximation
};

// Numerical knobs shared by the transforms and PMFs.
struct LoadConfig
{
    QuadratureConfig quad = QuadratureConfig{}.with_rel(1e-10).with_abs(1e-13);
    // Gauss-Legendre order for the inner rho-integral after rho = r sin(t).
    int inner_order = 64;
    CellLaws laws{};
};

namespace detail {

inline void check_pmf(const Pmf& pmf, const char* what, double worst_abscissa)
{
    for (std::size_t m = 0; m < pmf.probs.size(); ++m)
        if (pmf.probs[m] < -1e-9 || !std::isfinite(pmf.probs[m]))
        {
            std::ostringstream os;
            os << what << ": invalid probability " << pmf.probs[m] << " at m = " << m
               << " (worst conditioning abscissa " << worst_abscissa << ")";
            throw NumericalError(os.str());
        }
    if (pmf.tail_mass < -1e-9)
    {
        std::ostringstream os;
        os << what << ": probabilities sum above one, tail mass " << pmf.tail_mass;
        throw NumericalError(os.str());
    }
}

inline const GaussLegendre& inner_rule(int order)
{
    static thread_local int cached_order = -1;
    static thread_local GaussLegendre rule(1);
    if (cached_order != order)
    {
        rule = GaussLegendre(order);
        cached_order = order;
    }
    return rule;
}

// Scaled derivatives a_k = (-x)^k / k! h^(k)(x), k = 0..kmax, of the disc
// exponent h(s) = -2 pi lambda_l int_0^r 1 - exp(-2 s sqrt(r^2 - rho^2)) drho
// at s = x. With rho = r sin t:
//   a_0 = -2 pi lambda_l r (1 - q_0),  a_k = 2 pi lambda_l r q_k,
//   q_k = int_0^{pi/2} Poisson_k(2 x r cos t) cos t dt.
inline void disc_exponent_coeffs(double lambda_l, double r, double x, std::size_t kmax, int order,
                                 std::span<const double> log_fact, std::vector<double>& a)
{
    a.assign(kmax + 1, 0.0);
    if (r <= 0.0)
        return;
    const auto& gl = inner_rule(order);
    const double half = 0.25 * std::numbers::pi;
    std::vector<double> pk(kmax + 1);
    for (std::size_t i = 0; i < gl.nodes.size(); ++i)
    {
        const double t = half + half * gl.nodes[i];
        const double w = gl.weights[i] * half * std::cos(t);
        poisson_pmf(2.0 * x * r * std::cos(t), pk, log_fact);
        for (std::size_t k = 0; k <= kmax; ++k)
            a[k] += w * pk[k];
    }
    const double rate = 2.0 * std::numbers::pi * lambda_l * r;
    // sum_k q_k = 1, so 1 - q_0 = sum_{k>=1} q_k up to truncation.
    a[0] = -rate * (1.0 - a[0]);
    for (std::size_t k = 1; k <= kmax; ++k)
        a[k] *= rate;
}

// Mixed compound-Poisson PMF over a disc radius with density `radius_pdf`.
template <class RadiusPdf>
std::vector<double> disc_mixture(const NetworkParams& params, std::size_t m_max, const RadiusPdf& radius_pdf,
                                 const LoadConfig& cfg)
{
    const auto lf = log_factorials(m_max);
    const double lambda_l = params.lambda_l();
    auto integrand = [&](double r, std::vector<double>& out) {
        const double w = radius_pdf(r);
        if (w == 0.0)
        {
            std::fill(out.begin(), out.end(), 0.0);
            return;
        }
        std::vector<double> a;
        disc_exponent_coeffs(lambda_l, r, params.lambda_v, m_max, cfg.inner_order, lf, a);
        const auto b = exp_composition_taylor(a);
        for (std::size_t m = 0; m <= m_max; ++m)
            out[m] = w * b[m];
    };
    return integrate_vector(integrand, m_max + 1, 0.0, std::numeric_limits<double>::infinity(),
                            cfg.quad.with_scale(1.0 / std::sqrt(params.lambda_b)));
}

} // namespace detail

// L_C(s) = E exp(-s C) under the chord law.
inline double laplace_chord(const ChordLaw& law, double s)
{
    double acc = 0.0, mass = 0.0;
    law.for_each_node([&](double c, double w) {
        acc += w * std::exp(-s * c);
        mass += w;
    });
    return acc / mass;
}

// int_0^inf exp[-lambda_l u (1 - L_C(s))] f_U(u) du.
inline double laplace_W_typical_exact(const NetworkParams& params, double s, const LoadConfig& cfg = {},
                                      const ChordLaw* law = nullptr)
{
    params.validate();
    if (s < 0.0)
        throw std::invalid_argument("laplace_W_typical_exact: s must be >= 0");
    if (s == 0.0)
        return 1.0;
    const ChordLaw local(params.lambda_b);
    const ChordLaw& chord = law ? *law : local;
    const double lc = laplace_chord(chord, s);
    const double rate = params.lambda_l() * (1.0 - lc);
    return integral([&](double u) { return std::exp(-rate * u) * perimeter_pdf(params.lambda_b, u, cfg.laws); }, 0.0,
                    std::numeric_limits<double>::infinity(), cfg.quad.with_scale(4.0 / std::sqrt(params.lambda_b)));
}

namespace detail {

// exp[-2 pi lambda_l int_0^r 1 - exp(-2 s sqrt(r^2 - rho^2)) drho]
inline double disc_conditional_laplace(double lambda_l, double r, double s, int order)
{
    const auto& gl = inner_rule(order);
    const double half = 0.25 * std::numbers::pi;
    double acc = 0.0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i)
    {
        const double t = half + half * gl.nodes[i];
        const double ct = std::cos(t);
        acc += gl.weights[i] * half * (-std::expm1(-2.0 * s * r * ct)) * r * ct;
    }
    return std::exp(-2.0 * std::numbers::pi * lambda_l * acc);
}

} // namespace detail

// Equal-area disc approximation of the typical-cell transform.
inline double laplace_W_typical_disc(const NetworkParams& params, double s, const LoadConfig& cfg = {})
{
    params.validate();
    if (s < 0.0)
        throw std::invalid_argument("laplace_W_typical_disc: s must be >= 0");
    if (s == 0.0)
        return 1.0;
    const double lambda_l = params.lambda_l();
    return integral(
        [&](double r) {
            const double w = typical_radius_pdf(params.lambda_b, r, cfg.laws);
            return w == 0.0 ? 0.0 : w * detail::disc_conditional_laplace(lambda_l, r, s, cfg.inner_order);
        },
        0.0, std::numeric_limits<double>::infinity(), cfg.quad.with_scale(1.0 / std::sqrt(params.lambda_b)));
}

// L_{C0}(s): chord of the typical line through the origin, length-biased.
inline double laplace_C0(const ChordLaw& law, double s)
{
    double acc = 0.0, mass = 0.0;
    law.for_each_node([&](double c, double w) {
        acc += w * c * std::exp(-s * c);
        mass += w * c;
    });
    return acc / mass;
}

// L_{C1}(s): other lines through the zero cell, disc of the zero-cell area.
inline double laplace_C1(const NetworkParams& params, double s, const LoadConfig& cfg = {})
{
    if (s == 0.0)
        return 1.0;
    const double lambda_l = params.lambda_l();
    return integral(
        [&](double r) {
            const double w = zero_radius_pdf(params.lambda_b, r, cfg.laws);
            return w == 0.0 ? 0.0 : w * detail::disc_conditional_laplace(lambda_l, r, s, cfg.inner_order);
        },
        0.0, std::numeric_limits<double>::infinity(), cfg.quad.with_scale(1.0 / std::sqrt(params.lambda_b)));
}

// Zero cell: L_W(s) = L_{C0}(s) L_{C1}(s).
inline double laplace_W_zero(const NetworkParams& params, double s, const LoadConfig& cfg = {},
                             const ChordLaw* law = nullptr)
{
    params.validate();
    if (s < 0.0)
        throw std::invalid_argument("laplace_W_zero: s must be >= 0");
    if (s == 0.0)
        return 1.0;
    const ChordLaw local(params.lambda_b);
    const ChordLaw& chord = law ? *law : local;
    return laplace_C0(chord, s) * laplace_C1(params, s, cfg);
}

// q_k = int Poisson_k(x c) weight(c) f_C(c) dc / int weight f_C, k = 0..kmax.
template <class Weight>
std::vector<double> chord_count_law(const ChordLaw& law, double x, std::size_t kmax, const Weight& weight)
{
    const auto lf = log_factorials(kmax);
    std::vector<double> q(kmax + 1, 0.0), pk(kmax + 1);
    double mass = 0.0;
    law.for_each_node([&](double c, double w) {
        const double ww = w * weight(c);
        if (ww == 0.0)
            return;
        poisson_pmf(x * c, pk, lf);
        for (std::size_t k = 0; k <= kmax; ++k)
            q[k] += ww * pk[k];
        mass += ww;
    });
    for (double& v : q)
        v /= mass;
    return q;
}

// PMF of the load on the typical base station.
inline Pmf pmf_typical(const NetworkParams& params, std::size_t m_max, TypicalMethod method,
                       const LoadConfig& cfg = {}, const ChordLaw* law = nullptr)
{
    params.validate();
    Pmf out;
    if (params.lambda_v == 0.0)
    {
        out.probs = {1.0};
        out.tail_mass = 0.0;
        return out;
    }
    if (method == TypicalMethod::disc)
    {
        out.probs = detail::disc_mixture(params, m_max,
                                         [&](double r) { return typical_radius_pdf(params.lambda_b, r, cfg.laws); }, cfg);
        out.close();
        detail::check_pmf(out, "pmf_typical(disc)", std::numeric_limits<double>::quiet_NaN());
        return out;
    }

    const ChordLaw local(params.lambda_b);
    const ChordLaw& chord = law ? *law : local;
    // Scaled h-derivatives are proportional to u: a_k = lambda_l u q_k (k >= 1),
    // a_0 = -lambda_l u (1 - q_0).
    const auto q = chord_count_law(chord, params.lambda_v, m_max, [](double) { return 1.0; });
    const double lambda_l = params.lambda_l();
    std::vector<double> a(m_max + 1);
    auto integrand = [&](double u, std::vector<double>& res) {
        const double w = perimeter_pdf(params.lambda_b, u, cfg.laws);
        if (w == 0.0)
        {
            std::fill(res.begin(), res.end(), 0.0);
            return;
        }
        a[0] = -lambda_l * u * (1.0 - q[0]);
        for (std::size_t k = 1; k <= m_max; ++k)
            a[k] = lambda_l * u * q[k];
        const auto b = exp_composition_taylor(a);
        for (std::size_t m = 0; m <= m_max; ++m)
            res[m] = w * b[m];
    };
    out.probs = integrate_vector(integrand, m_max + 1, 0.0, std::numeric_limits<double>::infinity(),
                                 cfg.quad.with_scale(4.0 / std::sqrt(params.lambda_b)));
    out.close();
    detail::check_pmf(out, "pmf_typical(exact)", std::numeric_limits<double>::quiet_NaN());
    return out;
}

// PMF of the load M on the tagged base station, counting the typical user:
// probs[0] = 0 and probs[m + 1] comes from derivative order m. The exponent
// carries an extra -s c0 for the typical line, so the conditional law is the
// convolution of Poisson(lambda_v C0) with the disc compound law.
inline Pmf pmf_tagged(const NetworkParams& params, std::size_t m_max, const LoadConfig& cfg = {},
                      const ChordLaw* law = nullptr)
{
    params.validate();
    if (m_max < 1)
        throw std::invalid_argument("pmf_tagged: m_max must be >= 1");
    Pmf out;
    out.probs.assign(m_max + 1, 0.0);
    if (params.lambda_v == 0.0)
    {
        out.probs[1] = 1.0;
        out.tail_mass = 0.0;
        return out;
    }
    const std::size_t order = m_max - 1;
    const ChordLaw local(params.lambda_b);
    const ChordLaw& chord = law ? *law : local;
    const auto typical_line = chord_count_law(chord, params.lambda_v, order, [](double c) { return c; });
    const auto others = detail::disc_mixture(
        params, order, [&](double r) { return zero_radius_pdf(params.lambda_b, r, cfg.laws); }, cfg);
    for (std::size_t m = 0; m <= order; ++m)
    {
        double acc = 0.0;
        for (std::size_t j = 0; j <= m; ++j)
            acc += typical_line[j] * others[m - j];
        out.probs[m + 1] = acc;
    }
    out.close();
    detail::check_pmf(out, "pmf_tagged", std::numeric_limits<double>::quiet_NaN());
    return out;
}

} // namespace plcp
