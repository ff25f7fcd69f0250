#pragma once

// Adaptive Gauss-Kronrod (10/21) quadrature on finite and semi-infinite
// intervals, scalar and vector valued.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace plcp {

struct QuadratureConfig
{
    double rel_tol = 1e-8;
    double abs_tol = 1e-12;
    int max_subdivisions = 400;
    // Scale L of the map x = L t / (1 - t), t in [0, 1), used when the
    // upper limit is +infinity.
    double infinite_tail_cut = 1.0;

    void validate() const
    {
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || max_subdivisions < 1 || !(infinite_tail_cut > 0.0))
            throw std::invalid_argument("QuadratureConfig: tolerances and tail scale must be positive, max_subdivisions >= 1");
    }

    QuadratureConfig with_rel(double r) const { auto c = *this; c.rel_tol = r; return c; }
    QuadratureConfig with_abs(double a) const { auto c = *this; c.abs_tol = a; return c; }
    QuadratureConfig with_scale(double s) const { auto c = *this; c.infinite_tail_cut = s; return c; }
};

struct QuadratureResult
{
    double value = 0.0;
    double error = 0.0;
    int subdivisions = 0;
    long evaluations = 0;
    bool converged = false;
};

class QuadratureError : public std::runtime_error
{
public:
    QuadratureError(const std::string& what, double best_estimate, double error_bound, double abscissa)
        : std::runtime_error(what), best_estimate_(best_estimate), error_bound_(error_bound), abscissa_(abscissa)
    {}

    double best_estimate() const noexcept { return best_estimate_; }
    double error_bound() const noexcept { return error_bound_; }
    // NaN unless the failure was a non-finite integrand value.
    double abscissa() const noexcept { return abscissa_; }

private:
    double best_estimate_;
    double error_bound_;
    double abscissa_;
};

namespace detail {

// QUADPACK qk21 abscissae / weights. Odd entries of kXgk are the Gauss nodes.
inline constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
inline constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

[[noreturn]] inline void throw_nonfinite(double x, double v)
{
    std::ostringstream os;
    os << "integrand returned non-finite value " << v << " at x = " << x;
    throw QuadratureError(os.str(), std::numeric_limits<double>::quiet_NaN(),
                          std::numeric_limits<double>::infinity(), x);
}

template <class F>
double checked_eval(const F& f, double x)
{
    const double v = static_cast<double>(f(x));
    if (!std::isfinite(v))
        throw_nonfinite(x, v);
    return v;
}

struct Panel
{
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk21(const F& f, double a, double b, long& evals)
{
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = checked_eval(f, centre);
    double resk = fc * kWgk[10];
    double resg = 0.0;
    for (int j = 0; j < 10; ++j) {
        const double dx = half * kXgk[j];
        const double f1 = checked_eval(f, centre - dx);
        const double f2 = checked_eval(f, centre + dx);
        resk += kWgk[j] * (f1 + f2);
        if (j % 2 == 1)
            resg += kWg[j / 2] * (f1 + f2);
    }
    evals += 21;
    return {a, b, resk * half, std::abs((resk - resg) * half)};
}

} // namespace detail

// Adaptive bisection driven by the panel with the largest error estimate.
// Does not throw on non-convergence; check `converged`.
template <class F>
QuadratureResult quad_finite(const F& f, double a, double b, const QuadratureConfig& cfg = {})
{
    cfg.validate();
    QuadratureResult out;
    if (a == b)
    {
        out.converged = true;
        return out;
    }
    std::priority_queue<detail::Panel> heap;
    auto first = detail::gk21(f, a, b, out.evaluations);
    double total = first.value;
    double err = first.error;
    heap.push(first);
    while (err > std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total)))
    {
        if (out.subdivisions >= cfg.max_subdivisions)
        {
            out.value = total;
            out.error = err;
            return out;
        }
        auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b))
        {
            // Interval exhausted at machine precision.
            heap.push(worst);
            out.value = total;
            out.error = err;
            return out;
        }
        auto left = detail::gk21(f, worst.a, mid, out.evaluations);
        auto right = detail::gk21(f, mid, worst.b, out.evaluations);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++out.subdivisions;
        // Re-sum occasionally to stop drift from the running updates.
        if (out.subdivisions % 64 == 0)
        {
            auto copy = heap;
            total = 0.0;
            err = 0.0;
            while (!copy.empty())
            {
                total += copy.top().value;
                err += copy.top().error;
                copy.pop();
            }
        }
    }
    out.value = total;
    out.error = err;
    out.converged = true;
    return out;
}

// Integral over [a, b]; b may be +infinity, in which case the tail is mapped
// onto a finite interval by x = a + L t / (1 - t).
template <class F>
QuadratureResult quad(const F& f, double a, double b, const QuadratureConfig& cfg = {})
{
    if (std::isinf(b) && b > 0)
    {
        const double scale = cfg.infinite_tail_cut;
        auto mapped = [&](double t) {
            if (t >= 1.0)
                return 0.0;
            const double one_minus = 1.0 - t;
            const double x = a + scale * t / one_minus;
            const double fx = static_cast<double>(f(x));
            if (!std::isfinite(fx))
                detail::throw_nonfinite(x, fx);
            // Integrands here decay faster than any power; guard 0 * inf.
            if (fx == 0.0)
                return 0.0;
            return fx * scale / (one_minus * one_minus);
        };
        return quad_finite(mapped, 0.0, 1.0, cfg);
    }
    return quad_finite(f, a, b, cfg);
}

// Throwing form: returns the converged result or raises QuadratureError with
// the best estimate and its error bound.
template <class F>
QuadratureResult integrate(const F& f, double a, double b, const QuadratureConfig& cfg = {})
{
    auto r = quad(f, a, b, cfg);
    if (!r.converged)
    {
        std::ostringstream os;
        os << "quadrature on [" << a << ", " << b << "] did not converge after " << r.subdivisions
           << " subdivisions: estimate " << r.value << " +/- " << r.error;
        throw QuadratureError(os.str(), r.value, r.error, std::numeric_limits<double>::quiet_NaN());
    }
    return r;
}

template <class F>
double integral(const F& f, double a, double b, const QuadratureConfig& cfg = {})
{
    return integrate(f, a, b, cfg).value;
}

// Vector-valued adaptive quadrature. `f(x, out)` fills a span of `dim`
// values; the error norm is the max over components, compared against
// max(abs_tol, rel_tol * max_k |I_k|).
template <class F>
std::vector<double> integrate_vector(const F& f, std::size_t dim, double a, double b, const QuadratureConfig& cfg = {})
{
    cfg.validate();
    const bool infinite = std::isinf(b) && b > 0;
    const double scale = cfg.infinite_tail_cut;
    const double lo = infinite ? 0.0 : a;
    const double hi = infinite ? 1.0 : b;

    std::vector<double> fx(dim);
    auto eval = [&](double t, std::vector<double>& out) {
        if (!infinite)
        {
            f(t, out);
            for (double v : out)
                if (!std::isfinite(v))
                    detail::throw_nonfinite(t, v);
            return;
        }
        if (t >= 1.0)
        {
            std::fill(out.begin(), out.end(), 0.0);
            return;
        }
        const double om = 1.0 - t;
        const double x = a + scale * t / om;
        f(x, out);
        const double jac = scale / (om * om);
        for (double& v : out)
        {
            if (!std::isfinite(v))
                detail::throw_nonfinite(x, v);
            v = (v == 0.0) ? 0.0 : v * jac;
        }
    };

    struct VPanel
    {
        double a, b, error;
        std::vector<double> value;
        bool operator<(const VPanel& o) const { return error < o.error; }
    };

    auto rule = [&](double pa, double pb) {
        VPanel p{pa, pb, 0.0, std::vector<double>(dim, 0.0)};
        std::vector<double> gauss(dim, 0.0);
        const double c = 0.5 * (pa + pb);
        const double h = 0.5 * (pb - pa);
        eval(c, fx);
        for (std::size_t k = 0; k < dim; ++k)
            p.value[k] = detail::kWgk[10] * fx[k];
        std::vector<double> f2(dim);
        for (int j = 0; j < 10; ++j)
        {
            const double dx = h * detail::kXgk[j];
            eval(c - dx, fx);
            eval(c + dx, f2);
            for (std::size_t k = 0; k < dim; ++k)
            {
                const double s = fx[k] + f2[k];
                p.value[k] += detail::kWgk[j] * s;
                if (j % 2 == 1)
                    gauss[k] += detail::kWg[j / 2] * s;
            }
        }
        for (std::size_t k = 0; k < dim; ++k)
        {
            p.error = std::max(p.error, std::abs((p.value[k] - gauss[k]) * h));
            p.value[k] *= h;
        }
        return p;
    };

    std::priority_queue<VPanel> heap;
    heap.push(rule(lo, hi));
    int subdivisions = 0;
    auto summarize = [&](std::vector<double>& total, double& err) {
        auto copy = heap;
        std::fill(total.begin(), total.end(), 0.0);
        err = 0.0;
        while (!copy.empty())
        {
            const auto& p = copy.top();
            for (std::size_t k = 0; k < dim; ++k)
                total[k] += p.value[k];
            err += p.error;
            copy.pop();
        }
    };
    std::vector<double> total(dim);
    double err = 0.0;
    summarize(total, err);
    for (;;)
    {
        double scale_ref = 0.0;
        for (double v : total)
            scale_ref = std::max(scale_ref, std::abs(v));
        if (err <= std::max(cfg.abs_tol, cfg.rel_tol * scale_ref))
            return total;
        if (subdivisions >= cfg.max_subdivisions)
        {
            std::ostringstream os;
            os << "vector quadrature did not converge after " << subdivisions << " subdivisions, error " << err;
            throw QuadratureError(os.str(), scale_ref, err, std::numeric_limits<double>::quiet_NaN());
        }
        auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        heap.push(rule(worst.a, mid));
        heap.push(rule(mid, worst.b));
        ++subdivisions;
        summarize(total, err);
    }
}

// Fixed-order Gauss-Legendre rule on [-1, 1], nodes by Newton iteration.
struct GaussLegendre
{
    std::vector<double> nodes;
    std::vector<double> weights;

    explicit GaussLegendre(int n)
        : nodes(n), weights(n)
    {
        if (n < 1)
            throw std::invalid_argument("GaussLegendre: order must be >= 1");
        const double pi = std::acos(-1.0);
        for (int i = 0; i < (n + 1) / 2; ++i)
        {
            double x = std::cos(pi * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it)
            {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= n; ++k)
                {
                    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                if (n == 1)
                {
                    p1 = x;
                    p0 = 1.0;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16)
                    break;
            }
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            const double w = 2.0 / ((1.0 - x * x) * dp * dp);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
    }

    template <class F>
    double operator()(const F& f, double a, double b) const
    {
        const double c = 0.5 * (a + b), h = 0.5 * (b - a);
        double s = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            s += weights[i] * f(c + h * nodes[i]);
        return s * h;
    }
};

} // namespace plcp
