#pragma once

// Densities of Poisson-Voronoi cell functionals: generalized-gamma fits of
// the typical-cell perimeter and area, the chord-length density of a line
// meeting the typical cell, and the length/area-biased versions used for the
// zero cell.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "plcp/numerics/quadrature.hpp"

namespace plcp {

// g(a, b, c, x) = a b^(c/a) / Gamma(c/a) x^(c-1) exp(-b x^a).
struct GeneralizedGamma
{
    double a = 1.0;
    double b = 1.0;
    double c = 1.0;

    double log_norm() const { return std::log(a) + (c / a) * std::log(b) - std::lgamma(c / a); }

    double pdf(double x) const
    {
        if (x < 0.0)
            return 0.0;
        if (x == 0.0)
        {
            if (c > 1.0)
                return 0.0;
            if (c == 1.0)
                return std::exp(log_norm());
            return std::numeric_limits<double>::infinity();
        }
        return std::exp(log_norm() + (c - 1.0) * std::log(x) - b * std::pow(x, a));
    }

    // E[X^k] = Gamma((c + k)/a) / (Gamma(c/a) b^(k/a)).
    double moment(double k) const
    {
        return std::exp(std::lgamma((c + k) / a) - std::lgamma(c / a) - (k / a) * std::log(b));
    }
};

// Fitted laws of the typical Poisson-Voronoi cell at unit intensity:
// perimeter U scaled by sqrt(lambda_b)/4, area Z scaled by lambda_b.
inline constexpr GeneralizedGamma kPerimeterLaw{2.33609, 2.97006, 7.58060};
inline constexpr GeneralizedGamma kAreaLaw{1.07950, 3.03226, 3.31122};

struct CellLaws
{
    GeneralizedGamma perimeter = kPerimeterLaw;
    GeneralizedGamma area = kAreaLaw;
    // Multiplies the perimeter density; 1 except in negative-control runs.
    double perimeter_norm_scale = 1.0;
};

// f_U(u) = (sqrt(lambda_b)/4) g(perimeter law, sqrt(lambda_b) u / 4).
inline double perimeter_pdf(double lambda_b, double u, const CellLaws& laws = {})
{
    const double s = std::sqrt(lambda_b) / 4.0;
    return laws.perimeter_norm_scale * s * laws.perimeter.pdf(s * u);
}

// f_Z(z) = lambda_b g(area law, lambda_b z).
inline double area_pdf(double lambda_b, double z, const CellLaws& laws = {})
{
    return lambda_b * laws.area.pdf(lambda_b * z);
}

// Area-biased (zero-cell) area: z f_Z(z) / E[Z]. E[Z] is taken from the
// fitted law itself (1.00006 / lambda_b), so the density integrates to one.
inline double zero_area_pdf(double lambda_b, double z, const CellLaws& laws = {})
{
    const double mean_area = laws.area.moment(1.0) / lambda_b;
    return z * area_pdf(lambda_b, z, laws) / mean_area;
}

// Radius of the disc with the typical cell's area: 2 pi r f_Z(pi r^2).
inline double typical_radius_pdf(double lambda_b, double r, const CellLaws& laws = {})
{
    return 2.0 * std::numbers::pi * r * area_pdf(lambda_b, std::numbers::pi * r * r, laws);
}

// Radius of the disc with the zero cell's area: 2 pi r f_Z'(pi r^2).
inline double zero_radius_pdf(double lambda_b, double r, const CellLaws& laws = {})
{
    return 2.0 * std::numbers::pi * r * zero_area_pdf(lambda_b, std::numbers::pi * r * r, laws);
}

// ---------------------------------------------------------------------------
// Chord-length kernel at unit intensity.
//
// Chord [0, c] on the x axis, nucleus at distance tau from the left endpoint
// at angle alpha. K is the area of the union of the two discs centred at the
// endpoints and passing through the nucleus. With d = c - tau cos(alpha),
// h = tau sin(alpha), r2^2 = d^2 + h^2 and phi the angle at the right
// endpoint:
//   K    = pi tau^2 - tau^2 (alpha - sin(2 alpha)/2) + r2^2 (pi - phi) + h d
//   dK   = 2 d (pi - phi) + 2 h
//   d2K  = 2 (pi - phi) + 2 d h / r2^2
struct ChordKernel
{
    double K = 0.0;
    double dK = 0.0;
    double d2K = 0.0;
};

inline ChordKernel chord_kernel(double tau, double alpha, double c)
{
    constexpr double pi = std::numbers::pi;
    const double ca = std::cos(alpha);
    const double d = c - tau * ca;
    const double h = tau * std::sin(alpha);
    const double r2sq = tau * tau - 2.0 * tau * c * ca + c * c;
    double phi = 0.0;
    double dh_over = 0.0;
    if (r2sq > 0.0 && c > 0.0)
    {
        const double arg = (2.0 * c * c - 2.0 * tau * c * ca) / (2.0 * c * std::sqrt(r2sq));
        phi = std::acos(std::clamp(arg, -1.0, 1.0));
        dh_over = d * h / r2sq;
    }
    else if (c == 0.0)
    {
        phi = pi - alpha;
    }
    ChordKernel k;
    k.K = 2.0 * pi * tau * tau - 2.0 * pi * tau * c * ca - tau * tau * (alpha - 0.5 * std::sin(2.0 * alpha))
          + pi * c * c - r2sq * (phi - 0.5 * std::sin(2.0 * phi));
    k.dK = 2.0 * d * (pi - phi) + 2.0 * h;
    k.d2K = 2.0 * (pi - phi) + 2.0 * dh_over;
    return k;
}

// f_C by direct double quadrature over tau in (0, inf), alpha in (0, pi):
//   (pi/2) lambda_b^(3/2) int int tau [ lambda_b dK^2 - d2K ] exp(-lambda_b K) dalpha dtau.
inline double chord_pdf(double lambda_b, double c,
                        const QuadratureConfig& cfg = QuadratureConfig{}.with_rel(1e-7).with_abs(1e-11))
{
    if (!(c > 0.0))
        throw std::invalid_argument("chord_pdf: c must be > 0");
    if (!(lambda_b > 0.0))
        throw std::invalid_argument("chord_pdf: lambda_b must be > 0");
    const auto inner_cfg = cfg.with_rel(cfg.rel_tol * 0.1).with_abs(cfg.abs_tol * 0.1);
    auto inner = [&](double tau) {
        if (tau == 0.0)
            return 0.0;
        auto f = [&](double alpha) {
            const auto k = chord_kernel(tau, alpha, c);
            return tau * (lambda_b * k.dK * k.dK - k.d2K) * std::exp(-lambda_b * k.K);
        };
        // The kernel bends sharply near alpha = 0 when tau ~ c.
        constexpr double split = 0.5;
        try
        {
            return integral(f, 0.0, split, inner_cfg) + integral(f, split, std::numbers::pi, inner_cfg);
        }
        catch (const QuadratureError& e)
        {
            std::ostringstream os;
            os << "chord_pdf: inner quadrature failed at c = " << c << ", tau = " << tau << ": " << e.what();
            throw QuadratureError(os.str(), e.best_estimate(), e.error_bound(), c);
        }
    };
    // exp(-lambda_b K) <= exp(-lambda_b pi tau^2) bounds the tail; the inner
    // integral has a kink at tau = c.
    const double head = integral(inner, 0.0, c, cfg);
    const double tail =
        integral(inner, c, std::numeric_limits<double>::infinity(), cfg.with_scale(0.5 / std::sqrt(lambda_b)));
    return 0.5 * std::numbers::pi * std::pow(lambda_b, 1.5) * (head + tail);
}

inline double chord_pdf_unit(double c) { return chord_pdf(1.0, c); }

// Tabulated f_C on scaled chord x = c sqrt(lambda_b). Log-spaced grid with
// monotone cubic (Fritsch-Carlson) interpolation; constant below the first
// node and zero beyond the last.
class ChordLawTable
{
public:
    static constexpr std::size_t kDefaultPoints = 512;
    static constexpr double kMin = 1e-3;
    static constexpr double kMax = 8.0;

    ChordLawTable() = default;

    ChordLawTable(std::vector<double> grid, std::vector<double> pdf)
        : x_(std::move(grid)), f_(std::move(pdf))
    {
        if (x_.size() < 2 || x_.size() != f_.size())
            throw std::invalid_argument("ChordLawTable: grid and pdf must have equal size >= 2");
        for (std::size_t i = 1; i < x_.size(); ++i)
            if (!(x_[i] > x_[i - 1]))
                throw std::invalid_argument("ChordLawTable: grid must be increasing");
        finish();
    }

    static ChordLawTable compute(std::size_t points = kDefaultPoints)
    {
        std::vector<double> grid(points), pdf(points);
        const double l0 = std::log(kMin), l1 = std::log(kMax);
        for (std::size_t i = 0; i < points; ++i)
        {
            grid[i] = std::exp(l0 + (l1 - l0) * static_cast<double>(i) / static_cast<double>(points - 1));
            pdf[i] = std::max(0.0, chord_pdf_unit(grid[i]));
        }
        return ChordLawTable(std::move(grid), std::move(pdf));
    }

    const std::vector<double>& grid() const { return x_; }
    const std::vector<double>& pdf_values() const { return f_; }
    const std::vector<double>& cdf_values() const { return F_; }
    double mean() const { return mean_; }
    double total_mass() const { return F_.back(); }

    double pdf(double x) const
    {
        if (x < 0.0 || x > x_.back())
            return 0.0;
        if (x <= x_.front())
            return f_.front();
        const std::size_t i = locate(x);
        const double h = x_[i + 1] - x_[i];
        const double t = (x - x_[i]) / h;
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * f_[i] + (t3 - 2 * t2 + t) * h * m_[i] + (-2 * t3 + 3 * t2) * f_[i + 1]
               + (t3 - t2) * h * m_[i + 1];
    }

    double cdf(double x) const
    {
        if (x <= 0.0)
            return 0.0;
        if (x <= x_.front())
            return f_.front() * x;
        if (x >= x_.back())
            return F_.back();
        const std::size_t i = locate(x);
        double acc = F_[i];
        // Four-point Gauss on the partial interval.
        static const GaussLegendre gl(4);
        acc += gl([&](double y) { return pdf(y); }, x_[i], x);
        return acc;
    }

    // Calls visit(x, w) for quadrature nodes x with weights w such that
    // sum w g(x) ~ int g(x) f_C(x) dx for smooth g.
    template <class Visit>
    void for_each_node(Visit&& visit) const
    {
        static const GaussLegendre gl(4);
        {
            const double h = 0.5 * x_.front();
            for (std::size_t k = 0; k < gl.nodes.size(); ++k)
                visit(h + h * gl.nodes[k], gl.weights[k] * h * f_.front());
        }
        for (std::size_t i = 0; i + 1 < x_.size(); ++i)
        {
            const double c = 0.5 * (x_[i] + x_[i + 1]), h = 0.5 * (x_[i + 1] - x_[i]);
            for (std::size_t k = 0; k < gl.nodes.size(); ++k)
            {
                const double x = c + h * gl.nodes[k];
                visit(x, gl.weights[k] * h * pdf(x));
            }
        }
    }

    // CSV with header `c_scaled,pdf,cdf`.
    void write_csv(std::ostream& os) const
    {
        os << "c_scaled,pdf,cdf\n";
        char buf[128];
        for (std::size_t i = 0; i < x_.size(); ++i)
        {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", x_[i], f_[i], F_[i]);
            os << buf;
        }
    }

    static ChordLawTable read_csv(std::istream& is)
    {
        std::string line;
        if (!std::getline(is, line) || line != "c_scaled,pdf,cdf")
            throw std::runtime_error("ChordLawTable: bad CSV header");
        std::vector<double> grid, pdf;
        while (std::getline(is, line))
        {
            if (line.empty())
                continue;
            std::istringstream ls(line);
            std::string a, b, c;
            if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',') || !std::getline(ls, c))
                throw std::runtime_error("ChordLawTable: malformed CSV row: " + line);
            grid.push_back(std::stod(a));
            pdf.push_back(std::stod(b));
        }
        return ChordLawTable(std::move(grid), std::move(pdf));
    }

private:
    std::size_t locate(double x) const
    {
        auto it = std::upper_bound(x_.begin(), x_.end(), x);
        std::size_t i = static_cast<std::size_t>(it - x_.begin());
        return std::min(i == 0 ? 0 : i - 1, x_.size() - 2);
    }

    void finish()
    {
        const std::size_t n = x_.size();
        // Fritsch-Carlson slopes.
        std::vector<double> delta(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i)
            delta[i] = (f_[i + 1] - f_[i]) / (x_[i + 1] - x_[i]);
        m_.assign(n, 0.0);
        m_[0] = delta[0];
        m_[n - 1] = delta[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i)
            m_[i] = (delta[i - 1] * delta[i] <= 0.0) ? 0.0 : 0.5 * (delta[i - 1] + delta[i]);
        for (std::size_t i = 0; i + 1 < n; ++i)
        {
            if (delta[i] == 0.0)
            {
                m_[i] = m_[i + 1] = 0.0;
                continue;
            }
            const double a = m_[i] / delta[i], b = m_[i + 1] / delta[i];
            const double s = a * a + b * b;
            if (s > 9.0)
            {
                const double t = 3.0 / std::sqrt(s);
                m_[i] = t * a * delta[i];
                m_[i + 1] = t * b * delta[i];
            }
        }
        // Cumulative integrals of the interpolant.
        static const GaussLegendre gl(4);
        F_.assign(n, 0.0);
        F_[0] = f_[0] * x_[0];
        double mean = 0.5 * f_[0] * x_[0] * x_[0];
        for (std::size_t i = 0; i + 1 < n; ++i)
        {
            F_[i + 1] = F_[i] + gl([&](double y) { return pdf(y); }, x_[i], x_[i + 1]);
            mean += gl([&](double y) { return y * pdf(y); }, x_[i], x_[i + 1]);
        }
        mean_ = mean;
    }

    std::vector<double> x_, f_, m_, F_;
    double mean_ = 0.0;
};

inline constexpr const char* kChordCacheEnv = "PLCP_LOAD_CACHE_DIR";
inline constexpr const char* kChordCacheFile = "chord_law_v1.csv";

// Process-wide unit-intensity chord table. Read from
// $PLCP_LOAD_CACHE_DIR/chord_law_v1.csv when present, otherwise computed and,
// if the variable is set, written there.
inline const ChordLawTable& default_chord_table()
{
    static const ChordLawTable table = [] {
        namespace fs = std::filesystem;
        const char* dir = std::getenv(kChordCacheEnv);
        if (dir && *dir)
        {
            const fs::path p = fs::path(dir) / kChordCacheFile;
            std::ifstream in(p);
            if (in)
            {
                try
                {
                    auto t = ChordLawTable::read_csv(in);
                    if (t.grid().size() == ChordLawTable::kDefaultPoints)
                        return t;
                }
                catch (const std::exception&)
                {
                    // Unreadable cache: recompute below.
                }
            }
        }
        auto t = ChordLawTable::compute();
        if (dir && *dir)
        {
            std::error_code ec;
            fs::create_directories(dir, ec);
            // Write-then-rename so concurrent readers never see a partial file.
            const fs::path final_path = fs::path(dir) / kChordCacheFile;
            fs::path tmp = final_path;
            tmp += ".tmp" + std::to_string(std::random_device{}());
            {
                std::ofstream out(tmp);
                if (out)
                    t.write_csv(out);
            }
            fs::rename(tmp, final_path, ec);
            if (ec)
                fs::remove(tmp, ec);
        }
        return t;
    }();
    return table;
}

// Chord law at intensity lambda_b: f_C(lambda_b, c) = sqrt(lambda_b) f_C(1, sqrt(lambda_b) c).
class ChordLaw
{
public:
    explicit ChordLaw(double lambda_b, const ChordLawTable& table = default_chord_table())
        : lambda_b_(lambda_b), scale_(std::sqrt(lambda_b)), table_(&table)
    {
        if (!(lambda_b > 0.0))
            throw std::invalid_argument("ChordLaw: lambda_b must be > 0");
    }

    double lambda_b() const { return lambda_b_; }
    const ChordLawTable& table() const { return *table_; }
    double pdf(double c) const { return scale_ * table_->pdf(scale_ * c); }
    double cdf(double c) const { return table_->cdf(scale_ * c); }
    double mean() const { return table_->mean() / scale_; }
    // Largest chord with nonzero tabulated density.
    double support_max() const { return table_->grid().back() / scale_; }

    // Length-biased chord through a fixed point: c f_C(c) / E[C].
    double biased_pdf(double c) const { return c * pdf(c) / mean(); }

    // visit(c, w): quadrature against f_C in physical units.
    template <class Visit>
    void for_each_node(Visit&& visit) const
    {
        table_->for_each_node([&](double x, double w) { visit(x / scale_, w); });
    }

private:
    double lambda_b_;
    double scale_;
    const ChordLawTable* table_;
};

// Closed-form length-biased density with the constant E[C] = pi / (4 sqrt(lambda_b)).
inline double zero_chord_pdf(const ChordLaw& law, double c)
{
    return 4.0 * std::sqrt(law.lambda_b()) / std::numbers::pi * c * law.pdf(c);
}

} // namespace plcp
