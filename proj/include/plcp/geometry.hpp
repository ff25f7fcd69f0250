#pragma once

// Planar primitives: points, lines in (rho, theta) form, convex polygons,
// half-plane clipping and line/polygon chords. Units are km throughout.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace plcp {

struct Point2
{
    double x = 0.0;
    double y = 0.0;

    friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
    friend bool operator==(const Point2&, const Point2&) = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }

// The line {p : p . (cos theta, sin theta) = rho}; (rho cos theta, rho sin theta)
// is the foot of the perpendicular from the origin.
struct Line
{
    double rho = 0.0;
    double theta = 0.0;

    Line() = default;
    Line(double rho_, double theta_)
        : rho(rho_), theta(theta_)
    {
        normalize();
    }

    // Line through two distinct points.
    static Line through(Point2 a, Point2 b)
    {
        const Point2 d = b - a;
        const double len = norm(d);
        if (!(len > 0.0))
            throw std::invalid_argument("Line::through: coincident points");
        // Unit normal (-dy, dx)/len, signed offset a . n.
        const double th = std::atan2(d.x, -d.y);
        const double r = a.x * std::cos(th) + a.y * std::sin(th);
        return Line(r, th);
    }

    Point2 normal() const { return {std::cos(theta), std::sin(theta)}; }
    Point2 direction() const { return {-std::sin(theta), std::cos(theta)}; }
    Point2 foot() const { return rho * normal(); }
    double signed_distance(Point2 p) const { return dot(p, normal()) - rho; }

private:
    // rho >= 0, theta in [0, 2 pi).
    void normalize()
    {
        constexpr double two_pi = 2.0 * std::numbers::pi;
        if (rho < 0.0)
        {
            rho = -rho;
            theta += std::numbers::pi;
        }
        theta = std::fmod(theta, two_pi);
        if (theta < 0.0)
            theta += two_pi;
        if (theta >= two_pi)
            theta = 0.0;
    }
};

// Closed half-plane {p : n . p <= offset}.
struct HalfPlane
{
    Point2 n;
    double offset = 0.0;

    double eval(Point2 p) const { return dot(n, p) - offset; }

    // Points at least as close to `keep` as to `other`.
    static HalfPlane bisector(Point2 keep, Point2 other)
    {
        const Point2 n = other - keep;
        return {n, 0.5 * (dot(other, other) - dot(keep, keep))};
    }
};

inline constexpr double kVertexDedupTol = 1e-12;

class ConvexPolygon
{
public:
    ConvexPolygon() = default;

    // Validates: >= 3 distinct vertices, counter-clockwise, convex.
    static ConvexPolygon from_vertices(std::vector<Point2> v)
    {
        ConvexPolygon p;
        p.v_ = std::move(v);
        p.dedup();
        if (p.v_.size() < 3)
            throw std::invalid_argument("ConvexPolygon: need at least 3 distinct vertices");
        const std::size_t n = p.v_.size();
        for (std::size_t i = 0; i < n; ++i)
        {
            const Point2 a = p.v_[i], b = p.v_[(i + 1) % n], c = p.v_[(i + 2) % n];
            if (cross(b - a, c - b) < -1e-12 * (1.0 + norm(b - a) * norm(c - b)))
                throw std::invalid_argument("ConvexPolygon: vertices not convex / counter-clockwise");
        }
        if (p.area() <= 0.0)
            throw std::invalid_argument("ConvexPolygon: zero area");
        return p;
    }

    static ConvexPolygon rectangle(double x0, double y0, double x1, double y1)
    {
        return from_vertices({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
    }

    static ConvexPolygon regular(int n, double radius, Point2 centre = {}, double phase = 0.0)
    {
        std::vector<Point2> v;
        v.reserve(n);
        for (int i = 0; i < n; ++i)
        {
            const double a = phase + 2.0 * std::numbers::pi * i / n;
            v.push_back({centre.x + radius * std::cos(a), centre.y + radius * std::sin(a)});
        }
        return from_vertices(std::move(v));
    }

    const std::vector<Point2>& vertices() const { return v_; }
    std::size_t size() const { return v_.size(); }
    bool empty() const { return v_.size() < 3; }

    double area() const
    {
        double s = 0.0;
        const std::size_t n = v_.size();
        for (std::size_t i = 0; i < n; ++i)
            s += cross(v_[i], v_[(i + 1) % n]);
        return 0.5 * s;
    }

    double perimeter() const
    {
        double s = 0.0;
        const std::size_t n = v_.size();
        for (std::size_t i = 0; i < n; ++i)
            s += distance(v_[i], v_[(i + 1) % n]);
        return s;
    }

    // Largest distance from p to a vertex.
    double max_distance_from(Point2 p) const
    {
        double r = 0.0;
        for (const auto& q : v_)
            r = std::max(r, distance(p, q));
        return r;
    }

    bool contains(Point2 p, double tol = 1e-12) const
    {
        const std::size_t n = v_.size();
        if (n < 3)
            return false;
        for (std::size_t i = 0; i < n; ++i)
        {
            const Point2 a = v_[i], b = v_[(i + 1) % n];
            if (cross(b - a, p - a) < -tol * norm(b - a))
                return false;
        }
        return true;
    }

    // Intersection with a closed half-plane (Sutherland-Hodgman, one edge).
    ConvexPolygon clipped(const HalfPlane& h) const
    {
        const std::size_t n = v_.size();
        ConvexPolygon out;
        if (n < 3)
            return out;
        out.v_.reserve(n + 1);
        for (std::size_t i = 0; i < n; ++i)
        {
            const Point2 a = v_[i], b = v_[(i + 1) % n];
            const double fa = h.eval(a), fb = h.eval(b);
            if (fa <= 0.0)
                out.v_.push_back(a);
            if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0))
            {
                const double t = fa / (fa - fb);
                out.v_.push_back(a + t * (b - a));
            }
        }
        out.dedup();
        if (out.v_.size() < 3 || !(out.area() > 0.0))
            out.v_.clear();
        return out;
    }

private:
    void dedup()
    {
        if (v_.empty())
            return;
        std::vector<Point2> w;
        w.reserve(v_.size());
        for (const auto& p : v_)
            if (w.empty() || distance(w.back(), p) > kVertexDedupTol)
                w.push_back(p);
        while (w.size() > 1 && distance(w.front(), w.back()) <= kVertexDedupTol)
            w.pop_back();
        v_.swap(w);
    }

    std::vector<Point2> v_;
};

inline double area(const ConvexPolygon& p) { return p.area(); }
inline double perimeter(const ConvexPolygon& p) { return p.perimeter(); }

// Half-plane bounded by `boundary`: the side containing the origin when
// keep_origin_side, else the opposite side. For rho = 0 the "origin side" is
// {p : p . n <= 0}. An empty result has no vertices.
inline ConvexPolygon clip_halfplane(const ConvexPolygon& poly, const Line& boundary, bool keep_origin_side)
{
    const Point2 n = boundary.normal();
    HalfPlane h = keep_origin_side ? HalfPlane{n, boundary.rho} : HalfPlane{-1.0 * n, -boundary.rho};
    return poly.clipped(h);
}

struct Segment
{
    Point2 a;
    Point2 b;
    double length() const { return distance(a, b); }
};

// poly intersected with line, or nullopt when they do not meet in a segment
// of positive length.
inline std::optional<Segment> chord(const ConvexPolygon& poly, const Line& line)
{
    const auto& v = poly.vertices();
    const std::size_t n = v.size();
    if (n < 3)
        return std::nullopt;
    const Point2 p0 = line.foot();
    const Point2 d = line.direction();
    double t_lo = -std::numeric_limits<double>::infinity();
    double t_hi = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
    {
        const Point2 e = v[(i + 1) % n] - v[i];
        // Inside: cross(e, p0 + t d - v_i) >= 0  <=>  c0 + t c1 >= 0.
        const double c0 = cross(e, p0 - v[i]);
        const double c1 = cross(e, d);
        if (c1 == 0.0)
        {
            if (c0 < 0.0)
                return std::nullopt;
            continue;
        }
        const double t = -c0 / c1;
        if (c1 > 0.0)
            t_lo = std::max(t_lo, t);
        else
            t_hi = std::min(t_hi, t);
        if (t_lo >= t_hi)
            return std::nullopt;
    }
    return Segment{p0 + t_lo * d, p0 + t_hi * d};
}

inline double chord_length(const ConvexPolygon& poly, const Line& line)
{
    const auto s = chord(poly, line);
    return s ? (s->length()) : 0.0;
}

} // namespace plcp
