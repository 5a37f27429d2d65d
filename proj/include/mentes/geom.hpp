#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "mentes/error.hpp"

namespace mentes::geom {

/// Separation below this many units counts as touching, not overlapping.
inline constexpr double kContactTol = 1e-9;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(Vec2 o) {
        x += o.x;
        y += o.y;
        return *this;
    }
    constexpr bool operator==(const Vec2&) const = default;
};

using Point2 = Vec2;

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }
constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }
constexpr Vec2 perp(Vec2 v) { return {-v.y, v.x}; }

inline Vec2 normalized(Vec2 v) {
    const double n = norm(v);
    if (!(n > 0.0)) fail(ErrorKind::DegenerateGeometry, "cannot normalize a zero vector");
    return v / n;
}

inline double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }

/// cos/sin that are exact at multiples of 90 degrees.
inline Vec2 unit_from_degrees(double deg) {
    double r = std::fmod(deg, 360.0);
    if (r < 0) r += 360.0;
    if (r == 0.0) return {1.0, 0.0};
    if (r == 90.0) return {0.0, 1.0};
    if (r == 180.0) return {-1.0, 0.0};
    if (r == 270.0) return {0.0, -1.0};
    const double rad = deg2rad(deg);
    return {std::cos(rad), std::sin(rad)};
}

/// Rotate `v` anticlockwise by `deg` degrees.
inline Vec2 rotate(Vec2 v, double deg) {
    const Vec2 u = unit_from_degrees(deg);
    return {u.x * v.x - u.y * v.y, u.y * v.x + u.x * v.y};
}

inline Point2 rotate_about(Point2 p, Point2 pivot, double deg) { return pivot + rotate(p - pivot, deg); }

/// Round onto a 2^-30 grid so that vertices produced by different rotation
/// paths that should coincide compare equal.
inline Point2 snap(Point2 p) {
    constexpr double k = 1073741824.0;
    return {std::round(p.x * k) / k, std::round(p.y * k) / k};
}

/// Wrap an angle into [-180, 180).
inline double wrap_degrees(double deg) {
    double r = std::fmod(deg + 180.0, 360.0);
    if (r < 0) r += 360.0;
    return r - 180.0;
}

// ---------------------------------------------------------------------------
// Shapes

struct AxisRect {
    Point2 lo;
    Point2 hi;

    double width() const { return hi.x - lo.x; }
    double height() const { return hi.y - lo.y; }
    Point2 center() const { return (lo + hi) * 0.5; }
    bool contains(Point2 p, double tol = kContactTol) const {
        return p.x >= lo.x - tol && p.x <= hi.x + tol && p.y >= lo.y - tol && p.y <= hi.y + tol;
    }
    std::array<Point2, 4> corners() const { return {lo, Point2{hi.x, lo.y}, hi, Point2{lo.x, hi.y}}; }
};

struct OrientedRect {
    Point2 center;
    double length = 0.0;  // along the heading
    double width = 0.0;
    double heading = 0.0;  // degrees

    Vec2 forward() const { return unit_from_degrees(heading); }
    double area() const { return length * width; }

    /// Counter-clockwise, starting at the rear-right corner.
    std::array<Point2, 4> corners() const {
        const Vec2 f = forward() * (length / 2.0);
        const Vec2 s = perp(forward()) * (width / 2.0);
        return {center - f - s, center + f - s, center + f + s, center - f + s};
    }

    OrientedRect translated(Vec2 d) const { return {center + d, length, width, heading}; }
    OrientedRect scaled(double factor) const { return {center, length * factor, width * factor, heading}; }
};

struct Polygon {
    std::vector<Point2> vertices;  // counter-clockwise

    double signed_area() const {
        double a = 0.0;
        for (std::size_t i = 0, n = vertices.size(); i < n; ++i) a += cross(vertices[i], vertices[(i + 1) % n]);
        return a / 2.0;
    }
    double area() const { return std::abs(signed_area()); }

    Point2 centroid() const {
        const double a = signed_area();
        if (std::abs(a) < 1e-15) fail(ErrorKind::DegenerateGeometry, "centroid of zero-area polygon");
        Vec2 c;
        for (std::size_t i = 0, n = vertices.size(); i < n; ++i) {
            const Point2 p = vertices[i], q = vertices[(i + 1) % n];
            c += (p + q) * cross(p, q);
        }
        return c / (6.0 * a);
    }

    Polygon translated(Vec2 d) const {
        Polygon out{vertices};
        for (auto& v : out.vertices) v += d;
        return out;
    }

    static Polygon from(const OrientedRect& r) {
        const auto c = r.corners();
        return Polygon{{c.begin(), c.end()}};
    }
    static Polygon from(const AxisRect& r) {
        const auto c = r.corners();
        return Polygon{{c.begin(), c.end()}};
    }
};

using Shape = std::variant<OrientedRect, Polygon>;

struct Line2 {
    Point2 point;
    Vec2 direction;  // unit

    static Line2 through(Point2 a, Point2 b) { return {a, normalized(b - a)}; }
    /// >0 left of the direction, <0 right, 0 on the line.
    double side(Point2 p) const { return cross(direction, p - point); }
};

inline Point2 reflect(Point2 p, const Line2& line) {
    const Vec2 d = line.direction;
    const Vec2 rel = p - line.point;
    const Vec2 along = d * dot(rel, d);
    return line.point + along * 2.0 - rel;
}

// ---------------------------------------------------------------------------
// Transforms

/// Rotation (degrees, anticlockwise) followed by translation.
struct RigidTransform {
    double rotation = 0.0;
    Vec2 translation;

    Point2 apply(Point2 p) const { return rotate(p, rotation) + translation; }

    /// (*this) after `inner`: x -> this(inner(x)).
    RigidTransform compose(const RigidTransform& inner) const {
        return {rotation + inner.rotation, rotate(inner.translation, rotation) + translation};
    }

    RigidTransform inverse() const { return {-rotation, -rotate(translation, -rotation)}; }

    static RigidTransform about(Point2 pivot, double deg) { return {deg, pivot - rotate(pivot, deg)}; }
};

/// Distance-preserving affine map, possibly orientation-reversing.
struct Isometry {
    // Row-major 2x2 linear part.
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;
    Vec2 t;

    Point2 apply(Point2 p) const { return {a * p.x + b * p.y + t.x, c * p.x + d * p.y + t.y}; }

    Isometry compose(const Isometry& inner) const {
        Isometry r;
        r.a = a * inner.a + b * inner.c;
        r.b = a * inner.b + b * inner.d;
        r.c = c * inner.a + d * inner.c;
        r.d = c * inner.b + d * inner.d;
        r.t = apply(inner.t);
        return r;
    }

    bool reverses_orientation() const { return a * d - b * c < 0; }

    static Isometry reflection(const Line2& line) {
        const Vec2 u = line.direction;
        Isometry r;
        r.a = 2 * u.x * u.x - 1;
        r.b = 2 * u.x * u.y;
        r.c = 2 * u.x * u.y;
        r.d = 2 * u.y * u.y - 1;
        const Point2 origin_image = reflect({0, 0}, line);
        r.t = origin_image;
        return r;
    }
};

// ---------------------------------------------------------------------------
// Convex decomposition

using ConvexPiece = std::vector<Point2>;  // counter-clockwise

inline bool is_convex(std::span<const Point2> pts) {
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (cross(pts[(i + 1) % n] - pts[i], pts[(i + 2) % n] - pts[(i + 1) % n]) < -1e-12) return false;
    }
    return true;
}

inline void check_polygon(const Polygon& poly) {
    if (poly.vertices.size() < 3) fail(ErrorKind::DegenerateGeometry, "polygon needs at least 3 vertices");
    for (const auto& v : poly.vertices) {
        if (!std::isfinite(v.x) || !std::isfinite(v.y)) fail(ErrorKind::DegenerateGeometry, "non-finite vertex");
    }
    if (poly.signed_area() <= 1e-12) fail(ErrorKind::DegenerateGeometry, "polygon has zero or negative area");
}

/// Ear clipping; `poly` must be simple and counter-clockwise.
inline std::vector<std::array<Point2, 3>> triangulate(const Polygon& poly) {
    check_polygon(poly);
    std::vector<Point2> v = poly.vertices;
    std::vector<std::array<Point2, 3>> out;
    // Touching the boundary also blocks an ear: a reflex vertex on the new diagonal would leak area.
    auto inside_tri = [](Point2 p, Point2 a, Point2 b, Point2 c) {
        if (distance(p, a) <= 1e-12 || distance(p, b) <= 1e-12 || distance(p, c) <= 1e-12) return false;
        return cross(b - a, p - a) >= -1e-12 && cross(c - b, p - b) >= -1e-12 && cross(a - c, p - c) >= -1e-12;
    };
    std::size_t guard = 0;
    while (v.size() > 3) {
        const std::size_t n = v.size();
        bool clipped = false;
        for (std::size_t i = 0; i < n; ++i) {
            const Point2 prev = v[(i + n - 1) % n], cur = v[i], next = v[(i + 1) % n];
            const double turn = cross(cur - prev, next - cur);
            if (turn <= 1e-12) {
                if (std::abs(turn) <= 1e-12 && dot(cur - prev, next - cur) > 0) {
                    // collinear vertex: drop it
                    v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
                    clipped = true;
                    break;
                }
                continue;
            }
            bool ear = true;
            for (std::size_t j = 0; j < n && ear; ++j) {
                if (j == i || j == (i + 1) % n || j == (i + n - 1) % n) continue;
                if (inside_tri(v[j], prev, cur, next)) ear = false;
            }
            if (!ear) continue;
            out.push_back({prev, cur, next});
            v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
            clipped = true;
            break;
        }
        if (!clipped || ++guard > 10000) fail(ErrorKind::DegenerateGeometry, "polygon is not simple");
    }
    if (cross(v[1] - v[0], v[2] - v[0]) > 1e-12) out.push_back({v[0], v[1], v[2]});
    return out;
}

inline std::vector<ConvexPiece> convex_pieces(const Shape& shape) {
    if (const auto* r = std::get_if<OrientedRect>(&shape)) {
        if (!(r->length > 0) || !(r->width > 0)) fail(ErrorKind::DegenerateGeometry, "rectangle with zero extent");
        const auto c = r->corners();
        return {ConvexPiece(c.begin(), c.end())};
    }
    const auto& poly = std::get<Polygon>(shape);
    check_polygon(poly);
    if (is_convex(poly.vertices)) return {poly.vertices};
    std::vector<ConvexPiece> out;
    for (const auto& t : triangulate(poly)) out.emplace_back(t.begin(), t.end());
    return out;
}

// ---------------------------------------------------------------------------
// Overlap (separating axis)

namespace detail {

inline std::pair<double, double> project(std::span<const Point2> pts, Vec2 axis) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& p : pts) {
        const double s = dot(p, axis);
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    return {lo, hi};
}

template <typename F>
void for_each_axis(std::span<const Point2> a, std::span<const Point2> b, F&& f) {
    for (auto pts : {a, b}) {
        for (std::size_t i = 0, n = pts.size(); i < n; ++i) {
            const Vec2 e = pts[(i + 1) % n] - pts[i];
            const double len = norm(e);
            if (len < 1e-15) continue;
            if (!f(Vec2{-e.y / len, e.x / len})) return;
        }
    }
}

}  // namespace detail

/// Strict interior intersection of two convex pieces (touching is not overlap).
inline bool convex_overlap(std::span<const Point2> a, std::span<const Point2> b) {
    bool separated = false;
    detail::for_each_axis(a, b, [&](Vec2 axis) {
        const auto [a0, a1] = detail::project(a, axis);
        const auto [b0, b1] = detail::project(b, axis);
        if (a1 <= b0 + kContactTol || b1 <= a0 + kContactTol) separated = true;
        return !separated;
    });
    return !separated;
}

inline bool overlap(const Shape& a, const Shape& b) {
    const auto pa = convex_pieces(a);
    const auto pb = convex_pieces(b);
    for (const auto& x : pa)
        for (const auto& y : pb)
            if (convex_overlap(x, y)) return true;
    return false;
}

// ---------------------------------------------------------------------------
// Swept contact

/// Displacement along unit `axis` at which moving convex `mover` first enters
/// the interior of static convex `other`, or nullopt if it never does.
inline std::optional<double> contact_distance(std::span<const Point2> mover, Vec2 axis, std::span<const Point2> other) {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    bool never = false;
    detail::for_each_axis(mover, other, [&](Vec2 n) {
        const auto [a0, a1] = detail::project(mover, n);
        const auto [b0, b1] = detail::project(other, n);
        const double s = dot(axis, n);
        if (std::abs(s) < 1e-12) {
            if (a1 <= b0 + kContactTol || b1 <= a0 + kContactTol) never = true;
            return !never;
        }
        double enter = (b0 - a1) / s, exit = (b1 - a0) / s;
        if (enter > exit) std::swap(enter, exit);
        lo = std::max(lo, enter);
        hi = std::min(hi, exit);
        return true;
    });
    if (never || hi - lo <= kContactTol || hi <= kContactTol) return std::nullopt;
    return std::max(lo, 0.0);
}

/// Largest d >= 0 such that `mover` translated by t*axis, t in [0, d], stays
/// inside `bounds` and overlaps none of `others`. Contact at d is allowed.
inline double max_slide(const OrientedRect& mover, Vec2 axis, std::span<const Shape> others, const AxisRect& bounds) {
    const double axis_len = norm(axis);
    if (std::abs(axis_len - 1.0) > 1e-9) fail(ErrorKind::InvalidState, "slide axis must be a unit vector");
    const auto mc = mover.corners();
    for (const auto& c : mc) {
        if (!bounds.contains(c)) fail(ErrorKind::InvalidState, "mover starts outside the bounds");
    }
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : mc) {
        if (axis.x > 1e-12) best = std::min(best, (bounds.hi.x - c.x) / axis.x);
        if (axis.x < -1e-12) best = std::min(best, (bounds.lo.x - c.x) / axis.x);
        if (axis.y > 1e-12) best = std::min(best, (bounds.hi.y - c.y) / axis.y);
        if (axis.y < -1e-12) best = std::min(best, (bounds.lo.y - c.y) / axis.y);
    }
    best = std::max(best, 0.0);
    const Shape mover_shape = mover;
    for (const auto& other : others) {
        for (const auto& piece : convex_pieces(other)) {
            if (convex_overlap(mc, piece)) fail(ErrorKind::InvalidState, "mover starts overlapping an obstacle");
            if (auto d = contact_distance(mc, axis, piece)) best = std::min(best, *d);
        }
    }
    return best;
}

inline AxisRect bounding_box(std::span<const Point2> pts) {
    AxisRect r{{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()},
               {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()}};
    for (const auto& p : pts) {
        r.lo.x = std::min(r.lo.x, p.x);
        r.lo.y = std::min(r.lo.y, p.y);
        r.hi.x = std::max(r.hi.x, p.x);
        r.hi.y = std::max(r.hi.y, p.y);
    }
    return r;
}

// ---------------------------------------------------------------------------
// Polygon booleans (area-level queries only)

// Union area by slab decomposition. Every vertex x and every crossing x of two
// edges is a slab boundary; inside a slab each convex piece covers one
// interval with linear endpoints and the interval order is fixed, so the union
// is a set of trapezoids whose area and centroid integrate exactly.

struct AreaMoments {
    double area = 0.0;
    double mx = 0.0;  // integral of x
    double my = 0.0;  // integral of y

    Point2 centroid() const {
        if (!(area > 0)) fail(ErrorKind::DegenerateGeometry, "centroid of zero-area region");
        return {mx / area, my / area};
    }
};

namespace detail {

struct LinearFn {
    double m, c;
    double at(double x) const { return m * x + c; }
};

inline void add_crossings(const ConvexPiece& a, const ConvexPiece& b, std::vector<double>& xs) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        const Point2 p = a[i], p2 = a[(i + 1) % a.size()];
        const Vec2 r = p2 - p;
        for (std::size_t j = 0; j < b.size(); ++j) {
            const Point2 q = b[j], q2 = b[(j + 1) % b.size()];
            const Vec2 s = q2 - q;
            const double denom = cross(r, s);
            if (std::abs(denom) < 1e-18) continue;
            const double t = cross(q - p, s) / denom;
            const double u = cross(q - p, r) / denom;
            if (t > 0 && t < 1 && u > 0 && u < 1) xs.push_back(p.x + t * r.x);
        }
    }
}

}  // namespace detail

inline AreaMoments union_moments(std::span<const ConvexPiece> pieces) {
    AreaMoments out;
    if (pieces.empty()) return out;
    std::vector<double> xs;
    std::vector<AxisRect> boxes;
    for (const auto& p : pieces) {
        boxes.push_back(bounding_box(p));
        for (const auto& v : p) xs.push_back(v.x);
    }
    for (std::size_t i = 0; i < pieces.size(); ++i)
        for (std::size_t j = 0; j < i; ++j) {
            const auto &bi = boxes[i], &bj = boxes[j];
            if (bi.hi.x < bj.lo.x || bj.hi.x < bi.lo.x || bi.hi.y < bj.lo.y || bj.hi.y < bi.lo.y) continue;
            detail::add_crossings(pieces[i], pieces[j], xs);
        }
    std::sort(xs.begin(), xs.end());

    struct Span {
        detail::LinearFn lo, hi;
        double lo_mid, hi_mid;
    };
    std::vector<Span> spans;
    for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
        const double x0 = xs[k], x1 = xs[k + 1];
        if (x1 - x0 < 1e-13) continue;
        const double xm = 0.5 * (x0 + x1);
        spans.clear();
        for (std::size_t i = 0; i < pieces.size(); ++i) {
            if (boxes[i].lo.x > xm || boxes[i].hi.x < xm) continue;
            const auto& p = pieces[i];
            bool have_lo = false, have_hi = false;
            Span s{};
            for (std::size_t e = 0; e < p.size(); ++e) {
                const Point2 a = p[e], b = p[(e + 1) % p.size()];
                if (a.x == b.x) continue;
                if (std::min(a.x, b.x) > xm || std::max(a.x, b.x) < xm) continue;
                const double m = (b.y - a.y) / (b.x - a.x);
                const detail::LinearFn f{m, a.y - m * a.x};
                // Counter-clockwise: edges running left to right form the bottom.
                if (b.x > a.x) {
                    s.lo = f;
                    have_lo = true;
                } else {
                    s.hi = f;
                    have_hi = true;
                }
            }
            if (!have_lo || !have_hi) continue;
            s.lo_mid = s.lo.at(xm);
            s.hi_mid = s.hi.at(xm);
            if (s.hi_mid > s.lo_mid) spans.push_back(s);
        }
        std::sort(spans.begin(), spans.end(), [](const Span& a, const Span& b) { return a.lo_mid < b.lo_mid; });
        auto emit = [&](const detail::LinearFn& lo, const detail::LinearFn& hi) {
            // Simpson's rule is exact for the quadratics integrated here.
            auto h = [&](double x) { return hi.at(x) - lo.at(x); };
            auto my = [&](double x) { return 0.5 * (hi.at(x) * hi.at(x) - lo.at(x) * lo.at(x)); };
            const double w = (x1 - x0) / 6.0;
            out.area += w * (h(x0) + 4 * h(xm) + h(x1));
            out.mx += w * (x0 * h(x0) + 4 * xm * h(xm) + x1 * h(x1));
            out.my += w * (my(x0) + 4 * my(xm) + my(x1));
        };
        std::size_t i = 0;
        while (i < spans.size()) {
            detail::LinearFn lo = spans[i].lo, hi = spans[i].hi;
            double top = spans[i].hi_mid;
            std::size_t j = i + 1;
            while (j < spans.size() && spans[j].lo_mid <= top) {
                if (spans[j].hi_mid > top) {
                    top = spans[j].hi_mid;
                    hi = spans[j].hi;
                }
                ++j;
            }
            emit(lo, hi);
            i = j;
        }
    }
    return out;
}

inline std::vector<ConvexPiece> convex_pieces(std::span<const Polygon> polys) {
    std::vector<ConvexPiece> out;
    for (const auto& p : polys) {
        auto pieces = convex_pieces(Shape{p});
        out.insert(out.end(), pieces.begin(), pieces.end());
    }
    return out;
}

inline std::vector<ConvexPiece> translated(std::vector<ConvexPiece> pieces, Vec2 d) {
    for (auto& p : pieces)
        for (auto& v : p) v += d;
    return pieces;
}

inline double union_area(std::span<const Polygon> polys) {
    const auto pieces = convex_pieces(polys);
    return union_moments(pieces).area;
}

/// Area shared by the unions of two polygon sets.
inline double intersection_area(std::span<const Polygon> a, std::span<const Polygon> b) {
    auto pa = convex_pieces(a);
    auto pb = convex_pieces(b);
    const double area_a = union_moments(pa).area, area_b = union_moments(pb).area;
    pa.insert(pa.end(), pb.begin(), pb.end());
    return std::max(0.0, area_a + area_b - union_moments(pa).area);
}

/// IoU of the two unions after moving b's centroid onto a's.
inline double silhouette_iou(std::span<const Polygon> a, std::span<const Polygon> b) {
    if (a.empty() || b.empty()) fail(ErrorKind::DegenerateGeometry, "silhouette needs at least one polygon");
    auto pa = convex_pieces(a);
    auto pb = convex_pieces(b);
    const auto ma = union_moments(pa), mb = union_moments(pb);
    if (ma.area <= 1e-12 || mb.area <= 1e-12) fail(ErrorKind::DegenerateGeometry, "silhouette has zero area");
    pb = translated(std::move(pb), ma.centroid() - mb.centroid());
    pa.insert(pa.end(), pb.begin(), pb.end());
    const double uni = union_moments(pa).area;
    const double inter = ma.area + mb.area - uni;
    return std::clamp(inter / uni, 0.0, 1.0);
}

/// Point-in-polygon by winding number; points on the boundary count as inside.
inline bool contains(const Polygon& poly, Point2 p, double tol = 1e-12) {
    const auto& v = poly.vertices;
    int winding = 0;
    for (std::size_t i = 0, n = v.size(); i < n; ++i) {
        const Point2 a = v[i], b = v[(i + 1) % n];
        const double c = cross(b - a, p - a);
        if (std::abs(c) <= tol && dot(p - a, p - b) <= tol) return true;
        if (a.y <= p.y) {
            if (b.y > p.y && c > 0) ++winding;
        } else if (b.y <= p.y && c < 0) {
            --winding;
        }
    }
    return winding != 0;
}

/// Distance from p to the polygon boundary.
inline double boundary_distance(const Polygon& poly, Point2 p) {
    double best = std::numeric_limits<double>::infinity();
    const auto& v = poly.vertices;
    for (std::size_t i = 0, n = v.size(); i < n; ++i) {
        const Point2 a = v[i], b = v[(i + 1) % n];
        const Vec2 e = b - a;
        const double t = std::clamp(dot(p - a, e) / dot(e, e), 0.0, 1.0);
        best = std::min(best, distance(p, a + e * t));
    }
    return best;
}

/// Andrew's monotone chain; counter-clockwise, collinear points dropped.
inline std::vector<Point2> convex_hull(std::vector<Point2> pts) {
    std::sort(pts.begin(), pts.end(), [](Point2 a, Point2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    if (pts.size() < 3) return pts;
    std::vector<Point2> h(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && cross(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0) --k;
        h[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0) --k;
        h[k++] = pts[i];
    }
    h.resize(k - 1);
    return h;
}

/// Keep the part of convex `poly` where line.side(p) * sign >= 0.
inline std::vector<Point2> clip_halfplane(std::span<const Point2> poly, const Line2& line, double sign) {
    std::vector<Point2> out;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 a = poly[i], b = poly[(i + 1) % n];
        const double sa = line.side(a) * sign, sb = line.side(b) * sign;
        if (sa >= 0) out.push_back(a);
        if ((sa > 0 && sb < 0) || (sa < 0 && sb > 0)) out.push_back(a + (b - a) * (sa / (sa - sb)));
    }
    return out;
}


}  // namespace mentes::geom
