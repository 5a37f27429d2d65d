#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mentes/error.hpp"
#include "mentes/geom.hpp"
#include "mentes/rng.hpp"

namespace mentes::formboard {

using geom::Point2;
using geom::Polygon;
using geom::Vec2;

struct Rgb {
    std::uint8_t r, g, b;
    bool operator==(const Rgb&) const = default;
};

inline constexpr std::array<Rgb, 5> kPieceColors = {{
    {230, 97, 84},    // A
    {79, 129, 219},   // B
    {92, 184, 92},    // C
    {240, 173, 78},   // D
    {155, 100, 200},  // E
}};

struct Piece {
    char label = 'A';
    Polygon shape;                    // centroid at the origin
    std::optional<Vec2> translation;  // where the centroid sits in the target, answer pieces only
};

struct PieceSet {
    Polygon target;  // centroid at the origin
    std::array<Piece, 5> pieces;
    std::vector<char> answer;  // sorted

    const Piece& piece(char label) const {
        for (const auto& p : pieces)
            if (p.label == label) return p;
        fail(ErrorKind::InvalidIdentifier, std::string("no piece labeled '") + label + "'");
    }
};

inline constexpr double kAreaEpsilon = 0.03;  // fraction of the target area

inline Polygon centered(const Polygon& p) { return p.translated(Point2{} - p.centroid()); }

/// Same outline up to translation (vertex sets compared after centroid alignment).
inline bool congruent(const Polygon& a, const Polygon& b, double tol = 1e-6) {
    if (a.vertices.size() != b.vertices.size()) return false;
    const Polygon ca = centered(a), cb = centered(b);
    for (auto v : ca.vertices)
        if (std::none_of(cb.vertices.begin(), cb.vertices.end(), [&](Point2 w) { return geom::distance(v, w) <= tol; })) return false;
    return true;
}

namespace detail {

inline std::vector<Point2> tidy(std::vector<Point2> poly) {
    // Drop the near-duplicate points clipping leaves at vertices the line passes through.
    std::vector<Point2> out;
    for (auto p : poly)
        if (out.empty() || geom::distance(out.back(), p) > 1e-9) out.push_back(p);
    while (out.size() > 1 && geom::distance(out.front(), out.back()) <= 1e-9) out.pop_back();
    return geom::convex_hull(std::move(out));
}

/// Splits convex `p` by a random line near its centroid.
inline std::optional<std::pair<Polygon, Polygon>> split(Rng& rng, const Polygon& p, double min_area) {
    const auto box = geom::bounding_box(p.vertices);
    const Point2 c = p.centroid();
    const Point2 through{c.x + rng.uniform(-0.2, 0.2) * box.width(), c.y + rng.uniform(-0.2, 0.2) * box.height()};
    const geom::Line2 line{through, geom::unit_from_degrees(15.0 * static_cast<double>(rng.integer(0, 11)))};
    Polygon a{tidy(geom::clip_halfplane(p.vertices, line, 1))};
    Polygon b{tidy(geom::clip_halfplane(p.vertices, line, -1))};
    if (a.vertices.size() < 3 || b.vertices.size() < 3) return std::nullopt;
    if (a.area() < min_area || b.area() < min_area) return std::nullopt;
    return std::pair{std::move(a), std::move(b)};
}

inline Polygon sample_target(Rng& rng) {
    const int n = static_cast<int>(rng.integer(4, 7));
    std::vector<Point2> pts;
    const double phase = rng.uniform(0, 360);
    for (int i = 0; i < n; ++i) {
        const double deg = phase + 360.0 * (i + rng.uniform(-0.25, 0.25)) / n;
        const Vec2 d = geom::unit_from_degrees(deg) * rng.uniform(0.8, 1.0);
        pts.push_back({quantize(d.x, 0.01), quantize(d.y, 0.01)});
    }
    return centered(Polygon{geom::convex_hull(std::move(pts))});
}

}  // namespace detail

/// Recursive straight cuts of the largest piece until there are k pieces.
inline std::vector<Polygon> cut(const Polygon& target, int k, Rng& rng, std::size_t attempts = 1000) {
    if (k < 1 || k > 5) fail(ErrorKind::GenerationFailed, "piece count must be in 1..5");
    const double min_area = 0.08 * target.area();
    for (std::size_t attempt = 0; attempt < attempts; ++attempt) {
        std::vector<Polygon> pieces{target};
        bool ok = true;
        while (static_cast<int>(pieces.size()) < k && ok) {
            auto big = std::max_element(pieces.begin(), pieces.end(), [](const Polygon& a, const Polygon& b) { return a.area() < b.area(); });
            auto parts = detail::split(rng, *big, min_area);
            if (!parts) {
                ok = false;
                break;
            }
            *big = std::move(parts->first);
            pieces.push_back(std::move(parts->second));
        }
        if (!ok) continue;
        bool distinct = true;
        for (std::size_t i = 0; i < pieces.size() && distinct; ++i)
            for (std::size_t j = 0; j < i && distinct; ++j)
                if (congruent(pieces[i], pieces[j])) distinct = false;
        if (distinct) return pieces;
    }
    fail(ErrorKind::GenerationFailed, "could not cut the target into distinct pieces");
}

/// Pieces carved out of answer pieces and rescaled so their areas stay clear
/// of every answer piece.
inline std::vector<Polygon> make_distractors(const std::vector<Polygon>& answer, int m, double target_area, Rng& rng,
                                             std::size_t attempts = 10'000) {
    const double eps = kAreaEpsilon * target_area;
    std::vector<Polygon> out;
    for (std::size_t attempt = 0; attempt < attempts && static_cast<int>(out.size()) < m; ++attempt) {
        const Polygon& src = answer[rng.index(answer.size())];
        auto parts = detail::split(rng, src, 0.1 * src.area());
        if (!parts) continue;
        Polygon d = rng.chance(0.5) ? parts->first : parts->second;
        const double s = rng.uniform(0.8, 1.2);
        const Point2 c = d.centroid();
        for (auto& v : d.vertices) v = c + (v - c) * s;
        d = centered(d);
        if (d.area() < 0.05 * target_area || d.area() > 0.95 * target_area) continue;
        bool ok = std::all_of(answer.begin(), answer.end(), [&](const Polygon& a) { return std::abs(a.area() - d.area()) >= eps && !congruent(a, d); });
        ok = ok && std::none_of(out.begin(), out.end(), [&](const Polygon& o) { return congruent(o, d); });
        if (ok) out.push_back(std::move(d));
    }
    if (static_cast<int>(out.size()) < m) fail(ErrorKind::GenerationFailed, "could not build enough distractors");
    return out;
}

/// Pieces placed at their translations cover the target with no gaps or overlaps.
inline bool verify_tiling(const Polygon& target, const std::vector<std::pair<Polygon, Vec2>>& placed) {
    if (placed.empty()) return false;
    std::vector<Polygon> shapes;
    for (const auto& [p, t] : placed) shapes.push_back(p.translated(t));
    for (std::size_t i = 0; i < shapes.size(); ++i)
        for (std::size_t j = 0; j < i; ++j) {
            const Polygon a[] = {shapes[i]}, b[] = {shapes[j]};
            if (geom::intersection_area(a, b) >= 1e-9) return false;
        }
    const double t = target.area();
    const double covered = geom::union_area(shapes);
    shapes.push_back(target);
    const double hull = geom::union_area(shapes);
    return std::abs(covered - t) <= 1e-6 && std::abs(hull - t) <= 1e-6;
}

/// No other non-empty subset of the five pieces adds up to the target area.
inline bool unique_by_area(const PieceSet& s) {
    const double t = s.target.area();
    const double eps = kAreaEpsilon * t;
    unsigned gt_mask = 0;
    for (std::size_t i = 0; i < 5; ++i)
        if (std::find(s.answer.begin(), s.answer.end(), s.pieces[i].label) != s.answer.end()) gt_mask |= 1u << i;
    for (unsigned mask = 1; mask < 32; ++mask) {
        if (mask == gt_mask) continue;
        double sum = 0;
        for (std::size_t i = 0; i < 5; ++i)
            if (mask & (1u << i)) sum += s.pieces[i].shape.area();
        if (std::abs(sum - t) < eps / 2) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Generation

struct GeneratorParams {
    std::size_t attempts = 1000;
};

struct Generated {
    PieceSet set;
    std::size_t attempts = 0;
};

inline Generated generate(int level, std::uint64_t seed, const GeneratorParams& params = {}) {
    if (level < 1 || level > 5) fail(ErrorKind::GenerationFailed, "form board level must be in 1..5");
    Rng rng(splitmix64(seed ^ 0x464f524d424fULL));
    for (std::size_t attempt = 1; attempt <= params.attempts; ++attempt) {
        const Polygon target = detail::sample_target(rng);
        std::vector<Polygon> parts, distractors;
        try {
            parts = cut(target, level, rng, 50);
            distractors = make_distractors(parts, 5 - level, target.area(), rng, 500);
        } catch (const Error&) {
            continue;
        }

        std::array<std::size_t, 5> order = {0, 1, 2, 3, 4};
        rng.shuffle(order);
        PieceSet set;
        set.target = target;
        for (std::size_t slot = 0; slot < 5; ++slot) {
            const std::size_t src = order[slot];
            Piece& p = set.pieces[slot];
            p.label = static_cast<char>('A' + slot);
            if (src < parts.size()) {
                p.translation = parts[src].centroid();
                p.shape = centered(parts[src]);
                set.answer.push_back(p.label);
            } else {
                p.shape = distractors[src - parts.size()];
            }
        }
        if (!unique_by_area(set)) continue;
        return {std::move(set), attempt};
    }
    fail(ErrorKind::GenerationFailed, "form board generator exhausted its attempt budget");
}

/// Answer pieces in label order with their placements.
inline std::vector<std::pair<Polygon, Vec2>> placements(const PieceSet& s) {
    std::vector<std::pair<Polygon, Vec2>> out;
    for (char l : s.answer) {
        const auto& p = s.piece(l);
        out.emplace_back(p.shape, *p.translation);
    }
    return out;
}

}  // namespace mentes::formboard
