#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "mentes/error.hpp"
#include "mentes/geom.hpp"
#include "mentes/rng.hpp"

namespace mentes::paperfold {

using geom::Isometry;
using geom::Line2;
using geom::Point2;
using geom::Vec2;

enum class FoldFamily { Horizontal, Vertical, MainDiagonal, AntiDiagonal };

inline const char* to_string(FoldFamily f) {
    switch (f) {
        case FoldFamily::Horizontal: return "horizontal";
        case FoldFamily::Vertical: return "vertical";
        case FoldFamily::MainDiagonal: return "main_diagonal";
        case FoldFamily::AntiDiagonal: return "anti_diagonal";
    }
    return "?";
}

inline FoldFamily family_from_string(const std::string& s) {
    for (auto f : {FoldFamily::Horizontal, FoldFamily::Vertical, FoldFamily::MainDiagonal, FoldFamily::AntiDiagonal})
        if (s == to_string(f)) return f;
    fail(ErrorKind::Malformed, "unknown fold family '" + s + "'");
}

/// y = c, x = c, y = x + c or x + y = c depending on the family.
struct Fold {
    FoldFamily family = FoldFamily::Vertical;
    double offset = 0.5;
    int moving_side = 1;  // sign of line().side(p) for points that flip

    Line2 line() const {
        constexpr double r = std::numbers::sqrt2 / 2.0;
        switch (family) {
            case FoldFamily::Horizontal: return {{0, offset}, {1, 0}};
            case FoldFamily::Vertical: return {{offset, 0}, {0, 1}};
            case FoldFamily::MainDiagonal: return {{0, offset}, {r, r}};
            case FoldFamily::AntiDiagonal: return {{0, offset}, {r, -r}};
        }
        return {};
    }

    bool moves(Point2 p) const { return line().side(p) * moving_side > 0; }
};

/// One sheet of the folded stack: its outline in folded coordinates and the
/// map from folded coordinates back to the flat paper.
struct Layer {
    std::vector<Point2> region;  // convex, counter-clockwise
    Isometry to_paper;

    geom::Polygon paper_region() const {
        geom::Polygon p;
        for (auto v : region) p.vertices.push_back(to_paper.apply(v));
        if (p.signed_area() < 0) std::reverse(p.vertices.begin(), p.vertices.end());
        return p;
    }
};

/// Bottom layer first.
struct LayerStack {
    std::vector<Layer> layers;

    static LayerStack flat() { return {{Layer{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}, Isometry{}}}}; }

    std::vector<geom::Polygon> outlines() const {
        std::vector<geom::Polygon> out;
        for (const auto& l : layers) out.push_back(geom::Polygon{l.region});
        return out;
    }

    double extent_area() const {
        const auto o = outlines();
        return geom::union_area(o);
    }
};

using HolePattern = std::vector<Point2>;

namespace detail {

inline constexpr double kMinPiece = 1e-10;

inline bool usable(const std::vector<Point2>& poly) {
    return poly.size() >= 3 && geom::Polygon{poly}.area() > kMinPiece;
}

/// Lexicographic order with a tolerance so patterns compare stably.
inline void canonicalize(HolePattern& h) {
    std::sort(h.begin(), h.end(), [](Point2 a, Point2 b) {
        if (std::abs(a.x - b.x) > 1e-9) return a.x < b.x;
        return a.y < b.y;
    });
    HolePattern out;
    for (auto p : h)
        if (std::none_of(out.begin(), out.end(), [&](Point2 q) { return geom::distance(p, q) < 1e-6; })) out.push_back(p);
    h = std::move(out);
}

}  // namespace detail

/// Flips the moving side of every layer across the fold line; flipped pieces
/// are stacked on top in reverse order.
inline LayerStack fold(const LayerStack& stack, const Fold& f) {
    const Line2 line = f.line();
    const Isometry mirror = Isometry::reflection(line);
    LayerStack out;
    std::vector<Layer> flipped;
    bool moved_any = false, kept_any = false;
    for (const auto& layer : stack.layers) {
        auto stay = geom::clip_halfplane(layer.region, line, -f.moving_side);
        auto move = geom::clip_halfplane(layer.region, line, f.moving_side);
        if (detail::usable(stay)) {
            out.layers.push_back({std::move(stay), layer.to_paper});
            kept_any = true;
        }
        if (detail::usable(move)) {
            std::vector<Point2> mirrored;
            for (auto it = move.rbegin(); it != move.rend(); ++it) mirrored.push_back(mirror.apply(*it));
            flipped.push_back({std::move(mirrored), layer.to_paper.compose(mirror)});
            moved_any = true;
        }
    }
    if (!moved_any || !kept_any) fail(ErrorKind::InvalidFold, "fold line does not cut the folded paper");
    out.layers.insert(out.layers.end(), flipped.rbegin(), flipped.rend());
    return out;
}

inline std::vector<LayerStack> fold_states(const std::vector<Fold>& folds) {
    std::vector<LayerStack> states{LayerStack::flat()};
    for (const auto& f : folds) states.push_back(fold(states.back(), f));
    return states;
}

/// Paper positions of the hole punched at folded point p.
inline HolePattern punch(const LayerStack& stack, Point2 p) {
    HolePattern holes;
    for (const auto& layer : stack.layers)
        if (geom::contains(geom::Polygon{layer.region}, p, 1e-12)) holes.push_back(layer.to_paper.apply(p));
    if (holes.empty()) fail(ErrorKind::InvalidPunch, "punch point is outside the folded paper");
    detail::canonicalize(holes);
    return holes;
}

/// Where each paper hole sits in the folded frame of `stack`.
inline HolePattern locate(const LayerStack& stack, const HolePattern& paper_holes) {
    HolePattern out;
    for (auto h : paper_holes) {
        for (const auto& layer : stack.layers) {
            if (!geom::contains(layer.paper_region(), h, 1e-9)) continue;
            // Isometries are orthogonal, so the inverse is the transpose.
            const Isometry& m = layer.to_paper;
            const Vec2 r = h - m.t;
            out.push_back({m.a * r.x + m.c * r.y, m.b * r.x + m.d * r.y});
            break;
        }
    }
    detail::canonicalize(out);
    return out;
}

/// Hole positions after each reverse fold, the last entry being the flat paper.
inline std::vector<HolePattern> unfold_trace(const std::vector<LayerStack>& states, const HolePattern& pattern) {
    std::vector<HolePattern> trace;
    for (std::size_t k = states.size() - 1; k-- > 0;) trace.push_back(locate(states[k], pattern));
    return trace;
}

// ---------------------------------------------------------------------------
// Answer options

inline constexpr double kDelta = 0.10;
inline constexpr double kPunchMargin = 0.05;

/// True when b has a hole missing from a (beyond kDelta), or vice versa, or a
/// different hole count.
inline bool distinct(const HolePattern& a, const HolePattern& b, double delta = kDelta) {
    if (a.size() != b.size()) return true;
    auto far = [&](const HolePattern& x, const HolePattern& y) {
        for (auto p : x) {
            double best = std::numeric_limits<double>::infinity();
            for (auto q : y) best = std::min(best, geom::distance(p, q));
            if (best > delta) return true;
        }
        return false;
    };
    return far(a, b) || far(b, a);
}

struct Options {
    std::array<HolePattern, 5> patterns;
    char answer = 'A';
};

namespace detail {

inline bool inside_paper(Point2 p) {
    return p.x >= kPunchMargin && p.x <= 1 - kPunchMargin && p.y >= kPunchMargin && p.y <= 1 - kPunchMargin;
}

inline Point2 sample_far_point(Rng& rng, const HolePattern& avoid) {
    for (int i = 0; i < 1000; ++i) {
        const Point2 p{quantize(rng.uniform(kPunchMargin, 1 - kPunchMargin), 0.01), quantize(rng.uniform(kPunchMargin, 1 - kPunchMargin), 0.01)};
        if (std::all_of(avoid.begin(), avoid.end(), [&](Point2 q) { return geom::distance(p, q) > 1.5 * kDelta; })) return p;
    }
    fail(ErrorKind::GenerationFailed, "no room for a distractor hole");
}

inline std::optional<HolePattern> distractor(Rng& rng, const HolePattern& gt) {
    HolePattern d = gt;
    switch (rng.integer(0, 3)) {
        case 0: {  // move one hole somewhere new
            d[rng.index(d.size())] = sample_far_point(rng, gt);
            break;
        }
        case 1: {  // drop one hole
            if (d.size() < 2) return std::nullopt;
            d.erase(d.begin() + static_cast<std::ptrdiff_t>(rng.index(d.size())));
            break;
        }
        case 2: {  // add one hole
            d.push_back(sample_far_point(rng, gt));
            break;
        }
        default: {  // mirror the whole pattern
            const int axis = static_cast<int>(rng.integer(0, 2));
            for (auto& p : d) {
                if (axis == 0) p.x = 1 - p.x;
                else if (axis == 1) p.y = 1 - p.y;
                else p = {p.y, p.x};
            }
            break;
        }
    }
    if (!std::all_of(d.begin(), d.end(), inside_paper)) return std::nullopt;
    canonicalize(d);
    return d;
}

}  // namespace detail

inline Options make_options(const HolePattern& gt, std::uint64_t seed) {
    Rng rng(splitmix64(seed ^ 0x4f5054494f4e53ULL));
    std::vector<HolePattern> chosen{gt};
    for (int attempt = 0; attempt < 10'000 && chosen.size() < 5; ++attempt) {
        auto d = detail::distractor(rng, gt);
        if (!d) continue;
        if (std::all_of(chosen.begin(), chosen.end(), [&](const HolePattern& c) { return distinct(c, *d); })) chosen.push_back(std::move(*d));
    }
    if (chosen.size() < 5) fail(ErrorKind::GenerationFailed, "could not build four distinct distractors");
    const std::size_t slot = rng.index(5);
    Options out;
    std::size_t next = 1;
    for (std::size_t i = 0; i < 5; ++i) out.patterns[i] = (i == slot) ? chosen[0] : chosen[next++];
    out.answer = static_cast<char>('A' + slot);
    return out;
}

// ---------------------------------------------------------------------------
// Generation

struct GeneratorParams {
    std::size_t attempts = 10'000;
    /// Fold lines sit inside this fraction band of the extent along their normal.
    double band_lo = 0.35;
    double band_hi = 0.65;
    int punch_tries = 200;
    /// A punch through a single layer would not exercise the unfolding.
    std::size_t min_holes = 2;
};

struct Generated {
    std::vector<Fold> folds;
    Point2 punch;
    HolePattern holes;
    Options options;
    std::size_t attempts = 0;
};

namespace detail {

/// Coordinate of p along the family's normal, matching Fold::offset.
inline double family_coord(FoldFamily f, Point2 p) {
    switch (f) {
        case FoldFamily::Horizontal: return p.y;
        case FoldFamily::Vertical: return p.x;
        case FoldFamily::MainDiagonal: return p.y - p.x;
        case FoldFamily::AntiDiagonal: return p.x + p.y;
    }
    return 0;
}

inline double side_area(const LayerStack& s, const Fold& f, int sign) {
    std::vector<geom::Polygon> parts;
    for (const auto& l : s.layers) {
        auto c = geom::clip_halfplane(l.region, f.line(), sign);
        if (usable(c)) parts.push_back(geom::Polygon{std::move(c)});
    }
    return parts.empty() ? 0.0 : geom::union_area(parts);
}

/// Distance from p to the nearest edge of any layer; negative when no layer covers p.
inline double punch_clearance(const LayerStack& s, Point2 p) {
    bool covered = false;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& l : s.layers) {
        const geom::Polygon poly{l.region};
        if (geom::contains(poly, p, 0)) covered = true;
        best = std::min(best, geom::boundary_distance(poly, p));
    }
    return covered ? best : -1.0;
}

}  // namespace detail

inline Generated generate(int level, std::uint64_t seed, const GeneratorParams& params = {}) {
    if (level < 1 || level > 5) fail(ErrorKind::GenerationFailed, "paper fold level must be in 1..5");
    static constexpr FoldFamily families[] = {FoldFamily::Horizontal, FoldFamily::Vertical, FoldFamily::MainDiagonal, FoldFamily::AntiDiagonal};
    Rng rng(splitmix64(seed ^ 0x5041504552ULL));
    for (std::size_t attempt = 1; attempt <= params.attempts; ++attempt) {
        std::vector<Fold> folds;
        LayerStack stack = LayerStack::flat();
        bool ok = true;
        for (int i = 0; i < level && ok; ++i) {
            Fold f;
            f.family = rng.pick<FoldFamily>(families);
            double lo = std::numeric_limits<double>::infinity(), hi = -lo;
            for (const auto& l : stack.layers)
                for (auto v : l.region) {
                    const double c = detail::family_coord(f.family, v);
                    lo = std::min(lo, c);
                    hi = std::max(hi, c);
                }
            f.offset = quantize(lo + (hi - lo) * rng.uniform(params.band_lo, params.band_hi), 0.005);
            // Fold::line().side is positive above horizontal and diagonal lines, left of vertical ones.
            const double above = detail::side_area(stack, f, 1), below = detail::side_area(stack, f, -1);
            if (above < 1e-3 || below < 1e-3) {
                ok = false;
                break;
            }
            f.moving_side = above <= below ? 1 : -1;
            stack = fold(stack, f);
            folds.push_back(f);
        }
        if (!ok) continue;

        geom::AxisRect ext = geom::bounding_box(stack.layers.front().region);
        for (const auto& l : stack.layers) {
            const auto b = geom::bounding_box(l.region);
            ext.lo = {std::min(ext.lo.x, b.lo.x), std::min(ext.lo.y, b.lo.y)};
            ext.hi = {std::max(ext.hi.x, b.hi.x), std::max(ext.hi.y, b.hi.y)};
        }
        std::optional<Point2> hole;
        for (int t = 0; t < params.punch_tries && !hole; ++t) {
            const Point2 p{quantize(rng.uniform(ext.lo.x, ext.hi.x), 0.01), quantize(rng.uniform(ext.lo.y, ext.hi.y), 0.01)};
            if (detail::punch_clearance(stack, p) >= kPunchMargin && punch(stack, p).size() >= params.min_holes) hole = p;
        }
        if (!hole) continue;

        auto holes = punch(stack, *hole);
        if (!std::all_of(holes.begin(), holes.end(), detail::inside_paper)) continue;
        Options options;
        try {
            options = make_options(holes, splitmix64(seed) + attempt);
        } catch (const Error&) {
            continue;
        }
        return {std::move(folds), *hole, std::move(holes), std::move(options), attempt};
    }
    fail(ErrorKind::GenerationFailed, "paper fold generator exhausted its attempt budget");
}

}  // namespace mentes::paperfold
