#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mentes/error.hpp"
#include "mentes/geom.hpp"
#include "mentes/rng.hpp"

namespace mentes::hingefold {

using geom::Point2;
using geom::Polygon;
using geom::Vec2;

enum class ShapeKind { Square, RectWide, RectTall, TriLeft, TriRight };

inline const char* to_string(ShapeKind k) {
    switch (k) {
        case ShapeKind::Square: return "square";
        case ShapeKind::RectWide: return "rect_wide";
        case ShapeKind::RectTall: return "rect_tall";
        case ShapeKind::TriLeft: return "tri_left";
        case ShapeKind::TriRight: return "tri_right";
    }
    return "?";
}

inline ShapeKind kind_from_string(const std::string& s) {
    for (auto k : {ShapeKind::Square, ShapeKind::RectWide, ShapeKind::RectTall, ShapeKind::TriLeft, ShapeKind::TriRight})
        if (s == to_string(k)) return k;
    fail(ErrorKind::Malformed, "unknown hinge shape '" + s + "'");
}

struct ShapeTemplate {
    Polygon local;  // lower-left corner at the origin
    double width;
    double left_height;   // extent of the vertical edge at x = 0
    double right_height;  // extent of the vertical edge at x = width
};

inline ShapeTemplate shape_template(ShapeKind k) {
    switch (k) {
        case ShapeKind::Square: return {{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}}, 1, 1, 1};
        case ShapeKind::RectWide: return {{{{0, 0}, {2, 0}, {2, 1}, {0, 1}}}, 2, 1, 1};
        case ShapeKind::RectTall: return {{{{0, 0}, {1, 0}, {1, 2}, {0, 2}}}, 1, 2, 2};
        case ShapeKind::TriLeft: return {{{{0, 0}, {1, 0}, {0, 1}}}, 1, 1, 0};
        case ShapeKind::TriRight: return {{{{0, 0}, {1, 0}, {1, 1}}}, 1, 0, 1};
    }
    fail(ErrorKind::InvalidState, "unknown shape kind");
}

struct Hinge {
    char label = 'A';
    Point2 pivot;
};

/// Shapes in chain order; hinge i joins shapes i and i+1.
struct HingeChain {
    std::vector<ShapeKind> kinds;
    std::vector<Polygon> shapes;
    std::vector<Hinge> hinges;
    std::vector<int> angles;  // net applied rotation per hinge, degrees in [0, 360)

    std::size_t hinge_index(char label) const {
        for (std::size_t i = 0; i < hinges.size(); ++i)
            if (hinges[i].label == label) return i;
        fail(ErrorKind::InvalidIdentifier, std::string("no hinge labeled '") + label + "'");
    }
};

inline constexpr int kAngles[] = {45, 90, 135, 180, 225, 270, 315};

inline bool valid_angle(int deg) { return deg % 45 == 0 && deg >= 45 && deg <= 315; }

/// Identical neighbours may not fold by 180 (they would lie on top of each other).
inline std::vector<int> admissible_angles(const HingeChain& chain, std::size_t hinge) {
    std::vector<int> out;
    const bool identical = chain.kinds[hinge] == chain.kinds[hinge + 1];
    for (int a : kAngles)
        if (!(identical && a == 180)) out.push_back(a);
    return out;
}

/// Rotates every shape right of `hinge` anticlockwise about its pivot.
inline HingeChain rotate_hinge(const HingeChain& chain, std::size_t hinge, int angle) {
    if (hinge >= chain.hinges.size()) fail(ErrorKind::InvalidIdentifier, "hinge index out of range");
    if (!valid_angle(angle)) fail(ErrorKind::InvalidAngle, "hinge angles must be one of 45, 90, ..., 315");
    HingeChain out = chain;
    const Point2 pivot = chain.hinges[hinge].pivot;
    for (std::size_t j = hinge + 1; j < out.shapes.size(); ++j)
        for (auto& v : out.shapes[j].vertices) v = geom::snap(geom::rotate_about(v, pivot, angle));
    for (std::size_t j = hinge + 1; j < out.hinges.size(); ++j) out.hinges[j].pivot = geom::snap(geom::rotate_about(out.hinges[j].pivot, pivot, angle));
    out.angles[hinge] = (out.angles[hinge] + angle) % 360;
    return out;
}

/// Applies one rotation per hinge in label order.
inline HingeChain apply_assignment(const HingeChain& chain, const std::vector<int>& angles) {
    HingeChain c = chain;
    for (std::size_t i = 0; i < angles.size(); ++i) c = rotate_hinge(c, i, angles[i]);
    return c;
}

inline bool self_overlaps(const HingeChain& chain, std::size_t upto = SIZE_MAX) {
    const std::size_t n = std::min(upto, chain.shapes.size());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (geom::overlap(chain.shapes[i], chain.shapes[j])) return true;
    return false;
}

inline constexpr double kMatchIou = 0.99;

inline bool matches_target(const HingeChain& chain, const std::vector<Polygon>& target) {
    return geom::silhouette_iou(chain.shapes, target) >= kMatchIou;
}

struct SearchResult {
    std::vector<std::vector<int>> matches;  // assignments reaching the target
    double best_miss = 0.0;                 // highest IoU among non-matching leaves
};

namespace detail {

inline void enumerate(const HingeChain& chain, const std::vector<Polygon>& target, bool first_only, SearchResult& out) {
    const std::size_t k = chain.hinges.size();
    std::vector<int> assignment;
    std::function<bool(const HingeChain&, std::size_t)> dfs = [&](const HingeChain& c, std::size_t i) -> bool {
        if (i == k) {
            const double iou = geom::silhouette_iou(c.shapes, target);
            if (iou >= kMatchIou) {
                out.matches.push_back(assignment);
                return first_only;
            }
            out.best_miss = std::max(out.best_miss, iou);
            return false;
        }
        for (int a : kAngles) {
            HingeChain next = rotate_hinge(c, i, a);
            // Shapes 0..i+1 are now final relative to each other.
            bool clash = false;
            for (std::size_t j = 0; j <= i && !clash; ++j)
                if (geom::overlap(next.shapes[i + 1], next.shapes[j])) clash = true;
            if (clash) continue;
            assignment.push_back(a);
            if (dfs(next, i + 1)) return true;
            assignment.pop_back();
        }
        return false;
    };
    dfs(chain, 0);
}

}  // namespace detail

/// First assignment (depth-first, angles ascending) whose silhouette matches.
inline std::vector<int> solve(const HingeChain& chain, const std::vector<Polygon>& target) {
    if (chain.hinges.size() > 5) fail(ErrorKind::InvalidState, "solver supports at most 5 hinges");
    SearchResult r;
    detail::enumerate(chain, target, true, r);
    if (r.matches.empty()) fail(ErrorKind::Unsolvable, "no hinge assignment reaches the target");
    return r.matches.front();
}

/// Exhaustive search used by the generator's ambiguity audit.
inline SearchResult solve_all(const HingeChain& chain, const std::vector<Polygon>& target) {
    SearchResult r;
    detail::enumerate(chain, target, false, r);
    return r;
}

// ---------------------------------------------------------------------------
// Generation

struct GeneratorParams {
    double identical_chain_prob = 0.5;
    /// A non-matching assignment this close to the target makes the instance ambiguous.
    double near_miss_iou = 0.9;
    std::size_t attempts = 10'000;
};

struct Generated {
    HingeChain chain;
    std::vector<int> angles;
    std::vector<Polygon> target;
    std::size_t attempts = 0;
};

inline HingeChain build_chain(const std::vector<ShapeKind>& kinds, const std::vector<bool>& top_pivot) {
    HingeChain c;
    double x = 0;
    for (std::size_t i = 0; i < kinds.size(); ++i) {
        const auto t = shape_template(kinds[i]);
        c.kinds.push_back(kinds[i]);
        c.shapes.push_back(t.local.translated({x, 0}));
        if (i + 1 < kinds.size()) {
            const double shared = std::min(t.right_height, shape_template(kinds[i + 1]).left_height);
            const double y = (top_pivot[i] && shared > 0) ? shared : 0.0;
            c.hinges.push_back({static_cast<char>('A' + i), {x + t.width, y}});
            c.angles.push_back(0);
        }
        x += t.width;
    }
    return c;
}

/// Chain of level+1 shapes with a unique folded silhouette.
inline Generated generate(int level, std::uint64_t seed, const GeneratorParams& params = {}) {
    if (level < 1 || level > 5) fail(ErrorKind::GenerationFailed, "hinge folding level must be in 1..5");
    static constexpr ShapeKind kinds_all[] = {ShapeKind::Square, ShapeKind::RectWide, ShapeKind::RectTall, ShapeKind::TriLeft,
                                              ShapeKind::TriRight};
    Rng rng(splitmix64(seed ^ 0x48494e4745ULL));
    const std::size_t n = static_cast<std::size_t>(level) + 1;
    for (std::size_t attempt = 1; attempt <= params.attempts; ++attempt) {
        std::vector<ShapeKind> kinds(n);
        if (rng.chance(params.identical_chain_prob)) {
            std::fill(kinds.begin(), kinds.end(), rng.pick<ShapeKind>(kinds_all));
        } else {
            do {
                for (auto& k : kinds) k = rng.pick<ShapeKind>(kinds_all);
            } while (std::all_of(kinds.begin(), kinds.end(), [&](ShapeKind k) { return k == kinds[0]; }));
        }
        std::vector<bool> top(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) top[i] = rng.chance(0.5);
        const HingeChain chain = build_chain(kinds, top);

        std::vector<int> angles;
        HingeChain cur = chain;
        bool ok = true;
        for (std::size_t i = 0; i + 1 < n && ok; ++i) {
            const auto allowed = admissible_angles(chain, i);
            angles.push_back(allowed[rng.index(allowed.size())]);
            cur = rotate_hinge(cur, i, angles.back());
            ok = !self_overlaps(cur);
        }
        if (!ok) continue;

        const auto audit = solve_all(chain, cur.shapes);
        if (audit.best_miss >= params.near_miss_iou) continue;
        if (std::find(audit.matches.begin(), audit.matches.end(), angles) == audit.matches.end()) continue;
        return {chain, angles, cur.shapes, attempt};
    }
    fail(ErrorKind::GenerationFailed, "hinge folding generator exhausted its attempt budget");
}

}  // namespace mentes::hingefold
