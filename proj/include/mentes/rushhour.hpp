#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <deque>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mentes/error.hpp"
#include "mentes/geom.hpp"
#include "mentes/rng.hpp"

namespace mentes::rushhour {

using geom::AxisRect;
using geom::OrientedRect;
using geom::Point2;
using geom::Shape;
using geom::Vec2;

enum class Edge { Bottom, Top, Left, Right };

inline const char* edge_name(Edge e) {
    switch (e) {
        case Edge::Bottom: return "bottom";
        case Edge::Top: return "top";
        case Edge::Left: return "left";
        case Edge::Right: return "right";
    }
    return "?";
}

inline Edge edge_from_name(const std::string& s) {
    if (s == "bottom") return Edge::Bottom;
    if (s == "top") return Edge::Top;
    if (s == "left") return Edge::Left;
    if (s == "right") return Edge::Right;
    fail(ErrorKind::Malformed, "unknown edge '" + s + "'");
}

struct Exit {
    Edge edge = Edge::Bottom;
    double from = 0.0;  // interval along the edge
    double to = 0.0;
};

struct Vehicle {
    char label = 'A';
    OrientedRect body;

    Vec2 forward() const { return body.forward(); }
};

struct Lot {
    double width = 10.0;
    double height = 10.0;
    Exit exit;
    std::vector<Vehicle> vehicles;  // sorted by label
    std::vector<AxisRect> obstacles;

    AxisRect bounds() const { return {{0, 0}, {width, height}}; }

    std::optional<std::size_t> find(char label) const {
        for (std::size_t i = 0; i < vehicles.size(); ++i)
            if (vehicles[i].label == label) return i;
        return std::nullopt;
    }

    std::size_t red_index() const {
        auto i = find('R');
        if (!i) fail(ErrorKind::InvalidState, "lot has no red car");
        return *i;
    }
};

enum class Direction { Forward, Backward };

struct RushAction {
    char label = 'R';
    Direction direction = Direction::Forward;

    bool operator==(const RushAction&) const = default;
};

inline std::string to_string(const RushAction& a) {
    return std::string(1, a.label) + (a.direction == Direction::Forward ? " forward" : " backward");
}

inline std::string format_actions(const std::vector<RushAction>& actions) {
    std::string out;
    for (std::size_t i = 0; i < actions.size(); ++i) {
        if (i) out += ", ";
        out += to_string(actions[i]);
    }
    return out;
}

/// Signed displacement of every vehicle along its own heading.
struct RushState {
    std::vector<double> offsets;

    static RushState initial(const Lot& lot) { return {std::vector<double>(lot.vehicles.size(), 0.0)}; }
};

inline OrientedRect pose(const Lot& lot, const RushState& state, std::size_t i) {
    const auto& v = lot.vehicles[i];
    return v.body.translated(v.forward() * state.offsets[i]);
}

/// Sanity check for lot invariants; throws InvalidState.
inline void validate(const Lot& lot) {
    if (!(lot.width > 0) || !(lot.height > 0)) fail(ErrorKind::InvalidState, "lot has no area");
    int reds = 0;
    for (std::size_t i = 0; i < lot.vehicles.size(); ++i) {
        const auto& v = lot.vehicles[i];
        if (v.label < 'A' || v.label > 'Z') fail(ErrorKind::InvalidState, "vehicle labels must be uppercase letters");
        if (v.label == 'R') ++reds;
        for (std::size_t j = 0; j < i; ++j)
            if (lot.vehicles[j].label == v.label) fail(ErrorKind::InvalidState, "duplicate vehicle label");
    }
    if (reds != 1) fail(ErrorKind::InvalidState, "lot needs exactly one red car");
    const double edge_len = (lot.exit.edge == Edge::Bottom || lot.exit.edge == Edge::Top) ? lot.width : lot.height;
    if (!(lot.exit.from < lot.exit.to) || lot.exit.from < 0 || lot.exit.to > edge_len)
        fail(ErrorKind::InvalidState, "exit interval must lie on its edge");
    if (lot.exit.to - lot.exit.from < lot.vehicles[lot.red_index()].body.width)
        fail(ErrorKind::InvalidState, "exit narrower than the red car");
}

namespace detail {

// Distance the red car may travel past the exit edge; longer than any car.
inline constexpr double kExitRunout = 4.0;

struct SlideWorld {
    AxisRect bounds;
    std::vector<Shape> others;
};

inline SlideWorld world_for(const Lot& lot, const RushState& state, std::size_t mover) {
    SlideWorld w{lot.bounds(), {}};
    w.others.reserve(lot.vehicles.size() + lot.obstacles.size() + 2);
    for (std::size_t j = 0; j < lot.vehicles.size(); ++j)
        if (j != mover) w.others.emplace_back(pose(lot, state, j));
    for (const auto& o : lot.obstacles) w.others.emplace_back(geom::Polygon::from(o));
    if (lot.vehicles[mover].label != 'R') return w;

    // The exit is a hole in the wall for the red car only: extend the bounds
    // outward and wall off the edge on both sides of the exit interval.
    const double r = kExitRunout;
    const auto& e = lot.exit;
    auto post = [&](Point2 lo, Point2 hi) {
        if (hi.x - lo.x > 1e-12 && hi.y - lo.y > 1e-12) w.others.emplace_back(geom::Polygon::from(AxisRect{lo, hi}));
    };
    switch (e.edge) {
        case Edge::Bottom:
            w.bounds.lo.y -= r;
            post({0, -r}, {e.from, 0});
            post({e.to, -r}, {lot.width, 0});
            break;
        case Edge::Top:
            w.bounds.hi.y += r;
            post({0, lot.height}, {e.from, lot.height + r});
            post({e.to, lot.height}, {lot.width, lot.height + r});
            break;
        case Edge::Left:
            w.bounds.lo.x -= r;
            post({-r, 0}, {0, e.from});
            post({-r, e.to}, {0, lot.height});
            break;
        case Edge::Right:
            w.bounds.hi.x += r;
            post({lot.width, 0}, {lot.width + r, e.from});
            post({lot.width, e.to}, {lot.width + r, lot.height});
            break;
    }
    return w;
}

}  // namespace detail

/// Slide one vehicle to contact. Unknown labels raise InvalidIdentifier.
inline RushState apply(const Lot& lot, const RushState& state, const RushAction& action) {
    const auto idx = lot.find(action.label);
    if (!idx) fail(ErrorKind::InvalidIdentifier, std::string("no vehicle labeled '") + action.label + "'");
    const auto world = detail::world_for(lot, state, *idx);
    const Vec2 fwd = lot.vehicles[*idx].forward();
    const Vec2 axis = action.direction == Direction::Forward ? fwd : -fwd;
    const double d = geom::max_slide(pose(lot, state, *idx), axis, world.others, world.bounds);
    RushState next = state;
    next.offsets[*idx] += action.direction == Direction::Forward ? d : -d;
    return next;
}

/// The red car counts as out once its center has crossed the exit edge.
inline bool is_solved(const Lot& lot, const RushState& state) {
    const auto c = pose(lot, state, lot.red_index()).center;
    switch (lot.exit.edge) {
        case Edge::Bottom: return c.y < 0;
        case Edge::Top: return c.y > lot.height;
        case Edge::Left: return c.x < 0;
        case Edge::Right: return c.x > lot.width;
    }
    return false;
}

/// All actions in canonical order: vehicles by label, forward before backward.
inline std::vector<RushAction> all_actions(const Lot& lot) {
    std::vector<char> labels;
    for (const auto& v : lot.vehicles) labels.push_back(v.label);
    std::sort(labels.begin(), labels.end());
    std::vector<RushAction> out;
    for (char l : labels) {
        out.push_back({l, Direction::Forward});
        out.push_back({l, Direction::Backward});
    }
    return out;
}

inline constexpr double kStateQuantum = 1e-4;
inline constexpr std::size_t kStateCap = 2'000'000;

struct StateKeyHash {
    std::size_t operator()(const std::vector<std::int64_t>& key) const {
        std::uint64_t h = 0x84222325cbf29ce4ULL;
        for (auto k : key) h = splitmix64(h ^ static_cast<std::uint64_t>(k));
        return static_cast<std::size_t>(h);
    }
};

inline std::vector<std::int64_t> state_key(const RushState& s) {
    std::vector<std::int64_t> key(s.offsets.size());
    for (std::size_t i = 0; i < key.size(); ++i) key[i] = std::llround(s.offsets[i] / kStateQuantum);
    return key;
}

struct SolveOptions {
    std::size_t state_cap = kStateCap;
    /// Give up (return nullopt) past this solution length.
    std::optional<std::size_t> max_depth;
};

/// Breadth-first search for a shortest action sequence that gets the red car out.
inline std::optional<std::vector<RushAction>> solve_bfs(const Lot& lot, const SolveOptions& opts = {}) {
    validate(lot);
    const auto actions = all_actions(lot);
    const RushState start = RushState::initial(lot);
    if (is_solved(lot, start)) return std::vector<RushAction>{};

    struct Node {
        RushState state;
        std::size_t parent;
        std::size_t action;
        std::size_t depth;
    };
    std::vector<Node> nodes;
    std::unordered_map<std::vector<std::int64_t>, std::size_t, StateKeyHash> seen;
    nodes.push_back({start, SIZE_MAX, SIZE_MAX, 0});
    seen.emplace(state_key(start), 0);

    auto path_to = [&](std::size_t i) {
        std::vector<RushAction> out;
        for (; nodes[i].parent != SIZE_MAX; i = nodes[i].parent) out.push_back(actions[nodes[i].action]);
        std::reverse(out.begin(), out.end());
        return out;
    };

    for (std::size_t head = 0; head < nodes.size(); ++head) {
        if (opts.max_depth && nodes[head].depth >= *opts.max_depth) break;
        for (std::size_t a = 0; a < actions.size(); ++a) {
            RushState next = apply(lot, nodes[head].state, actions[a]);
            auto key = state_key(next);
            if (seen.contains(key)) continue;
            const std::size_t depth = nodes[head].depth + 1;
            nodes.push_back({std::move(next), head, a, depth});
            seen.emplace(std::move(key), nodes.size() - 1);
            if (is_solved(lot, nodes.back().state)) return path_to(nodes.size() - 1);
            if (nodes.size() > opts.state_cap) fail(ErrorKind::SearchBudgetExceeded, "rush hour search exceeded its state cap");
        }
    }
    return std::nullopt;
}

/// Replays `actions` from the initial state; returns every visited state.
inline std::vector<RushState> trajectory(const Lot& lot, const std::vector<RushAction>& actions) {
    std::vector<RushState> out{RushState::initial(lot)};
    for (const auto& a : actions) out.push_back(apply(lot, out.back(), a));
    return out;
}

/// Every vehicle's length and width scaled about its center.
inline Lot inflated(const Lot& lot, double factor) {
    Lot out = lot;
    for (auto& v : out.vehicles) v.body = v.body.scaled(factor);
    return out;
}

/// Pairwise overlap / out-of-bounds check for a state (exit runout allowed for R).
inline bool is_consistent(const Lot& lot, const RushState& state) {
    std::vector<Shape> shapes;
    for (std::size_t i = 0; i < lot.vehicles.size(); ++i) {
        const auto body = pose(lot, state, i);
        const auto world = detail::world_for(lot, state, i);
        for (const auto& c : body.corners())
            if (!world.bounds.contains(c)) return false;
        shapes.emplace_back(body);
    }
    for (const auto& o : lot.obstacles) {
        for (const auto& c : o.corners())
            if (!lot.bounds().contains(c)) return false;
        shapes.emplace_back(geom::Polygon::from(o));
    }
    for (std::size_t i = 0; i < shapes.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (geom::overlap(shapes[i], shapes[j])) return false;
    return true;
}

/// Replays `solution` with every car enlarged by `factor`; false when the
/// enlarged scene is invalid or the red car no longer gets out.
inline bool inflation_check(const Lot& lot, const std::vector<RushAction>& solution, double factor) {
    const Lot big = inflated(lot, factor);
    RushState s = RushState::initial(big);
    if (!is_consistent(big, s)) return false;
    try {
        for (const auto& a : solution) s = apply(big, s, a);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::InvalidState) return false;
        throw;
    }
    return is_solved(big, s);
}

// ---------------------------------------------------------------------------
// Transcription

namespace detail {

inline std::string fmt2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string fmt_size(double v) {
    if (v == std::floor(v)) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.0f", v);
        return buf;
    }
    return fmt2(v);
}

inline std::string fmt_vec(Vec2 v) { return "(" + fmt2(v.x) + ", " + fmt2(v.y) + ")"; }

}  // namespace detail

inline std::string describe_vehicle(const Vehicle& v) {
    char rot[64];
    std::snprintf(rot, sizeof rot, "%.1f", v.body.heading);
    const Vec2 f = v.forward();
    std::string who = v.label == 'R' ? "a red car (R)" : std::string("a car (") + v.label + ")";
    return "There is " + who + " at center " + detail::fmt_vec(v.body.center) + " with length " +
           detail::fmt2(v.body.length) + " and width " + detail::fmt2(v.body.width) + ", rotated by " + rot +
           "°, i.e. the car can move forwards along the " + detail::fmt_vec(f) + " axis and backwards along " +
           detail::fmt_vec(-f) + ".";
}

/// Deterministic state specification of the initial lot.
inline std::string transcribe(const Lot& lot) {
    std::string out = "The parking lot has a size of " + detail::fmt_size(lot.width) + " × " +
                      detail::fmt_size(lot.height) + ".\n\n";
    const auto& e = lot.exit;
    std::string fixed, var;
    switch (e.edge) {
        case Edge::Bottom: fixed = "y=0"; var = "x"; break;
        case Edge::Top: fixed = "y=" + detail::fmt_size(lot.height); var = "x"; break;
        case Edge::Left: fixed = "x=0"; var = "y"; break;
        case Edge::Right: fixed = "x=" + detail::fmt_size(lot.width); var = "y"; break;
    }
    out += std::string("There is an exit on the ") + edge_name(e.edge) + " (" + fixed + ") edge, from " + var + "=" +
           detail::fmt2(e.from) + " to " + var + "=" + detail::fmt2(e.to) + ".\n\n";
    out += describe_vehicle(lot.vehicles[lot.red_index()]) + "\n";
    for (const auto& v : lot.vehicles)
        if (v.label != 'R') out += describe_vehicle(v) + "\n";
    if (!lot.obstacles.empty()) {
        out += "\n";
        for (const auto& o : lot.obstacles)
            out += "There is a static, immovable object at (" + detail::fmt_vec(o.lo) + ", " + detail::fmt_vec(o.hi) + ").\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Generation

struct GeneratorParams {
    double lot_size = 10.0;
    double exit_width = 1.0;
    double red_width = 0.9;
    double inflation = 1.05;
    std::size_t attempts = 10'000;
};

struct Generated {
    Lot lot;
    std::vector<RushAction> solution;
    std::size_t attempts = 0;
};

namespace detail {

inline constexpr double kHeadings[] = {-45.0, -30.0, -15.0, 0.0, 15.0, 30.0, 45.0, 90.0};

struct LevelSchedule {
    int min_primary, max_primary;
    int total_vehicles;  // including R, +-1
};

inline LevelSchedule schedule(int level) {
    static constexpr int totals[] = {2, 4, 5, 6, 7};
    if (level <= 2) return {0, 1, totals[level - 1]};
    return {1, 2, totals[level - 1]};
}

inline double q(double v) { return quantize(v, 0.01); }

inline bool fits(const Lot& lot, const Shape& s) {
    for (const auto& piece : geom::convex_pieces(s))
        for (const auto& c : piece)
            if (c.x < 0.05 || c.y < 0.05 || c.x > lot.width - 0.05 || c.y > lot.height - 0.05) return false;
    for (const auto& v : lot.vehicles)
        if (geom::overlap(s, Shape{v.body.scaled(1.12)})) return false;
    for (const auto& o : lot.obstacles)
        if (geom::overlap(s, Shape{geom::Polygon::from(AxisRect{o.lo - Vec2{0.1, 0.1}, o.hi + Vec2{0.1, 0.1}})})) return false;
    return true;
}

inline OrientedRect sample_car(Rng& rng, Point2 center, double heading) {
    return {{q(center.x), q(center.y)}, q(rng.uniform(1.8, 2.1)), q(rng.uniform(0.85, 0.95)), heading};
}

inline std::optional<Lot> sample_lot(int level, Rng& rng, const GeneratorParams& p) {
    Lot lot;
    lot.width = lot.height = p.lot_size;
    const double L = p.lot_size;
    const Edge edge = static_cast<Edge>(rng.integer(0, 3));
    const double exit_center = q(rng.uniform(2.0, L - 2.0));
    lot.exit = {edge, q(exit_center - p.exit_width / 2), q(exit_center - p.exit_width / 2) + p.exit_width};

    // Red car on the far side, heading away from the exit.
    const double red_len = q(rng.uniform(1.8, 2.0));
    const double gap = q(rng.uniform(0.05, 0.6));
    const double along = L - gap - red_len / 2;  // distance of the red center from the exit edge
    const double cx = lot.exit.from + p.exit_width / 2;
    Point2 red_center;
    double red_heading = 0;
    Vec2 to_exit;
    switch (edge) {
        case Edge::Bottom: red_center = {cx, along}; red_heading = 90; to_exit = {0, -1}; break;
        case Edge::Top: red_center = {cx, L - along}; red_heading = -90; to_exit = {0, 1}; break;
        case Edge::Left: red_center = {along, cx}; red_heading = 0; to_exit = {-1, 0}; break;
        case Edge::Right: red_center = {L - along, cx}; red_heading = 180; to_exit = {1, 0}; break;
    }
    red_center = {q(red_center.x), q(red_center.y)};
    lot.vehicles.push_back({'R', {red_center, red_len, p.red_width, geom::wrap_degrees(red_heading)}});

    const auto sched = schedule(level);
    const int n_primary = static_cast<int>(rng.integer(sched.min_primary, sched.max_primary));
    const int total = std::max<int>(1 + n_primary, sched.total_vehicles + static_cast<int>(rng.integer(-1, 1)));

    std::vector<OrientedRect> primaries;
    const double red_axis_deg = red_heading;
    const double path_len = along - red_len / 2;
    for (int k = 0; k < n_primary; ++k) {
        bool placed = false;
        for (int tries = 0; tries < 60 && !placed; ++tries) {
            double h;
            do {
                h = rng.pick<double>(kHeadings);
            } while (std::abs(std::sin(geom::deg2rad(h - red_axis_deg))) < 0.7);
            const double t = rng.uniform(1.2, path_len - 0.6);
            const Point2 c = red_center + to_exit * (red_len / 2 + t) + geom::perp(to_exit) * rng.uniform(-0.3, 0.3);
            const auto car = sample_car(rng, c, h);
            if (fits(lot, car)) {
                lot.vehicles.push_back({'?', car});
                primaries.push_back(car);
                placed = true;
            }
        }
        if (!placed) return std::nullopt;
    }

    // Remaining cars: biased onto the slide paths of the primary blockers.
    for (int k = static_cast<int>(lot.vehicles.size()); k < total; ++k) {
        bool placed = false;
        for (int tries = 0; tries < 60 && !placed; ++tries) {
            const double h = rng.pick<double>(kHeadings);
            Point2 c;
            if (!primaries.empty() && rng.chance(0.65)) {
                const auto& pb = primaries[rng.index(primaries.size())];
                const double sgn = rng.chance(0.5) ? 1.0 : -1.0;
                c = pb.center + pb.forward() * (sgn * rng.uniform(1.6, 3.2)) + geom::perp(pb.forward()) * rng.uniform(-0.4, 0.4);
            } else {
                c = {rng.uniform(1.0, L - 1.0), rng.uniform(1.0, L - 1.0)};
            }
            const auto car = sample_car(rng, c, h);
            if (fits(lot, car)) {
                lot.vehicles.push_back({'?', car});
                placed = true;
            }
        }
        if (!placed) return std::nullopt;
    }

    if (rng.chance(0.5)) {
        for (int tries = 0; tries < 30; ++tries) {
            const double w = q(rng.uniform(0.5, 2.0)), h = q(rng.uniform(0.5, 2.0));
            const Point2 lo{q(rng.uniform(0.3, L - 0.3 - w)), q(rng.uniform(0.3, L - 0.3 - h))};
            const AxisRect o{lo, lo + Vec2{w, h}};
            if (fits(lot, geom::Polygon::from(AxisRect{o.lo - Vec2{0.1, 0.1}, o.hi + Vec2{0.1, 0.1}}))) {
                lot.obstacles.push_back(o);
                break;
            }
        }
    }

    // Labels: R stays, the rest get A, B, ... skipping R, in placement order.
    char next = 'A';
    for (auto& v : lot.vehicles) {
        if (v.label == 'R') continue;
        if (next == 'R') ++next;
        v.label = next++;
    }
    std::sort(lot.vehicles.begin(), lot.vehicles.end(), [](const Vehicle& a, const Vehicle& b) { return a.label < b.label; });
    return lot;
}

}  // namespace detail

/// Lot whose shortest solution has exactly `level` moves.
inline Generated generate(int level, std::uint64_t seed, const GeneratorParams& params = {}) {
    if (level < 1 || level > 5) fail(ErrorKind::GenerationFailed, "rush hour level must be in 1..5");
    Rng rng(splitmix64(seed ^ 0x5255534855ULL));
    for (std::size_t attempt = 1; attempt <= params.attempts; ++attempt) {
        auto lot = detail::sample_lot(level, rng, params);
        if (!lot) continue;
        SolveOptions opts;
        opts.max_depth = static_cast<std::size_t>(level);
        const auto sol = solve_bfs(*lot, opts);
        if (!sol || sol->size() != static_cast<std::size_t>(level)) continue;
        if (!inflation_check(*lot, *sol, params.inflation)) continue;
        return {std::move(*lot), *sol, attempt};
    }
    fail(ErrorKind::GenerationFailed, "rush hour generator exhausted its attempt budget");
}

}  // namespace mentes::rushhour
