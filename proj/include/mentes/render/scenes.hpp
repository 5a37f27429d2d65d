#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "mentes/formboard.hpp"
#include "mentes/hingefold.hpp"
#include "mentes/paperfold.hpp"
#include "mentes/render/raster.hpp"
#include "mentes/rng.hpp"
#include "mentes/rushhour.hpp"
#include "mentes/slidepuzzle.hpp"

namespace mentes::render {

struct RenderSpec {
    int width = 512;
    int height = 512;
    Rgb background = kWhite;
    double stroke = 2.0;
    int font_scale = 2;
    std::map<char, Rgb> palette;  // overrides for vehicle / piece colours
};

/// Where a label was drawn, in pixels; lets tests check labels without OCR.
struct LabelMark {
    char label;
    double x, y;
};

struct Rendered {
    Image image;
    std::vector<LabelMark> labels;
};

/// World (y up) to pixel (y down) mapping.
struct View {
    double scale = 1.0;
    double ox = 0.0, oy = 0.0;  // pixel position of world origin

    Point2 px(Point2 p) const { return {ox + p.x * scale, oy - p.y * scale}; }

    std::vector<Point2> px(const std::vector<Point2>& pts) const {
        std::vector<Point2> out;
        out.reserve(pts.size());
        for (auto p : pts) out.push_back(px(p));
        return out;
    }

    /// Fits `box` into the pixel rectangle [x0, x0+w] x [y0, y0+h], centred.
    static View fit(const geom::AxisRect& box, double x0, double y0, double w, double h, double max_scale = 1e9) {
        View v;
        v.scale = std::min({w / std::max(box.width(), 1e-9), h / std::max(box.height(), 1e-9), max_scale});
        const Point2 c = box.center();
        v.ox = x0 + w / 2 - c.x * v.scale;
        v.oy = y0 + h / 2 + c.y * v.scale;
        return v;
    }
};

inline geom::AxisRect merge(geom::AxisRect a, const geom::AxisRect& b) {
    a.lo = {std::min(a.lo.x, b.lo.x), std::min(a.lo.y, b.lo.y)};
    a.hi = {std::max(a.hi.x, b.hi.x), std::max(a.hi.y, b.hi.y)};
    return a;
}

inline geom::AxisRect bounds_of(const std::vector<geom::Polygon>& polys) {
    geom::AxisRect box = geom::bounding_box(polys.at(0).vertices);
    for (const auto& p : polys) box = merge(box, geom::bounding_box(p.vertices));
    return box;
}

// ---------------------------------------------------------------------------
// Rush Hour

inline constexpr Rgb kRed{214, 39, 40};
inline constexpr Rgb kExitGreen{170, 230, 160};
inline constexpr Rgb kBorder{70, 70, 70};

inline Rgb vehicle_color(char label, const RenderSpec& spec) {
    if (auto it = spec.palette.find(label); it != spec.palette.end()) return it->second;
    if (label == 'R') return kRed;
    static constexpr std::array<Rgb, 8> cycle = {{
        {31, 119, 180}, {255, 160, 60}, {44, 160, 44}, {148, 103, 189}, {140, 86, 75}, {227, 119, 194}, {188, 189, 34}, {23, 190, 207},
    }};
    return cycle[static_cast<std::size_t>(label - 'A') % cycle.size()];
}

inline Rendered render_rush(const rushhour::Lot& lot, const rushhour::RushState& state, const RenderSpec& spec = {}) {
    using namespace rushhour;
    if (state.offsets.size() != lot.vehicles.size()) fail(ErrorKind::InvalidState, "state does not match the lot");
    Rendered out{Image(spec.width, spec.height, spec.background), {}};
    Image& img = out.image;
    const double margin = 24;
    const View v = View::fit(lot.bounds(), margin, margin, spec.width - 2 * margin, spec.height - 2 * margin);

    // Exit: a green band straddling the open stretch of the boundary.
    const double band = 10.0 / v.scale;
    const auto& e = lot.exit;
    geom::AxisRect ex;
    switch (e.edge) {
        case Edge::Bottom: ex = {{e.from, -band}, {e.to, band}}; break;
        case Edge::Top: ex = {{e.from, lot.height - band}, {e.to, lot.height + band}}; break;
        case Edge::Left: ex = {{-band, e.from}, {band, e.to}}; break;
        case Edge::Right: ex = {{lot.width - band, e.from}, {lot.width + band, e.to}}; break;
    }
    fill_polygon(img, v.px(geom::Polygon::from(ex).vertices), kExitGreen);

    const auto outline = v.px(geom::Polygon::from(lot.bounds()).vertices);
    for (std::size_t i = 0; i < 4; ++i) {
        Point2 a = outline[i], b = outline[(i + 1) % 4];
        stroke_segment(img, a, b, spec.stroke, kBorder);
    }
    // Re-open the exit on top of the border line.
    fill_polygon(img, v.px(geom::Polygon::from(geom::AxisRect{ex.lo + Vec2{0.02, 0.02}, ex.hi - Vec2{0.02, 0.02}}).vertices), kExitGreen);

    // Motion axes, clipped to the lot.
    for (std::size_t i = 0; i < lot.vehicles.size(); ++i) {
        const auto body = pose(lot, state, i);
        const Vec2 f = body.forward();
        double lo = -1e9, hi = 1e9;
        auto clip = [&](double p, double d, double min, double max) {
            if (std::abs(d) < 1e-12) return;
            double t0 = (min - p) / d, t1 = (max - p) / d;
            if (t0 > t1) std::swap(t0, t1);
            lo = std::max(lo, t0);
            hi = std::min(hi, t1);
        };
        clip(body.center.x, f.x, 0, lot.width);
        clip(body.center.y, f.y, 0, lot.height);
        if (lo < hi) dashed_segment(img, v.px(body.center + f * lo), v.px(body.center + f * hi), 1.5, 8, 6, {150, 150, 150});
    }

    for (const auto& o : lot.obstacles) fill_polygon(img, v.px(geom::Polygon::from(o).vertices), kBlack);

    for (std::size_t i = 0; i < lot.vehicles.size(); ++i) {
        const auto& veh = lot.vehicles[i];
        const auto body = pose(lot, state, i);
        const auto corners = v.px(geom::Polygon::from(body).vertices);
        fill_polygon(img, corners, vehicle_color(veh.label, spec));
        stroke_polygon(img, corners, spec.stroke, kBlack);
        const Vec2 f = body.forward();
        const Point2 tip = body.center + f * (body.length / 2 - 0.08);
        const Vec2 fp{f.x, -f.y};  // pixel space flips y
        const Point2 tip_px = v.px(tip);
        const double head = std::min(body.width * 0.45, 0.4) * v.scale;
        stroke_segment(img, v.px(body.center + f * (body.length * 0.12)), tip_px - fp * (head * 0.5), 3, kWhite);
        fill_arrow_head(img, tip_px, fp, head, kWhite);
        const Point2 c = v.px(body.center - f * (body.length * 0.22));
        draw_text_centered(img, c.x, c.y, std::string(1, veh.label), spec.font_scale, kBlack);
        out.labels.push_back({veh.label, c.x, c.y});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Sliding Puzzle

/// Deterministic stand-in for a natural photograph: sky, sun, hills, trees.
inline Image synthetic_image(int id, int size = 512) {
    Rng rng(splitmix64(0x494d414745ULL + static_cast<std::uint64_t>(id)));
    Image img(size, size);
    const Rgb top{static_cast<std::uint8_t>(rng.integer(40, 120)), static_cast<std::uint8_t>(rng.integer(100, 180)), static_cast<std::uint8_t>(rng.integer(180, 255))};
    const Rgb bottom{static_cast<std::uint8_t>(rng.integer(180, 255)), static_cast<std::uint8_t>(rng.integer(150, 230)), static_cast<std::uint8_t>(rng.integer(120, 200))};
    for (int y = 0; y < size; ++y) {
        const int t = y * 256 / size;
        const Rgb c{static_cast<std::uint8_t>((top.r * (256 - t) + bottom.r * t) / 256), static_cast<std::uint8_t>((top.g * (256 - t) + bottom.g * t) / 256),
                    static_cast<std::uint8_t>((top.b * (256 - t) + bottom.b * t) / 256)};
        for (int x = 0; x < size; ++x) img.set(x, y, c);
    }
    const double s = size;
    fill_circle(img, {rng.uniform(0.15, 0.85) * s, rng.uniform(0.1, 0.35) * s}, rng.uniform(0.06, 0.12) * s, {255, 230, 120});
    for (int layer = 0; layer < 3; ++layer) {
        std::vector<Point2> hill{{0, s}};
        const double base = s * (0.45 + 0.15 * layer);
        const int bumps = static_cast<int>(rng.integer(3, 6));
        for (int k = 0; k <= 32; ++k) {
            const double x = s * k / 32.0;
            double y = base;
            for (int b = 1; b <= bumps; ++b) y -= s * 0.03 * std::sin(x / s * 3.14159 * b + rng.uniform(0, 0.3) + layer);
            hill.push_back({x, y});
        }
        hill.push_back({s, s});
        const Rgb g{static_cast<std::uint8_t>(rng.integer(30, 110)), static_cast<std::uint8_t>(rng.integer(90, 170) - 20 * layer), static_cast<std::uint8_t>(rng.integer(20, 80))};
        fill_polygon(img, hill, g);
    }
    const int trees = static_cast<int>(rng.integer(3, 8));
    for (int t = 0; t < trees; ++t) {
        const double x = rng.uniform(0.05, 0.95) * s, y = rng.uniform(0.65, 0.95) * s, h = rng.uniform(0.08, 0.18) * s;
        fill_rect(img, {x - h * 0.06, y - h * 0.3}, {x + h * 0.06, y}, {100, 60, 30});
        fill_polygon(img, {{x, y - h}, {x + h * 0.35, y - h * 0.25}, {x - h * 0.35, y - h * 0.25}}, {20, static_cast<std::uint8_t>(rng.integer(90, 140)), 40});
    }
    return img;
}

inline Rendered render_slide(const slidepuzzle::Board& board, const Image& source, const RenderSpec& spec = {}) {
    slidepuzzle::validate(board);
    if (source.width <= 0 || source.height <= 0) fail(ErrorKind::MissingAsset, "sliding puzzle source image is empty");
    Rendered out{Image(spec.width, spec.height, kBlack), {}};
    const int n = board.n;
    for (int y = 0; y < spec.height; ++y) {
        const int row = y * n / spec.height;
        for (int x = 0; x < spec.width; ++x) {
            const int col = x * n / spec.width;
            const int tile = board.perm[static_cast<std::size_t>(row * n + col)];
            if (tile == board.blank_tile()) continue;
            // Offset inside the cell, mapped into the tile's home cell of the source.
            const int cx = x - col * spec.width / n, cy = y - row * spec.height / n;
            const int hx = (tile % n) * spec.width / n + cx, hy = (tile / n) * spec.height / n + cy;
            const int sx = std::min(source.width - 1, static_cast<int>(static_cast<long>(hx) * source.width / spec.width));
            const int sy = std::min(source.height - 1, static_cast<int>(static_cast<long>(hy) * source.height / spec.height));
            out.image.set(x, y, source.at(sx, sy));
        }
    }
    for (int k = 1; k < n; ++k) {
        const double x = static_cast<double>(k * spec.width / n), y = static_cast<double>(k * spec.height / n);
        stroke_segment(out.image, {x, 0}, {x, static_cast<double>(spec.height)}, spec.stroke, {30, 30, 30});
        stroke_segment(out.image, {0, y}, {static_cast<double>(spec.width), y}, spec.stroke, {30, 30, 30});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Hinge Folding

inline constexpr std::array<Rgb, 6> kHingeShapeColors = {{
    {120, 170, 230}, {250, 190, 110}, {140, 210, 140}, {230, 140, 150}, {190, 160, 230}, {240, 220, 120},
}};
inline constexpr Rgb kSilhouette{90, 90, 90};

struct HingeFrame {
    geom::AxisRect left;   // world box shown in the left panel
    geom::AxisRect right;  // world box shown in the right panel
};

/// One frame for every state so the CoT images share a camera.
inline HingeFrame hinge_frame(const std::vector<hingefold::HingeChain>& states, const std::vector<geom::Polygon>& target) {
    geom::AxisRect left = bounds_of(states.at(0).shapes);
    for (const auto& s : states) left = merge(left, bounds_of(s.shapes));
    return {left, bounds_of(target)};
}

inline Rendered render_hinge(const hingefold::HingeChain& chain, const std::vector<geom::Polygon>& target, const HingeFrame& frame,
                             const RenderSpec& spec = {}) {
    const int w = spec.width * 2, h = spec.height;
    Rendered out{Image(w, h, spec.background), {}};
    Image& img = out.image;
    const double pad = 40;
    const View fl = View::fit(frame.left, pad, pad, spec.width - 2 * pad, h - 2 * pad);
    const View fr = View::fit(frame.right, spec.width + pad, pad, spec.width - 2 * pad, h - 2 * pad);
    // Both panels share one scale so sizes are comparable.
    const double scale = std::min(fl.scale, fr.scale);
    const View vl = View::fit(frame.left, pad, pad, spec.width - 2 * pad, h - 2 * pad, scale);
    const View vr = View::fit(frame.right, spec.width + pad, pad, spec.width - 2 * pad, h - 2 * pad, scale);

    stroke_segment(img, {static_cast<double>(spec.width), 10.0}, {static_cast<double>(spec.width), h - 10.0}, 1, {200, 200, 200});
    for (std::size_t i = 0; i < chain.shapes.size(); ++i) {
        const auto pts = vl.px(chain.shapes[i].vertices);
        fill_polygon(img, pts, kHingeShapeColors[i % kHingeShapeColors.size()]);
        stroke_polygon(img, pts, spec.stroke, kBlack);
    }
    for (const auto& hinge : chain.hinges) {
        const Point2 p = vl.px(hinge.pivot);
        fill_circle(img, p, 6, kBlack);
        fill_circle(img, p, 3.5, kWhite);
        const Point2 at{p.x + 14, p.y - 14};
        draw_text_centered(img, at.x, at.y, std::string(1, hinge.label), spec.font_scale, {200, 0, 0});
        out.labels.push_back({hinge.label, at.x, at.y});
    }
    for (const auto& t : target) fill_polygon(img, vr.px(t.vertices), kSilhouette);
    return out;
}

// ---------------------------------------------------------------------------
// Paper Fold

inline constexpr Rgb kPaper{245, 236, 210};
inline constexpr Rgb kHole{30, 30, 30};

namespace detail {

inline void draw_stack(Image& img, const View& v, const paperfold::LayerStack& stack) {
    for (std::size_t i = 0; i < stack.layers.size(); ++i) {
        const auto pts = v.px(stack.layers[i].region);
        fill_polygon(img, pts, shade(kPaper, 1.0 - 0.04 * static_cast<double>(std::min<std::size_t>(i, 8))));
        stroke_polygon(img, pts, 1.5, {120, 110, 90});
    }
}

inline void draw_holes(Image& img, const View& v, const paperfold::HolePattern& holes) {
    for (auto h : holes) fill_circle(img, v.px(h), std::max(3.0, 0.035 * v.scale), kHole);
}

inline void draw_fold_line(Image& img, const View& v, const paperfold::Fold& f) {
    // The paper never leaves [-0.1, 1.1]^2, so clip the line to that box.
    const auto line = f.line();
    double lo = -1e9, hi = 1e9;
    auto clip = [&](double p, double d) {
        if (std::abs(d) < 1e-12) return;
        double t0 = (-0.05 - p) / d, t1 = (1.05 - p) / d;
        if (t0 > t1) std::swap(t0, t1);
        lo = std::max(lo, t0);
        hi = std::min(hi, t1);
    };
    clip(line.point.x, line.direction.x);
    clip(line.point.y, line.direction.y);
    if (lo >= hi) return;
    const Point2 a = line.point + line.direction * lo, b = line.point + line.direction * hi;
    dashed_segment(img, v.px(a), v.px(b), 2, 7, 5, {200, 30, 30});
    // Arrow from the moving side towards the crease.
    const Point2 mid = (a + b) * 0.5;
    const Vec2 normal = geom::perp(line.direction) * static_cast<double>(f.moving_side);
    const Point2 from = v.px(mid + normal * 0.18), to = v.px(mid + normal * 0.04);
    stroke_segment(img, from, to, 2, {200, 30, 30});
    fill_arrow_head(img, to, to - from, 8, {200, 30, 30});
}

inline View paper_view(double x0, double y0, double size) { return View::fit({{-0.05, -0.05}, {1.05, 1.05}}, x0, y0, size, size); }

}  // namespace detail

/// Top row: the folds then the punch. Bottom row: options A to E.
inline Rendered render_paper_combined(const std::vector<paperfold::Fold>& folds, Point2 punch_at, const paperfold::Options& options,
                                      const RenderSpec& spec = {}) {
    const int panel = 160, gap = 12, label_h = 26;
    const int cols = std::max<int>(static_cast<int>(folds.size()) + 1, 5);
    const int w = cols * panel + (cols + 1) * gap;
    const int h = 2 * panel + label_h + 3 * gap;
    Rendered out{Image(w, h, spec.background), {}};
    Image& img = out.image;
    const auto states = paperfold::fold_states(folds);
    for (std::size_t i = 0; i < states.size(); ++i) {
        const View v = detail::paper_view(gap + static_cast<double>(i) * (panel + gap), gap, panel);
        detail::draw_stack(img, v, states[i]);
        if (i < folds.size()) detail::draw_fold_line(img, v, folds[i]);
        else detail::draw_holes(img, v, {punch_at});
    }
    const double row2 = 2.0 * gap + panel;
    for (std::size_t k = 0; k < 5; ++k) {
        const double x0 = gap + static_cast<double>(k) * (panel + gap);
        const View v = detail::paper_view(x0, row2, panel);
        detail::draw_stack(img, v, paperfold::LayerStack::flat());
        detail::draw_holes(img, v, options.patterns[k]);
        const char label = static_cast<char>('A' + k);
        const double lx = x0 + panel / 2.0, ly = row2 + panel + label_h / 2.0;
        draw_text_centered(img, lx, ly, std::string(1, label), spec.font_scale, kBlack);
        out.labels.push_back({label, lx, ly});
    }
    return out;
}

/// One unfolding frame: a stack with the holes as they appear on it.
inline Rendered render_paper_state(const paperfold::LayerStack& stack, const paperfold::HolePattern& holes, const RenderSpec& spec = {}) {
    Rendered out{Image(spec.width, spec.height, spec.background), {}};
    const double pad = 24;
    const View v = detail::paper_view(pad, pad, std::min(spec.width, spec.height) - 2 * pad);
    detail::draw_stack(out.image, v, stack);
    detail::draw_holes(out.image, v, holes);
    return out;
}

// ---------------------------------------------------------------------------
// Form Board

inline Rgb piece_color(char label, const RenderSpec& spec) {
    if (auto it = spec.palette.find(label); it != spec.palette.end()) return it->second;
    const auto c = formboard::kPieceColors[static_cast<std::size_t>(label - 'A') % 5];
    return {c.r, c.g, c.b};
}

/// `placed` lists labels already moved into the target (CoT frames).
inline Rendered render_formboard(const formboard::PieceSet& set, const std::vector<char>& placed, const RenderSpec& spec = {}) {
    const int w = spec.width * 2, h = spec.height;
    Rendered out{Image(w, h, spec.background), {}};
    Image& img = out.image;
    const double pad = 30;
    // Right panel: 3 + 2 slots.
    const double slot_w = (spec.width - 2 * pad) / 3.0, slot_h = (h - 2 * pad) / 2.0 - 24;
    double scale = std::min((spec.width - 2 * pad) / bounds_of({set.target}).width(), (h - 2 * pad) / bounds_of({set.target}).height());
    for (const auto& p : set.pieces) {
        const auto b = geom::bounding_box(p.shape.vertices);
        scale = std::min({scale, (slot_w - 12) / b.width(), (slot_h - 12) / b.height()});
    }
    const View vt = View::fit(bounds_of({set.target}), pad, pad, spec.width - 2 * pad, h - 2 * pad, scale);
    stroke_segment(img, {static_cast<double>(spec.width), 10.0}, {static_cast<double>(spec.width), h - 10.0}, 1, {200, 200, 200});
    for (char l : placed) {
        const auto& p = set.piece(l);
        if (!p.translation) fail(ErrorKind::InvalidState, "only answer pieces can be placed");
        const auto pts = vt.px(p.shape.translated(*p.translation).vertices);
        fill_polygon(img, pts, piece_color(l, spec));
        stroke_polygon(img, pts, 1.5, {60, 60, 60});
    }
    stroke_polygon(img, vt.px(set.target.vertices), spec.stroke + 1, kBlack);

    for (std::size_t k = 0; k < 5; ++k) {
        const auto& p = set.pieces[k];
        const double sx = spec.width + pad + static_cast<double>(k < 3 ? k : k - 3) * slot_w + (k < 3 ? 0.0 : slot_w / 2);
        const double sy = pad + (k < 3 ? 0.0 : slot_h + 24);
        const double lx = sx + slot_w / 2, ly = sy + slot_h + 12;
        draw_text_centered(img, lx, ly, std::string(1, p.label), spec.font_scale, kBlack);
        out.labels.push_back({p.label, lx, ly});
        if (std::find(placed.begin(), placed.end(), p.label) != placed.end()) continue;
        const View vs = View::fit(geom::bounding_box(p.shape.vertices), sx, sy, slot_w, slot_h, scale);
        const auto pts = vs.px(p.shape.vertices);
        fill_polygon(img, pts, piece_color(p.label, spec));
        stroke_polygon(img, pts, 1.5, {60, 60, 60});
    }
    return out;
}

}  // namespace mentes::render
