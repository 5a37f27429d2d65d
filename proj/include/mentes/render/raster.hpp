#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "mentes/error.hpp"
#include "mentes/geom.hpp"

namespace mentes::render {

using geom::Point2;
using geom::Vec2;

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
    bool operator==(const Rgb&) const = default;
};

inline constexpr Rgb kWhite{255, 255, 255};
inline constexpr Rgb kBlack{0, 0, 0};

inline Rgb shade(Rgb c, double f) {
    auto s = [&](std::uint8_t v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v * f), 0L, 255L)); };
    return {s(c.r), s(c.g), s(c.b)};
}

/// 8-bit RGB, row-major, top row first.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;

    Image() = default;
    Image(int w, int h, Rgb fill = kWhite) : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3) {
        for (std::size_t i = 0; i < rgb.size(); i += 3) {
            rgb[i] = fill.r;
            rgb[i + 1] = fill.g;
            rgb[i + 2] = fill.b;
        }
    }

    Rgb at(int x, int y) const {
        const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
        return {rgb[i], rgb[i + 1], rgb[i + 2]};
    }

    void set(int x, int y, Rgb c) {
        if (x < 0 || y < 0 || x >= width || y >= height) return;
        const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
        rgb[i] = c.r;
        rgb[i + 1] = c.g;
        rgb[i + 2] = c.b;
    }

    bool operator==(const Image&) const = default;
};

// ---------------------------------------------------------------------------
// Polygon fill: 4x4 samples per pixel, nonzero winding, integer blending.

inline constexpr int kSub = 4;

inline void fill_contours(Image& img, std::span<const std::vector<Point2>> contours, Rgb color) {
    double minx = 1e300, miny = 1e300, maxx = -1e300, maxy = -1e300;
    for (const auto& c : contours)
        for (auto p : c) {
            minx = std::min(minx, p.x);
            maxx = std::max(maxx, p.x);
            miny = std::min(miny, p.y);
            maxy = std::max(maxy, p.y);
        }
    if (minx > maxx) return;
    const int x0 = std::max(0, static_cast<int>(std::floor(minx)));
    const int x1 = std::min(img.width - 1, static_cast<int>(std::ceil(maxx)));
    const int y0 = std::max(0, static_cast<int>(std::floor(miny)));
    const int y1 = std::min(img.height - 1, static_cast<int>(std::ceil(maxy)));
    if (x0 > x1 || y0 > y1) return;

    struct Crossing {
        double x;
        int dir;
    };
    std::vector<Crossing> xs;
    std::vector<int> cover(static_cast<std::size_t>(x1 - x0 + 1));
    for (int py = y0; py <= y1; ++py) {
        std::fill(cover.begin(), cover.end(), 0);
        for (int s = 0; s < kSub; ++s) {
            const double sy = py + (s + 0.5) / kSub;
            xs.clear();
            for (const auto& c : contours)
                for (std::size_t i = 0, n = c.size(); i < n; ++i) {
                    const Point2 a = c[i], b = c[(i + 1) % n];
                    if ((a.y <= sy && b.y > sy) || (b.y <= sy && a.y > sy)) {
                        const double t = (sy - a.y) / (b.y - a.y);
                        xs.push_back({a.x + t * (b.x - a.x), b.y > a.y ? 1 : -1});
                    }
                }
            std::sort(xs.begin(), xs.end(), [](const Crossing& l, const Crossing& r) { return l.x < r.x || (l.x == r.x && l.dir < r.dir); });
            int winding = 0;
            for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
                winding += xs[i].dir;
                if (winding == 0) continue;
                // Sample columns whose centres fall in [xs[i].x, xs[i+1].x).
                const long lo = std::max<long>(static_cast<long>(std::ceil(xs[i].x * kSub - 0.5)), static_cast<long>(x0) * kSub);
                const long hi = std::min<long>(static_cast<long>(std::ceil(xs[i + 1].x * kSub - 0.5)), static_cast<long>(x1 + 1) * kSub);
                for (long k = lo; k < hi; ++k) ++cover[static_cast<std::size_t>(k / kSub - x0)];
            }
        }
        for (int px = x0; px <= x1; ++px) {
            const int cov = cover[static_cast<std::size_t>(px - x0)];
            if (cov == 0) continue;
            constexpr int full = kSub * kSub;
            const Rgb old = img.at(px, py);
            auto mix = [&](std::uint8_t c, std::uint8_t o) { return static_cast<std::uint8_t>((c * cov + o * (full - cov) + full / 2) / full); };
            img.set(px, py, {mix(color.r, old.r), mix(color.g, old.g), mix(color.b, old.b)});
        }
    }
}

inline void fill_polygon(Image& img, const std::vector<Point2>& poly, Rgb color) {
    const std::vector<Point2> one[] = {poly};
    fill_contours(img, one, color);
}

inline void fill_rect(Image& img, Point2 lo, Point2 hi, Rgb color) {
    fill_polygon(img, {lo, {hi.x, lo.y}, hi, {lo.x, hi.y}}, color);
}

/// Segment as a quad with square caps.
inline void stroke_segment(Image& img, Point2 a, Point2 b, double width, Rgb color) {
    const Vec2 d = b - a;
    const double len = geom::norm(d);
    if (len < 1e-12) return;
    const Vec2 u = d / len;
    const Vec2 n = geom::perp(u) * (width / 2);
    const Vec2 cap = u * (width / 2);
    fill_polygon(img, {a - cap - n, b + cap - n, b + cap + n, a - cap + n}, color);
}

inline void stroke_polygon(Image& img, const std::vector<Point2>& poly, double width, Rgb color) {
    for (std::size_t i = 0, n = poly.size(); i < n; ++i) stroke_segment(img, poly[i], poly[(i + 1) % n], width, color);
}

inline void dashed_segment(Image& img, Point2 a, Point2 b, double width, double dash, double gap, Rgb color) {
    const Vec2 d = b - a;
    const double len = geom::norm(d);
    if (len < 1e-12) return;
    const Vec2 u = d / len;
    for (double t = 0; t < len; t += dash + gap) stroke_segment(img, a + u * t, a + u * std::min(len, t + dash), width, color);
}

inline std::vector<Point2> circle(Point2 c, double r, int segments = 48) {
    std::vector<Point2> out;
    for (int i = 0; i < segments; ++i) out.push_back(c + geom::unit_from_degrees(360.0 * i / segments) * r);
    return out;
}

inline void fill_circle(Image& img, Point2 c, double r, Rgb color) { fill_polygon(img, circle(c, r), color); }

/// Arrow head pointing along `dir` with its tip at `tip`.
inline void fill_arrow_head(Image& img, Point2 tip, Vec2 dir, double size, Rgb color) {
    const Vec2 u = geom::normalized(dir);
    const Vec2 n = geom::perp(u);
    fill_polygon(img, {tip, tip - u * size + n * (size * 0.6), tip - u * size - n * (size * 0.6)}, color);
}

/// Copies `src` into `dst` with its top-left corner at (x, y).
inline void blit(Image& dst, const Image& src, int x, int y) {
    for (int j = 0; j < src.height; ++j)
        for (int i = 0; i < src.width; ++i) dst.set(x + i, y + j, src.at(i, j));
}

// ---------------------------------------------------------------------------
// 5x7 bitmap font

namespace detail {

struct Glyph {
    char ch;
    std::array<std::string_view, 7> rows;
};

// clang-format off
inline constexpr Glyph kGlyphs[] = {
    {'A', {"01110", "10001", "10001", "11111", "10001", "10001", "10001"}},
    {'B', {"11110", "10001", "10001", "11110", "10001", "10001", "11110"}},
    {'C', {"01110", "10001", "10000", "10000", "10000", "10001", "01110"}},
    {'D', {"11100", "10010", "10001", "10001", "10001", "10010", "11100"}},
    {'E', {"11111", "10000", "10000", "11110", "10000", "10000", "11111"}},
    {'F', {"11111", "10000", "10000", "11110", "10000", "10000", "10000"}},
    {'G', {"01110", "10001", "10000", "10111", "10001", "10001", "01111"}},
    {'H', {"10001", "10001", "10001", "11111", "10001", "10001", "10001"}},
    {'I', {"01110", "00100", "00100", "00100", "00100", "00100", "01110"}},
    {'J', {"00111", "00010", "00010", "00010", "00010", "10010", "01100"}},
    {'K', {"10001", "10010", "10100", "11000", "10100", "10010", "10001"}},
    {'L', {"10000", "10000", "10000", "10000", "10000", "10000", "11111"}},
    {'M', {"10001", "11011", "10101", "10101", "10001", "10001", "10001"}},
    {'N', {"10001", "10001", "11001", "10101", "10011", "10001", "10001"}},
    {'O', {"01110", "10001", "10001", "10001", "10001", "10001", "01110"}},
    {'P', {"11110", "10001", "10001", "11110", "10000", "10000", "10000"}},
    {'Q', {"01110", "10001", "10001", "10001", "10101", "10010", "01101"}},
    {'R', {"11110", "10001", "10001", "11110", "10100", "10010", "10001"}},
    {'S', {"01111", "10000", "10000", "01110", "00001", "00001", "11110"}},
    {'T', {"11111", "00100", "00100", "00100", "00100", "00100", "00100"}},
    {'U', {"10001", "10001", "10001", "10001", "10001", "10001", "01110"}},
    {'V', {"10001", "10001", "10001", "10001", "10001", "01010", "00100"}},
    {'W', {"10001", "10001", "10001", "10101", "10101", "10101", "01010"}},
    {'X', {"10001", "10001", "01010", "00100", "01010", "10001", "10001"}},
    {'Y', {"10001", "10001", "01010", "00100", "00100", "00100", "00100"}},
    {'Z', {"11111", "00001", "00010", "00100", "01000", "10000", "11111"}},
    {'0', {"01110", "10001", "10011", "10101", "11001", "10001", "01110"}},
    {'1', {"00100", "01100", "00100", "00100", "00100", "00100", "01110"}},
    {'2', {"01110", "10001", "00001", "00010", "00100", "01000", "11111"}},
    {'3', {"11111", "00010", "00100", "00010", "00001", "10001", "01110"}},
    {'4', {"00010", "00110", "01010", "10010", "11111", "00010", "00010"}},
    {'5', {"11111", "10000", "11110", "00001", "00001", "10001", "01110"}},
    {'6', {"00110", "01000", "10000", "11110", "10001", "10001", "01110"}},
    {'7', {"11111", "00001", "00010", "00100", "01000", "01000", "01000"}},
    {'8', {"01110", "10001", "10001", "01110", "10001", "10001", "01110"}},
    {'9', {"01110", "10001", "10001", "01111", "00001", "00010", "01100"}},
    {'-', {"00000", "00000", "00000", "11111", "00000", "00000", "00000"}},
    {'.', {"00000", "00000", "00000", "00000", "00000", "01100", "01100"}},
    {' ', {"00000", "00000", "00000", "00000", "00000", "00000", "00000"}},
};
// clang-format on

inline const Glyph* find_glyph(char c) {
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
    for (const auto& g : kGlyphs)
        if (g.ch == c) return &g;
    return nullptr;
}

}  // namespace detail

inline constexpr int kGlyphW = 5, kGlyphH = 7;

inline bool has_glyph(char c) { return detail::find_glyph(c) != nullptr; }

inline int text_width(std::string_view s, int scale) { return s.empty() ? 0 : static_cast<int>(s.size()) * (kGlyphW + 1) * scale - scale; }

/// Draws `s` with its top-left at (x, y); each font pixel becomes a scale x scale block.
inline void draw_text(Image& img, int x, int y, std::string_view s, int scale, Rgb color) {
    for (char c : s) {
        const auto* g = detail::find_glyph(c);
        if (!g) fail(ErrorKind::InvalidState, std::string("no glyph for character '") + c + "'");
        for (int r = 0; r < kGlyphH; ++r)
            for (int k = 0; k < kGlyphW; ++k)
                if (g->rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)] == '1')
                    for (int dy = 0; dy < scale; ++dy)
                        for (int dx = 0; dx < scale; ++dx) img.set(x + k * scale + dx, y + r * scale + dy, color);
        x += (kGlyphW + 1) * scale;
    }
}

/// Centres the text box on (cx, cy).
inline void draw_text_centered(Image& img, double cx, double cy, std::string_view s, int scale, Rgb color) {
    const int w = text_width(s, scale), h = kGlyphH * scale;
    draw_text(img, static_cast<int>(std::lround(cx - w / 2.0)), static_cast<int>(std::lround(cy - h / 2.0)), s, scale, color);
}

}  // namespace mentes::render
