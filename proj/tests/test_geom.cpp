#include <gtest/gtest.h>

#include "mentes/geom.hpp"
#include "oracles.hpp"

using namespace mentes;
using namespace mentes::geom;

namespace {

Polygon square(Point2 c, double side = 1.0) {
    const double h = side / 2;
    return Polygon{{{c.x - h, c.y - h}, {c.x + h, c.y - h}, {c.x + h, c.y + h}, {c.x - h, c.y + h}}};
}

std::vector<std::vector<Point2>> raw(const std::vector<Polygon>& ps) {
    std::vector<std::vector<Point2>> out;
    for (const auto& p : ps) out.push_back(p.vertices);
    return out;
}

}  // namespace

TEST(Overlap, DisjointSquares) { EXPECT_FALSE(overlap(square({0, 0}), square({3, 0}))); }

TEST(Overlap, IdenticalSquares) { EXPECT_TRUE(overlap(square({0, 0}), square({0, 0}))); }

TEST(Overlap, RotatedSquareAgreesWithSampling) {
    const Shape a = square({0, 0});
    const Shape b = OrientedRect{{0.5, 0}, 1, 1, 45};
    ASSERT_TRUE(overlap(a, b));
    // point sampling: some point lies in both
    const auto bc = std::get<OrientedRect>(b).corners();
    const std::vector<Point2> bpoly(bc.begin(), bc.end());
    int both = 0;
    for (int i = 0; i < 100; ++i)
        for (int j = 0; j < 100; ++j) {
            const Point2 p{-0.5 + (i + 0.5) / 100.0, -0.5 + (j + 0.5) / 100.0};
            both += oracle::inside(bpoly, p);
        }
    EXPECT_GT(both, 0);
}

TEST(Overlap, TouchingEdgesDoNotOverlap) { EXPECT_FALSE(overlap(square({0, 0}), square({1, 0}))); }

TEST(MaxSlide, WallContactFromExampleState) {
    const OrientedRect mover{{4.51, 9.00}, 1.80, 0.90, 90};
    EXPECT_NEAR(max_slide(mover, {0, 1}, {}, AxisRect{{0, 0}, {10, 10}}), 0.10, 1e-9);
}

TEST(MaxSlide, FlushAgainstWall) {
    const OrientedRect mover{{9.0, 5.0}, 2.0, 1.0, 0};
    EXPECT_NEAR(max_slide(mover, {1, 0}, {}, AxisRect{{0, 0}, {10, 10}}), 0.0, 1e-12);
}

TEST(MaxSlide, StopsAtObstacle) {
    const OrientedRect mover{{2, 5}, 2, 1, 0};
    const std::vector<Shape> others{Polygon::from(AxisRect{{6, 4}, {7, 6}})};
    EXPECT_NEAR(max_slide(mover, {1, 0}, others, AxisRect{{0, 0}, {10, 10}}), 3.0, 1e-12);
    EXPECT_NEAR(max_slide(mover, {-1, 0}, others, AxisRect{{0, 0}, {10, 10}}), 1.0, 1e-12);
}

TEST(MaxSlide, RejectsStartingOverlap) {
    const OrientedRect mover{{5, 5}, 2, 1, 0};
    const std::vector<Shape> others{square({5, 5})};
    EXPECT_THROW(max_slide(mover, {1, 0}, others, AxisRect{{0, 0}, {10, 10}}), Error);
}

TEST(MaxSlide, MatchesBisectionOracle) {
    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        const auto s = oracle::random_scene(rng);
        std::vector<Shape> others;
        for (const auto& o : s.obstacles) others.emplace_back(Polygon{o});
        const double got = max_slide(OrientedRect{s.center, s.length, s.width, s.heading}, s.axis, others, AxisRect{{0, 0}, {10, 10}});
        EXPECT_NEAR(got, oracle::slide_by_bisection(s), 1e-4) << "scene " << i;
        EXPECT_TRUE(oracle::free_at(s, got, 1e-7)) << "scene " << i;
    }
}

TEST(Reflect, AcrossVerticalAxis) {
    const auto p = reflect({1, 0}, Line2{{0, 0}, {0, 1}});
    EXPECT_NEAR(p.x, -1, 1e-12);
    EXPECT_NEAR(p.y, 0, 1e-12);
}

TEST(Reflect, PointOnLineIsFixed) {
    const auto p = reflect({0, 3}, Line2{{0, 0}, {0, 1}});
    EXPECT_NEAR(p.x, 0, 1e-12);
    EXPECT_NEAR(p.y, 3, 1e-12);
}

TEST(Reflect, DiagonalSwapsCoordinates) {
    const auto p = reflect({2, 1}, Line2::through({0, 0}, {1, 1}));
    EXPECT_NEAR(p.x, 1, 1e-12);
    EXPECT_NEAR(p.y, 2, 1e-12);
}

TEST(Iou, IdenticalSilhouettes) {
    const std::vector<Polygon> a{square({0, 0}), square({1, 0})};
    EXPECT_NEAR(silhouette_iou(a, a), 1.0, 1e-9);
}

TEST(Iou, DisjointShapes) {
    const std::vector<Polygon> a{square({0, 0})}, b{square({5, 5})};
    EXPECT_NEAR(intersection_area(a, b), 0.0, 1e-12);
}

TEST(Iou, SquareMinusCornerAgainstRaster) {
    const std::vector<Polygon> full{Polygon{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}}};
    const std::vector<Polygon> notched{Polygon{{{0, 0}, {1, 0}, {1, 0.5}, {0.5, 0.5}, {0.5, 1}, {0, 1}}}};
    const double iou = intersection_area(full, notched) / union_area(full);
    EXPECT_NEAR(iou, 0.75, 1e-9);
    const auto r = oracle::raster_areas(raw(full), raw(notched), 512);
    EXPECT_NEAR(r.both / r.a, iou, 1e-3);
}

TEST(UnionArea, OverlappingPiecesAgainstRaster) {
    Rng rng(11);
    for (int round = 0; round < 10; ++round) {
        std::vector<Polygon> a, b;
        for (int i = 0; i < 4; ++i) {
            const auto ca = OrientedRect{{rng.uniform(0, 3), rng.uniform(0, 3)}, rng.uniform(0.5, 2), rng.uniform(0.5, 2), rng.uniform(0, 360)}.corners();
            const auto cb = OrientedRect{{rng.uniform(0, 3), rng.uniform(0, 3)}, rng.uniform(0.5, 2), rng.uniform(0.5, 2), rng.uniform(0, 360)}.corners();
            a.push_back(Polygon{{ca.begin(), ca.end()}});
            b.push_back(Polygon{{cb.begin(), cb.end()}});
        }
        const auto r = oracle::raster_areas(raw(a), raw(b), 512);
        const double tol = 0.02 * r.a + 0.01;
        EXPECT_NEAR(union_area(a), r.a, tol);
        EXPECT_NEAR(union_area(b), r.b, tol);
        EXPECT_NEAR(intersection_area(a, b), r.both, tol);
    }
}

TEST(Polygon, NonConvexSplitsIntoConvexPieces) {
    const Polygon l{{{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}}};
    double area = 0;
    for (const auto& piece : convex_pieces(Shape{l})) {
        EXPECT_TRUE(is_convex(piece));
        area += Polygon{piece}.area();
    }
    EXPECT_NEAR(area, 3.0, 1e-12);
}

TEST(Polygon, ContainsAndBoundaryDistance) {
    const auto s = square({0, 0}, 2);
    EXPECT_TRUE(contains(s, {0.5, 0.5}));
    EXPECT_FALSE(contains(s, {1.5, 0}));
    EXPECT_NEAR(boundary_distance(s, {0.5, 0}), 0.5, 1e-12);
}
