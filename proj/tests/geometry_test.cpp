#include <gtest/gtest.h>

#include "chargrid/geometry.hpp"
#include "chargrid/random.hpp"
#include "chargrid/raster.hpp"
#include "chargrid/spatial_index.hpp"

using namespace chargrid;

TEST(Rect, CornersFollowCenterSize) {
    const Rect r(10, 5, 8, 4);
    EXPECT_DOUBLE_EQ(r.left(), 6);
    EXPECT_DOUBLE_EQ(r.right(), 14);
    EXPECT_DOUBLE_EQ(r.top(), 3);
    EXPECT_DOUBLE_EQ(r.bottom(), 7);
    EXPECT_EQ(Rect::from_corners(6, 3, 14, 7), r);
}

TEST(Rect, RejectsDegenerate) {
    EXPECT_THROW(Rect(0, 0, 0, 1), std::invalid_argument);
    EXPECT_THROW(Rect(0, 0, 1, -1), std::invalid_argument);
    EXPECT_THROW(Rect(0, 0, std::nan(""), 1), std::invalid_argument);
    EXPECT_THROW(Rect(INFINITY, 0, 1, 1), std::invalid_argument);
}

TEST(Iou, Identity) { EXPECT_DOUBLE_EQ(iou(Rect(3, 4, 2, 5), Rect(3, 4, 2, 5)), 1.0); }

TEST(Iou, Disjoint) { EXPECT_DOUBLE_EQ(iou(Rect(0, 0, 2, 2), Rect(100, 0, 2, 2)), 0.0); }

TEST(Iou, HalfShifted) {
    // intersection [1,2]x[0,2] = 2, union 4 + 4 - 2 = 6
    EXPECT_DOUBLE_EQ(iou(Rect(1, 1, 2, 2), Rect(2, 1, 2, 2)), 1.0 / 3.0);
}

TEST(Iou, TouchingEdgesIsZero) { EXPECT_EQ(iou(Rect(1, 1, 2, 2), Rect(3, 1, 2, 2)), 0.0); }

TEST(OverlapFractionOfSmaller, Cases) {
    EXPECT_DOUBLE_EQ(overlap_fraction_of_smaller(Rect(1, 1, 2, 2), Rect(1, 1, 2, 2)), 1.0);
    EXPECT_DOUBLE_EQ(overlap_fraction_of_smaller(Rect(5, 5, 1, 1), Rect(5, 5, 10, 10)), 1.0);
    // Left/top (1,1) size 2x2 against left/top (2,1) size 4x2:
    // intersection [2,3]x[1,3] = 2, smaller area 4.
    const Rect a = Rect::from_corners(1, 1, 3, 3);
    const Rect b = Rect::from_corners(2, 1, 6, 3);
    EXPECT_DOUBLE_EQ(overlap_fraction_of_smaller(a, b), 0.5);
    // Same numbers read as centers: a=[0,2]x[0,2] lies inside b=[0,4]x[0,2].
    EXPECT_DOUBLE_EQ(overlap_fraction_of_smaller(Rect(1, 1, 2, 2), Rect(2, 1, 4, 2)), 1.0);
}

TEST(GeometryProperties, RandomRects) {
    Rng rng(42);
    for (int trial = 0; trial < 5000; ++trial) {
        auto draw = [&] {
            return Rect(rng.uniform() * 20, rng.uniform() * 20, 0.1 + rng.uniform() * 8,
                        0.1 + rng.uniform() * 8);
        };
        const Rect a = draw(), b = draw();
        const double ab = iou(a, b);
        EXPECT_EQ(ab, iou(b, a));
        EXPECT_GE(ab, 0.0);
        EXPECT_LE(ab, 1.0);
        EXPECT_LE(ab, overlap_fraction_of_smaller(a, b) + 1e-15);
        EXPECT_NEAR(iou(a, a), 1.0, 1e-12);
        // center form: corners survive the round trip only up to rounding
        const Rect u = bounding_box(a, b);
        for (const Rect& r : {a, b}) {
            EXPECT_LE(u.left(), r.left() + 1e-12);
            EXPECT_GE(u.right(), r.right() - 1e-12);
            EXPECT_LE(u.top(), r.top() + 1e-12);
            EXPECT_GE(u.bottom(), r.bottom() - 1e-12);
        }
    }
}

TEST(Raster, SampledPixelsUseCenterPoints) {
    // x in [1.5, 4.5): sample points 1.5, 2.5, 3.5 -> columns 1..3
    const PixelBlock px = sampled_pixels(Rect::from_corners(1.5, 0.0, 4.5, 1.0), {10, 10});
    EXPECT_EQ(px.col_begin, 1u);
    EXPECT_EQ(px.col_end, 4u);
    EXPECT_EQ(px.row_begin, 0u);
    EXPECT_EQ(px.row_end, 1u);
}

TEST(Raster, HalfOpenRightEdge) {
    // [0.5, 1.5): sample 0.5 in, 1.5 out.
    const PixelBlock px = sampled_pixels(Rect::from_corners(0.5, 0.5, 1.5, 1.5), {4, 4});
    EXPECT_EQ(px.count(), 1u);
    EXPECT_EQ(px.col_begin, 0u);
}

TEST(Raster, ClipsToGrid) {
    const PixelBlock px = sampled_pixels(Rect(0, 0, 100, 100), {3, 4});
    EXPECT_EQ(px.count(), 12u);
    EXPECT_TRUE(sampled_pixels(Rect(-50, -50, 2, 2), {3, 4}).empty());
}

TEST(Raster, PixelAtBoundaryGoesHigh) {
    const auto p = pixel_at(2.0, 3.0, {10, 10});
    ASSERT_TRUE(p);
    EXPECT_EQ(p->first, 3u);
    EXPECT_EQ(p->second, 2u);
    EXPECT_FALSE(pixel_at(-0.1, 1, {10, 10}));
    EXPECT_FALSE(pixel_at(10.0, 1, {10, 10}));
    EXPECT_FALSE(pixel_at(std::nan(""), 1, {10, 10}));
}

TEST(SpatialIndex, ReportsEveryIntersectingRect) {
    Rng rng(3);
    std::vector<Rect> rects;
    for (int k = 0; k < 400; ++k) {
        const double big = rng.uniform() < 0.02 ? 60.0 : 1.0;
        rects.emplace_back(rng.uniform() * 100, rng.uniform() * 100, big * (0.5 + rng.uniform() * 4),
                           big * (0.5 + rng.uniform() * 4));
    }
    SpatialIndex index(rects);
    for (std::uint32_t k = 0; k < rects.size(); ++k) index.insert(k);
    for (std::size_t q = 0; q < rects.size(); ++q) {
        std::vector<bool> seen(rects.size(), false);
        index.for_each_candidate(rects[q], [&](std::uint32_t id) {
            EXPECT_FALSE(seen[id]);
            seen[id] = true;
        });
        for (std::size_t k = 0; k < rects.size(); ++k) {
            if (intersection_area(rects[q], rects[k]) > 0.0) {
                EXPECT_TRUE(seen[k]) << q << " vs " << k;
            }
        }
    }
}
