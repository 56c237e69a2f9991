// SPDX-License-Identifier: Apache-2.0
//
// blindmap: blind radio mapping from MIMO-OFDM channel measurements
// Copyright (C) 2026 The blindmap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "blindmap/geometry.hpp"

#include <gtest/gtest.h>

using namespace blindmap;

TEST(Geometry, ReflectPointAcrossVerticalLine)
{
    const Segment wall{Vec2(2.0, -1.0), Vec2(2.0, 5.0)};
    const Vec2 img = reflect_point(Vec2(0.5, 3.0), wall);
    EXPECT_NEAR(img.x(), 3.5, 1e-14);
    EXPECT_NEAR(img.y(), 3.0, 1e-14);
}

TEST(Geometry, ReflectionIsAnInvolution)
{
    const Segment s{Vec2(-1.0, 0.3), Vec2(4.0, 2.1)};
    const Vec2 p(0.7, -2.2);
    const Vec2 back = reflect_point(reflect_point(p, s), s);
    EXPECT_NEAR((back - p).norm(), 0.0, 1e-12);
    // Points on the line are fixed.
    const Vec2 on = s.a + 0.37 * (s.b - s.a);
    EXPECT_NEAR((reflect_point(on, s) - on).norm(), 0.0, 1e-12);
}

TEST(Geometry, ReflectDirectionPreservesNormAndFlipsNormalPart)
{
    const Segment s{Vec2(0.0, 0.0), Vec2(1.0, 1.0)};
    const Vec2 d = reflect_direction(Vec2(1.0, 0.0), s);
    EXPECT_NEAR(d.x(), 0.0, 1e-14);
    EXPECT_NEAR(d.y(), 1.0, 1e-14);
}

TEST(Geometry, SideOfSign)
{
    const Segment s{Vec2(0.0, 0.0), Vec2(1.0, 0.0)};
    EXPECT_GT(side_of(Vec2(0.5, 1.0), s), 0.0);
    EXPECT_LT(side_of(Vec2(0.5, -1.0), s), 0.0);
}

TEST(Geometry, IntersectCrossingSegments)
{
    const Segment s{Vec2(1.0, -1.0), Vec2(1.0, 1.0)};
    const auto hit = intersect(Vec2(0.0, 0.0), Vec2(4.0, 0.0), s);
    ASSERT_TRUE(hit.has_value());
    EXPECT_NEAR(hit->t_path, 0.25, 1e-14);
    EXPECT_NEAR(hit->t_surface, 0.5, 1e-14);
    EXPECT_NEAR(hit->point.x(), 1.0, 1e-14);
}

TEST(Geometry, ParallelAndDisjointDoNotIntersect)
{
    const Segment s{Vec2(0.0, 1.0), Vec2(3.0, 1.0)};
    EXPECT_FALSE(intersect(Vec2(0.0, 0.0), Vec2(3.0, 0.0), s).has_value());
    EXPECT_FALSE(intersect(Vec2(5.0, 0.0), Vec2(5.0, 3.0), s).has_value());
}

TEST(Geometry, BlocksIgnoresEndpointTouch)
{
    const Segment wall{Vec2(1.0, -1.0), Vec2(1.0, 1.0)};
    EXPECT_TRUE(blocks(Vec2(0.0, 0.0), Vec2(2.0, 0.0), wall));
    // A path ending exactly on the wall is not blocked by it.
    EXPECT_FALSE(blocks(Vec2(0.0, 0.0), Vec2(1.0, 0.0), wall));
}

TEST(Geometry, PointInPolygon)
{
    const auto rect = rectangle_polygon(Vec2(0.0, 0.0), Vec2(2.0, 1.0));
    ASSERT_EQ(rect.size(), 4u);
    EXPECT_TRUE(inside_polygon(Vec2(1.0, 0.5), rect));
    EXPECT_TRUE(inside_polygon(Vec2(2.0, 0.5), rect)); // boundary counts
    EXPECT_FALSE(inside_polygon(Vec2(2.1, 0.5), rect));

    // Non-convex L shape.
    const std::vector<Vec2> ell{Vec2(0, 0), Vec2(2, 0), Vec2(2, 1), Vec2(1, 1), Vec2(1, 2), Vec2(0, 2)};
    EXPECT_TRUE(inside_polygon(Vec2(0.5, 1.5), ell));
    EXPECT_FALSE(inside_polygon(Vec2(1.5, 1.5), ell));
}

TEST(Geometry, DistanceToSegment)
{
    const Segment s{Vec2(0.0, 0.0), Vec2(4.0, 0.0)};
    EXPECT_DOUBLE_EQ(distance_to_segment(Vec2(2.0, 3.0), s), 3.0);
    EXPECT_DOUBLE_EQ(distance_to_segment(Vec2(7.0, 4.0), s), 5.0);
    EXPECT_DOUBLE_EQ(distance_to_segment(Vec2(-3.0, 0.0), s), 3.0);
}
