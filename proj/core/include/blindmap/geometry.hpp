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

#ifndef BLINDMAP_GEOMETRY_HPP
#define BLINDMAP_GEOMETRY_HPP

#include "blindmap/common.hpp"

#include <optional>
#include <span>

namespace blindmap
{
    struct Segment
    {
        Vec2 a;
        Vec2 b;

        double length() const { return (b - a).norm(); }
        Vec2 direction() const { return (b - a).normalized(); }
        Vec2 normal() const
        {
            const Vec2 d = direction();
            return {-d.y(), d.x()};
        }
    };

    /// Mirror image of point p about the infinite line through s.
    Vec2 reflect_point(const Vec2 &p, const Segment &s);

    /// Mirror image of a direction vector about the line through s (linear part only).
    Vec2 reflect_direction(const Vec2 &d, const Segment &s);

    /// Signed side of p relative to the directed line a->b (positive = left).
    double side_of(const Vec2 &p, const Segment &s);

    struct SegmentHit
    {
        double t_path = 0.0;    ///< parameter along the query segment p->q, in [0,1]
        double t_surface = 0.0; ///< parameter along the surface segment, in [0,1]
        Vec2 point;
    };

    /// Proper intersection of segment p->q with s. Returns nothing for parallel
    /// or disjoint segments.
    std::optional<SegmentHit> intersect(const Vec2 &p, const Vec2 &q, const Segment &s);

    /// True when the open segment p->q crosses s at an interior point of the path
    /// (end-touches within eps of p or q do not count).
    bool blocks(const Vec2 &p, const Vec2 &q, const Segment &s, double eps = 1e-9);

    /// Point-in-polygon test, inclusive of the boundary (within eps).
    bool inside_polygon(const Vec2 &p, std::span<const Vec2> polygon, double eps = 1e-9);

    /// Euclidean distance from p to the segment s.
    double distance_to_segment(const Vec2 &p, const Segment &s);

    /// Axis-aligned rectangle as a closed counter-clockwise loop of 4 vertices.
    std::vector<Vec2> rectangle_polygon(const Vec2 &lower, const Vec2 &upper);

} // namespace blindmap

#endif
