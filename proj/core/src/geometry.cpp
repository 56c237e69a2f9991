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

#include <algorithm>

namespace blindmap
{
    Vec2 reflect_point(const Vec2 &p, const Segment &s)
    {
        const Vec2 n = s.normal();
        const double dist = (p - s.a).dot(n);
        return p - 2.0 * dist * n;
    }

    Vec2 reflect_direction(const Vec2 &d, const Segment &s)
    {
        const Vec2 n = s.normal();
        return d - 2.0 * d.dot(n) * n;
    }

    double side_of(const Vec2 &p, const Segment &s)
    {
        const Vec2 ab = s.b - s.a;
        const Vec2 ap = p - s.a;
        return ab.x() * ap.y() - ab.y() * ap.x();
    }

    std::optional<SegmentHit> intersect(const Vec2 &p, const Vec2 &q, const Segment &s)
    {
        const Vec2 r = q - p;
        const Vec2 e = s.b - s.a;
        const double denom = r.x() * e.y() - r.y() * e.x();
        const double scale = r.norm() * e.norm();
        if (scale == 0.0 || std::abs(denom) <= 1e-14 * scale)
            return std::nullopt;
        const Vec2 w = s.a - p;
        const double t = (w.x() * e.y() - w.y() * e.x()) / denom;
        const double u = (w.x() * r.y() - w.y() * r.x()) / denom;
        constexpr double tol = 1e-12;
        if (t < -tol || t > 1.0 + tol || u < -tol || u > 1.0 + tol)
            return std::nullopt;
        return SegmentHit{std::clamp(t, 0.0, 1.0), std::clamp(u, 0.0, 1.0), p + std::clamp(t, 0.0, 1.0) * r};
    }

    bool blocks(const Vec2 &p, const Vec2 &q, const Segment &s, double eps)
    {
        const auto hit = intersect(p, q, s);
        if (!hit)
            return false;
        const double len = (q - p).norm();
        if (len == 0.0)
            return false;
        const double along = hit->t_path * len;
        return along > eps && along < len - eps;
    }

    bool inside_polygon(const Vec2 &p, std::span<const Vec2> polygon, double eps)
    {
        const std::size_t n = polygon.size();
        if (n < 3)
            return false;
        for (std::size_t i = 0; i < n; ++i)
        {
            const Segment edge{polygon[i], polygon[(i + 1) % n]};
            if (distance_to_segment(p, edge) <= eps)
                return true;
        }
        bool inside = false;
        for (std::size_t i = 0, j = n - 1; i < n; j = i++)
        {
            const Vec2 &a = polygon[i];
            const Vec2 &b = polygon[j];
            if ((a.y() > p.y()) != (b.y() > p.y()))
            {
                const double x_cross = (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x();
                if (p.x() < x_cross)
                    inside = !inside;
            }
        }
        return inside;
    }

    double distance_to_segment(const Vec2 &p, const Segment &s)
    {
        const Vec2 e = s.b - s.a;
        const double len2 = e.squaredNorm();
        if (len2 == 0.0)
            return (p - s.a).norm();
        const double t = std::clamp((p - s.a).dot(e) / len2, 0.0, 1.0);
        return (p - (s.a + t * e)).norm();
    }

    std::vector<Vec2> rectangle_polygon(const Vec2 &lower, const Vec2 &upper)
    {
        return {lower, Vec2(upper.x(), lower.y()), upper, Vec2(lower.x(), upper.y())};
    }

} // namespace blindmap
