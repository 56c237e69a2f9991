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

#include "blindmap/graph.hpp"
#include "blindmap/geometry.hpp"

#include <algorithm>
#include <limits>

namespace blindmap::inference
{
    bool MobilityGraph::adjacent(int i, int j) const
    {
        if (!valid(i) || !valid(j))
            return false;
        const auto &n = neighbors[i];
        return std::binary_search(n.begin(), n.end(), j);
    }

    int MobilityGraph::nearest_node(const Vec2 &p) const
    {
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (int i = 0; i < size(); ++i)
        {
            const double d = (nodes[i] - p).squaredNorm();
            if (d < best_d)
            {
                best_d = d;
                best = i;
            }
        }
        return best;
    }

    MobilityGraph build_graph(std::span<const Vec2> region, double resolution_m, double d_max_m)
    {
        if (region.size() < 3)
            throw std::domain_error("build_graph: region needs at least 3 vertices");
        if (!(resolution_m > 0.0))
            throw std::domain_error("build_graph: resolution must be positive");
        if (!(d_max_m >= 0.0))
            throw std::domain_error("build_graph: negative D_m");

        Vec2 lo = region[0];
        Vec2 hi = region[0];
        for (const Vec2 &p : region)
        {
            lo = lo.cwiseMin(p);
            hi = hi.cwiseMax(p);
        }
        MobilityGraph g;
        g.region.assign(region.begin(), region.end());
        g.resolution_m = resolution_m;
        g.d_max_m = d_max_m;
        const double slack = 1e-9 * std::max(1.0, (hi - lo).norm());
        const int nx = static_cast<int>(std::floor((hi.x() - lo.x()) / resolution_m + 1e-9)) + 1;
        const int ny = static_cast<int>(std::floor((hi.y() - lo.y()) / resolution_m + 1e-9)) + 1;
        for (int iy = 0; iy < ny; ++iy)
            for (int ix = 0; ix < nx; ++ix)
            {
                const Vec2 p = lo + Vec2(ix * resolution_m, iy * resolution_m);
                if (inside_polygon(p, region, slack))
                    g.nodes.push_back(p);
            }
        if (g.nodes.empty())
            throw std::domain_error("build_graph: region contains no grid node");

        // Bucket nodes by cell so neighbour search stays local.
        const int reach = static_cast<int>(std::ceil(d_max_m / resolution_m)) + 1;
        std::vector<std::vector<int>> cells(static_cast<std::size_t>(nx) * ny);
        auto cell_of = [&](const Vec2 &p) {
            const int cx = std::clamp(static_cast<int>(std::lround((p.x() - lo.x()) / resolution_m)), 0, nx - 1);
            const int cy = std::clamp(static_cast<int>(std::lround((p.y() - lo.y()) / resolution_m)), 0, ny - 1);
            return std::pair{cx, cy};
        };
        for (int i = 0; i < g.size(); ++i)
        {
            const auto [cx, cy] = cell_of(g.nodes[i]);
            cells[static_cast<std::size_t>(cy) * nx + cx].push_back(i);
        }
        const double limit = d_max_m + 1e-9 * std::max(1.0, d_max_m);
        g.neighbors.resize(g.nodes.size());
        for (int i = 0; i < g.size(); ++i)
        {
            const auto [cx, cy] = cell_of(g.nodes[i]);
            auto &out = g.neighbors[i];
            for (int y = std::max(0, cy - reach); y <= std::min(ny - 1, cy + reach); ++y)
                for (int x = std::max(0, cx - reach); x <= std::min(nx - 1, cx + reach); ++x)
                    for (int j : cells[static_cast<std::size_t>(y) * nx + x])
                        if ((g.nodes[j] - g.nodes[i]).norm() <= limit)
                            out.push_back(j);
            std::sort(out.begin(), out.end());
        }
        return g;
    }

} // namespace blindmap::inference
