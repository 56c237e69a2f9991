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

#ifndef BLINDMAP_GRAPH_HPP
#define BLINDMAP_GRAPH_HPP

#include "blindmap/common.hpp"

#include <span>
#include <vector>

namespace blindmap::inference
{
    /// Discrete position space: grid nodes inside the region, edges between
    /// nodes at most D_m apart (every node is its own neighbour).
    struct MobilityGraph
    {
        std::vector<Vec2> nodes;
        std::vector<std::vector<int>> neighbors; ///< sorted, includes the node itself
        std::vector<Vec2> region;
        double resolution_m = 0.0;
        double d_max_m = 0.0;

        int size() const { return static_cast<int>(nodes.size()); }
        bool valid(int i) const { return i >= 0 && i < size(); }
        bool adjacent(int i, int j) const;
        /// Closest node by Euclidean distance; ties go to the lower index.
        int nearest_node(const Vec2 &p) const;
    };

    /// Grid anchored at the lower-left corner of the region bounding box.
    MobilityGraph build_graph(std::span<const Vec2> region, double resolution_m, double d_max_m);

} // namespace blindmap::inference

#endif
