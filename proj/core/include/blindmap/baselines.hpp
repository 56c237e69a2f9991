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

#ifndef BLINDMAP_BASELINES_HPP
#define BLINDMAP_BASELINES_HPP

#include "blindmap/features.hpp"

#include <span>
#include <vector>

namespace blindmap::eval
{
    /// Weighted centroid: p_t = sum_q w_tq o_q with w_tq proportional to 10^(s_tq / 20).
    /// Signatures are time-major with Q entries per slot.
    std::vector<Vec2> baseline_wcl(std::span<const features::RadioSignature> signatures,
                                   std::span<const Vec2> ap_positions);

    struct AodlResult
    {
        std::vector<Vec2> trajectory;
        std::vector<std::uint8_t> low_confidence; ///< per t: bearings too close to parallel
    };

    /// Least-squares intersection of the bearing lines o_q + r (cos theta, sin theta).
    /// A slot whose normal matrix has condition number above max_condition reuses the
    /// previous estimate (the AP centroid for the first slot).
    AodlResult baseline_aodl(std::span<const features::RadioSignature> signatures,
                             std::span<const Vec2> ap_positions, double max_condition = 1e6);

    /// Bearing intersection for one slot; returns false when ill-conditioned.
    bool intersect_bearings(std::span<const double> aod, std::span<const Vec2> ap_positions, double max_condition,
                            Vec2 &out);

} // namespace blindmap::eval

#endif
