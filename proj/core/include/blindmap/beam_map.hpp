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

#ifndef BLINDMAP_BEAM_MAP_HPP
#define BLINDMAP_BEAM_MAP_HPP

#include "blindmap/sim.hpp"

#include <span>
#include <vector>

namespace blindmap::eval
{
    /// Value reported by energy_db for cells that received no sample.
    inline constexpr double kEmptyCellDb = -999.0;

    /// Per-cell, per-(q, beam) mean received beam energy over a square grid that
    /// covers the bounding box of the region.
    struct BeamMap
    {
        Vec2 origin = Vec2::Zero();
        double resolution_m = 0.5;
        int nx = 0;
        int ny = 0;
        int Q = 0;
        int n_beams = 0;
        std::vector<double> energy_sum;
        std::vector<int> count; ///< samples per (cell, q)

        int cells() const { return nx * ny; }
        /// Cell containing p; points outside the box are clamped onto it.
        int cell_of(const Vec2 &p) const;
        bool visited(int cell, int q) const { return count[static_cast<std::size_t>(cell) * Q + q] > 0; }
        /// Mean linear energy; NaN for an empty cell.
        double energy(int cell, int q, int beam) const;
        double energy_db(int cell, int q, int beam) const;
    };

    /// Unitary N_t x N_t DFT matrix; column k is beam k.
    Eigen::MatrixXcd dft_codebook(int n_antennas);

    /// e_k = ||b_k^H H||^2 for every beam column b_k.
    std::vector<double> beam_energies(const Eigen::MatrixXcd &H, const Eigen::MatrixXcd &codebook);

    /// Channels are time-major (t * Q + q) and positions[t] is where slot t is placed.
    BeamMap build_beam_map(std::span<const sim::ChannelTensor> channels, int Q, std::span<const Vec2> positions,
                           std::span<const Vec2> region, double resolution_m);

    struct MapError
    {
        double e_map = 0.0; ///< mean |e - e_hat| / e over evaluated (t, q, beam)
        int evaluated = 0;
        int excluded = 0; ///< (t, q) lookups that hit an empty cell
    };

    /// Compares map lookups at the true positions with the true beam energies.
    MapError e_map(const BeamMap &map, std::span<const sim::ChannelTensor> channels,
                   std::span<const Vec2> true_positions);

} // namespace blindmap::eval

#endif
