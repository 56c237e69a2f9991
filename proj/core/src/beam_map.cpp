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

#include "blindmap/beam_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace blindmap::eval
{
    int BeamMap::cell_of(const Vec2 &p) const
    {
        const int ix = std::clamp(static_cast<int>(std::floor((p.x() - origin.x()) / resolution_m)), 0, nx - 1);
        const int iy = std::clamp(static_cast<int>(std::floor((p.y() - origin.y()) / resolution_m)), 0, ny - 1);
        return iy * nx + ix;
    }

    double BeamMap::energy(int cell, int q, int beam) const
    {
        const std::size_t cq = static_cast<std::size_t>(cell) * Q + q;
        if (count[cq] == 0)
            return std::numeric_limits<double>::quiet_NaN();
        return energy_sum[cq * n_beams + beam] / count[cq];
    }

    double BeamMap::energy_db(int cell, int q, int beam) const
    {
        const double e = energy(cell, q, beam);
        if (!std::isfinite(e) || e <= 0.0)
            return kEmptyCellDb;
        return 10.0 * std::log10(e);
    }

    Eigen::MatrixXcd dft_codebook(int n_antennas)
    {
        if (n_antennas < 1)
            throw std::domain_error("dft_codebook: need at least one antenna");
        Eigen::MatrixXcd W(n_antennas, n_antennas);
        const double scale = 1.0 / std::sqrt(static_cast<double>(n_antennas));
        for (int n = 0; n < n_antennas; ++n)
            for (int k = 0; k < n_antennas; ++k)
                W(n, k) = std::polar(scale, -kTwoPi * ((n * k) % n_antennas) / n_antennas);
        return W;
    }

    std::vector<double> beam_energies(const Eigen::MatrixXcd &H, const Eigen::MatrixXcd &codebook)
    {
        if (codebook.rows() != H.rows())
            throw std::domain_error("beam_energies: codebook and channel disagree on N_t");
        const Eigen::MatrixXcd Y = codebook.adjoint() * H;
        std::vector<double> e(static_cast<std::size_t>(Y.rows()));
        for (Eigen::Index k = 0; k < Y.rows(); ++k)
            e[k] = Y.row(k).squaredNorm();
        return e;
    }

    BeamMap build_beam_map(std::span<const sim::ChannelTensor> channels, int Q, std::span<const Vec2> positions,
                           std::span<const Vec2> region, double resolution_m)
    {
        if (!(resolution_m > 0.0))
            throw std::domain_error("build_beam_map: resolution must be positive");
        if (Q < 1 || channels.size() != positions.size() * static_cast<std::size_t>(Q))
            throw std::domain_error("build_beam_map: channels do not match T x Q");
        if (region.size() < 3)
            throw std::domain_error("build_beam_map: region needs at least three vertices");

        Vec2 lo = region[0], hi = region[0];
        for (const Vec2 &p : region)
        {
            lo = lo.cwiseMin(p);
            hi = hi.cwiseMax(p);
        }
        BeamMap map;
        map.origin = lo;
        map.resolution_m = resolution_m;
        map.nx = std::max(1, static_cast<int>(std::ceil((hi.x() - lo.x()) / resolution_m - 1e-9)));
        map.ny = std::max(1, static_cast<int>(std::ceil((hi.y() - lo.y()) / resolution_m - 1e-9)));
        map.Q = Q;
        map.n_beams = channels.empty() ? 0 : static_cast<int>(channels.front().entries.rows());
        map.energy_sum.assign(static_cast<std::size_t>(map.cells()) * Q * map.n_beams, 0.0);
        map.count.assign(static_cast<std::size_t>(map.cells()) * Q, 0);
        if (channels.empty())
            return map;

        const Eigen::MatrixXcd W = dft_codebook(map.n_beams);
        for (std::size_t t = 0; t < positions.size(); ++t)
        {
            const int cell = map.cell_of(positions[t]);
            for (int q = 0; q < Q; ++q)
            {
                const auto e = beam_energies(channels[t * Q + q].entries, W);
                const std::size_t cq = static_cast<std::size_t>(cell) * Q + q;
                for (int b = 0; b < map.n_beams; ++b)
                    map.energy_sum[cq * map.n_beams + b] += e[b];
                ++map.count[cq];
            }
        }
        return map;
    }

    MapError e_map(const BeamMap &map, std::span<const sim::ChannelTensor> channels,
                   std::span<const Vec2> true_positions)
    {
        const int Q = map.Q;
        if (Q < 1 || channels.size() != true_positions.size() * static_cast<std::size_t>(Q))
            throw std::domain_error("e_map: channels do not match T x Q");
        MapError out;
        if (channels.empty() || map.n_beams == 0)
            return out;
        const Eigen::MatrixXcd W = dft_codebook(map.n_beams);
        double acc = 0.0;
        for (std::size_t t = 0; t < true_positions.size(); ++t)
        {
            const int cell = map.cell_of(true_positions[t]);
            for (int q = 0; q < Q; ++q)
            {
                if (!map.visited(cell, q))
                {
                    ++out.excluded;
                    continue;
                }
                const auto e = beam_energies(channels[t * Q + q].entries, W);
                for (int b = 0; b < map.n_beams; ++b)
                {
                    if (!(e[b] > 0.0))
                        continue;
                    acc += std::abs((e[b] - map.energy(cell, q, b)) / e[b]);
                    ++out.evaluated;
                }
            }
        }
        out.e_map = out.evaluated > 0 ? acc / out.evaluated : 0.0;
        return out;
    }

} // namespace blindmap::eval
