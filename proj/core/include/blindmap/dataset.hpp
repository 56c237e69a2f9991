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

#ifndef BLINDMAP_DATASET_HPP
#define BLINDMAP_DATASET_HPP

#include "blindmap/scene_io.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace blindmap
{
    /// Channel measurements along one trajectory together with the ground truth.
    /// Per-(t,q) arrays are stored time-major: index t * Q + q.
    struct Dataset
    {
        Scene scene;
        std::vector<Vec2> trajectory;
        std::vector<std::uint8_t> los;
        std::vector<double> aod_true;
        std::vector<sim::ChannelTensor> channels;

        int T() const { return static_cast<int>(trajectory.size()); }
        int Q() const { return static_cast<int>(scene.env.aps.size()); }
        std::size_t index(int t, int q) const { return static_cast<std::size_t>(t) * Q() + q; }
        const Eigen::MatrixXcd &channel(int t, int q) const { return channels[index(t, q)].entries; }
        bool is_los(int t, int q) const { return los[index(t, q)] != 0; }
    };

    struct GenerationSpec
    {
        int T = 200;
        sim::MobilityParams mobility;
        Vec2 start = Vec2(6.0, 5.0);
        Vec2 start_velocity = Vec2(0.5, 0.3);
        std::uint64_t seed = 1;
        int max_attempts = 200; ///< trajectory redraws when a sample falls in a coverage gap
    };

    /// Draws a trajectory inside the scene region and synthesizes every (t, q) channel.
    Dataset generate_dataset(const Scene &scene, const GenerationSpec &spec);

    /// Binary container: 8-byte magic, u64 header length, JSON header, then
    /// T*Q records (u32 t, u32 q, f64 x, f64 y, u8 los + 7 pad, f64 aod,
    /// N_t*M interleaved re/im f64 in antenna-major order). Little endian.
    void write_dataset(const Dataset &ds, const std::filesystem::path &path);
    Dataset read_dataset(const std::filesystem::path &path);

} // namespace blindmap

#endif
