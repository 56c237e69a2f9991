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

#ifndef BLINDMAP_TEST_FIXTURES_HPP
#define BLINDMAP_TEST_FIXTURES_HPP

#include "blindmap/dataset.hpp"
#include "blindmap/scene_io.hpp"

#include <filesystem>
#include <random>
#include <string>

namespace blindmap::testing
{
    // Small room with three wall-mounted APs. Keeps dataset-level tests fast.
    inline Scene small_room_scene()
    {
        Scene scene;
        scene.env = sim::make_rectangular_room(6.0, 5.0, 0.4, 0.03);
        scene.env.max_reflection_order = 1;
        scene.env.n_virtual_tx = 3;
        scene.env.cluster_seed = 3;
        const Vec2 spots[3] = {Vec2(0.05, 0.05), Vec2(5.95, 0.05), Vec2(3.0, 4.95)};
        const Vec2 centre(3.0, 2.5);
        for (const Vec2 &p : spots)
        {
            sim::AccessPoint ap;
            ap.position = p;
            ap.array.n_antennas = 4;
            ap.array.carrier_hz = 2.4e9;
            ap.array.spacing_m = ap.array.wavelength() / 2.0;
            ap.array.reference_angle = azimuth(p, centre);
            scene.env.aps.push_back(ap);
        }
        scene.ofdm.n_subcarriers = 16;
        scene.ofdm.bandwidth_hz = 400e6;
        scene.noise_variance = 1e-8;
        return scene;
    }

    inline GenerationSpec small_generation(int T, std::uint64_t seed)
    {
        GenerationSpec g;
        g.T = T;
        g.seed = seed;
        g.start = Vec2(3.0, 2.5);
        g.start_velocity = Vec2(0.4, 0.2);
        g.mobility.sigma_v = 0.5;
        return g;
    }

    /// Fresh empty directory under the system temp path, removed on destruction.
    class ScratchDir
    {
    public:
        explicit ScratchDir(const std::string &tag)
        {
            std::random_device rd;
            path_ = std::filesystem::temp_directory_path() /
                    ("blindmap_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
            std::filesystem::create_directories(path_);
        }
        ~ScratchDir()
        {
            std::error_code ec;
            std::filesystem::remove_all(path_, ec);
        }
        ScratchDir(const ScratchDir &) = delete;
        ScratchDir &operator=(const ScratchDir &) = delete;
        const std::filesystem::path &path() const { return path_; }

    private:
        std::filesystem::path path_;
    };

} // namespace blindmap::testing

#endif
