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

#ifndef BLINDMAP_SCENE_IO_HPP
#define BLINDMAP_SCENE_IO_HPP

#include "blindmap/sim.hpp"

#include <filesystem>
#include <string>

namespace blindmap
{
    /// A complete synthetic deployment: environment, OFDM numerology and receiver noise.
    struct Scene
    {
        sim::EnvironmentModel env;
        sim::OfdmConfig ofdm;
        double noise_variance = 0.0;

        void validate() const;
    };

    /// Parses the JSON scene description. Malformed input raises ConfigError.
    Scene parse_scene(const std::string &text);
    Scene load_scene(const std::filesystem::path &path);

    /// Canonical JSON text (sorted keys, shortest round-trip doubles).
    std::string scene_to_json(const Scene &scene);
    void save_scene(const Scene &scene, const std::filesystem::path &path);

    /// Reference scene used by the experiments: a 12 m x 10 m office with two
    /// partition walls and four corner APs facing the room centre.
    Scene default_office_scene();

} // namespace blindmap

#endif
