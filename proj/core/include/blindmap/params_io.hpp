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

#ifndef BLINDMAP_PARAMS_IO_HPP
#define BLINDMAP_PARAMS_IO_HPP

#include "blindmap/mobility.hpp"
#include "blindmap/obsmodel.hpp"

#include <filesystem>
#include <string>

namespace blindmap
{
    /// Versioned JSON text ("blindmap-params/1"). Doubles are written in their
    /// shortest round-trip form so a reload reproduces every bit.
    std::string params_to_json(const obs::PropagationParams &params, const inference::MobilityModel *mobility = nullptr);

    /// Parses the propagation parameters; the mobility block is read when present.
    obs::PropagationParams params_from_json(const std::string &text, inference::MobilityModel *mobility = nullptr);

    void save_params(const std::filesystem::path &path, const obs::PropagationParams &params,
                     const inference::MobilityModel *mobility = nullptr);
    obs::PropagationParams load_params(const std::filesystem::path &path, inference::MobilityModel *mobility = nullptr);

} // namespace blindmap

#endif
