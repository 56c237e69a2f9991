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

#ifndef BLINDMAP_EXPERIMENT_HPP
#define BLINDMAP_EXPERIMENT_HPP

#include "blindmap/dataset.hpp"
#include "blindmap/inference.hpp"
#include "blindmap/metrics.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace blindmap::eval
{
    /// Everything one pipeline run needs. Relative paths are resolved against the
    /// directory of the configuration file.
    struct ExperimentConfig
    {
        std::filesystem::path scene_path;   ///< empty selects the built-in office scene
        std::filesystem::path dataset_path; ///< empty generates a dataset from the generation spec
        GenerationSpec generation;
        inference::InferenceConfig inference;
        std::vector<double> eta_sweep;
        double beam_map_resolution_m = 0.5;
        int csi_pair_lag_max = 5; ///< time lags used for the CSI-distance plot data
        bool plot_data = true;
        bool record_runtime = false; ///< off keeps metrics.json byte-identical across runs
        std::filesystem::path output_dir = "blindmap_out";
        std::uint64_t seed = 1;
        std::string canonical; ///< normalized JSON text the config hash is taken over

        /// Throws ConfigError on malformed input.
        static ExperimentConfig from_json(const std::string &text, const std::filesystem::path &base_dir = {});
        static ExperimentConfig load(const std::filesystem::path &path);
    };

    struct ExperimentMetrics
    {
        LocalizationError e_loc;
        double losnlos_error = 0.0;
        double e_map = 0.0;
        int e_map_excluded = 0;
        double runtime_s = 0.0;
        std::string config_hash;
    };

    struct MethodScore
    {
        std::string method;
        double e_loc = 0.0;
        double e_loc_nlos = 0.0;
    };

    struct SweepPoint
    {
        double eta = 0.0;
        double e_loc = 0.0;
        double e_loc_nlos = 0.0;
    };

    struct ExperimentResult
    {
        ExperimentMetrics metrics;
        std::vector<Vec2> estimate;
        inference::InferenceResult inference;
        std::vector<MethodScore> comparison; ///< proposed, wcl, aodl
        std::vector<SweepPoint> sweep;
    };

    /// 64-bit FNV-1a.
    std::uint64_t fnv1a64(std::string_view bytes);

    /// Hex FNV-1a of the canonical configuration text.
    std::string config_hash(const ExperimentConfig &cfg);

    /// Runs features, inference, baselines and metrics on a dataset without touching disk.
    ExperimentResult evaluate_dataset(const Dataset &ds, const ExperimentConfig &cfg);

    /// Full pipeline with artifacts in cfg.output_dir. A failing stage leaves the
    /// outputs written so far plus failure.json, then the exception propagates. The
    /// scene is resolved before anything is written.
    ExperimentResult run_experiment(const ExperimentConfig &cfg);

    std::string metrics_to_json(const ExperimentMetrics &m);

    /// CSV with columns t,x,y,node_id (node_id -1 when not on a graph).
    void write_trajectory_csv(const std::filesystem::path &path, const std::vector<Vec2> &positions,
                              const std::vector<int> &nodes = {});
    void write_trace_csv(const std::filesystem::path &path, const std::vector<inference::IterationRecord> &trace);

} // namespace blindmap::eval

#endif
