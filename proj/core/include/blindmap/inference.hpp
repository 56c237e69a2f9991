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

#ifndef BLINDMAP_INFERENCE_HPP
#define BLINDMAP_INFERENCE_HPP

#include "blindmap/em.hpp"
#include "blindmap/viterbi.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace blindmap::inference
{
    struct InferenceConfig
    {
        double gamma = 0.5;
        double slot_s = 0.2;
        double eta = 0.0;
        double resolution_m = 0.25;
        double d_max_m = 0.75;
        double neighborhood_radius_m = 2.0;
        int zeta_top_k = 200;
        int max_outer_iters = 50;
        double em_tol = 1e-6;
        std::uint64_t seed = 1;
        double sigma_v2_init = 1.0;
        double step_variance_floor = 1e-3;
        VarianceEstimator variance_estimator = VarianceEstimator::closed_form;
        double monotonicity_slack = 1e-9;
        /// Outer iterations without a new best objective before the loop gives up.
        int stall_patience = 4;

        /// Reads the keys gamma, eta, resolution_m, d_max_m, delta_s, zeta_top_k,
        /// max_outer_iters, em_tol and seed from a JSON object; unknown keys are ignored.
        static InferenceConfig from_json(const std::string &text);
    };

    struct IterationRecord
    {
        int iteration = 0;
        double objective = 0.0;
        double p2_loglik = 0.0;
        int changed_nodes = 0;
    };

    struct InferenceResult
    {
        TrajectoryEstimate estimate;
        obs::PropagationParams params;
        MobilityModel mobility;
        std::vector<IterationRecord> trace;
        bool converged = false;
        /// The decoded trajectory revisited an earlier iterate other than the last one.
        bool cycled = false;
        int monotonicity_violations = 0;
    };

    /// Data-informed randomized starting point for the propagation parameters.
    obs::PropagationParams initial_params(const obs::Observations &obs, const MobilityGraph &graph,
                                          std::uint64_t seed);

    /// Alternates Viterbi decoding, EM on the propagation parameters and the
    /// closed-form mobility fit until the trajectory repeats. A cycle or a stalled
    /// objective also stops the loop, keeping the best iterate seen.
    InferenceResult alternate_optimize(const obs::Observations &obs, const MobilityGraph &graph,
                                       const InferenceConfig &cfg);

} // namespace blindmap::inference

#endif
