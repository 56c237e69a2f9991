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

#ifndef BLINDMAP_VITERBI_HPP
#define BLINDMAP_VITERBI_HPP

#include "blindmap/obsmodel.hpp"

#include <limits>
#include <span>
#include <vector>

namespace blindmap::inference
{
    struct PruningConfig
    {
        int top_k = 200; ///< candidates kept per step by emission rank; 0 keeps all
        /// Candidates need sum_q log p(y_tq | x) above this; -inf disables the threshold.
        double log_zeta = -std::numeric_limits<double>::infinity();
    };

    struct TrajectoryEstimate
    {
        std::vector<int> nodes;
        std::vector<double> los_posterior; ///< c^(0) per (t,q), time-major; filled after EM
        double objective = 0.0;            ///< regularized log-likelihood of nodes
        double surrogate = 0.0;            ///< value of the decoded frozen-neighbourhood objective
        int max_candidates = 0;
        int fallback_expansions = 0;
    };

    /// Frozen NLOS neighbourhoods taken from a previous trajectory estimate.
    struct FrozenRegularizer
    {
        std::vector<Vec2> positions;          ///< previous trajectory
        std::vector<std::vector<int>> tau;    ///< per (t,q): neighbour time indices
        std::vector<std::vector<double>> u;   ///< per (t,q): u_hat(H_t, H_tau)

        bool empty() const { return positions.empty(); }
    };

    FrozenRegularizer freeze_regularizer(std::span<const Vec2> previous, const obs::Observations &obs,
                                         const obs::PropagationParams &params, const obs::RegularizationConfig &cfg);

    /// Regularizer value for sample (t,q) when x_t is placed at p.
    double frozen_term(const FrozenRegularizer &fr, int t, int q, int Q, const Vec2 &p, double sigma_u2,
                       double bins_per_meter);

    /// Objective actually maximized by viterbi_solve: emissions, transitions and the
    /// frozen regularizer.
    double surrogate_objective(std::span<const int> nodes, const obs::Observations &obs,
                               const obs::PropagationParams &params, const MobilityModel &mobility,
                               const MobilityGraph &graph, const obs::RegularizationConfig &cfg,
                               const FrozenRegularizer &frozen);

    /// Pair-state Viterbi over (x_{t-1}, x_t). Ties resolve toward lower node indices.
    TrajectoryEstimate viterbi_solve(const obs::Observations &obs, const MobilityGraph &graph,
                                     const obs::PropagationParams &params, const MobilityModel &mobility,
                                     const obs::RegularizationConfig &cfg, const PruningConfig &pruning,
                                     std::span<const Vec2> prev_trajectory = {});

} // namespace blindmap::inference

#endif
