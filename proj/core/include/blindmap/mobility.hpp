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

#ifndef BLINDMAP_MOBILITY_HPP
#define BLINDMAP_MOBILITY_HPP

#include "blindmap/graph.hpp"

#include <span>
#include <vector>

namespace blindmap::inference
{
    /// Mobility parameters of the discretized Gauss-Markov model.
    struct MobilityModel
    {
        double gamma = 0.5;
        double slot_s = 0.2;
        Vec2 mean_velocity = Vec2::Zero();
        double sigma_v2 = 1.0;
        /// Lower bound on the per-axis step variance (1-gamma^2) delta^2 sigma_v^2 [m^2].
        double step_variance_floor = 1e-4;

        double step_variance() const;
    };

    /// Log of a_nij / sum_k a_nik; -inf when j is not a neighbour of i.
    double transition_logprob(int j, int i, int n, const MobilityGraph &graph, const MobilityModel &model);

    /// Log-probabilities for every j in N_i (same order as graph.neighbors[i]).
    void transition_row(int i, int n, const MobilityGraph &graph, const MobilityModel &model, std::vector<double> &out);

    enum class VarianceEstimator
    {
        closed_form, ///< sum ||r||^2 / (2 (T-2) delta^2)
        gauss_markov ///< additionally divided by (1 - gamma^2): the likelihood maximizer
    };

    struct MobilityFit
    {
        Vec2 mean_velocity = Vec2::Zero();
        double sigma_v2 = 0.0;
    };

    /// Closed-form mobility fit on a position sequence. For gamma = 1 the mean
    /// velocity is the first-difference mean.
    MobilityFit fit_mobility(std::span<const Vec2> trajectory, double gamma, double slot_s,
                             VarianceEstimator estimator = VarianceEstimator::closed_form);

} // namespace blindmap::inference

#endif
