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

#ifndef BLINDMAP_EM_HPP
#define BLINDMAP_EM_HPP

#include "blindmap/obsmodel.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace blindmap::inference
{
    enum class EmFeatureSet
    {
        joint,   ///< path loss + AoD + (rss, spread) pair
        rss_only ///< path-loss term alone
    };

    struct EmConfig
    {
        double tol = 1e-6;
        int max_iter = 500;
        int n_restarts = 5;
        std::uint64_t seed = 1;
        EmFeatureSet features = EmFeatureSet::joint;
        double sigma_s2_floor = 1e-2;
        double sigma_theta2_floor = 1e-6;
        double upsilon_eig_floor = 1e-3;
        double starve_fraction = 1e-4; ///< component mass below this share of T*Q is starved
        int max_reinit = 3;
        bool allow_collapse = true;    ///< BIC check against a single LOS component
        double sigma_u2_default = 1.0;
        double sigma_u2_floor = 0.05;
        obs::RegularizationConfig reg;
    };

    struct EmResult
    {
        obs::PropagationParams params;
        std::vector<std::array<double, 2>> responsibilities; ///< time-major
        std::vector<double> trace; ///< (P2) log-likelihood without the regularizer, per iteration
        int iterations = 0;
        bool converged = false;
        bool collapsed = false;
        int reinitializations = 0;
    };

    /// sum_{t,q} log sum_k pi_k N(y_tq; mu_k(x_t), Sigma_k) for the chosen feature set.
    double p2_loglik(const obs::Observations &obs, std::span<const Vec2> trajectory, const obs::PropagationParams &params,
                     EmFeatureSet features = EmFeatureSet::joint);

    /// Fits the propagation parameters for a fixed trajectory. When warm_start is
    /// given it seeds a single run; otherwise k-means restarts on (s, nu) are used.
    EmResult em_fit(const obs::Observations &obs, std::span<const Vec2> trajectory, const EmConfig &cfg,
                    const obs::PropagationParams *warm_start = nullptr);

    /// sigma_u^2 as the mean squared CSI-distance residual over all NLOS neighbourhoods;
    /// nullopt when no pair exists.
    std::optional<double> estimate_sigma_u2(const obs::Observations &obs, std::span<const Vec2> trajectory,
                                            const obs::PropagationParams &params, const obs::RegularizationConfig &reg);

    /// Two-cluster k-means with k-means++ seeding; labels 0/1 per point.
    std::vector<int> kmeans2(const std::vector<Eigen::VectorXd> &points, std::uint64_t seed, int max_iter = 100);

} // namespace blindmap::inference

#endif
