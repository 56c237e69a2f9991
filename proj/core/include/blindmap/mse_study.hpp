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

#ifndef BLINDMAP_MSE_STUDY_HPP
#define BLINDMAP_MSE_STUDY_HPP

#include "blindmap/bounds.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace blindmap::bounds
{
    enum class ScenarioFamily
    {
        unlimited_ppp, ///< fresh PPP around every trial's trajectory, links within R
        limited_fixed  ///< fixed AP set, every AP heard at every step
    };

    struct MseStudyConfig
    {
        ScenarioFamily family = ScenarioFamily::unlimited_ppp;
        double kappa_density = 2.55e-2;
        double R = 10.0;
        double r0 = 1.0;
        double sigma_theta = 0.1;
        double speed = 0.5; ///< ||v|| in meters per step; the heading is drawn per trial
        std::vector<Vec2> fixed_aps; ///< limited_fixed only
        Vec2 fixed_start = Vec2::Zero();
        std::vector<int> T_grid{100, 316, 1000, 3162, 10000};
        int n_trials = 200;
        int n_restarts = 8;
        /// Restart box half-width in units of the per-coordinate CRLB standard deviation.
        double restart_box_sigmas = 4.0;
        int max_iterations = 200;
        std::uint64_t seed = 1;
    };

    struct MseRow
    {
        int T = 0;
        double mse_x = 0.0;
        double mse_v = 0.0;
        double bound_x = 0.0; ///< mean over trials of tr of the x block of F^-1
        double bound_v = 0.0;
        int trials = 0;
        int dropped = 0;
        double mean_links = 0.0;
    };

    struct MseStudyResult
    {
        std::vector<MseRow> rows;
        double slope_x = 0.0; ///< least-squares slope of log mse_x against log T
        double slope_v = 0.0;
        double bound_slope_x = 0.0;
        double bound_slope_v = 0.0;
    };

    /// One AoD observation of AP o at step t.
    struct AodLink
    {
        double t = 0.0;
        Vec2 ap = Vec2::Zero();
        double theta = 0.0;
    };

    /// Negative log-likelihood (constants dropped) and its gradient.
    double aod_nll(std::span<const AodLink> links, const Psi &psi, double sigma_theta, Eigen::Vector4d *grad);

    /// Full 4x4 Fisher information of the link set at psi.
    Eigen::Matrix4d link_fim(std::span<const AodLink> links, const Psi &psi, double sigma_theta);

    struct MlFit
    {
        Psi psi = Psi::Zero();
        double nll = 0.0;
        bool converged = false;
        int iterations = 0;
    };

    /// Quasi-Newton (BFGS) maximum likelihood from one start; the inverse-Hessian is
    /// seeded with the inverse Fisher information at the start point.
    MlFit ml_fit(std::span<const AodLink> links, const Psi &start, double sigma_theta, int max_iterations);

    /// Least-squares slope of log(y) against log(x).
    double loglog_slope(std::span<const double> x, std::span<const double> y);

    MseStudyResult mse_study(const MseStudyConfig &cfg);

} // namespace blindmap::bounds

#endif
