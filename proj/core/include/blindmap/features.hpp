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

#ifndef BLINDMAP_FEATURES_HPP
#define BLINDMAP_FEATURES_HPP

#include "blindmap/dataset.hpp"
#include "blindmap/sim.hpp"

#include <filesystem>
#include <vector>

namespace blindmap::features
{
    /// Per-(t,q) observables. The observation vector used by the mixture model is
    /// [rss, aod, rss, spread]; rss is stored once.
    struct RadioSignature
    {
        double rss_db = 0.0;
        double aod_rad = 0.0;
        double spread_db = 0.0;
        int ap_id = 0;
        int time_index = 0;
    };

    enum class SpreadNorm
    {
        frobenius,
        spectral
    };

    inline constexpr double kSpreadFloorDb = -120.0;

    /// 10 log10 of the Frobenius power.
    double rss(const Eigen::MatrixXcd &H);

    /// Candidate relative angles spaced by step over (-pi/2, pi/2); always contains 0.
    std::vector<double> aod_grid_uniform(double step);

    /// Angles arcsin(k / half_points), k = -(half_points-1) .. half_points-1.
    std::vector<double> aod_grid_sine(int half_points = 512);

    /// MUSIC pseudo-spectrum 1 / ||U^H a(phi)||^2 with a single dominant source.
    std::vector<double> music_pseudospectrum(const Eigen::MatrixXcd &H, const sim::ArrayGeometry &geom,
                                             const std::vector<double> &angles);

    /// Dominant-path AoD in the global frame, [0, 2*pi), over a uniform angle grid.
    double aod_estimate(const Eigen::MatrixXcd &H, const sim::ArrayGeometry &geom, double grid_step);

    /// Same estimator over an explicit grid of relative angles.
    double aod_estimate_on_grid(const Eigen::MatrixXcd &H, const sim::ArrayGeometry &geom,
                                const std::vector<double> &angles);

    /// 10 log10 of the variance of |H| / ||H||, floored at -120 dB.
    double delay_spread_feature(const Eigen::MatrixXcd &H, SpreadNorm norm = SpreadNorm::frobenius);

    /// Magnitude of the lag-domain correlation (1/(N_t M)) sum h_i h_j^* e^{j 2pi m u / M}
    /// for u = 0 .. M-1.
    std::vector<double> csi_lag_profile(const Eigen::MatrixXcd &Hi, const Eigen::MatrixXcd &Hj);

    /// Correlation-peak lag. half_range restricts the search to u <= M/2.
    int csi_distance(const Eigen::MatrixXcd &Hi, const Eigen::MatrixXcd &Hj, bool half_range = false);

    /// Normalized power-angular-delay profile |D^H H F^H| / ||D^H H F^H||_F.
    Eigen::MatrixXd padp_profile(const Eigen::MatrixXcd &H, const sim::ArrayGeometry &geom, int dict_size = 0);

    /// Frobenius distance between normalized PADPs; dict_size 0 selects 8 N_t.
    double padp_distance(const Eigen::MatrixXcd &Hi, const Eigen::MatrixXcd &Hj, const sim::ArrayGeometry &geom,
                         int dict_size = 0);

    struct ExtractOptions
    {
        int aod_half_points = 512;
        SpreadNorm spread_norm = SpreadNorm::frobenius;
    };

    /// Signatures for every (t,q) of a dataset, time-major.
    std::vector<RadioSignature> extract_signatures(const Dataset &ds, const ExtractOptions &options = {});

    struct CsiPair
    {
        int i = 0;
        int j = 0;
        int q = 0;
        int u_hat = 0;
    };

    void write_feature_csv(const std::vector<RadioSignature> &sigs, const std::filesystem::path &path);
    void write_pairwise_csv(const std::vector<CsiPair> &pairs, const std::filesystem::path &path);

} // namespace blindmap::features

#endif
