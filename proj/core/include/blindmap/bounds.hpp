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

#ifndef BLINDMAP_BOUNDS_HPP
#define BLINDMAP_BOUNDS_HPP

#include "blindmap/common.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace blindmap::bounds
{
    /// Constant-speed user x_t = x0 + t v, t = 1..T, observed by fixed APs through
    /// Gaussian AoD measurements. The array constants (G1, sigma_n2, n_antennas)
    /// and the PPP constants (r0, R, kappa) are only read by the bound routines.
    struct RectilinearScenario
    {
        Vec2 x0 = Vec2::Zero();
        Vec2 v = Vec2(1.0, 0.0);
        std::vector<Vec2> ap_positions;
        double sigma_theta = 0.1;
        int T = 100;

        double G1 = 1.0;
        double sigma_n2 = 1.0;
        int n_antennas = 8;
        double r0 = 1.0;
        double R = 10.0;
        double kappa_density = 2.55e-2;

        Vec2 position(int t) const { return x0 + static_cast<double>(t) * v; }
        int Q() const { return static_cast<int>(ap_positions.size()); }
        /// min over t = 1..T and q of ||x_t - o_q||.
        double d_min() const;
        /// Throws std::domain_error on a degenerate scenario.
        void validate() const;
    };

    struct FisherMatrix
    {
        Eigen::Matrix4d full = Eigen::Matrix4d::Zero(); ///< ordering (x1, x2, v1, v2)
        Mat2 block_x = Mat2::Zero();
        Mat2 block_v = Mat2::Zero();
    };

    /// Parameter vector psi = (x, v).
    using Psi = Eigen::Vector4d;

    inline Psi make_psi(const Vec2 &x, const Vec2 &v) { return {x.x(), x.y(), v.x(), v.y()}; }

    /// Observation grid theta(t-1, q) for t = 1..T.
    using AodGrid = Eigen::MatrixXd;

    /// Log-likelihood of the AoD grid at psi; residuals are wrapped to (-pi, pi].
    double aod_loglik(const RectilinearScenario &scn, const Psi &psi, const AodGrid &theta);
    /// Same, at the scenario's own (x0, v).
    double aod_loglik(const RectilinearScenario &scn, const AodGrid &theta);

    /// Noise-free or noisy AoD grid for the scenario.
    AodGrid sample_aod_grid(const RectilinearScenario &scn, double sigma_theta, std::uint64_t seed);

    /// Gradient of phi(x + t v, o) with respect to psi.
    Eigen::Vector4d azimuth_gradient(const Vec2 &l, int t, const Vec2 &v);

    /// Fisher information of psi. Throws std::domain_error if the trajectory hits an AP.
    FisherMatrix fim(const RectilinearScenario &scn);

    /// d^2 sigma_n^2 / (G1 N_t (N_t^2 - 1) cos^2 phi); +inf at broadside-degenerate phi.
    double single_snapshot_angle_crlb(double d, double phi, double G1, double sigma_n2, int n_antennas);

    struct LimitedBound
    {
        int T = 0;
        double C0 = 0.0;
        Mat2 A_x = Mat2::Zero();
        Mat2 A_v = Mat2::Zero();
        double delta_x = 0.0; ///< tr{(C0 A_x)^-1}
        double delta_v = 0.0; ///< 1 / (C0 lambda_min(A_v))
        /// Velocity floor proxy (C0 sum_q s2 ||P_v^perp l_q||^2)^-1 evaluated at T.
        double c_v = 0.0;
        std::vector<std::array<double, 5>> s; ///< s_{T,q}^(n), n = 0..4
        double rho = 0.0;                     ///< a valid rho with d_tq > rho t for all t >= 1
        /// Upper bounds on the tails sum_{t>T} t^n / d^4 for n = 0, 1, 2 (via d > rho t).
        std::array<double, 3> tail_bound{};
    };

    /// Limited-region bounds at T = scn.T.
    LimitedBound crlb_limited(const RectilinearScenario &scn);
    /// Same for every T in an increasing grid, sharing the running sums.
    std::vector<LimitedBound> crlb_limited_series(const RectilinearScenario &scn, std::span<const int> T_grid);

    struct UnlimitedAsymptote
    {
        double x_limit = 0.0; ///< lim T * Delta~_{T,x}
        double v_limit = 0.0; ///< lim T(T+1)(2T+1) * Delta~_{T,v}
    };

    /// Throws std::domain_error unless 0 < r0 < R (R may be +inf), kappa > 0, N_t >= 2.
    UnlimitedAsymptote crlb_unlimited_asymptote(double r0, double R, double kappa_density, double G1,
                                                double sigma_n2, int n_antennas);

    /// kappa pi / 8 (r0^-2 - R^-2): expected sum over the PPP of l_x^2 l_y^2 / ||l||^8.
    double ppp_fisher_density(double kappa_density, double r0, double R);

    struct MonteCarloEstimate
    {
        double mean = 0.0;
        double std_error = 0.0;
        int draws = 0;
    };

    /// Monte-Carlo estimate of the same expectation from independent PPP draws on the
    /// annulus r0 < ||l|| <= R.
    MonteCarloEstimate ppp_fisher_density_mc(double kappa_density, double r0, double R, int n_draws,
                                             std::uint64_t seed);

    /// C(d) L (1/M) sum_m J0(2 pi m omega / M) exp(j 2 pi m u / M), omega = B d / c.
    cdouble theoretical_Ru(double u, double d, double bandwidth_hz, int M, int L, double C_d);
    /// R(u) for the integer lags u = 0..M-1.
    std::vector<cdouble> theoretical_Ru_grid(double d, double bandwidth_hz, int M, int L, double C_d);
    /// Lag of the |R(u)| peak folded to [0, M/2]; |R| is even in u because J0 is real.
    int theoretical_Ru_peak(double d, double bandwidth_hz, int M);

} // namespace blindmap::bounds

#endif
