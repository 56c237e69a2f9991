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

#ifndef BLINDMAP_OBSMODEL_HPP
#define BLINDMAP_OBSMODEL_HPP

#include "blindmap/features.hpp"
#include "blindmap/graph.hpp"
#include "blindmap/mobility.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

namespace blindmap::obs
{
    using features::RadioSignature;

    /// Propagation parameters. Component k = 0 is LOS, k = 1 is NLOS.
    /// Per-(t,q) arrays are time-major.
    struct PropagationParams
    {
        int T = 0;
        int Q = 0;
        std::array<std::vector<double>, 2> beta;     ///< [k][q] dB
        std::array<std::vector<double>, 2> alpha;    ///< [k][q] dB per decade
        std::array<std::vector<double>, 2> sigma_s2; ///< [k][q] dB^2
        std::array<double, 2> sigma_theta2{0.01, 0.5};
        std::array<Vec2, 2> m{Vec2::Zero(), Vec2::Zero()};
        std::array<Mat2, 2> upsilon{Mat2::Identity(), Mat2::Identity()};
        std::vector<std::array<double, 2>> pi; ///< mixture weights per (t,q)
        std::vector<std::uint8_t> nlos;        ///< hard assignment u^(1) per (t,q)
        double sigma_u2 = 1.0;

        /// Neutral parameters of the right shape (equal weights, all LOS).
        static PropagationParams make(int T, int Q);

        std::size_t index(int t, int q) const { return static_cast<std::size_t>(t) * Q + q; }
        double weight(int t, int q, int k) const { return pi[index(t, q)][k]; }
        bool is_nlos(int t, int q) const { return nlos[index(t, q)] != 0; }

        /// Throws ParameterError for non-positive variances or a non-PD Upsilon.
        void validate() const;
    };

    struct RegularizationConfig
    {
        double eta = 0.0;
        double neighborhood_radius_m = 2.0;
        double bandwidth_hz = 400e6;

        double bins_per_meter() const { return bandwidth_hz / kSpeedOfLight; }
    };

    /// Precomputed inverses and log-determinants for repeated emission evaluation.
    class EmissionModel
    {
    public:
        explicit EmissionModel(const PropagationParams &params);

        /// log N(y; mu_k(x), Sigma_k) for k = 0, 1 (without mixture weights).
        std::array<double, 2> component_logliks(const RadioSignature &sig, const Vec2 &position,
                                                const Vec2 &ap) const;
        /// log sum_k pi_k N(y; mu_k(x), Sigma_k).
        double loglik(const RadioSignature &sig, const Vec2 &position, const Vec2 &ap) const;

        const PropagationParams &params() const { return *params_; }

    private:
        const PropagationParams *params_;
        std::array<Mat2, 2> inv_upsilon_;
        std::array<double, 2> log_det_upsilon_{};
    };

    double emission_loglik(const RadioSignature &sig, const Vec2 &position, const Vec2 &ap,
                           const PropagationParams &params);

    /// Memoized CSI distances u_hat(H_{t,q}, H_{tau,q}) over a fixed set of channels.
    /// Not thread-safe.
    class CsiDistanceCache
    {
    public:
        CsiDistanceCache(std::shared_ptr<const std::vector<sim::ChannelTensor>> channels, int T, int Q,
                         bool half_range = true);

        int operator()(int t, int tau, int q);
        std::size_t evaluations() const { return evaluations_; }
        int T() const { return T_; }
        int Q() const { return Q_; }

    private:
        std::shared_ptr<const std::vector<sim::ChannelTensor>> channels_;
        int T_;
        int Q_;
        bool half_range_;
        std::unordered_map<std::uint64_t, int> memo_;
        std::size_t evaluations_ = 0;
    };

    /// Everything the objective needs beyond the trajectory and the parameters.
    struct Observations
    {
        int T = 0;
        int Q = 0;
        std::vector<RadioSignature> signatures; ///< time-major
        std::vector<Vec2> ap_positions;
        double bandwidth_hz = 400e6;
        std::shared_ptr<CsiDistanceCache> csi;  ///< may be null when eta = 0

        const RadioSignature &sig(int t, int q) const { return signatures[static_cast<std::size_t>(t) * Q + q]; }
    };

    /// Observations of a dataset with the half-range CSI distance.
    Observations make_observations(const Dataset &ds, std::vector<RadioSignature> signatures);

    /// {tau != t : d(x_t, x_tau) < radius, both NLOS for AP q}; empty when x_t is LOS.
    std::vector<int> nlos_neighborhood(int t, int q, std::span<const Vec2> trajectory,
                                       std::span<const std::uint8_t> nlos, int Q, const RegularizationConfig &cfg);

    /// Mean over the NLOS neighbourhood of log N(u_hat; (B/c) d, sigma_u^2); 0 for
    /// LOS samples and empty neighbourhoods.
    double spatial_reg_loglik(int t, int q, std::span<const Vec2> trajectory, CsiDistanceCache &csi,
                              const PropagationParams &params, const RegularizationConfig &cfg);

    struct ObjectiveTerms
    {
        double emission = 0.0;
        double transition = 0.0;
        double regularization = 0.0; ///< unweighted sum of f
        double total = 0.0;
    };

    /// Regularized log-likelihood of a node sequence. Off-graph nodes throw;
    /// consecutive non-adjacent nodes give -inf.
    ObjectiveTerms objective_terms(std::span<const int> trajectory, const Observations &obs,
                                   const PropagationParams &params, const inference::MobilityModel &mobility,
                                   const inference::MobilityGraph &graph, const RegularizationConfig &cfg);

    double total_objective(std::span<const int> trajectory, const Observations &obs, const PropagationParams &params,
                           const inference::MobilityModel &mobility, const inference::MobilityGraph &graph,
                           const RegularizationConfig &cfg);

} // namespace blindmap::obs

#endif
