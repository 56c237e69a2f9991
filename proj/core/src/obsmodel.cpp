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

#include "blindmap/obsmodel.hpp"

#include <Eigen/Cholesky>

#include <limits>

namespace blindmap::obs
{
    namespace
    {
        constexpr double kLog2Pi = 1.8378770664093453; // log(2 pi)

        double log_sum_exp2(double a, double b)
        {
            const double top = std::max(a, b);
            if (top == -std::numeric_limits<double>::infinity())
                return top;
            return top + std::log(std::exp(a - top) + std::exp(b - top));
        }
    } // namespace

    PropagationParams PropagationParams::make(int T, int Q)
    {
        if (T < 1 || Q < 1)
            throw ParameterError("propagation parameters need T >= 1 and Q >= 1");
        PropagationParams p;
        p.T = T;
        p.Q = Q;
        for (int k = 0; k < 2; ++k)
        {
            p.beta[k].assign(Q, -40.0);
            p.alpha[k].assign(Q, -20.0);
            p.sigma_s2[k].assign(Q, 9.0);
        }
        p.pi.assign(static_cast<std::size_t>(T) * Q, {0.5, 0.5});
        p.nlos.assign(static_cast<std::size_t>(T) * Q, 0);
        return p;
    }

    void PropagationParams::validate() const
    {
        const std::size_t n = static_cast<std::size_t>(T) * Q;
        if (T < 1 || Q < 1 || pi.size() != n || nlos.size() != n)
            throw ParameterError("propagation parameters have inconsistent sizes");
        for (int k = 0; k < 2; ++k)
        {
            if (beta[k].size() != static_cast<std::size_t>(Q) || alpha[k].size() != static_cast<std::size_t>(Q) ||
                sigma_s2[k].size() != static_cast<std::size_t>(Q))
                throw ParameterError("path-loss parameters have inconsistent sizes");
            for (double v : sigma_s2[k])
                if (!(v > 0.0) || !std::isfinite(v))
                    throw ParameterError("sigma_s^2 must be positive");
            if (!(sigma_theta2[k] > 0.0) || !std::isfinite(sigma_theta2[k]))
                throw ParameterError("sigma_theta^2 must be positive");
            const Mat2 &U = upsilon[k];
            if (!U.allFinite() || std::abs(U(0, 1) - U(1, 0)) > 1e-9 * std::max(1.0, U.cwiseAbs().maxCoeff()))
                throw ParameterError("Upsilon must be symmetric");
            Eigen::LLT<Mat2> llt(U);
            if (llt.info() != Eigen::Success || !(U.determinant() > 0.0))
                throw ParameterError("Upsilon must be positive definite");
        }
        if (!(sigma_u2 > 0.0) || !std::isfinite(sigma_u2))
            throw ParameterError("sigma_u^2 must be positive");
    }

    EmissionModel::EmissionModel(const PropagationParams &params) : params_(&params)
    {
        params.validate();
        for (int k = 0; k < 2; ++k)
        {
            inv_upsilon_[k] = params.upsilon[k].inverse();
            log_det_upsilon_[k] = std::log(params.upsilon[k].determinant());
        }
    }

    std::array<double, 2> EmissionModel::component_logliks(const RadioSignature &sig, const Vec2 &position,
                                                           const Vec2 &ap) const
    {
        const double d = (position - ap).norm();
        if (!(d > 0.0))
            throw std::domain_error("emission_loglik: position coincides with the access point");
        const PropagationParams &p = *params_;
        const int q = sig.ap_id;
        const double log_d = std::log10(d);
        const double dtheta = wrap_to_pi(sig.aod_rad - azimuth(ap, position));
        std::array<double, 2> out{};
        for (int k = 0; k < 2; ++k)
        {
            const double rs = sig.rss_db - p.beta[k][q] - p.alpha[k][q] * log_d;
            const double ls = -0.5 * (kLog2Pi + std::log(p.sigma_s2[k][q]) + rs * rs / p.sigma_s2[k][q]);
            const double lt = -0.5 * (kLog2Pi + std::log(p.sigma_theta2[k]) + dtheta * dtheta / p.sigma_theta2[k]);
            const Vec2 r = Vec2(sig.rss_db, sig.spread_db) - p.m[k];
            const double lp = -0.5 * (2.0 * kLog2Pi + log_det_upsilon_[k] + r.dot(inv_upsilon_[k] * r));
            out[k] = ls + lt + lp;
        }
        return out;
    }

    double EmissionModel::loglik(const RadioSignature &sig, const Vec2 &position, const Vec2 &ap) const
    {
        const auto c = component_logliks(sig, position, ap);
        const double w0 = params_->weight(sig.time_index, sig.ap_id, 0);
        const double w1 = params_->weight(sig.time_index, sig.ap_id, 1);
        return log_sum_exp2(std::log(w0) + c[0], std::log(w1) + c[1]);
    }

    double emission_loglik(const RadioSignature &sig, const Vec2 &position, const Vec2 &ap,
                           const PropagationParams &params)
    {
        return EmissionModel(params).loglik(sig, position, ap);
    }

    CsiDistanceCache::CsiDistanceCache(std::shared_ptr<const std::vector<sim::ChannelTensor>> channels, int T, int Q,
                                       bool half_range)
        : channels_(std::move(channels)), T_(T), Q_(Q), half_range_(half_range)
    {
        if (!channels_ || channels_->size() != static_cast<std::size_t>(T) * Q)
            throw std::invalid_argument("CsiDistanceCache: channel count does not match T x Q");
    }

    int CsiDistanceCache::operator()(int t, int tau, int q)
    {
        if (t < 0 || t >= T_ || tau < 0 || tau >= T_ || q < 0 || q >= Q_)
            throw std::domain_error("CsiDistanceCache: index out of range");
        const std::uint64_t key = (static_cast<std::uint64_t>(q) << 48) | (static_cast<std::uint64_t>(t) << 24) |
                                  static_cast<std::uint64_t>(tau);
        const auto it = memo_.find(key);
        if (it != memo_.end())
            return it->second;
        const auto &ch = *channels_;
        const int u = features::csi_distance(ch[static_cast<std::size_t>(t) * Q_ + q].entries,
                                             ch[static_cast<std::size_t>(tau) * Q_ + q].entries, half_range_);
        ++evaluations_;
        memo_.emplace(key, u);
        return u;
    }

    Observations make_observations(const Dataset &ds, std::vector<RadioSignature> signatures)
    {
        Observations obs;
        obs.T = ds.T();
        obs.Q = ds.Q();
        if (signatures.size() != static_cast<std::size_t>(obs.T) * obs.Q)
            throw std::invalid_argument("make_observations: signature count does not match the dataset");
        obs.signatures = std::move(signatures);
        obs.bandwidth_hz = ds.scene.ofdm.bandwidth_hz;
        for (const auto &ap : ds.scene.env.aps)
            obs.ap_positions.push_back(ap.position);
        auto channels = std::make_shared<const std::vector<sim::ChannelTensor>>(ds.channels);
        obs.csi = std::make_shared<CsiDistanceCache>(std::move(channels), obs.T, obs.Q, true);
        return obs;
    }

    std::vector<int> nlos_neighborhood(int t, int q, std::span<const Vec2> trajectory,
                                       std::span<const std::uint8_t> nlos, int Q, const RegularizationConfig &cfg)
    {
        const int T = static_cast<int>(trajectory.size());
        if (T < 1 || t < 0 || t >= T || q < 0 || q >= Q || nlos.size() != static_cast<std::size_t>(T) * Q)
            throw std::domain_error("nlos_neighborhood: index out of range");
        std::vector<int> out;
        auto flag = [&](int tt) { return nlos[static_cast<std::size_t>(tt) * Q + q] != 0; };
        if (!flag(t))
            return out;
        for (int tau = 0; tau < T; ++tau)
            if (tau != t && flag(tau) && (trajectory[t] - trajectory[tau]).norm() < cfg.neighborhood_radius_m)
                out.push_back(tau);
        return out;
    }

    double spatial_reg_loglik(int t, int q, std::span<const Vec2> trajectory, CsiDistanceCache &csi,
                              const PropagationParams &params, const RegularizationConfig &cfg)
    {
        if (!(params.sigma_u2 > 0.0))
            throw ParameterError("sigma_u^2 must be positive");
        const auto nb = nlos_neighborhood(t, q, trajectory, params.nlos, params.Q, cfg);
        if (nb.empty())
            return 0.0;
        const double scale = cfg.bins_per_meter();
        const double norm = -0.5 * (kLog2Pi + std::log(params.sigma_u2));
        double acc = 0.0;
        for (int tau : nb)
        {
            const double r = csi(t, tau, q) - scale * (trajectory[t] - trajectory[tau]).norm();
            acc += norm - r * r / (2.0 * params.sigma_u2);
        }
        return acc / static_cast<double>(nb.size());
    }

    ObjectiveTerms objective_terms(std::span<const int> trajectory, const Observations &obs,
                                   const PropagationParams &params, const inference::MobilityModel &mobility,
                                   const inference::MobilityGraph &graph, const RegularizationConfig &cfg)
    {
        const int T = static_cast<int>(trajectory.size());
        if (T != obs.T || params.T != obs.T || params.Q != obs.Q)
            throw std::domain_error("total_objective: trajectory length does not match the observations");
        for (int node : trajectory)
            if (!graph.valid(node))
                throw std::domain_error("total_objective: node is not on the mobility graph");

        ObjectiveTerms terms;
        std::vector<Vec2> pos(T);
        for (int t = 0; t < T; ++t)
            pos[t] = graph.nodes[trajectory[t]];

        const EmissionModel em(params);
        for (int t = 0; t < T; ++t)
            for (int q = 0; q < obs.Q; ++q)
                terms.emission += em.loglik(obs.sig(t, q), pos[t], obs.ap_positions[q]);

        constexpr double ninf = -std::numeric_limits<double>::infinity();
        for (int t = 1; t < T; ++t)
            if (!graph.adjacent(trajectory[t - 1], trajectory[t]))
                terms.transition = ninf;
        if (terms.transition != ninf)
            for (int t = 2; t < T; ++t)
                terms.transition += inference::transition_logprob(trajectory[t], trajectory[t - 1], trajectory[t - 2],
                                                                  graph, mobility);

        if (cfg.eta != 0.0)
        {
            if (!obs.csi)
                throw std::invalid_argument("total_objective: regularization needs CSI distances");
            for (int t = 0; t < T; ++t)
                for (int q = 0; q < obs.Q; ++q)
                    terms.regularization += spatial_reg_loglik(t, q, pos, *obs.csi, params, cfg);
        }
        terms.total = terms.emission + terms.transition + cfg.eta * terms.regularization;
        return terms;
    }

    double total_objective(std::span<const int> trajectory, const Observations &obs, const PropagationParams &params,
                           const inference::MobilityModel &mobility, const inference::MobilityGraph &graph,
                           const RegularizationConfig &cfg)
    {
        return objective_terms(trajectory, obs, params, mobility, graph, cfg).total;
    }

} // namespace blindmap::obs
