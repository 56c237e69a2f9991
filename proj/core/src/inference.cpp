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

#include "blindmap/inference.hpp"
#include "blindmap/log.hpp"

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include <algorithm>
#include <random>
#include <sstream>

namespace blindmap::inference
{
    InferenceConfig InferenceConfig::from_json(const std::string &text)
    {
        InferenceConfig c;
        try
        {
            const auto j = nlohmann::json::parse(text);
            const auto &src = j.contains("inference") ? j["inference"] : j;
            c.gamma = src.value("gamma", c.gamma);
            c.eta = src.value("eta", c.eta);
            c.resolution_m = src.value("resolution_m", c.resolution_m);
            c.d_max_m = src.value("d_max_m", c.d_max_m);
            c.slot_s = src.value("delta_s", c.slot_s);
            c.zeta_top_k = src.value("zeta_top_k", c.zeta_top_k);
            c.max_outer_iters = src.value("max_outer_iters", c.max_outer_iters);
            c.em_tol = src.value("em_tol", c.em_tol);
            c.stall_patience = src.value("stall_patience", c.stall_patience);
            c.seed = src.value("seed", c.seed);
            c.neighborhood_radius_m = src.value("neighborhood_radius_m", c.neighborhood_radius_m);
            c.sigma_v2_init = src.value("sigma_v2_init", c.sigma_v2_init);
            c.step_variance_floor = src.value("step_variance_floor", c.step_variance_floor);
            if (src.value("variance_estimator", std::string("closed_form")) == "gauss_markov")
                c.variance_estimator = VarianceEstimator::gauss_markov;
        }
        catch (const nlohmann::json::exception &e)
        {
            throw ConfigError(std::string("inference config: ") + e.what());
        }
        if (!(c.gamma > 0.0 && c.gamma <= 1.0) || !(c.eta >= 0.0) || !(c.resolution_m > 0.0) ||
            !(c.d_max_m >= c.resolution_m) || !(c.slot_s > 0.0) || c.zeta_top_k < 0 || c.max_outer_iters < 1 || c.stall_patience < 1 ||
            !(c.em_tol > 0.0) || !(c.neighborhood_radius_m > 0.0))
            throw ConfigError("inference config: parameter out of range");
        return c;
    }

    obs::PropagationParams initial_params(const obs::Observations &o, const MobilityGraph &graph, std::uint64_t seed)
    {
        obs::PropagationParams p = obs::PropagationParams::make(o.T, o.Q);
        const std::size_t n = o.signatures.size();
        std::vector<Eigen::VectorXd> z(n);
        Vec2 mu = Vec2::Zero(), sd = Vec2::Zero();
        for (const auto &s : o.signatures)
            mu += Vec2(s.rss_db, s.spread_db);
        mu /= static_cast<double>(n);
        for (const auto &s : o.signatures)
            sd += (Vec2(s.rss_db, s.spread_db) - mu).cwiseAbs2();
        sd = (sd / static_cast<double>(n)).cwiseSqrt().cwiseMax(1e-9);
        for (std::size_t i = 0; i < n; ++i)
            z[i] = (Vec2(o.signatures[i].rss_db, o.signatures[i].spread_db) - mu).cwiseQuotient(sd);
        std::vector<int> label = kmeans2(z, seed);

        // The cluster with the larger mean RSS starts as LOS.
        std::array<double, 2> w{}, s_mean{};
        for (std::size_t i = 0; i < n; ++i)
        {
            w[label[i]] += 1.0;
            s_mean[label[i]] += o.signatures[i].rss_db;
        }
        if (w[0] > 0 && w[1] > 0 && s_mean[1] / w[1] > s_mean[0] / w[0])
            for (int &l : label)
                l = 1 - l;

        std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
        std::uniform_real_distribution<double> jitter(-1.0, 1.0);
        for (int k = 0; k < 2; ++k)
        {
            Vec2 m = Vec2::Zero();
            double cnt = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                if (label[i] == k)
                {
                    m += Vec2(o.signatures[i].rss_db, o.signatures[i].spread_db);
                    cnt += 1.0;
                }
            m = cnt > 0 ? Vec2(m / cnt) : mu;
            Mat2 cov = Mat2::Zero();
            for (std::size_t i = 0; i < n; ++i)
                if (label[i] == k)
                {
                    const Vec2 r = Vec2(o.signatures[i].rss_db, o.signatures[i].spread_db) - m;
                    cov += r * r.transpose();
                }
            cov = cnt > 1 ? Mat2(cov / cnt) : Mat2(sd.cwiseAbs2().asDiagonal());
            Eigen::SelfAdjointEigenSolver<Mat2> eig(cov);
            const Vec2 ev = eig.eigenvalues().cwiseMax(1e-2);
            p.m[k] = m;
            p.upsilon[k] = eig.eigenvectors() * ev.asDiagonal() * eig.eigenvectors().transpose();
            p.upsilon[k] = 0.5 * (p.upsilon[k] + p.upsilon[k].transpose()).eval();
            p.sigma_theta2[k] = k == 0 ? 0.05 : 1.0;
            for (int q = 0; q < o.Q; ++q)
            {
                double typical = 0.0;
                for (const Vec2 &node : graph.nodes)
                    typical += (node - o.ap_positions[q]).norm();
                typical /= static_cast<double>(graph.size());
                const double alpha = -20.0 - 10.0 * k + 2.0 * jitter(rng);
                p.alpha[k][q] = alpha;
                p.beta[k][q] = m.x() - alpha * std::log10(std::max(typical, 1e-3));
                p.sigma_s2[k][q] = std::max(cov(0, 0), 1.0);
            }
        }
        const double pi0 = std::clamp(w[0] / static_cast<double>(n), 0.05, 0.95);
        for (auto &x : p.pi)
            x = {pi0, 1.0 - pi0};
        for (std::size_t i = 0; i < n; ++i)
            p.nlos[i] = label[i] == 1 ? 1 : 0;
        return p;
    }

    InferenceResult alternate_optimize(const obs::Observations &o, const MobilityGraph &graph,
                                       const InferenceConfig &cfg)
    {
        obs::RegularizationConfig reg;
        reg.eta = cfg.eta;
        reg.neighborhood_radius_m = cfg.neighborhood_radius_m;
        reg.bandwidth_hz = o.bandwidth_hz;

        InferenceResult res;
        res.params = initial_params(o, graph, cfg.seed);
        res.mobility.gamma = cfg.gamma;
        res.mobility.slot_s = cfg.slot_s;
        res.mobility.sigma_v2 = cfg.sigma_v2_init;
        res.mobility.step_variance_floor = cfg.step_variance_floor;

        EmConfig em_cfg;
        em_cfg.tol = cfg.em_tol;
        em_cfg.seed = cfg.seed;
        em_cfg.reg = reg;
        em_cfg.allow_collapse = false;

        PruningConfig pruning;
        pruning.top_k = cfg.zeta_top_k;

        // With the CSI regulariser active, the decoded sequence can cycle between a
        // few trajectories instead of repeating. A revisit ends the loop, and so does a
        // run of iterations without a new best objective; the best iterate is returned.
        std::vector<std::vector<int>> visited;
        std::vector<int> prev_nodes;
        std::vector<Vec2> prev_pos;
        double prev_obj = -std::numeric_limits<double>::infinity();
        double best_obj = -std::numeric_limits<double>::infinity();
        InferenceResult best;
        int since_best = 0;
        for (int it = 0; it < cfg.max_outer_iters; ++it)
        {
            TrajectoryEstimate est = viterbi_solve(o, graph, res.params, res.mobility, reg, pruning, prev_pos);
            std::vector<Vec2> pos(o.T);
            for (int t = 0; t < o.T; ++t)
                pos[t] = graph.nodes[est.nodes[t]];

            EmResult em = em_fit(o, pos, em_cfg, it == 0 ? nullptr : &res.params);
            res.params = std::move(em.params);
            const MobilityFit fit = fit_mobility(pos, cfg.gamma, cfg.slot_s, cfg.variance_estimator);
            res.mobility.mean_velocity = fit.mean_velocity;
            res.mobility.sigma_v2 = fit.sigma_v2;

            est.los_posterior.resize(em.responsibilities.size());
            for (std::size_t i = 0; i < em.responsibilities.size(); ++i)
                est.los_posterior[i] = em.responsibilities[i][0];
            est.objective = obs::total_objective(est.nodes, o, res.params, res.mobility, graph, reg);

            IterationRecord rec;
            rec.iteration = it;
            rec.objective = est.objective;
            rec.p2_loglik = em.trace.empty() ? 0.0 : em.trace.back();
            for (int t = 0; t < o.T && !prev_nodes.empty(); ++t)
                rec.changed_nodes += est.nodes[t] != prev_nodes[t] ? 1 : 0;
            if (prev_nodes.empty())
                rec.changed_nodes = o.T;
            res.trace.push_back(rec);

            if (est.objective < prev_obj - cfg.monotonicity_slack * std::max(1.0, std::abs(prev_obj)))
            {
                ++res.monotonicity_violations;
                std::ostringstream msg;
                msg << "alternate_optimize: objective decreased at iteration " << it << " (" << prev_obj << " -> "
                    << est.objective << ")";
                log_message(LogLevel::info, msg.str());
            }
            prev_obj = est.objective;
            const bool repeated = est.nodes == prev_nodes;
            const bool cycled = !repeated && std::find(visited.begin(), visited.end(), est.nodes) != visited.end();
            visited.push_back(est.nodes);
            prev_nodes = est.nodes;
            prev_pos = std::move(pos);
            res.estimate = std::move(est);

            if (res.estimate.objective > best_obj)
            {
                best_obj = res.estimate.objective;
                best.estimate = res.estimate;
                best.params = res.params;
                best.mobility = res.mobility;
                since_best = 0;
            }
            else
                ++since_best;

            if (repeated)
            {
                res.converged = true;
                break;
            }
            if (cycled || since_best >= cfg.stall_patience)
            {
                res.cycled = cycled;
                res.estimate = std::move(best.estimate);
                res.params = std::move(best.params);
                res.mobility = best.mobility;
                break;
            }
        }
        return res;
    }

} // namespace blindmap::inference
