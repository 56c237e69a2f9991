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

#include "blindmap/em.hpp"
#include "blindmap/log.hpp"

#include <Eigen/Eigenvalues>

#include <limits>
#include <random>
#include <sstream>

namespace blindmap::inference
{
    namespace
    {
        constexpr double kLog2Pi = 1.8378770664093453;
        using Resp = std::vector<std::array<double, 2>>;

        struct Geometry
        {
            std::vector<double> log_d; ///< log10 distance per (t,q)
            std::vector<double> phi;   ///< geometric azimuth per (t,q)
        };

        Geometry make_geometry(const obs::Observations &o, std::span<const Vec2> x)
        {
            Geometry g;
            g.log_d.resize(static_cast<std::size_t>(o.T) * o.Q);
            g.phi.resize(g.log_d.size());
            for (int t = 0; t < o.T; ++t)
                for (int q = 0; q < o.Q; ++q)
                {
                    const std::size_t i = static_cast<std::size_t>(t) * o.Q + q;
                    const double d = (x[t] - o.ap_positions[q]).norm();
                    if (!(d > 0.0))
                        throw std::domain_error("em_fit: trajectory point coincides with an access point");
                    g.log_d[i] = std::log10(d);
                    g.phi[i] = azimuth(o.ap_positions[q], x[t]);
                }
            return g;
        }

        std::array<double, 2> component_ll(const obs::Observations &o, const Geometry &g, std::size_t i,
                                           const obs::PropagationParams &p, const std::array<Mat2, 2> &inv,
                                           const std::array<double, 2> &logdet, EmFeatureSet features)
        {
            const auto &s = o.signatures[i];
            const int q = s.ap_id;
            std::array<double, 2> out{};
            for (int k = 0; k < 2; ++k)
            {
                const double rs = s.rss_db - p.beta[k][q] - p.alpha[k][q] * g.log_d[i];
                double l = -0.5 * (kLog2Pi + std::log(p.sigma_s2[k][q]) + rs * rs / p.sigma_s2[k][q]);
                if (features == EmFeatureSet::joint)
                {
                    const double dt = wrap_to_pi(s.aod_rad - g.phi[i]);
                    l += -0.5 * (kLog2Pi + std::log(p.sigma_theta2[k]) + dt * dt / p.sigma_theta2[k]);
                    const Vec2 r = Vec2(s.rss_db, s.spread_db) - p.m[k];
                    l += -0.5 * (2.0 * kLog2Pi + logdet[k] + r.dot(inv[k] * r));
                }
                out[k] = l;
            }
            return out;
        }

        // E-step: responsibilities and the log-likelihood of the current parameters.
        double e_step(const obs::Observations &o, const Geometry &g, const obs::PropagationParams &p,
                      EmFeatureSet features, Resp *resp)
        {
            p.validate();
            std::array<Mat2, 2> inv;
            std::array<double, 2> logdet{};
            for (int k = 0; k < 2; ++k)
            {
                inv[k] = p.upsilon[k].inverse();
                logdet[k] = std::log(p.upsilon[k].determinant());
            }
            const std::size_t n = o.signatures.size();
            if (resp)
                resp->resize(n);
            double total = 0.0;
            for (std::size_t i = 0; i < n; ++i)
            {
                const auto l = component_ll(o, g, i, p, inv, logdet, features);
                const double a = std::log(p.pi[i][0]) + l[0];
                const double b = std::log(p.pi[i][1]) + l[1];
                const double top = std::max(a, b);
                const double lse = top + std::log(std::exp(a - top) + std::exp(b - top));
                total += lse;
                if (resp)
                    (*resp)[i] = {std::exp(a - lse), std::exp(b - lse)};
            }
            return total;
        }

        // Mixture log-likelihood of the RSS residual, the AoD residual and the
        // spread marginal; used to decide whether two conditions are present.
        double conditional_loglik(const obs::Observations &o, const Geometry &g, const obs::PropagationParams &p,
                                  EmFeatureSet features)
        {
            double total = 0.0;
            for (std::size_t i = 0; i < o.signatures.size(); ++i)
            {
                const auto &s = o.signatures[i];
                const int q = s.ap_id;
                std::array<double, 2> l{};
                for (int k = 0; k < 2; ++k)
                {
                    const double rs = s.rss_db - p.beta[k][q] - p.alpha[k][q] * g.log_d[i];
                    l[k] = std::log(p.pi[i][k]) - 0.5 * (kLog2Pi + std::log(p.sigma_s2[k][q]) + rs * rs / p.sigma_s2[k][q]);
                    if (features == EmFeatureSet::joint)
                    {
                        const double dt = wrap_to_pi(s.aod_rad - g.phi[i]);
                        const double dv = s.spread_db - p.m[k].y();
                        const double vv = p.upsilon[k](1, 1);
                        l[k] += -0.5 * (kLog2Pi + std::log(p.sigma_theta2[k]) + dt * dt / p.sigma_theta2[k]) -
                                0.5 * (kLog2Pi + std::log(vv) + dv * dv / vv);
                    }
                }
                const double top = std::max(l[0], l[1]);
                total += top + std::log(std::exp(l[0] - top) + std::exp(l[1] - top));
            }
            return total;
        }

        Mat2 floor_eigenvalues(const Mat2 &U, double floor)
        {
            Eigen::SelfAdjointEigenSolver<Mat2> eig(0.5 * (U + U.transpose()));
            Vec2 ev = eig.eigenvalues().cwiseMax(floor);
            Mat2 out = eig.eigenvectors() * ev.asDiagonal() * eig.eigenvectors().transpose();
            return 0.5 * (out + out.transpose());
        }

        void m_step(const obs::Observations &o, const Geometry &g, const Resp &c, const EmConfig &cfg,
                    obs::PropagationParams &p)
        {
            const std::size_t n = o.signatures.size();
            for (int k = 0; k < 2; ++k)
            {
                double W = 0.0;
                Vec2 mean = Vec2::Zero();
                for (std::size_t i = 0; i < n; ++i)
                {
                    W += c[i][k];
                    mean += c[i][k] * Vec2(o.signatures[i].rss_db, o.signatures[i].spread_db);
                }
                if (!(W > 0.0))
                    continue;
                mean /= W;
                Mat2 cov = Mat2::Zero();
                double th = 0.0;
                for (std::size_t i = 0; i < n; ++i)
                {
                    const Vec2 r = Vec2(o.signatures[i].rss_db, o.signatures[i].spread_db) - mean;
                    cov += c[i][k] * r * r.transpose();
                    const double dt = wrap_to_pi(o.signatures[i].aod_rad - g.phi[i]);
                    th += c[i][k] * dt * dt;
                }
                p.m[k] = mean;
                p.upsilon[k] = floor_eigenvalues(cov / W, cfg.upsilon_eig_floor);
                p.sigma_theta2[k] = std::max(th / W, cfg.sigma_theta2_floor);

                for (int q = 0; q < o.Q; ++q)
                {
                    Mat2 A = Mat2::Zero();
                    Vec2 b = Vec2::Zero();
                    double wq = 0.0;
                    for (int t = 0; t < o.T; ++t)
                    {
                        const std::size_t i = static_cast<std::size_t>(t) * o.Q + q;
                        const Vec2 row(1.0, g.log_d[i]);
                        A += c[i][k] * row * row.transpose();
                        b += c[i][k] * o.signatures[i].rss_db * row;
                        wq += c[i][k];
                    }
                    if (wq < 1e-9)
                        continue;
                    const double det = A.determinant();
                    if (std::abs(det) > 1e-10 * std::max(1.0, A.squaredNorm()))
                    {
                        const Vec2 sol = A.ldlt().solve(b);
                        p.beta[k][q] = sol[0];
                        p.alpha[k][q] = sol[1];
                        // Received power cannot grow with distance; the constrained
                        // optimum then sits on alpha = 0.
                        if (sol[1] > 0.0)
                        {
                            p.alpha[k][q] = 0.0;
                            p.beta[k][q] = b[0] / A(0, 0);
                        }
                    }
                    else
                        p.beta[k][q] = (b[0] - p.alpha[k][q] * A(0, 1)) / A(0, 0);
                    double ss = 0.0;
                    for (int t = 0; t < o.T; ++t)
                    {
                        const std::size_t i = static_cast<std::size_t>(t) * o.Q + q;
                        const double r = o.signatures[i].rss_db - p.beta[k][q] - p.alpha[k][q] * g.log_d[i];
                        ss += c[i][k] * r * r;
                    }
                    p.sigma_s2[k][q] = std::max(ss / wq, cfg.sigma_s2_floor);
                }
            }
            double W0 = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                W0 += c[i][0];
            const double pi0 = std::clamp(W0 / static_cast<double>(n), 0.0, 1.0);
            for (auto &w : p.pi)
                w = {pi0, 1.0 - pi0};
        }

        int free_parameters(int Q, EmFeatureSet f)
        {
            const int per_comp = 3 * Q + (f == EmFeatureSet::joint ? 1 + 2 + 3 : 0);
            return per_comp;
        }

        void swap_components(obs::PropagationParams &p, Resp &c)
        {
            std::swap(p.beta[0], p.beta[1]);
            std::swap(p.alpha[0], p.alpha[1]);
            std::swap(p.sigma_s2[0], p.sigma_s2[1]);
            std::swap(p.sigma_theta2[0], p.sigma_theta2[1]);
            std::swap(p.m[0], p.m[1]);
            std::swap(p.upsilon[0], p.upsilon[1]);
            for (auto &w : p.pi)
                std::swap(w[0], w[1]);
            for (auto &r : c)
                std::swap(r[0], r[1]);
        }

        double mean_rss(const obs::Observations &o, const Resp &c, int k)
        {
            double w = 0.0, s = 0.0;
            for (std::size_t i = 0; i < o.signatures.size(); ++i)
            {
                w += c[i][k];
                s += c[i][k] * o.signatures[i].rss_db;
            }
            return w > 0.0 ? s / w : -std::numeric_limits<double>::infinity();
        }

        struct Run
        {
            obs::PropagationParams params;
            Resp resp;
            std::vector<double> trace;
            int iterations = 0;
            bool converged = false;
            int reinit = 0;
        };

        Run run_em(const obs::Observations &o, const Geometry &g, const EmConfig &cfg, obs::PropagationParams p,
                   std::uint64_t jitter_seed)
        {
            Run run;
            std::mt19937_64 rng(jitter_seed);
            std::normal_distribution<double> n01;
            const double n = static_cast<double>(o.signatures.size());
            double prev = e_step(o, g, p, cfg.features, &run.resp);
            run.trace.push_back(prev);
            for (int it = 0; it < cfg.max_iter; ++it)
            {
                for (int k = 0; k < 2; ++k)
                {
                    double W = 0.0;
                    for (const auto &r : run.resp)
                        W += r[k];
                    if (W >= cfg.starve_fraction * n || run.reinit >= cfg.max_reinit)
                        continue;
                    // Starved: restart this component near the other one.
                    const int other = 1 - k;
                    p.beta[k] = p.beta[other];
                    p.alpha[k] = p.alpha[other];
                    p.sigma_s2[k] = p.sigma_s2[other];
                    p.sigma_theta2[k] = p.sigma_theta2[other];
                    p.upsilon[k] = p.upsilon[other];
                    p.m[k] = p.m[other] + Vec2(std::sqrt(p.upsilon[other](0, 0)) * n01(rng),
                                               std::sqrt(p.upsilon[other](1, 1)) * n01(rng));
                    for (auto &w : p.pi)
                        w = {0.5, 0.5};
                    ++run.reinit;
                    std::ostringstream msg;
                    msg << "em_fit: component " << k << " starved (mass " << W << "), reinitialized";
                    log_warning(msg.str());
                    prev = e_step(o, g, p, cfg.features, &run.resp);
                    run.trace.push_back(prev);
                }
                m_step(o, g, run.resp, cfg, p);
                const double cur = e_step(o, g, p, cfg.features, &run.resp);
                run.trace.push_back(cur);
                run.iterations = it + 1;
                if (std::abs(cur - prev) < cfg.tol)
                {
                    run.converged = true;
                    break;
                }
                prev = cur;
            }
            run.params = std::move(p);
            return run;
        }
    } // namespace

    double p2_loglik(const obs::Observations &obs, std::span<const Vec2> trajectory, const obs::PropagationParams &params,
                     EmFeatureSet features)
    {
        if (static_cast<int>(trajectory.size()) != obs.T)
            throw std::domain_error("p2_loglik: trajectory length mismatch");
        return e_step(obs, make_geometry(obs, trajectory), params, features, nullptr);
    }

    std::vector<int> kmeans2(const std::vector<Eigen::VectorXd> &pts, std::uint64_t seed, int max_iter)
    {
        const std::size_t n = pts.size();
        if (n < 2)
            throw std::domain_error("kmeans2: need at least two points");
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        std::array<Eigen::VectorXd, 2> centre;
        centre[0] = pts[pick(rng)];
        std::vector<double> d2(n);
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            total += d2[i] = (pts[i] - centre[0]).squaredNorm();
        if (total > 0.0)
        {
            std::uniform_real_distribution<double> u(0.0, total);
            double target = u(rng);
            std::size_t chosen = n - 1;
            for (std::size_t i = 0; i < n; ++i)
            {
                target -= d2[i];
                if (target <= 0.0)
                {
                    chosen = i;
                    break;
                }
            }
            centre[1] = pts[chosen];
        }
        else
            centre[1] = centre[0];

        std::vector<int> label(n, 0);
        for (int it = 0; it < max_iter; ++it)
        {
            bool changed = false;
            for (std::size_t i = 0; i < n; ++i)
            {
                const int l = (pts[i] - centre[1]).squaredNorm() < (pts[i] - centre[0]).squaredNorm() ? 1 : 0;
                changed = changed || l != label[i];
                label[i] = l;
            }
            for (int k = 0; k < 2; ++k)
            {
                Eigen::VectorXd acc = Eigen::VectorXd::Zero(pts[0].size());
                int cnt = 0;
                for (std::size_t i = 0; i < n; ++i)
                    if (label[i] == k)
                    {
                        acc += pts[i];
                        ++cnt;
                    }
                if (cnt > 0)
                    centre[k] = acc / cnt;
            }
            if (!changed && it > 0)
                break;
        }
        return label;
    }

    std::optional<double> estimate_sigma_u2(const obs::Observations &o, std::span<const Vec2> x,
                                            const obs::PropagationParams &p, const obs::RegularizationConfig &reg)
    {
        if (!o.csi)
            return std::nullopt;
        const double scale = reg.bins_per_meter();
        double ss = 0.0;
        std::size_t count = 0;
        for (int t = 0; t < o.T; ++t)
            for (int q = 0; q < o.Q; ++q)
                for (int tau : obs::nlos_neighborhood(t, q, x, p.nlos, o.Q, reg))
                {
                    const double r = (*o.csi)(t, tau, q) - scale * (x[t] - x[tau]).norm();
                    ss += r * r;
                    ++count;
                }
        if (count == 0)
            return std::nullopt;
        return ss / static_cast<double>(count);
    }

    EmResult em_fit(const obs::Observations &o, std::span<const Vec2> x, const EmConfig &cfg,
                    const obs::PropagationParams *warm_start)
    {
        if (static_cast<int>(x.size()) != o.T || o.signatures.size() != static_cast<std::size_t>(o.T) * o.Q)
            throw std::domain_error("em_fit: inconsistent observation and trajectory sizes");
        const std::size_t n = o.signatures.size();
        const int n_free = 2 * free_parameters(o.Q, cfg.features) + 1;
        if (static_cast<int>(n) < n_free)
            throw std::domain_error("em_fit: fewer samples than free parameters");

        const Geometry g = make_geometry(o, x);
        Run best;
        bool have = false;
        if (warm_start)
        {
            best = run_em(o, g, cfg, *warm_start, cfg.seed);
            have = true;
        }
        else
        {
            // Standardized (s, nu) for the initial split.
            std::vector<Eigen::VectorXd> z(n);
            Vec2 mu = Vec2::Zero(), sd = Vec2::Zero();
            for (const auto &s : o.signatures)
                mu += Vec2(s.rss_db, s.spread_db);
            mu /= static_cast<double>(n);
            for (const auto &s : o.signatures)
                sd += (Vec2(s.rss_db, s.spread_db) - mu).cwiseAbs2();
            sd = (sd / static_cast<double>(n)).cwiseSqrt().cwiseMax(1e-9);
            for (std::size_t i = 0; i < n; ++i)
            {
                const Vec2 v = (Vec2(o.signatures[i].rss_db, o.signatures[i].spread_db) - mu).cwiseQuotient(sd);
                if (cfg.features == EmFeatureSet::joint)
                    z[i] = v;
                else
                    z[i] = v.head<1>();
            }
            for (int r = 0; r < std::max(1, cfg.n_restarts); ++r)
            {
                const auto label = kmeans2(z, cfg.seed * 7919u + static_cast<std::uint64_t>(r));
                Resp c(n);
                for (std::size_t i = 0; i < n; ++i)
                    c[i] = label[i] == 0 ? std::array<double, 2>{0.95, 0.05} : std::array<double, 2>{0.05, 0.95};
                obs::PropagationParams p = obs::PropagationParams::make(o.T, o.Q);
                for (int k = 0; k < 2; ++k)
                    p.upsilon[k] = Mat2::Identity();
                m_step(o, g, c, cfg, p);
                Run run = run_em(o, g, cfg, std::move(p), cfg.seed + 104729u * (r + 1));
                if (!have || run.trace.back() > best.trace.back())
                {
                    best = std::move(run);
                    have = true;
                }
            }
        }

        EmResult res;
        res.params = std::move(best.params);
        res.responsibilities = std::move(best.resp);
        res.trace = std::move(best.trace);
        res.iterations = best.iterations;
        res.converged = best.converged;
        res.reinitializations = best.reinit;

        if (cfg.allow_collapse)
        {
            // Single-component alternative: everything LOS.
            Resp ones(n, {1.0, 0.0});
            obs::PropagationParams single = res.params;
            m_step(o, g, ones, cfg, single);
            for (auto &w : single.pi)
                w = {1.0, 0.0};
            single.beta[1] = single.beta[0];
            single.alpha[1] = single.alpha[0];
            for (int q = 0; q < o.Q; ++q)
                single.sigma_s2[1][q] = 4.0 * single.sigma_s2[0][q];
            single.sigma_theta2[1] = 4.0 * single.sigma_theta2[0];
            single.m[1] = single.m[0];
            single.upsilon[1] = 4.0 * single.upsilon[0];
            // Pooled raw RSS is far from Gaussian across distances, so a second
            // component always helps the joint term. The test uses the features
            // that are Gaussian given the position.
            const double l1 = conditional_loglik(o, g, single, cfg.features);
            const double l2 = conditional_loglik(o, g, res.params, cfg.features);
            const int dof = 3 * o.Q + (cfg.features == EmFeatureSet::joint ? 3 : 0);
            const double penalty = 0.5 * (dof + 1) * std::log(static_cast<double>(n));
            if (l2 - l1 < penalty)
            {
                res.params = std::move(single);
                res.responsibilities = std::move(ones);
                res.collapsed = true;
            }
        }

        if (!res.collapsed && mean_rss(o, res.responsibilities, 0) < mean_rss(o, res.responsibilities, 1))
            swap_components(res.params, res.responsibilities);

        for (std::size_t i = 0; i < n; ++i)
            res.params.nlos[i] = res.responsibilities[i][1] > res.responsibilities[i][0] ? 1 : 0;

        double su2 = warm_start ? warm_start->sigma_u2 : cfg.sigma_u2_default;
        if (const auto est = estimate_sigma_u2(o, x, res.params, cfg.reg))
            su2 = *est;
        res.params.sigma_u2 = std::max(su2, cfg.sigma_u2_floor);
        return res;
    }

} // namespace blindmap::inference
