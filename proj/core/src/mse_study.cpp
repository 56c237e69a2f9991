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

#include "blindmap/mse_study.hpp"

#include "blindmap/log.hpp"
#include "blindmap/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace blindmap::bounds
{
    namespace
    {
        inline double residual(double theta, double phi)
        {
            double r = theta - phi;
            while (r > kPi)
                r -= kTwoPi;
            while (r <= -kPi)
                r += kTwoPi;
            return r;
        }

        sim::Rng trial_rng(std::uint64_t seed, int T, int trial)
        {
            std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                              static_cast<std::uint32_t>(T), static_cast<std::uint32_t>(trial)};
            return sim::Rng(seq);
        }

        struct Trial
        {
            Psi truth = Psi::Zero();
            std::vector<AodLink> links;
        };

        /// Fresh PPP in the strip of half-width R around the path x_1..x_T, shifted so that
        /// no AP is within r0 of the path.
        Trial make_unlimited_trial(const MseStudyConfig &cfg, int T, sim::Rng &rng)
        {
            std::uniform_real_distribution<double> u01(0.0, 1.0);
            std::normal_distribution<double> n01;
            const double heading = kTwoPi * u01(rng);
            const Vec2 e(std::cos(heading), std::sin(heading));
            const Vec2 n(-e.y(), e.x());
            const double s = cfg.speed;
            const Vec2 x0 = Vec2::Zero();
            const Vec2 v = s * e;

            const double a_lo = s - cfg.R;
            const double a_hi = s * T + cfg.R;
            const double area = (a_hi - a_lo) * 2.0 * cfg.R;
            std::poisson_distribution<long> count(cfg.kappa_density * area);
            const long n_ap = count(rng);

            Trial tr;
            tr.truth = make_psi(x0, v);
            for (long i = 0; i < n_ap; ++i)
            {
                const double a = a_lo + (a_hi - a_lo) * u01(rng);
                const double c = cfg.R * (2.0 * u01(rng) - 1.0);
                const double a_clamped = std::clamp(a, s, s * T);
                if (std::hypot(a - a_clamped, c) <= cfg.r0)
                    continue;
                const Vec2 o = x0 + a * e + c * n;
                const double half = std::sqrt(std::max(0.0, cfg.R * cfg.R - c * c));
                const int t_lo = std::max(1, static_cast<int>(std::ceil((a - half) / s)));
                const int t_hi = std::min(T, static_cast<int>(std::floor((a + half) / s)));
                for (int t = t_lo; t <= t_hi; ++t)
                {
                    const Vec2 d = x0 + t * v - o;
                    if (d.norm() > cfg.R)
                        continue;
                    const double phi = std::atan2(d.y(), d.x());
                    tr.links.push_back({static_cast<double>(t), o, wrap_to_2pi(phi + cfg.sigma_theta * n01(rng))});
                }
            }
            return tr;
        }

        Trial make_limited_trial(const MseStudyConfig &cfg, int T, sim::Rng &rng)
        {
            if (cfg.fixed_aps.empty())
                throw std::domain_error("mse_study: limited family needs fixed_aps");
            std::uniform_real_distribution<double> u01(0.0, 1.0);
            std::normal_distribution<double> n01;
            Vec2 v;
            for (int attempt = 0;; ++attempt)
            {
                const double heading = kTwoPi * u01(rng);
                v = cfg.speed * Vec2(std::cos(heading), std::sin(heading));
                // Keep the continuous path x0 + t v, t >= 1, at least r0 from every AP.
                bool ok = true;
                for (const Vec2 &o : cfg.fixed_aps)
                {
                    const Vec2 l = cfg.fixed_start - o;
                    const double tc = std::max(1.0, -l.dot(v) / v.squaredNorm());
                    if ((l + tc * v).norm() <= cfg.r0)
                        ok = false;
                }
                if (ok)
                    break;
                if (attempt > 1000)
                    throw std::domain_error("mse_study: no heading clears the access points");
            }
            Trial tr;
            tr.truth = make_psi(cfg.fixed_start, v);
            tr.links.reserve(static_cast<std::size_t>(T) * cfg.fixed_aps.size());
            for (int t = 1; t <= T; ++t)
                for (const Vec2 &o : cfg.fixed_aps)
                {
                    const Vec2 d = cfg.fixed_start + t * v - o;
                    const double phi = std::atan2(d.y(), d.x());
                    tr.links.push_back({static_cast<double>(t), o, wrap_to_2pi(phi + cfg.sigma_theta * n01(rng))});
                }
            return tr;
        }
    } // namespace

    double aod_nll(std::span<const AodLink> links, const Psi &psi, double sigma_theta, Eigen::Vector4d *grad)
    {
        const double inv_s2 = 1.0 / (sigma_theta * sigma_theta);
        double f = 0.0;
        double g0 = 0.0, g1 = 0.0, g2 = 0.0, g3 = 0.0;
        for (const AodLink &k : links)
        {
            const double dx = psi(0) + k.t * psi(2) - k.ap.x();
            const double dy = psi(1) + k.t * psi(3) - k.ap.y();
            const double r = residual(k.theta, std::atan2(dy, dx));
            f += 0.5 * r * r * inv_s2;
            if (grad)
            {
                const double n2 = dx * dx + dy * dy;
                const double w = -r * inv_s2 / n2;
                g0 += w * -dy;
                g1 += w * dx;
                g2 += w * -dy * k.t;
                g3 += w * dx * k.t;
            }
        }
        if (grad)
            *grad = Eigen::Vector4d(g0, g1, g2, g3);
        return f;
    }

    Eigen::Matrix4d link_fim(std::span<const AodLink> links, const Psi &psi, double sigma_theta)
    {
        const double inv_s2 = 1.0 / (sigma_theta * sigma_theta);
        Eigen::Matrix4d F = Eigen::Matrix4d::Zero();
        for (const AodLink &k : links)
        {
            const Vec2 l(psi(0) - k.ap.x(), psi(1) - k.ap.y());
            const Vec2 v(psi(2), psi(3));
            const Vec2 d = l + k.t * v;
            const double n2 = d.squaredNorm();
            const Eigen::Vector4d g(-d.y() / n2, d.x() / n2, -k.t * d.y() / n2, k.t * d.x() / n2);
            F.noalias() += inv_s2 * g * g.transpose();
        }
        return F;
    }

    MlFit ml_fit(std::span<const AodLink> links, const Psi &start, double sigma_theta, int max_iterations)
    {
        auto seed_inverse = [&](const Psi &p) -> Eigen::Matrix4d {
            Eigen::LDLT<Eigen::Matrix4d> ldlt(link_fim(links, p, sigma_theta));
            if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().minCoeff() > 0.0))
                return Eigen::Matrix4d::Identity() * 1e-3;
            return ldlt.solve(Eigen::Matrix4d::Identity());
        };

        MlFit out;
        Psi x = start;
        Eigen::Vector4d g;
        double f = aod_nll(links, x, sigma_theta, &g);
        Eigen::Matrix4d H = seed_inverse(x);
        int it = 0;
        for (; it < max_iterations; ++it)
        {
            Eigen::Vector4d p = -H * g;
            double slope = g.dot(p);
            if (!(slope < 0.0))
            {
                H = seed_inverse(x);
                p = -H * g;
                slope = g.dot(p);
                if (!(slope < 0.0))
                    break;
            }
            // A Newton decrement this small is far below the statistical error. The
            // tolerance scales with |f| because f itself is only known to rounding.
            const double tol = 1e-12 * std::max(1.0, std::abs(f));
            if (-slope < tol)
            {
                out.converged = true;
                break;
            }
            double alpha = 1.0;
            Psi xn;
            Eigen::Vector4d gn;
            double fn = f;
            bool accepted = false;
            for (int ls = 0; ls < 50; ++ls, alpha *= 0.5)
            {
                xn = x + alpha * p;
                fn = aod_nll(links, xn, sigma_theta, &gn);
                if (std::isfinite(fn) && fn <= f + 1e-4 * alpha * slope)
                {
                    accepted = true;
                    break;
                }
            }
            if (!accepted)
            {
                // No descent along a valid direction: we are at the optimum to rounding.
                out.converged = -slope < 1e4 * tol;
                break;
            }
            const Eigen::Vector4d s = xn - x;
            const Eigen::Vector4d y = gn - g;
            const double sy = s.dot(y);
            if (sy > 1e-14 * s.norm() * y.norm())
            {
                const double r = 1.0 / sy;
                const Eigen::Matrix4d I = Eigen::Matrix4d::Identity();
                H = (I - r * s * y.transpose()) * H * (I - r * y * s.transpose()) + r * s * s.transpose();
            }
            x = xn;
            f = fn;
            g = gn;
        }
        out.psi = x;
        out.nll = f;
        out.iterations = it;
        return out;
    }

    double loglog_slope(std::span<const double> x, std::span<const double> y)
    {
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        int n = 0;
        for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i)
        {
            if (!(x[i] > 0.0 && y[i] > 0.0) || !std::isfinite(y[i]))
                continue;
            const double lx = std::log(x[i]);
            const double ly = std::log(y[i]);
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
            ++n;
        }
        if (n < 2)
            throw std::domain_error("loglog_slope: need two positive points");
        const double den = n * sxx - sx * sx;
        if (!(std::abs(den) > 0.0))
            throw std::domain_error("loglog_slope: degenerate abscissae");
        return (n * sxy - sx * sy) / den;
    }

    MseStudyResult mse_study(const MseStudyConfig &cfg)
    {
        if (cfg.T_grid.empty() || cfg.n_trials < 1 || cfg.n_restarts < 1)
            throw std::domain_error("mse_study: empty T grid or no trials");
        if (!(cfg.sigma_theta > 0.0 && cfg.speed > 0.0))
            throw std::domain_error("mse_study: sigma_theta and speed must be positive");
        if (cfg.family == ScenarioFamily::unlimited_ppp && !(cfg.r0 > 0.0 && cfg.r0 < cfg.R))
            throw std::domain_error("mse_study: need 0 < r0 < R");

        MseStudyResult res;
        for (const int T : cfg.T_grid)
        {
            if (T < 2)
                throw std::domain_error("mse_study: T must be at least 2");
            MseRow row;
            row.T = T;
            double links_total = 0.0;
            for (int trial = 0; trial < cfg.n_trials; ++trial)
            {
                sim::Rng rng = trial_rng(cfg.seed, T, trial);
                const Trial tr = cfg.family == ScenarioFamily::unlimited_ppp ? make_unlimited_trial(cfg, T, rng)
                                                                            : make_limited_trial(cfg, T, rng);
                Eigen::LDLT<Eigen::Matrix4d> ldlt(link_fim(tr.links, tr.truth, cfg.sigma_theta));
                if (tr.links.size() < 4 || ldlt.info() != Eigen::Success || !(ldlt.vectorD().minCoeff() > 0.0))
                {
                    ++row.dropped;
                    continue;
                }
                const Eigen::Matrix4d C = ldlt.solve(Eigen::Matrix4d::Identity());

                std::uniform_real_distribution<double> box(-1.0, 1.0);
                MlFit best;
                bool have = false;
                for (int k = 0; k < cfg.n_restarts; ++k)
                {
                    Psi start = tr.truth;
                    for (int i = 0; i < 4; ++i)
                        start(i) += cfg.restart_box_sigmas * std::sqrt(C(i, i)) * box(rng);
                    const MlFit fit = ml_fit(tr.links, start, cfg.sigma_theta, cfg.max_iterations);
                    if (fit.converged && (!have || fit.nll < best.nll))
                    {
                        best = fit;
                        have = true;
                    }
                }
                if (!have)
                {
                    ++row.dropped;
                    continue;
                }
                row.mse_x += (best.psi.head<2>() - tr.truth.head<2>()).squaredNorm();
                row.mse_v += (best.psi.tail<2>() - tr.truth.tail<2>()).squaredNorm();
                row.bound_x += C(0, 0) + C(1, 1);
                row.bound_v += C(2, 2) + C(3, 3);
                links_total += static_cast<double>(tr.links.size());
                ++row.trials;
            }
            if (row.trials > 0)
            {
                row.mse_x /= row.trials;
                row.mse_v /= row.trials;
                row.bound_x /= row.trials;
                row.bound_v /= row.trials;
                row.mean_links = links_total / row.trials;
            }
            if (row.dropped > 0)
                log_warning("mse_study: T=" + std::to_string(T) + " dropped " + std::to_string(row.dropped) +
                            " trials");
            res.rows.push_back(row);
        }

        if (res.rows.size() >= 2)
        {
            std::vector<double> Ts, mx, mv, bx, bv;
            for (const MseRow &r : res.rows)
            {
                Ts.push_back(r.T);
                mx.push_back(r.mse_x);
                mv.push_back(r.mse_v);
                bx.push_back(r.bound_x);
                bv.push_back(r.bound_v);
            }
            res.slope_x = loglog_slope(Ts, mx);
            res.slope_v = loglog_slope(Ts, mv);
            res.bound_slope_x = loglog_slope(Ts, bx);
            res.bound_slope_v = loglog_slope(Ts, bv);
        }
        return res;
    }

} // namespace blindmap::bounds
