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

#include "blindmap/bounds.hpp"
#include "blindmap/mse_study.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace blindmap;
using namespace blindmap::bounds;

namespace
{
    std::vector<AodLink> grid_links(const Vec2 &x0, const Vec2 &v, const std::vector<Vec2> &aps, int T,
                                    double sigma, std::uint64_t seed)
    {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> n01;
        std::vector<AodLink> links;
        for (int t = 1; t <= T; ++t)
            for (const Vec2 &o : aps)
            {
                const Vec2 p = x0 + t * v;
                links.push_back({double(t), o, azimuth(o, p) + sigma * n01(rng)});
            }
        return links;
    }

    const std::vector<Vec2> kAps{Vec2(0.0, -4.0), Vec2(5.0, 6.0), Vec2(-6.0, 5.0)};
} // namespace

TEST(MseStudy, NllGradientMatchesFiniteDifference)
{
    const auto links = grid_links(Vec2(-3.0, 1.0), Vec2(0.3, 0.1), kAps, 20, 0.1, 3);
    const Psi psi(-2.9, 1.05, 0.31, 0.08);
    Eigen::Vector4d g;
    aod_nll(links, psi, 0.1, &g);
    const double h = 1e-6;
    for (int i = 0; i < 4; ++i)
    {
        Psi a = psi, b = psi;
        a[i] += h;
        b[i] -= h;
        const double fd = (aod_nll(links, a, 0.1, nullptr) - aod_nll(links, b, 0.1, nullptr)) / (2.0 * h);
        EXPECT_NEAR(g[i], fd, 1e-5 * std::max(1.0, std::abs(fd)));
    }
}

TEST(MseStudy, LinkFimMatchesRectilinearFim)
{
    RectilinearScenario scn;
    scn.x0 = Vec2(-3.0, 1.0);
    scn.v = Vec2(0.3, 0.1);
    scn.ap_positions = kAps;
    scn.T = 30;
    scn.sigma_theta = 0.1;
    const auto links = grid_links(scn.x0, scn.v, kAps, scn.T, 0.0, 1);
    const Eigen::Matrix4d a = link_fim(links, make_psi(scn.x0, scn.v), 0.1);
    const Eigen::Matrix4d b = fim(scn).full;
    EXPECT_LT((a - b).norm() / b.norm(), 1e-12);
}

TEST(MseStudy, MlFitRecoversNoiseFreeTruth)
{
    const Psi truth(-3.0, 1.0, 0.3, 0.1);
    const auto links = grid_links(Vec2(-3.0, 1.0), Vec2(0.3, 0.1), kAps, 40, 0.0, 1);
    const MlFit fit = ml_fit(links, Psi(-2.5, 1.4, 0.25, 0.12), 0.1, 200);
    ASSERT_TRUE(fit.converged);
    EXPECT_LT((fit.psi - truth).norm(), 1e-6);
    EXPECT_LT(fit.nll, 1e-10);
}

TEST(MseStudy, MlFitConvergesOnLongNoisyRecords)
{
    // f is in the thousands here, so an absolute stopping tolerance would sit below
    // its rounding and the fit would run out of iterations.
    const Vec2 x0(-30.0, 1.0), v(0.012, 0.001);
    const auto links = grid_links(x0, v, kAps, 5000, 0.1, 11);
    const MlFit a = ml_fit(links, Psi(-29.9, 1.05, 0.0121, 0.00098), 0.1, 200);
    const MlFit b = ml_fit(links, Psi(-30.1, 0.95, 0.0119, 0.00102), 0.1, 200);
    ASSERT_TRUE(a.converged);
    ASSERT_TRUE(b.converged);
    EXPECT_LT(a.iterations, 50);
    EXPECT_GT(a.nll, 1000.0);
    EXPECT_LT((a.psi - b.psi).norm(), 1e-6);
    EXPECT_NEAR(a.nll, b.nll, 1e-8 * a.nll);
}

TEST(MseStudy, LoglogSlopeOfPowerLaw)
{
    const std::vector<double> x{1.0, 10.0, 100.0, 1000.0};
    std::vector<double> y;
    for (double v : x)
        y.push_back(5.0 * std::pow(v, -2.5));
    EXPECT_NEAR(loglog_slope(x, y), -2.5, 1e-12);
    const std::vector<double> one{1.0};
    EXPECT_THROW(loglog_slope(one, one), std::domain_error);
}

TEST(MseStudy, SmallLimitedStudyProducesConsistentRows)
{
    MseStudyConfig cfg;
    cfg.family = ScenarioFamily::limited_fixed;
    cfg.fixed_aps = {Vec2(-10.0, -6.0), Vec2(10.0, -6.0), Vec2(10.0, 6.0), Vec2(-10.0, 6.0)};
    cfg.fixed_start = Vec2(-1.0, 0.5);
    cfg.speed = 0.01;
    cfg.T_grid = {20, 80};
    cfg.n_trials = 12;
    cfg.n_restarts = 2;
    cfg.seed = 4;
    const auto res = mse_study(cfg);
    ASSERT_EQ(res.rows.size(), 2u);
    for (const auto &r : res.rows)
    {
        EXPECT_EQ(r.trials + r.dropped, 12);
        EXPECT_GT(r.bound_x, 0.0);
        EXPECT_GT(r.bound_v, 0.0);
        EXPECT_NEAR(r.mean_links, 4.0 * r.T, 1e-9);
    }
    EXPECT_LT(res.rows[1].bound_x, res.rows[0].bound_x);
    // Same seed, same numbers.
    const auto again = mse_study(cfg);
    EXPECT_EQ(again.rows[0].mse_x, res.rows[0].mse_x);
    EXPECT_EQ(again.rows[1].mse_v, res.rows[1].mse_v);
}

TEST(MseStudy, RejectsDegenerateConfig)
{
    MseStudyConfig cfg;
    cfg.T_grid.clear();
    EXPECT_THROW(mse_study(cfg), std::domain_error);
    cfg = MseStudyConfig{};
    cfg.family = ScenarioFamily::limited_fixed;
    EXPECT_THROW(mse_study(cfg), std::domain_error);
}
