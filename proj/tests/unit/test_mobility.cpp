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

#include "blindmap/mobility.hpp"
#include "blindmap/sim.hpp"

#include <gtest/gtest.h>

using namespace blindmap;
using namespace blindmap::inference;

TEST(Graph, GridNodesAndNeighbourhoods)
{
    const auto region = rectangle_polygon(Vec2(0.0, 0.0), Vec2(2.0, 1.0));
    const MobilityGraph g = build_graph(region, 0.5, 0.75);
    EXPECT_EQ(g.size(), 5 * 3);
    for (int i = 0; i < g.size(); ++i)
    {
        const auto &nb = g.neighbors[i];
        EXPECT_TRUE(std::is_sorted(nb.begin(), nb.end()));
        EXPECT_TRUE(g.adjacent(i, i));
        for (int j = 0; j < g.size(); ++j)
        {
            const bool close = (g.nodes[i] - g.nodes[j]).norm() <= 0.75 + 1e-12;
            EXPECT_EQ(g.adjacent(i, j), close);
            EXPECT_EQ(g.adjacent(i, j), g.adjacent(j, i));
        }
    }
    EXPECT_EQ(g.nearest_node(Vec2(1.1, 0.4)), g.nearest_node(Vec2(1.0, 0.5)));
    EXPECT_THROW(build_graph(region, 0.0, 1.0), std::domain_error);
}

TEST(Graph, NonConvexRegionDropsOutsideNodes)
{
    const std::vector<Vec2> ell{Vec2(0, 0), Vec2(2, 0), Vec2(2, 1), Vec2(1, 1), Vec2(1, 2), Vec2(0, 2)};
    const MobilityGraph g = build_graph(ell, 1.0, 1.0);
    // 3x3 lattice minus (2,2).
    EXPECT_EQ(g.size(), 8);
    for (const Vec2 &p : g.nodes)
        EXPECT_FALSE(p.x() > 1.5 && p.y() > 1.5);
}

TEST(Mobility, TransitionRowIsNormalizedGaussianKernel)
{
    const auto region = rectangle_polygon(Vec2(0.0, 0.0), Vec2(3.0, 3.0));
    const MobilityGraph g = build_graph(region, 0.5, 1.0);
    MobilityModel m;
    m.gamma = 0.6;
    m.slot_s = 0.4;
    m.sigma_v2 = 2.0;
    m.mean_velocity = Vec2(0.5, -0.25);
    const int n = g.nearest_node(Vec2(1.0, 1.0));
    const int i = g.nearest_node(Vec2(1.5, 1.5));
    std::vector<double> row;
    transition_row(i, n, g, m, row);
    ASSERT_EQ(row.size(), g.neighbors[i].size());

    const double var = (1.0 - 0.36) * 0.16 * 2.0;
    const Vec2 pred = g.nodes[i] + 0.6 * (g.nodes[i] - g.nodes[n]) + 0.4 * 0.4 * m.mean_velocity;
    double z = 0.0;
    for (int j : g.neighbors[i])
        z += std::exp(-(g.nodes[j] - pred).squaredNorm() / (2.0 * var));
    double total = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k)
    {
        const int j = g.neighbors[i][k];
        const double ref = -(g.nodes[j] - pred).squaredNorm() / (2.0 * var) - std::log(z);
        EXPECT_NEAR(row[k], ref, 1e-12);
        EXPECT_NEAR(transition_logprob(j, i, n, g, m), ref, 1e-12);
        total += std::exp(row[k]);
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    const int far = g.nearest_node(Vec2(3.0, 3.0));
    EXPECT_EQ(transition_logprob(far, g.nearest_node(Vec2(0.0, 0.0)), n, g, m),
              -std::numeric_limits<double>::infinity());
}

TEST(Mobility, StepVarianceFloor)
{
    MobilityModel m;
    m.sigma_v2 = 0.0;
    m.step_variance_floor = 1e-3;
    EXPECT_DOUBLE_EQ(m.step_variance(), 1e-3);
}

TEST(Mobility, FitRecoversSimulatedParameters)
{
    sim::MobilityParams mp;
    mp.gamma = 0.5;
    mp.slot_s = 0.2;
    mp.mean_velocity = Vec2(0.8, -0.3);
    mp.sigma_v = 1.5;
    sim::Rng rng(77);
    const auto x = sim::simulate_trajectory(mp, Vec2::Zero(), Vec2(0.8, -0.3), 200000, rng);
    const auto closed = fit_mobility(x, 0.5, 0.2, VarianceEstimator::closed_form);
    const auto gm = fit_mobility(x, 0.5, 0.2, VarianceEstimator::gauss_markov);
    EXPECT_NEAR(closed.mean_velocity.x(), 0.8, 0.03);
    EXPECT_NEAR(closed.mean_velocity.y(), -0.3, 0.03);
    // Per-axis increment variance is (1 - gamma^2) delta^2 sigma_v^2.
    EXPECT_NEAR(gm.sigma_v2, 1.5 * 1.5, 0.03);
    EXPECT_NEAR(closed.sigma_v2, 0.75 * 1.5 * 1.5, 0.03);
}

TEST(Mobility, FitStraightLineWithUnitGamma)
{
    std::vector<Vec2> x;
    for (int t = 0; t < 10; ++t)
        x.push_back(Vec2(0.5 * t, 1.0 - 0.1 * t));
    const auto fit = fit_mobility(x, 1.0, 0.5);
    EXPECT_NEAR(fit.mean_velocity.x(), 1.0, 1e-12);
    EXPECT_NEAR(fit.mean_velocity.y(), -0.2, 1e-12);
    EXPECT_NEAR(fit.sigma_v2, 0.0, 1e-20);
    EXPECT_THROW(fit_mobility(std::span<const Vec2>(x.data(), 2), 0.5, 0.5), std::domain_error);
}
