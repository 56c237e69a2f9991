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

#include "blindmap/features.hpp"
#include "blindmap/inference.hpp"
#include "fixtures.hpp"

#include <gtest/gtest.h>

using namespace blindmap;
using namespace blindmap::inference;

namespace
{
    struct Problem
    {
        Dataset ds;
        obs::Observations obs;
        MobilityGraph graph;
    };

    Problem small_problem(std::uint64_t seed, int T)
    {
        Problem p;
        p.ds = generate_dataset(blindmap::testing::small_room_scene(), blindmap::testing::small_generation(T, seed));
        p.obs = obs::make_observations(p.ds, features::extract_signatures(p.ds));
        p.graph = build_graph(p.ds.scene.env.region, 0.5, 1.0);
        return p;
    }
} // namespace

TEST(Inference, ConfigParsingAndValidation)
{
    const auto c = InferenceConfig::from_json(R"({"inference": {"eta": 2.5, "delta_s": 0.1, "zeta_top_k": 0}})");
    EXPECT_EQ(c.eta, 2.5);
    EXPECT_EQ(c.slot_s, 0.1);
    EXPECT_EQ(c.zeta_top_k, 0);
    EXPECT_EQ(InferenceConfig::from_json(R"({"gamma": 0.9})").gamma, 0.9);
    EXPECT_THROW(InferenceConfig::from_json(R"({"eta": -1})"), ConfigError);
    EXPECT_THROW(InferenceConfig::from_json(R"({"d_max_m": 0.1, "resolution_m": 0.5})"), ConfigError);
    EXPECT_THROW(InferenceConfig::from_json(R"({"gamma": "x"})"), ConfigError);
}

TEST(Inference, InitialParamsAreValidAndOrdered)
{
    const auto p = small_problem(2, 20);
    const auto init = initial_params(p.obs, p.graph, 1);
    EXPECT_NO_THROW(init.validate());
    EXPECT_EQ(init.T, 20);
    EXPECT_EQ(init.Q, 3);
    EXPECT_GE(init.m[0].x(), init.m[1].x());
}

TEST(Inference, UnregularizedLoopIsMonotoneAndTerminates)
{
    const auto p = small_problem(4, 30);
    InferenceConfig cfg;
    cfg.resolution_m = 0.5;
    cfg.d_max_m = 1.0;
    cfg.max_outer_iters = 15;
    const auto res = alternate_optimize(p.obs, p.graph, cfg);
    ASSERT_FALSE(res.trace.empty());
    EXPECT_EQ(res.monotonicity_violations, 0);
    for (std::size_t i = 1; i < res.trace.size(); ++i)
        EXPECT_GE(res.trace[i].objective, res.trace[i - 1].objective - 1e-9 * std::abs(res.trace[i - 1].objective));
    EXPECT_EQ(res.trace.front().changed_nodes, 30);
    ASSERT_EQ(res.estimate.nodes.size(), 30u);
    for (int t = 1; t < 30; ++t)
        EXPECT_TRUE(p.graph.adjacent(res.estimate.nodes[t - 1], res.estimate.nodes[t]));
    if (res.converged)
    {
        EXPECT_EQ(res.trace.back().changed_nodes, 0);
    }
    EXPECT_EQ(res.estimate.los_posterior.size(), 90u);
}

TEST(Inference, RegularizedLoopReturnsBestIterate)
{
    const auto p = small_problem(6, 30);
    InferenceConfig cfg;
    cfg.resolution_m = 0.5;
    cfg.d_max_m = 1.0;
    cfg.eta = 2.0;
    cfg.max_outer_iters = 12;
    const auto res = alternate_optimize(p.obs, p.graph, cfg);
    double best = -std::numeric_limits<double>::infinity();
    for (const auto &r : res.trace)
        best = std::max(best, r.objective);
    EXPECT_LE(static_cast<int>(res.trace.size()), 12);
    if (!res.converged)
    {
        EXPECT_EQ(res.estimate.objective, best);
    }
    // Same input, same output.
    const auto again = alternate_optimize(p.obs, p.graph, cfg);
    EXPECT_EQ(again.estimate.nodes, res.estimate.nodes);
}
