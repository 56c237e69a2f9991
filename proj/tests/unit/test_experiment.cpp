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

#include "blindmap/experiment.hpp"
#include "blindmap/scene_io.hpp"
#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

using namespace blindmap;
using namespace blindmap::eval;
using blindmap::testing::ScratchDir;

namespace
{
    std::string slurp(const std::filesystem::path &p)
    {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    std::string small_config(const std::filesystem::path &scene, const std::filesystem::path &out,
                             const std::string &extra = "")
    {
        std::ostringstream os;
        os << R"({"scene": ")" << scene.string() << R"(", "output_dir": ")" << out.string()
           << R"(", "seed": 3, "generation": {"T": 24, "start": [3.0, 2.5], "start_velocity": [0.4, 0.2], "sigma_v": 0.5},)"
           << R"( "inference": {"resolution_m": 0.5, "d_max_m": 1.0, "max_outer_iters": 6},)"
           << R"( "beam_map_resolution_m": 1.0)" << extra << "}";
        return os.str();
    }
} // namespace

TEST(ExperimentConfig, SeedPropagatesUnlessOverridden)
{
    const auto a = ExperimentConfig::from_json(R"({"seed": 11})");
    EXPECT_EQ(a.generation.seed, 11u);
    EXPECT_EQ(a.inference.seed, 11u);
    const auto b = ExperimentConfig::from_json(R"({"seed": 11, "generation": {"seed": 4}, "inference": {"seed": 5}})");
    EXPECT_EQ(b.generation.seed, 4u);
    EXPECT_EQ(b.inference.seed, 5u);
}

TEST(ExperimentConfig, HashIgnoresOutputDirOnly)
{
    const auto a = ExperimentConfig::from_json(R"({"seed": 1, "output_dir": "x"})");
    const auto b = ExperimentConfig::from_json(R"({"seed": 1, "output_dir": "y"})");
    const auto c = ExperimentConfig::from_json(R"({"seed": 2, "output_dir": "x"})");
    EXPECT_EQ(config_hash(a), config_hash(b));
    EXPECT_NE(config_hash(a), config_hash(c));
    EXPECT_EQ(config_hash(a).size(), 16u);
}

TEST(ExperimentConfig, Fnv1aReferenceValues)
{
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
    EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
}

TEST(ExperimentConfig, RejectsMalformedInput)
{
    EXPECT_THROW(ExperimentConfig::from_json("{"), ConfigError);
    EXPECT_THROW(ExperimentConfig::from_json("[1, 2]"), ConfigError);
    EXPECT_THROW(ExperimentConfig::from_json(R"({"generation": {"T": 2}})"), ConfigError);
    EXPECT_THROW(ExperimentConfig::from_json(R"({"eta_sweep": [1, -1]})"), ConfigError);
    EXPECT_THROW(ExperimentConfig::from_json(R"({"inference": {"gamma": 2.0}})"), ConfigError);
    EXPECT_THROW(ExperimentConfig::from_json(R"({"generation": {"start": [1]}})"), ConfigError);
    EXPECT_THROW(ExperimentConfig::load("/nonexistent/cfg.json"), ConfigError);
}

TEST(Experiment, MissingSceneWritesNothing)
{
    ScratchDir dir("exp");
    const auto out = dir.path() / "out";
    const auto cfg = ExperimentConfig::from_json(small_config(dir.path() / "nope.json", out));
    EXPECT_THROW(run_experiment(cfg), ConfigError);
    EXPECT_FALSE(std::filesystem::exists(out));
}

TEST(Experiment, FailingStageLeavesManifest)
{
    ScratchDir dir("exp");
    save_scene(blindmap::testing::small_room_scene(), dir.path() / "scene.json");
    {
        std::ofstream bad(dir.path() / "broken.bin", std::ios::binary);
        bad << "this is not a dataset";
    }
    const auto out = dir.path() / "out";
    const auto cfg = ExperimentConfig::from_json(
        small_config(dir.path() / "scene.json", out, R"(, "dataset": ")" + (dir.path() / "broken.bin").string() + "\""));
    EXPECT_THROW(run_experiment(cfg), ConfigError);
    ASSERT_TRUE(std::filesystem::exists(out / "failure.json"));
    const std::string manifest = slurp(out / "failure.json");
    EXPECT_NE(manifest.find("\"failed_stage\": \"dataset\""), std::string::npos);
    EXPECT_FALSE(std::filesystem::exists(out / "metrics.json"));
}

TEST(Experiment, RunWritesArtifactsAndIsReproducible)
{
    ScratchDir dir("exp");
    save_scene(blindmap::testing::small_room_scene(), dir.path() / "scene.json");
    const std::string extra = R"(, "eta_sweep": [0.5])";
    const auto cfg1 = ExperimentConfig::from_json(small_config(dir.path() / "scene.json", dir.path() / "a", extra));
    const auto cfg2 = ExperimentConfig::from_json(small_config(dir.path() / "scene.json", dir.path() / "b", extra));
    const auto r1 = run_experiment(cfg1);
    const auto r2 = run_experiment(cfg2);

    for (const char *f : {"dataset.bin", "scene.json", "trajectory_true.csv", "signatures.csv", "trajectory.csv",
                          "params.json", "trace.csv", "trajectory_wcl.csv", "trajectory_aodl.csv", "comparison.csv",
                          "eta_sweep.csv", "csi_distance.csv", "metrics.json"})
    {
        EXPECT_TRUE(std::filesystem::exists(dir.path() / "a" / f)) << f;
        EXPECT_EQ(slurp(dir.path() / "a" / f), slurp(dir.path() / "b" / f)) << f;
    }
    EXPECT_FALSE(std::filesystem::exists(dir.path() / "a" / "failure.json"));

    const std::string metrics = slurp(dir.path() / "a" / "metrics.json");
    for (const char *key : {"\"e_loc\"", "\"all\"", "\"nlos\"", "\"single_los\"", "\"double_los\"", "\"losnlos_error\"",
                            "\"e_map\"", "\"runtime_s\"", "\"config_hash\""})
        EXPECT_NE(metrics.find(key), std::string::npos) << key;
    EXPECT_NE(metrics.find(config_hash(cfg1)), std::string::npos);

    ASSERT_EQ(r1.comparison.size(), 3u);
    EXPECT_EQ(r1.comparison[0].method, "proposed");
    ASSERT_EQ(r1.sweep.size(), 1u);
    EXPECT_EQ(r1.sweep[0].eta, 0.5);
    EXPECT_EQ(r1.estimate.size(), 24u);
    EXPECT_EQ(r1.metrics.e_loc.all.mean, r2.metrics.e_loc.all.mean);
    EXPECT_TRUE(std::isfinite(r1.metrics.e_map));
}

TEST(Experiment, EvaluateDatasetMatchesMetricFunctions)
{
    const Dataset ds =
        generate_dataset(blindmap::testing::small_room_scene(), blindmap::testing::small_generation(20, 5));
    auto cfg = ExperimentConfig::from_json(R"({"inference": {"resolution_m": 0.5, "d_max_m": 1.0, "max_outer_iters": 4}})");
    const auto r = evaluate_dataset(ds, cfg);
    EXPECT_NEAR(r.metrics.e_loc.all.mean, e_loc(ds.trajectory, r.estimate), 1e-12);
    EXPECT_NEAR(r.comparison[0].e_loc, r.metrics.e_loc.all.mean, 1e-12);
    EXPECT_GE(r.metrics.losnlos_error, 0.0);
    EXPECT_LE(r.metrics.losnlos_error, 1.0);
    EXPECT_EQ(r.metrics.runtime_s, 0.0);
}

TEST(Experiment, TrajectoryCsvFormat)
{
    ScratchDir dir("exp");
    const std::vector<Vec2> pos{Vec2(0.5, 1.25), Vec2(1.0 / 3.0, 2.0)};
    write_trajectory_csv(dir.path() / "t.csv", pos, {4, 7});
    EXPECT_EQ(slurp(dir.path() / "t.csv"), "t,x,y,node_id\n0,0.5,1.25,4\n1,0.3333333333,2,7\n");
    write_trajectory_csv(dir.path() / "u.csv", pos);
    EXPECT_NE(slurp(dir.path() / "u.csv").find("0,0.5,1.25,-1"), std::string::npos);
}
