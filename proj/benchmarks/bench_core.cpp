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

#include "blindmap/bessel.hpp"
#include "blindmap/bounds.hpp"
#include "blindmap/features.hpp"
#include "blindmap/inference.hpp"
#include "blindmap/scene_io.hpp"

#include <benchmark/benchmark.h>

using namespace blindmap;

namespace
{
    const Dataset &office_dataset()
    {
        static const Dataset ds = [] {
            GenerationSpec g;
            g.T = 60;
            return generate_dataset(default_office_scene(), g);
        }();
        return ds;
    }
} // namespace

static void BM_BesselJ0(benchmark::State &state)
{
    double x = 0.0;
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(bessel_j0(x));
        x = x > 200.0 ? 0.0 : x + 0.37;
    }
}
BENCHMARK(BM_BesselJ0);

static void BM_CsiDistance(benchmark::State &state)
{
    sim::ArrayGeometry geom;
    geom.spacing_m = geom.wavelength() / 2.0;
    sim::OfdmConfig ofdm;
    ofdm.n_subcarriers = static_cast<int>(state.range(0));
    sim::Rng rng(3);
    const auto [a, b] = sim::synth_rich_scattering_pair(64, 2.0, geom, ofdm, rng);
    for (auto _ : state)
        benchmark::DoNotOptimize(features::csi_distance(a.entries, b.entries, true));
}
BENCHMARK(BM_CsiDistance)->Arg(64)->Arg(256);

static void BM_Fim(benchmark::State &state)
{
    bounds::RectilinearScenario scn;
    scn.ap_positions = {{0, 0}, {10, 0}, {20, 0}, {20, 12}, {10, 12}, {0, 12}, {5, 6}, {15, 6}};
    scn.x0 = Vec2(2.0, 3.0);
    scn.v = Vec2(0.4, 0.15);
    scn.T = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(bounds::fim(scn));
}
BENCHMARK(BM_Fim)->Arg(100)->Arg(10000);

static void BM_ExtractSignatures(benchmark::State &state)
{
    const Dataset &ds = office_dataset();
    for (auto _ : state)
        benchmark::DoNotOptimize(features::extract_signatures(ds));
}
BENCHMARK(BM_ExtractSignatures)->Unit(benchmark::kMillisecond);

static void BM_ViterbiDecode(benchmark::State &state)
{
    const Dataset &ds = office_dataset();
    const auto o = obs::make_observations(ds, features::extract_signatures(ds));
    const auto graph = inference::build_graph(ds.scene.env.region, 0.25, 0.75);
    const auto params = inference::initial_params(o, graph, 1);
    inference::MobilityModel mob;
    obs::RegularizationConfig reg;
    reg.bandwidth_hz = o.bandwidth_hz;
    inference::PruningConfig pruning;
    pruning.top_k = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(inference::viterbi_solve(o, graph, params, mob, reg, pruning));
}
BENCHMARK(BM_ViterbiDecode)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
