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

#ifndef BLINDMAP_TEST_INSTANCES_HPP
#define BLINDMAP_TEST_INSTANCES_HPP

#include "blindmap/em.hpp"
#include "blindmap/obsmodel.hpp"
#include "blindmap/viterbi.hpp"

#include <limits>
#include <memory>
#include <random>
#include <vector>

namespace blindmap::testing
{
    /// Small decoding problem: a handful of graph nodes, random signatures and
    /// random propagation parameters. Channels are single-path tensors whose
    /// integer delays make the CSI distances well defined.
    struct DecodingInstance
    {
        inference::MobilityGraph graph;
        obs::Observations obs;
        obs::PropagationParams params;
        inference::MobilityModel mobility;
    };

    inline DecodingInstance random_decoding_instance(std::uint64_t seed, int max_nodes, int T, int Q = 2)
    {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        std::normal_distribution<double> n01;
        DecodingInstance inst;

        // A 1 x k or 2 x k strip of nodes at 1 m spacing, at most max_nodes.
        const int rows = max_nodes >= 4 && u01(rng) < 0.5 ? 2 : 1;
        const int cols = std::max(2, max_nodes / rows - static_cast<int>(u01(rng) * 2.0));
        // Height 0.5 with 1 m spacing keeps a single row of nodes.
        const double h = rows == 1 ? 0.5 : rows - 1.0;
        const std::vector<Vec2> region{Vec2(0.0, 0.0), Vec2(cols - 1.0, 0.0), Vec2(cols - 1.0, h), Vec2(0.0, h)};
        const double dmax = u01(rng) < 0.5 ? 1.0 : 1.5;
        inst.graph = inference::build_graph(region, 1.0, dmax);

        inst.obs.T = T;
        inst.obs.Q = Q;
        inst.obs.bandwidth_hz = 3e8; // one lag bin per metre
        for (int q = 0; q < Q; ++q)
            inst.obs.ap_positions.push_back(Vec2(-3.0 + 4.0 * q + u01(rng), -2.0 - u01(rng)));
        for (int t = 0; t < T; ++t)
            for (int q = 0; q < Q; ++q)
            {
                features::RadioSignature s;
                s.ap_id = q;
                s.time_index = t;
                s.rss_db = -50.0 + 8.0 * n01(rng);
                s.aod_rad = wrap_to_2pi(1.2 + 0.6 * n01(rng));
                s.spread_db = -20.0 + 3.0 * n01(rng);
                inst.obs.signatures.push_back(s);
            }

        sim::ArrayGeometry g;
        g.n_antennas = 2;
        g.spacing_m = g.wavelength() / 2.0;
        sim::OfdmConfig ofdm;
        ofdm.n_subcarriers = 16;
        ofdm.bandwidth_hz = inst.obs.bandwidth_hz;
        auto channels = std::make_shared<std::vector<sim::ChannelTensor>>();
        for (int t = 0; t < T; ++t)
            for (int q = 0; q < Q; ++q)
            {
                sim::Path p;
                p.gain = 1.0;
                p.delay_s = std::floor(u01(rng) * 5.0) / ofdm.bandwidth_hz;
                sim::ChannelTensor c;
                c.entries = sim::assemble_channel(std::span<const sim::Path>(&p, 1), g, ofdm);
                c.ap_id = q;
                c.time_index = t;
                channels->push_back(std::move(c));
            }
        inst.obs.csi = std::make_shared<obs::CsiDistanceCache>(std::move(channels), T, Q, true);

        auto &p = inst.params;
        p = obs::PropagationParams::make(T, Q);
        for (int k = 0; k < 2; ++k)
            for (int q = 0; q < Q; ++q)
            {
                p.beta[k][q] = -45.0 - 10.0 * k + 3.0 * n01(rng);
                p.alpha[k][q] = -20.0 - 5.0 * k + 2.0 * n01(rng);
                p.sigma_s2[k][q] = 4.0 + 10.0 * u01(rng);
            }
        p.sigma_theta2 = {0.05 + 0.1 * u01(rng), 0.5 + u01(rng)};
        p.m = {Vec2(-50.0, -20.0), Vec2(-60.0, -18.0)};
        p.upsilon = {Mat2::Identity() * 40.0, Mat2::Identity() * 60.0};
        for (std::size_t i = 0; i < p.pi.size(); ++i)
        {
            const double w = 0.1 + 0.8 * u01(rng);
            p.pi[i] = {w, 1.0 - w};
            p.nlos[i] = u01(rng) < 0.5 ? 1 : 0;
        }
        p.sigma_u2 = 0.5 + u01(rng);

        inst.mobility.gamma = 0.3 + 0.6 * u01(rng);
        inst.mobility.slot_s = 1.0;
        inst.mobility.sigma_v2 = 0.3 + u01(rng);
        inst.mobility.mean_velocity = Vec2(0.5 * n01(rng), 0.5 * n01(rng));
        return inst;
    }

    /// Exhaustive maximization of the decoder objective by enumerating every node
    /// sequence. Per-(t, node) and per-transition terms are tabulated first so
    /// that a million sequences stay cheap; the lexicographically first maximizer wins.
    inline std::pair<std::vector<int>, double> exhaustive_decode(const DecodingInstance &inst,
                                                                 const obs::RegularizationConfig &reg,
                                                                 const inference::FrozenRegularizer &frozen)
    {
        const int N = inst.graph.size();
        const int T = inst.obs.T;
        const int Q = inst.obs.Q;
        constexpr double ninf = -std::numeric_limits<double>::infinity();
        const obs::EmissionModel em(inst.params);
        std::vector<double> node(static_cast<std::size_t>(T) * N, 0.0);
        for (int t = 0; t < T; ++t)
            for (int i = 0; i < N; ++i)
            {
                double e = 0.0;
                for (int q = 0; q < Q; ++q)
                {
                    e += em.loglik(inst.obs.sig(t, q), inst.graph.nodes[i], inst.obs.ap_positions[q]);
                    if (reg.eta != 0.0)
                        e += reg.eta * inference::frozen_term(frozen, t, q, Q, inst.graph.nodes[i],
                                                              inst.params.sigma_u2, reg.bins_per_meter());
                }
                node[static_cast<std::size_t>(t) * N + i] = e;
            }
        std::vector<double> trans(static_cast<std::size_t>(N) * N * N, ninf);
        for (int n = 0; n < N; ++n)
            for (int i = 0; i < N; ++i)
                for (int j = 0; j < N; ++j)
                    trans[(static_cast<std::size_t>(n) * N + i) * N + j] =
                        inference::transition_logprob(j, i, n, inst.graph, inst.mobility);

        std::vector<int> seq(T, 0), best;
        double best_val = ninf;
        while (true)
        {
            double v = 0.0;
            for (int t = 0; t < T && v != ninf; ++t)
            {
                v += node[static_cast<std::size_t>(t) * N + seq[t]];
                if (t >= 1 && !inst.graph.adjacent(seq[t - 1], seq[t]))
                    v = ninf;
                else if (t >= 2)
                    v += trans[(static_cast<std::size_t>(seq[t - 2]) * N + seq[t - 1]) * N + seq[t]];
            }
            if (v > best_val)
            {
                best_val = v;
                best = seq;
            }
            int pos = T - 1;
            while (pos >= 0 && ++seq[pos] == N)
                seq[pos--] = 0;
            if (pos < 0)
                break;
        }
        return {best, best_val};
    }

    /// Signatures drawn from two well-separated propagation conditions along a
    /// random walk. truth_nlos is time-major like the signatures.
    struct MixtureSample
    {
        obs::Observations obs;
        std::vector<Vec2> trajectory;
        std::vector<std::uint8_t> truth_nlos;
    };

    inline MixtureSample synthetic_mixture(std::uint64_t seed, int T, int Q, double nlos_share = 0.4)
    {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        std::normal_distribution<double> n01;
        MixtureSample out;
        out.obs.T = T;
        out.obs.Q = Q;
        for (int q = 0; q < Q; ++q)
            out.obs.ap_positions.push_back(Vec2(20.0 * u01(rng), 20.0 * u01(rng)));
        Vec2 x(10.0, 10.0);
        for (int t = 0; t < T; ++t)
        {
            x += 0.5 * Vec2(n01(rng), n01(rng));
            x = x.cwiseMax(Vec2(0.5, 0.5)).cwiseMin(Vec2(19.5, 19.5));
            out.trajectory.push_back(x);
        }
        const double beta[2] = {-35.0, -60.0}, alpha[2] = {-20.0, -30.0}, s_std[2] = {1.5, 3.0};
        const double th_std[2] = {0.05, 0.8}, nu_mean[2] = {-35.0, -12.0}, nu_std[2] = {2.0, 2.5};
        for (int t = 0; t < T; ++t)
            for (int q = 0; q < Q; ++q)
            {
                const int k = u01(rng) < nlos_share ? 1 : 0;
                double d = (out.trajectory[t] - out.obs.ap_positions[q]).norm();
                d = std::max(d, 0.3);
                features::RadioSignature s;
                s.ap_id = q;
                s.time_index = t;
                s.rss_db = beta[k] + alpha[k] * std::log10(d) + s_std[k] * n01(rng);
                s.aod_rad = wrap_to_2pi(azimuth(out.obs.ap_positions[q], out.trajectory[t]) + th_std[k] * n01(rng));
                s.spread_db = nu_mean[k] + nu_std[k] * n01(rng);
                out.obs.signatures.push_back(s);
                out.truth_nlos.push_back(static_cast<std::uint8_t>(k));
            }
        return out;
    }

} // namespace blindmap::testing

#endif
