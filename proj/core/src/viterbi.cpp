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

#include "blindmap/viterbi.hpp"

#include <algorithm>
#include <numeric>

namespace blindmap::inference
{
    namespace
    {
        constexpr double kNegInf = -std::numeric_limits<double>::infinity();
        constexpr double kLog2Pi = 1.8378770664093453;

        struct State
        {
            int i;        // node at t-1
            int j;        // node at t
            int back;     // predecessor state at t-1
            double score;
        };
    } // namespace

    FrozenRegularizer freeze_regularizer(std::span<const Vec2> previous, const obs::Observations &obs,
                                         const obs::PropagationParams &params, const obs::RegularizationConfig &cfg)
    {
        FrozenRegularizer fr;
        if (previous.empty())
            return fr;
        if (static_cast<int>(previous.size()) != obs.T)
            throw std::domain_error("freeze_regularizer: previous trajectory length mismatch");
        if (!obs.csi)
            throw std::invalid_argument("freeze_regularizer: CSI distances are required");
        fr.positions.assign(previous.begin(), previous.end());
        const std::size_t n = static_cast<std::size_t>(obs.T) * obs.Q;
        fr.tau.resize(n);
        fr.u.resize(n);
        for (int t = 0; t < obs.T; ++t)
            for (int q = 0; q < obs.Q; ++q)
            {
                const std::size_t i = static_cast<std::size_t>(t) * obs.Q + q;
                fr.tau[i] = obs::nlos_neighborhood(t, q, previous, params.nlos, obs.Q, cfg);
                for (int tau : fr.tau[i])
                    fr.u[i].push_back((*obs.csi)(t, tau, q));
            }
        return fr;
    }

    double frozen_term(const FrozenRegularizer &fr, int t, int q, int Q, const Vec2 &p, double sigma_u2,
                       double bins_per_meter)
    {
        if (fr.empty())
            return 0.0;
        const std::size_t i = static_cast<std::size_t>(t) * Q + q;
        const auto &taus = fr.tau[i];
        if (taus.empty())
            return 0.0;
        const double norm = -0.5 * (kLog2Pi + std::log(sigma_u2));
        double acc = 0.0;
        for (std::size_t k = 0; k < taus.size(); ++k)
        {
            const double r = fr.u[i][k] - bins_per_meter * (p - fr.positions[taus[k]]).norm();
            acc += norm - r * r / (2.0 * sigma_u2);
        }
        return acc / static_cast<double>(taus.size());
    }

    namespace
    {
        double node_emission(const obs::EmissionModel &em, const obs::Observations &obs, int t, const Vec2 &p)
        {
            double e = 0.0;
            for (int q = 0; q < obs.Q; ++q)
            {
                if (!((p - obs.ap_positions[q]).norm() > 0.0))
                    return kNegInf;
                e += em.loglik(obs.sig(t, q), p, obs.ap_positions[q]);
            }
            return e;
        }

        double node_regularizer(const FrozenRegularizer &fr, const obs::Observations &obs, int t, const Vec2 &p,
                                const obs::PropagationParams &params, const obs::RegularizationConfig &cfg)
        {
            double r = 0.0;
            for (int q = 0; q < obs.Q; ++q)
                r += frozen_term(fr, t, q, obs.Q, p, params.sigma_u2, cfg.bins_per_meter());
            return r;
        }
    } // namespace

    double surrogate_objective(std::span<const int> nodes, const obs::Observations &obs,
                               const obs::PropagationParams &params, const MobilityModel &mobility,
                               const MobilityGraph &graph, const obs::RegularizationConfig &cfg,
                               const FrozenRegularizer &frozen)
    {
        const int T = static_cast<int>(nodes.size());
        if (T != obs.T)
            throw std::domain_error("surrogate_objective: length mismatch");
        for (int n : nodes)
            if (!graph.valid(n))
                throw std::domain_error("surrogate_objective: node is not on the mobility graph");
        const obs::EmissionModel em(params);
        double total = 0.0;
        for (int t = 0; t < T; ++t)
        {
            const Vec2 &p = graph.nodes[nodes[t]];
            total += node_emission(em, obs, t, p);
            if (cfg.eta != 0.0)
                total += cfg.eta * node_regularizer(frozen, obs, t, p, params, cfg);
        }
        for (int t = 1; t < T; ++t)
            if (!graph.adjacent(nodes[t - 1], nodes[t]))
                return kNegInf;
        for (int t = 2; t < T; ++t)
            total += transition_logprob(nodes[t], nodes[t - 1], nodes[t - 2], graph, mobility);
        return total;
    }

    TrajectoryEstimate viterbi_solve(const obs::Observations &obs, const MobilityGraph &graph,
                                     const obs::PropagationParams &params, const MobilityModel &mobility,
                                     const obs::RegularizationConfig &cfg, const PruningConfig &pruning,
                                     std::span<const Vec2> prev_trajectory)
    {
        const int T = obs.T;
        const int N = graph.size();
        if (T < 1 || N < 1)
            throw std::domain_error("viterbi_solve: empty problem");
        const obs::EmissionModel em(params);
        const bool regularize = cfg.eta != 0.0 && !prev_trajectory.empty();
        const FrozenRegularizer fr =
            regularize ? freeze_regularizer(prev_trajectory, obs, params, cfg) : FrozenRegularizer{};

        TrajectoryEstimate est;
        std::vector<std::vector<int>> cand(T);
        std::vector<std::vector<double>> score(T); // per candidate, aligned with cand[t]
        std::vector<int> pos_of(N, -1);
        std::vector<double> emission(N);
        std::vector<int> order(N);

        auto local_score = [&](int t, int node, double e) {
            if (!regularize || e == kNegInf)
                return e;
            return e + cfg.eta * node_regularizer(fr, obs, t, graph.nodes[node], params, cfg);
        };

        for (int t = 0; t < T; ++t)
        {
            for (int j = 0; j < N; ++j)
                emission[j] = node_emission(em, obs, t, graph.nodes[j]);
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return emission[a] > emission[b]; });
            std::size_t keep = 0;
            while (keep < order.size() && emission[order[keep]] > pruning.log_zeta)
                ++keep;
            if (pruning.top_k > 0)
                keep = std::min<std::size_t>(keep, static_cast<std::size_t>(pruning.top_k));
            keep = std::max<std::size_t>(keep, 1);
            cand[t].assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep));
            std::sort(cand[t].begin(), cand[t].end());
            score[t].resize(cand[t].size());
            for (std::size_t k = 0; k < cand[t].size(); ++k)
                score[t][k] = local_score(t, cand[t][k], emission[cand[t][k]]);
            est.max_candidates = std::max(est.max_candidates, static_cast<int>(cand[t].size()));
        }

        // Adds every neighbour of the active nodes to the candidate set of step t.
        auto expand = [&](int t, const std::vector<int> &active) {
            std::vector<int> extra = cand[t];
            for (int i : active)
                extra.insert(extra.end(), graph.neighbors[i].begin(), graph.neighbors[i].end());
            std::sort(extra.begin(), extra.end());
            extra.erase(std::unique(extra.begin(), extra.end()), extra.end());
            std::vector<double> sc(extra.size());
            for (std::size_t k = 0; k < extra.size(); ++k)
                sc[k] = local_score(t, extra[k], node_emission(em, obs, t, graph.nodes[extra[k]]));
            cand[t] = std::move(extra);
            score[t] = std::move(sc);
            ++est.fallback_expansions;
        };

        if (T == 1)
        {
            std::size_t best = 0;
            for (std::size_t k = 1; k < cand[0].size(); ++k)
                if (score[0][k] > score[0][best])
                    best = k;
            est.nodes = {cand[0][best]};
            est.surrogate = score[0][best];
            est.objective = obs::total_objective(est.nodes, obs, params, mobility, graph, cfg);
            return est;
        }

        std::vector<std::vector<State>> states(T);
        // Builds the states of step t from the active nodes at t-1 (ascending).
        auto build = [&](int t, const std::vector<int> &active) {
            for (int attempt = 0; attempt < 2; ++attempt)
            {
                std::fill(pos_of.begin(), pos_of.end(), -1);
                for (std::size_t k = 0; k < cand[t].size(); ++k)
                    if (score[t][k] != kNegInf)
                        pos_of[cand[t][k]] = static_cast<int>(k);
                states[t].clear();
                for (int i : active)
                    for (int j : graph.neighbors[i])
                        if (pos_of[j] >= 0)
                            states[t].push_back({i, j, -1, kNegInf});
                if (!states[t].empty())
                    return;
                expand(t, active);
            }
            throw NumericalError("viterbi_solve: no feasible transition after candidate expansion");
        };

        {
            std::vector<int> active;
            for (std::size_t k = 0; k < cand[0].size(); ++k)
                if (score[0][k] != kNegInf)
                    active.push_back(cand[0][k]);
            if (active.empty())
                throw NumericalError("viterbi_solve: no admissible start node");
            build(1, active);
            std::vector<int> pos0(N, -1);
            for (std::size_t k = 0; k < cand[0].size(); ++k)
                pos0[cand[0][k]] = static_cast<int>(k);
            for (auto &s : states[1])
                s.score = score[0][pos0[s.i]] + score[1][pos_of[s.j]];
        }

        std::vector<double> row;
        std::vector<int> first_state(N, -1); // first state index with second node i at t-1
        for (int t = 2; t < T; ++t)
        {
            const auto &prev = states[t - 1];
            std::vector<int> active;
            for (const auto &s : prev)
                active.push_back(s.j);
            std::sort(active.begin(), active.end());
            active.erase(std::unique(active.begin(), active.end()), active.end());
            build(t, active);
            auto &cur = states[t];

            // cur is grouped by i (ascending) then j; index the block start per i.
            std::fill(first_state.begin(), first_state.end(), -1);
            for (int s = static_cast<int>(cur.size()) - 1; s >= 0; --s)
                first_state[cur[s].i] = s;

            for (int s = 0; s < static_cast<int>(prev.size()); ++s)
            {
                const State &ps = prev[s];
                const int i = ps.j;
                if (ps.score == kNegInf || first_state[i] < 0)
                    continue;
                transition_row(i, ps.i, graph, mobility, row);
                const auto &nb = graph.neighbors[i];
                int c = first_state[i];
                for (std::size_t k = 0; k < nb.size(); ++k)
                {
                    while (c < static_cast<int>(cur.size()) && cur[c].i == i && cur[c].j < nb[k])
                        ++c;
                    if (c >= static_cast<int>(cur.size()) || cur[c].i != i)
                        break;
                    if (cur[c].j != nb[k])
                        continue;
                    const double v = ps.score + row[k];
                    if (v > cur[c].score)
                    {
                        cur[c].score = v;
                        cur[c].back = s;
                    }
                }
            }
            for (auto &s : cur)
                if (s.score != kNegInf)
                    s.score += score[t][pos_of[s.j]];
        }

        const auto &last = states[T - 1];
        int best = -1;
        for (int s = 0; s < static_cast<int>(last.size()); ++s)
            if (best < 0 || last[s].score > last[best].score)
                best = s;
        if (best < 0 || last[best].score == kNegInf)
            throw NumericalError("viterbi_solve: every path has zero probability");

        est.surrogate = last[best].score;
        est.nodes.assign(T, -1);
        int s = best;
        for (int t = T - 1; t >= 1; --t)
        {
            const State &st = states[t][s];
            est.nodes[t] = st.j;
            est.nodes[t - 1] = st.i;
            s = st.back;
        }
        est.objective = obs::total_objective(est.nodes, obs, params, mobility, graph, cfg);
        return est;
    }

} // namespace blindmap::inference
