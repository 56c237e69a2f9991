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

#include <algorithm>
#include <limits>

namespace blindmap::inference
{
    double MobilityModel::step_variance() const
    {
        return std::max((1.0 - gamma * gamma) * slot_s * slot_s * sigma_v2, step_variance_floor);
    }

    namespace
    {
        double kernel_exponent(const Vec2 &pj, const Vec2 &pi, const Vec2 &pn, const MobilityModel &m, double var)
        {
            const Vec2 r = pj + m.gamma * pn - (1.0 + m.gamma) * pi - (1.0 - m.gamma) * m.slot_s * m.mean_velocity;
            return -r.squaredNorm() / (2.0 * var);
        }
    } // namespace

    void transition_row(int i, int n, const MobilityGraph &graph, const MobilityModel &model, std::vector<double> &out)
    {
        if (!graph.valid(i) || !graph.valid(n))
            throw std::domain_error("transition: node index out of range");
        const auto &nb = graph.neighbors[i];
        const double var = model.step_variance();
        out.resize(nb.size());
        double top = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < nb.size(); ++k)
        {
            out[k] = kernel_exponent(graph.nodes[nb[k]], graph.nodes[i], graph.nodes[n], model, var);
            top = std::max(top, out[k]);
        }
        double sum = 0.0;
        for (double e : out)
            sum += std::exp(e - top);
        const double log_norm = top + std::log(sum);
        for (double &e : out)
            e -= log_norm;
    }

    double transition_logprob(int j, int i, int n, const MobilityGraph &graph, const MobilityModel &model)
    {
        if (!graph.valid(j))
            throw std::domain_error("transition: node index out of range");
        std::vector<double> row;
        transition_row(i, n, graph, model, row);
        const auto &nb = graph.neighbors[i];
        const auto it = std::lower_bound(nb.begin(), nb.end(), j);
        if (it == nb.end() || *it != j)
            return -std::numeric_limits<double>::infinity();
        return row[static_cast<std::size_t>(it - nb.begin())];
    }

    MobilityFit fit_mobility(std::span<const Vec2> x, double gamma, double slot_s, VarianceEstimator estimator)
    {
        const std::size_t T = x.size();
        if (T < 3)
            throw std::domain_error("fit_mobility: need at least 3 positions");
        if (!(gamma > 0.0 && gamma <= 1.0) || !(slot_s > 0.0))
            throw std::domain_error("fit_mobility: invalid gamma or slot");
        const double n = static_cast<double>(T - 2);
        MobilityFit fit;
        Vec2 sum = Vec2::Zero();
        for (std::size_t t = 2; t < T; ++t)
            sum += x[t] - (1.0 + gamma) * x[t - 1] + gamma * x[t - 2];
        if (gamma < 1.0)
            fit.mean_velocity = sum / (n * (1.0 - gamma) * slot_s);
        else
            fit.mean_velocity = (x[T - 1] - x[0]) / (static_cast<double>(T - 1) * slot_s);

        double ss = 0.0;
        for (std::size_t t = 2; t < T; ++t)
        {
            const Vec2 r = x[t] - (1.0 + gamma) * x[t - 1] + gamma * x[t - 2] - (1.0 - gamma) * slot_s * fit.mean_velocity;
            ss += r.squaredNorm();
        }
        fit.sigma_v2 = ss / (2.0 * n * slot_s * slot_s);
        if (estimator == VarianceEstimator::gauss_markov && gamma < 1.0)
            fit.sigma_v2 /= (1.0 - gamma * gamma);
        return fit;
    }

} // namespace blindmap::inference
