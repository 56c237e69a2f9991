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

#include "blindmap/metrics.hpp"

#include <stdexcept>

namespace blindmap::eval
{
    double e_loc(std::span<const Vec2> truth, std::span<const Vec2> estimate)
    {
        if (truth.size() != estimate.size())
            throw std::domain_error("e_loc: trajectories differ in length");
        if (truth.empty())
            return 0.0;
        double acc = 0.0;
        for (std::size_t t = 0; t < truth.size(); ++t)
            acc += (truth[t] - estimate[t]).norm();
        return acc / static_cast<double>(truth.size());
    }

    LocalizationError e_loc(std::span<const Vec2> truth, std::span<const Vec2> estimate,
                            std::span<const std::uint8_t> los, int Q)
    {
        if (truth.size() != estimate.size())
            throw std::domain_error("e_loc: trajectories differ in length");
        if (Q < 1 || los.size() != truth.size() * static_cast<std::size_t>(Q))
            throw std::domain_error("e_loc: LOS flags do not match T x Q");
        LocalizationError out;
        auto add = [](ErrorSplit &s, double e) {
            s.mean += e;
            ++s.count;
        };
        for (std::size_t t = 0; t < truth.size(); ++t)
        {
            const double e = (truth[t] - estimate[t]).norm();
            int n_los = 0;
            for (int q = 0; q < Q; ++q)
                n_los += los[t * Q + q] != 0;
            add(out.all, e);
            add(n_los >= 2 ? out.double_los : n_los == 1 ? out.single_los : out.nlos, e);
        }
        for (ErrorSplit *s : {&out.all, &out.nlos, &out.single_los, &out.double_los})
            if (s->count > 0)
                s->mean /= s->count;
        return out;
    }

    double losnlos_error(std::span<const std::uint8_t> truth_nlos, std::span<const std::uint8_t> assigned_nlos)
    {
        if (truth_nlos.size() != assigned_nlos.size())
            throw std::domain_error("losnlos_error: shapes differ");
        if (truth_nlos.empty())
            return 0.0;
        std::size_t wrong = 0;
        for (std::size_t i = 0; i < truth_nlos.size(); ++i)
            wrong += (truth_nlos[i] != 0) != (assigned_nlos[i] != 0);
        return static_cast<double>(wrong) / static_cast<double>(truth_nlos.size());
    }

} // namespace blindmap::eval
