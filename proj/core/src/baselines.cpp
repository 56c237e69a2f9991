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

#include "blindmap/baselines.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace blindmap::eval
{
    std::vector<Vec2> baseline_wcl(std::span<const features::RadioSignature> signatures,
                                   std::span<const Vec2> ap_positions)
    {
        const std::size_t Q = ap_positions.size();
        if (Q == 0)
            throw std::domain_error("baseline_wcl: no access points");
        if (signatures.size() % Q != 0)
            throw std::domain_error("baseline_wcl: signature count is not a multiple of Q");
        const std::size_t T = signatures.size() / Q;
        std::vector<Vec2> out(T, Vec2::Zero());
        std::vector<double> w(Q);
        for (std::size_t t = 0; t < T; ++t)
        {
            // 10^(s/20) normalized in the log domain so that large dB values stay finite.
            double smax = -std::numeric_limits<double>::infinity();
            for (std::size_t q = 0; q < Q; ++q)
                smax = std::max(smax, signatures[t * Q + q].rss_db);
            double sum = 0.0;
            for (std::size_t q = 0; q < Q; ++q)
            {
                w[q] = std::pow(10.0, (signatures[t * Q + q].rss_db - smax) / 20.0);
                sum += w[q];
            }
            for (std::size_t q = 0; q < Q; ++q)
                out[t] += (w[q] / sum) * ap_positions[q];
        }
        return out;
    }

    bool intersect_bearings(std::span<const double> aod, std::span<const Vec2> ap_positions, double max_condition,
                            Vec2 &out)
    {
        if (aod.size() != ap_positions.size())
            throw std::domain_error("intersect_bearings: one bearing per access point expected");
        Mat2 A = Mat2::Zero();
        Vec2 b = Vec2::Zero();
        for (std::size_t q = 0; q < aod.size(); ++q)
        {
            const Vec2 n(-std::sin(aod[q]), std::cos(aod[q]));
            const Mat2 P = n * n.transpose();
            A += P;
            b += P * ap_positions[q];
        }
        Eigen::SelfAdjointEigenSolver<Mat2> es(A);
        const double lmin = es.eigenvalues()(0);
        const double lmax = es.eigenvalues()(1);
        if (!(lmin > 0.0) || lmax / lmin > max_condition)
            return false;
        out = A.ldlt().solve(b);
        return true;
    }

    AodlResult baseline_aodl(std::span<const features::RadioSignature> signatures,
                             std::span<const Vec2> ap_positions, double max_condition)
    {
        const std::size_t Q = ap_positions.size();
        if (Q < 2)
            throw std::domain_error("baseline_aodl: need at least two access points");
        if (signatures.size() % Q != 0)
            throw std::domain_error("baseline_aodl: signature count is not a multiple of Q");
        const std::size_t T = signatures.size() / Q;

        Vec2 prev = Vec2::Zero();
        for (const Vec2 &o : ap_positions)
            prev += o / static_cast<double>(Q);

        AodlResult res;
        res.trajectory.resize(T);
        res.low_confidence.assign(T, 0);
        std::vector<double> aod(Q);
        for (std::size_t t = 0; t < T; ++t)
        {
            for (std::size_t q = 0; q < Q; ++q)
                aod[q] = signatures[t * Q + q].aod_rad;
            Vec2 p;
            if (intersect_bearings(aod, ap_positions, max_condition, p))
                prev = p;
            else
                res.low_confidence[t] = 1;
            res.trajectory[t] = prev;
        }
        return res;
    }

} // namespace blindmap::eval
