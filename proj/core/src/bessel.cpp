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

#include "blindmap/common.hpp"

#include <cmath>

namespace blindmap
{
    namespace
    {
        // Below this argument the ascending series is used. The Hankel expansion's
        // smallest term is roughly exp(-2x), so it only reaches 1e-10 from about x = 12
        // on; the series still has ~1e-12 cancellation error there.
        constexpr double kCrossover = 12.0;

        double j0_series(double x)
        {
            const double q = -0.25 * x * x;
            double term = 1.0;
            double sum = 1.0;
            for (int k = 1; k < 200; ++k)
            {
                term *= q / (static_cast<double>(k) * k);
                sum += term;
                if (std::abs(term) < 1e-17 * std::abs(sum) && k > 4)
                    break;
            }
            return sum;
        }

        // J0(x) ~ sqrt(2/(pi x)) (P cos(x - pi/4) - Q sin(x - pi/4)) with the Hankel
        // coefficients b_k = a_k(0) / x^k; both series are cut at their smallest term.
        double j0_asymptotic(double x)
        {
            double p = 1.0;
            double q = 0.0;
            double b = 1.0;
            double last = 1.0;
            for (int k = 1; k < 80; ++k)
            {
                const double odd = 2.0 * k - 1.0;
                b *= -(odd * odd) / (8.0 * k * x);
                if (std::abs(b) > last)
                    break;
                last = std::abs(b);
                if (k % 2 == 0)
                    p += ((k / 2) % 2 == 0 ? b : -b);
                else
                    q += (((k - 1) / 2) % 2 == 0 ? b : -b);
                if (last < 1e-17)
                    break;
            }
            const double chi = x - 0.25 * kPi;
            return std::sqrt(2.0 / (kPi * x)) * (p * std::cos(chi) - q * std::sin(chi));
        }
    } // namespace

    double bessel_j0(double x)
    {
        const double ax = std::abs(x);
        if (!std::isfinite(ax))
            return std::isnan(x) ? x : 0.0;
        return ax < kCrossover ? j0_series(ax) : j0_asymptotic(ax);
    }

} // namespace blindmap
