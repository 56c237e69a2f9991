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

#include <gtest/gtest.h>

#include <cmath>

using blindmap::bessel_j0;

TEST(Bessel, MatchesStandardLibraryOnDenseGrid)
{
    double worst = 0.0;
    for (double x = 0.0; x <= 200.0; x += 0.0137)
        worst = std::max(worst, std::abs(bessel_j0(x) - std::cyl_bessel_j(0.0, x)));
    EXPECT_LT(worst, 1e-11);
}

TEST(Bessel, ContinuousAcrossSeriesAsymptoticSwitch)
{
    for (double x : {11.999999, 12.0, 12.000001})
        EXPECT_NEAR(bessel_j0(x), std::cyl_bessel_j(0.0, x), 1e-11);
}

TEST(Bessel, KnownValuesAndSymmetry)
{
    EXPECT_DOUBLE_EQ(bessel_j0(0.0), 1.0);
    // First zero of J0.
    EXPECT_NEAR(bessel_j0(2.404825557695773), 0.0, 1e-13);
    EXPECT_DOUBLE_EQ(bessel_j0(-3.7), bessel_j0(3.7));
    EXPECT_NEAR(bessel_j0(1e4), std::cyl_bessel_j(0.0, 1e4), 1e-13);
}
