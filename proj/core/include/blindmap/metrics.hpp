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

#ifndef BLINDMAP_METRICS_HPP
#define BLINDMAP_METRICS_HPP

#include "blindmap/common.hpp"

#include <cstdint>
#include <span>

namespace blindmap::eval
{
    /// Mean Euclidean error of one condition class; mean is 0 when count is 0.
    struct ErrorSplit
    {
        double mean = 0.0;
        int count = 0;
    };

    /// Average localization error with per-condition splits. A slot is double-LOS
    /// when at least two APs see it in LOS, single-LOS with exactly one, NLOS otherwise.
    struct LocalizationError
    {
        ErrorSplit all;
        ErrorSplit nlos;
        ErrorSplit single_los;
        ErrorSplit double_los;
    };

    /// (1/T) sum_t ||x_t - x_hat_t||. Throws std::domain_error on a length mismatch.
    double e_loc(std::span<const Vec2> truth, std::span<const Vec2> estimate);

    /// Same with splits; los is time-major (t * Q + q), nonzero = LOS.
    LocalizationError e_loc(std::span<const Vec2> truth, std::span<const Vec2> estimate,
                            std::span<const std::uint8_t> los, int Q);

    /// Fraction of samples whose NLOS assignment differs from the truth (both nonzero = NLOS).
    double losnlos_error(std::span<const std::uint8_t> truth_nlos, std::span<const std::uint8_t> assigned_nlos);

} // namespace blindmap::eval

#endif
