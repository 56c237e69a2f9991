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

#ifndef BLINDMAP_COMMON_HPP
#define BLINDMAP_COMMON_HPP

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace blindmap
{
    using Vec2 = Eigen::Vector2d;
    using Mat2 = Eigen::Matrix2d;
    using cdouble = std::complex<double>;

    /// Speed of light used throughout the propagation model [m/s].
    inline constexpr double kSpeedOfLight = 3.0e8;
    inline constexpr double kPi = std::numbers::pi;
    inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

    // Error taxonomy. Domain violations of a single operation use std::domain_error
    // directly; the types below mark failure classes the CLI maps to exit codes.

    /// Invalid model parameters (e.g. a covariance that is not positive definite).
    class ParameterError : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    /// A receiver position sees no propagation path at all.
    class CoverageGapError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    /// Malformed or inconsistent configuration / input files (CLI exit code 2).
    class ConfigError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    /// Numerical failure inside a solver (CLI exit code 3).
    class NumericalError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    /// Wraps an angle to [0, 2*pi).
    inline double wrap_to_2pi(double a)
    {
        double r = std::fmod(a, kTwoPi);
        if (r < 0.0)
            r += kTwoPi;
        if (r >= kTwoPi)
            r = 0.0;
        return r;
    }

    /// Wraps an angle to (-pi, pi].
    inline double wrap_to_pi(double a)
    {
        double r = std::fmod(a + kPi, kTwoPi);
        if (r < 0.0)
            r += kTwoPi;
        r -= kPi;
        if (r <= -kPi)
            r += kTwoPi;
        return r;
    }

    /// Geometric azimuth of `to` as seen from `from`, in [0, 2*pi).
    inline double azimuth(const Vec2 &from, const Vec2 &to)
    {
        const Vec2 d = to - from;
        return wrap_to_2pi(std::atan2(d.y(), d.x()));
    }

    inline Vec2 unit_vector(double angle) { return {std::cos(angle), std::sin(angle)}; }

} // namespace blindmap

#endif
