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

#include "blindmap/bounds.hpp"
#include "blindmap/bessel.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <random>

using namespace blindmap;
using namespace blindmap::bounds;

namespace
{
    RectilinearScenario three_ap_scenario(int T)
    {
        RectilinearScenario s;
        s.x0 = Vec2(-3.0, 1.0);
        s.v = Vec2(0.3, 0.1);
        s.ap_positions = {Vec2(0.0, -4.0), Vec2(5.0, 6.0), Vec2(-6.0, 5.0)};
        s.sigma_theta = 0.05;
        s.T = T;
        return s;
    }

    Eigen::Matrix4d fd_hessian(const RectilinearScenario &scn, const Psi &psi, const AodGrid &theta, double h)
    {
        Eigen::Matrix4d H;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
            {
                auto f = [&](double di, double dj) {
                    Psi p = psi;
                    p[i] += di;
                    p[j] += dj;
                    return aod_loglik(scn, p, theta);
                };
                H(i, j) = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h);
            }
        return H;
    }
} // namespace

TEST(Bounds, AzimuthGradientMatchesFiniteDifference)
{
    const Vec2 l(1.3, -0.4), v(0.2, 0.5);
    const int t = 3;
    const auto g = azimuth_gradient(l, t, v);
    auto phi = [&](const Psi &p) {
        const Vec2 d = Vec2(p[0], p[1]) + t * Vec2(p[2], p[3]);
        return std::atan2(d.y(), d.x());
    };
    const Psi p0 = make_psi(l, v);
    const double h = 1e-6;
    for (int i = 0; i < 4; ++i)
    {
        Psi a = p0, b = p0;
        a[i] += h;
        b[i] -= h;
        EXPECT_NEAR(g[i], (phi(a) - phi(b)) / (2.0 * h), 1e-7);
    }
}

TEST(Bounds, FimMatchesKroneckerClosedForm)
{
    const auto scn = three_ap_scenario(40);
    const FisherMatrix F = fim(scn);
    Eigen::Matrix4d ref = Eigen::Matrix4d::Zero();
    const double s2 = scn.sigma_theta * scn.sigma_theta;
    for (int t = 1; t <= scn.T; ++t)
        for (const Vec2 &o : scn.ap_positions)
        {
            const Vec2 d = scn.x0 - o + t * scn.v;
            const double n2 = d.squaredNorm();
            const Mat2 P = n2 * Mat2::Identity() - d * d.transpose();
            Mat2 K;
            K << 1.0, t, t, double(t) * t;
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    ref.block<2, 2>(2 * a, 2 * b) += K(a, b) * P / (s2 * n2 * n2);
        }
    EXPECT_LT((F.full - ref).norm() / ref.norm(), 1e-12);
    EXPECT_LT((F.block_x - ref.topLeftCorner<2, 2>()).norm(), 1e-9 * ref.norm());
    EXPECT_LT((F.block_v - ref.bottomRightCorner<2, 2>()).norm(), 1e-9 * ref.norm());
}

TEST(Bounds, FimEqualsNegativeHessianAtNoiseFreeData)
{
    const auto scn = three_ap_scenario(25);
    const AodGrid theta = sample_aod_grid(scn, 0.0, 1);
    const Eigen::Matrix4d H = fd_hessian(scn, make_psi(scn.x0, scn.v), theta, 1e-4);
    const Eigen::Matrix4d F = fim(scn).full;
    EXPECT_LT((F + H).norm() / F.norm(), 1e-5);
}

TEST(Bounds, LoglikPeaksAtTruthAndWrapsResiduals)
{
    auto scn = three_ap_scenario(10);
    // Put one AP right behind the path so azimuths straddle the branch cut.
    scn.ap_positions.push_back(Vec2(5.0, 1.0));
    const AodGrid theta = sample_aod_grid(scn, 0.0, 1);
    const double at_truth = aod_loglik(scn, theta);
    const double expect = -static_cast<double>(theta.size()) * std::log(2.0 * kPi * scn.sigma_theta * scn.sigma_theta);
    EXPECT_NEAR(at_truth, expect, 1e-9);
    const AodGrid shifted = (theta.array() + kTwoPi).matrix();
    EXPECT_NEAR(aod_loglik(scn, shifted), at_truth, 1e-9);
    EXPECT_LT(aod_loglik(scn, make_psi(scn.x0 + Vec2(0.1, 0.0), scn.v), theta), at_truth);
}

TEST(Bounds, FimRejectsPathThroughAccessPoint)
{
    RectilinearScenario s;
    s.x0 = Vec2(0.0, 0.0);
    s.v = Vec2(1.0, 0.0);
    s.ap_positions = {Vec2(3.0, 0.0)};
    s.T = 5;
    EXPECT_THROW(fim(s), std::domain_error);
}

TEST(Bounds, SingleSnapshotAngleCrlbScaling)
{
    const double a = single_snapshot_angle_crlb(4.0, 0.3, 1.0, 1.0, 64);
    const double b = single_snapshot_angle_crlb(4.0, 0.3, 1.0, 1.0, 128);
    EXPECT_NEAR(a / b, 128.0 * (128.0 * 128.0 - 1.0) / (64.0 * (64.0 * 64.0 - 1.0)), 1e-9);
    EXPECT_NEAR(single_snapshot_angle_crlb(2.0, 0.0, 1.0, 1.0, 2), 4.0 / 6.0, 1e-15);
    EXPECT_TRUE(std::isinf(single_snapshot_angle_crlb(1.0, kPi / 2.0, 1.0, 1.0, 8)));
    EXPECT_THROW(single_snapshot_angle_crlb(1.0, 0.0, 1.0, 1.0, 1), std::domain_error);
}

TEST(Bounds, LimitedSeriesAgreesWithDirectSums)
{
    auto scn = three_ap_scenario(1);
    const std::vector<int> grid{1, 7, 50, 300};
    const auto series = crlb_limited_series(scn, grid);
    ASSERT_EQ(series.size(), grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
    {
        scn.T = grid[i];
        const LimitedBound one = crlb_limited(scn);
        EXPECT_NEAR(one.delta_x, series[i].delta_x, 1e-12 * one.delta_x);
        for (int q = 0; q < scn.Q(); ++q)
        {
            double s0 = 0.0, s4 = 0.0;
            for (int t = 1; t <= grid[i]; ++t)
            {
                const double d2 = (scn.position(t) - scn.ap_positions[q]).squaredNorm();
                s0 += 1.0 / (d2 * d2);
                s4 += std::pow(t, 4) / (d2 * d2);
            }
            EXPECT_NEAR(series[i].s[q][0], s0, 1e-12 * s0);
            EXPECT_NEAR(series[i].s[q][4], s4, 1e-12 * s4);
        }
    }
}

TEST(Bounds, LimitedBoundIsNonIncreasingAndTailBoundHolds)
{
    auto scn = three_ap_scenario(1);
    std::vector<int> grid;
    for (int T = 10; T <= 20000; T = static_cast<int>(T * 1.5))
        grid.push_back(T);
    const auto series = crlb_limited_series(scn, grid);
    for (std::size_t i = 1; i < series.size(); ++i)
        EXPECT_LE(series[i].delta_x, series[i - 1].delta_x * (1.0 + 1e-12));

    // The tail sums beyond T = 10 must sit below the analytic bound.
    const auto &b = series.front();
    for (int q = 0; q < scn.Q(); ++q)
        for (int n = 0; n < 3; ++n)
        {
            double tail = 0.0;
            for (int t = 11; t <= 2000000; ++t)
            {
                const double d2 = (scn.position(t) - scn.ap_positions[q]).squaredNorm();
                tail += std::pow(static_cast<double>(t), n) / (d2 * d2);
            }
            EXPECT_LE(tail, b.tail_bound[n]) << "q=" << q << " n=" << n;
        }
    for (int t = 1; t <= 1000; ++t)
        for (const Vec2 &o : scn.ap_positions)
            EXPECT_GT((scn.position(t) - o).norm(), b.rho * t);
}

TEST(Bounds, LimitedRejectsBadGrid)
{
    const auto scn = three_ap_scenario(1);
    const std::vector<int> bad{10, 5};
    EXPECT_THROW(crlb_limited_series(scn, bad), std::domain_error);
}

TEST(Bounds, UnlimitedAsymptoteScaling)
{
    const auto a = crlb_unlimited_asymptote(1.0, 10.0, 2.55e-2, 1.0, 1.0, 8);
    EXPECT_NEAR(a.v_limit / a.x_limit, 6.0, 1e-12);
    const double x_ref = 16.0 / (2.55e-2 * kPi * (1.0 - 0.01) * 8.0 * 63.0);
    EXPECT_NEAR(a.x_limit, x_ref, 1e-12 * x_ref);
    const auto inf = crlb_unlimited_asymptote(1.0, std::numeric_limits<double>::infinity(), 2.55e-2, 1.0, 1.0, 8);
    EXPECT_LT(inf.x_limit, a.x_limit);
    EXPECT_THROW(crlb_unlimited_asymptote(2.0, 1.0, 1.0, 1.0, 1.0, 8), std::domain_error);
    EXPECT_THROW(crlb_unlimited_asymptote(1.0, 2.0, 0.0, 1.0, 1.0, 8), std::domain_error);
}

TEST(Bounds, PppDensityMatchesPolarQuadrature)
{
    // kappa * int int (r cos a)^2 (r sin a)^2 / r^8 r dr da by the midpoint rule.
    const double kappa = 0.1, r0 = 0.5, R = 7.0;
    const int nr = 20000, na = 256;
    double acc = 0.0;
    const double dr = (R - r0) / nr, da = kTwoPi / na;
    for (int i = 0; i < nr; ++i)
    {
        const double r = r0 + (i + 0.5) * dr;
        for (int j = 0; j < na; ++j)
        {
            const double a = (j + 0.5) * da;
            const double c = std::cos(a), s = std::sin(a);
            acc += c * c * s * s / std::pow(r, 3) * dr * da;
        }
    }
    EXPECT_NEAR(ppp_fisher_density(kappa, r0, R), kappa * acc, 1e-6 * kappa * acc);
}

TEST(Bounds, PppMonteCarloAgreesWithinStandardError)
{
    const auto mc = ppp_fisher_density_mc(0.2, 1.0, 10.0, 20000, 7);
    const double ref = ppp_fisher_density(0.2, 1.0, 10.0);
    EXPECT_EQ(mc.draws, 20000);
    EXPECT_GT(mc.std_error, 0.0);
    EXPECT_NEAR(mc.mean, ref, 4.0 * mc.std_error);
}

TEST(Bounds, RuMatchesDefiningSum)
{
    const double d = 0.9, B = 400e6;
    const int M = 32;
    const auto grid = theoretical_Ru_grid(d, B, M, 5, 0.7);
    ASSERT_EQ(grid.size(), 32u);
    const double omega = B * d / kSpeedOfLight;
    for (int u : {0, 3, 17})
    {
        cdouble acc = 0.0;
        for (int m = 0; m < M; ++m)
            acc += std::cyl_bessel_j(0.0, 2.0 * kPi * m * omega / M) * std::exp(cdouble(0.0, 2.0 * kPi * m * u / M));
        const cdouble ref = 0.7 * 5.0 * acc / double(M);
        EXPECT_NEAR(std::abs(grid[u] - ref), 0.0, 1e-10);
        EXPECT_NEAR(std::abs(theoretical_Ru(u, d, B, M, 5, 0.7) - ref), 0.0, 1e-10);
    }
    EXPECT_THROW(theoretical_Ru(0.0, d, B, 4, 1, 1.0), std::domain_error);
}

TEST(Bounds, RuPeakTracksDistance)
{
    const double B = 400e6;
    const int M = 256;
    for (int w : {1, 5, 20, 64})
    {
        const double d = w * kSpeedOfLight / B;
        EXPECT_LE(std::abs(theoretical_Ru_peak(d, B, M) - w), 1) << "omega " << w;
    }
}

TEST(Bounds, FimIncrementIsPositiveSemidefinite)
{
    auto scn = three_ap_scenario(1);
    Eigen::Matrix4d prev = fim(scn).full;
    for (int T = 2; T <= 60; ++T)
    {
        scn.T = T;
        const Eigen::Matrix4d cur = fim(scn).full;
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(cur - prev);
        EXPECT_GE(es.eigenvalues()(0), -1e-10 * cur.norm());
        prev = cur;
    }
}
