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

#include "blindmap/obsmodel.hpp"
#include "instances.hpp"

#include <gtest/gtest.h>

using namespace blindmap;
using namespace blindmap::obs;

namespace
{
    double gauss1(double x, double mean, double var)
    {
        return std::exp(-(x - mean) * (x - mean) / (2.0 * var)) / std::sqrt(2.0 * kPi * var);
    }

    double gauss2(const Vec2 &x, const Vec2 &m, const Mat2 &S)
    {
        const double det = S(0, 0) * S(1, 1) - S(0, 1) * S(1, 0);
        const Vec2 r = x - m;
        // Explicit 2x2 inverse.
        const double q = (S(1, 1) * r.x() * r.x() - (S(0, 1) + S(1, 0)) * r.x() * r.y() + S(0, 0) * r.y() * r.y()) / det;
        return std::exp(-0.5 * q) / (2.0 * kPi * std::sqrt(det));
    }
} // namespace

TEST(ObsModel, ComponentDensityMatchesExplicitGaussians)
{
    PropagationParams p = PropagationParams::make(1, 2);
    p.beta[0][1] = -38.0;
    p.alpha[0][1] = -21.0;
    p.sigma_s2[0][1] = 5.0;
    p.beta[1][1] = -47.0;
    p.alpha[1][1] = -31.0;
    p.sigma_s2[1][1] = 12.0;
    p.sigma_theta2 = {0.02, 0.7};
    p.m = {Vec2(-55.0, -22.0), Vec2(-63.0, -15.0)};
    p.upsilon[0] << 30.0, 4.0, 4.0, 9.0;
    p.upsilon[1] << 50.0, -6.0, -6.0, 14.0;
    p.pi[1] = {0.3, 0.7};

    RadioSignature s;
    s.ap_id = 1;
    s.time_index = 0;
    s.rss_db = -58.0;
    s.aod_rad = 0.1;
    s.spread_db = -19.0;
    const Vec2 ap(0.0, 0.0), pos(3.0, -0.5); // true azimuth just below 2 pi
    const double d = pos.norm();
    const double phi = std::atan2(-0.5, 3.0);
    const EmissionModel em(p);
    const auto c = em.component_logliks(s, pos, ap);
    for (int k = 0; k < 2; ++k)
    {
        const double ref = gauss1(s.rss_db, p.beta[k][1] + p.alpha[k][1] * std::log10(d), p.sigma_s2[k][1]) *
                           gauss1(s.aod_rad, phi, p.sigma_theta2[k]) *
                           gauss2(Vec2(s.rss_db, s.spread_db), p.m[k], p.upsilon[k]);
        EXPECT_NEAR(c[k], std::log(ref), 1e-10);
    }
    const double mix = std::log(0.3 * std::exp(c[0]) + 0.7 * std::exp(c[1]));
    EXPECT_NEAR(em.loglik(s, pos, ap), mix, 1e-10);
    EXPECT_NEAR(emission_loglik(s, pos, ap, p), mix, 1e-10);
    EXPECT_THROW(em.component_logliks(s, ap, ap), std::domain_error);
}

TEST(ObsModel, ValidateRejectsBadParameters)
{
    PropagationParams p = PropagationParams::make(2, 1);
    EXPECT_NO_THROW(p.validate());
    auto bad = p;
    bad.sigma_s2[1][0] = 0.0;
    EXPECT_THROW(bad.validate(), ParameterError);
    bad = p;
    bad.upsilon[0] << 1.0, 2.0, 2.0, 1.0; // indefinite
    EXPECT_THROW(bad.validate(), ParameterError);
    bad = p;
    bad.sigma_u2 = -1.0;
    EXPECT_THROW(bad.validate(), ParameterError);
    bad = p;
    bad.pi.pop_back();
    EXPECT_THROW(bad.validate(), ParameterError);
    EXPECT_THROW(PropagationParams::make(0, 1), ParameterError);
}

TEST(ObsModel, NlosNeighbourhoodByDefinition)
{
    const std::vector<Vec2> traj{Vec2(0, 0), Vec2(1, 0), Vec2(2.5, 0), Vec2(0.5, 0.5)};
    // Q = 1; sample 2 is LOS.
    const std::vector<std::uint8_t> nlos{1, 1, 0, 1};
    RegularizationConfig cfg;
    cfg.neighborhood_radius_m = 1.2;
    EXPECT_EQ(nlos_neighborhood(0, 0, traj, nlos, 1, cfg), (std::vector<int>{1, 3}));
    EXPECT_EQ(nlos_neighborhood(1, 0, traj, nlos, 1, cfg), (std::vector<int>{0, 3}));
    EXPECT_TRUE(nlos_neighborhood(2, 0, traj, nlos, 1, cfg).empty());
    EXPECT_THROW(nlos_neighborhood(4, 0, traj, nlos, 1, cfg), std::domain_error);
}

TEST(ObsModel, RegularizerAveragesGaussianResiduals)
{
    auto inst = blindmap::testing::random_decoding_instance(5, 6, 4, 1);
    auto &p = inst.params;
    std::fill(p.nlos.begin(), p.nlos.end(), 1);
    p.sigma_u2 = 0.8;
    const std::vector<Vec2> traj{Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(4, 0)};
    RegularizationConfig cfg;
    cfg.neighborhood_radius_m = 2.0;
    cfg.bandwidth_hz = inst.obs.bandwidth_hz;
    auto &csi = *inst.obs.csi;
    const double got = spatial_reg_loglik(0, 0, traj, csi, p, cfg);
    // Neighbours of t = 0 are 1 and 2.
    double ref = 0.0;
    for (int tau : {1, 2})
    {
        const double r = csi(0, tau, 0) - (traj[0] - traj[tau]).norm();
        ref += std::log(gauss1(r, 0.0, 0.8));
    }
    EXPECT_NEAR(got, ref / 2.0, 1e-12);
    EXPECT_EQ(spatial_reg_loglik(3, 0, traj, csi, p, cfg), 0.0);
}

TEST(ObsModel, CsiCacheMemoizes)
{
    auto inst = blindmap::testing::random_decoding_instance(9, 4, 5, 2);
    auto &csi = *inst.obs.csi;
    const int a = csi(0, 3, 1);
    const std::size_t n = csi.evaluations();
    EXPECT_EQ(csi(0, 3, 1), a);
    EXPECT_EQ(csi.evaluations(), n);
    EXPECT_THROW(csi(0, 5, 0), std::domain_error);
}

TEST(ObsModel, ObjectiveTermsSumAndAdjacency)
{
    auto inst = blindmap::testing::random_decoding_instance(11, 8, 4);
    RegularizationConfig cfg;
    cfg.eta = 0.5;
    cfg.bandwidth_hz = inst.obs.bandwidth_hz;
    std::vector<int> path{0, 0, 1, 1};
    const auto terms = objective_terms(path, inst.obs, inst.params, inst.mobility, inst.graph, cfg);
    EXPECT_NEAR(terms.total, terms.emission + terms.transition + 0.5 * terms.regularization, 1e-9);
    EXPECT_DOUBLE_EQ(total_objective(path, inst.obs, inst.params, inst.mobility, inst.graph, cfg), terms.total);

    int far = -1;
    for (int j = 0; j < inst.graph.size(); ++j)
        if (!inst.graph.adjacent(0, j))
            far = j;
    ASSERT_GE(far, 0);
    path = {0, far, far, far};
    EXPECT_EQ(total_objective(path, inst.obs, inst.params, inst.mobility, inst.graph, cfg),
              -std::numeric_limits<double>::infinity());
    path = {0, 0, 0, 999};
    EXPECT_THROW(total_objective(path, inst.obs, inst.params, inst.mobility, inst.graph, cfg), std::domain_error);
}
