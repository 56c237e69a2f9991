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
#include "blindmap/sim.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace blindmap::bounds
{
    namespace
    {
        constexpr double kInf = std::numeric_limits<double>::infinity();

        /// N_t (N_t^2 - 1), the array aperture factor.
        double aperture_factor(int n)
        {
            const double nd = static_cast<double>(n);
            return nd * (nd * nd - 1.0);
        }

        /// ||d||^2 I - d d^T
        Mat2 perp_outer(const Vec2 &d) { return d.squaredNorm() * Mat2::Identity() - d * d.transpose(); }

        /// 2 v^T l I - l v^T - v l^T
        Mat2 cross_term(const Vec2 &l, const Vec2 &v)
        {
            return 2.0 * v.dot(l) * Mat2::Identity() - l * v.transpose() - v * l.transpose();
        }

        /// inf over t >= 1 of ||l + t v|| / t, shrunk slightly so the inequality is strict.
        double rho_for(const Vec2 &l, const Vec2 &v)
        {
            const double ll = l.squaredNorm();
            double s = ll > 0.0 ? -l.dot(v) / ll : 0.0;
            double inf_val = v.norm();
            if (s > 0.0)
            {
                s = std::min(s, 1.0);
                inf_val = (s * l + v).norm();
            }
            return inf_val * (1.0 - 1e-9);
        }
    } // namespace

    double RectilinearScenario::d_min() const
    {
        double best = kInf;
        for (int t = 1; t <= T; ++t)
        {
            const Vec2 p = position(t);
            for (const Vec2 &o : ap_positions)
                best = std::min(best, (p - o).norm());
        }
        return best;
    }

    void RectilinearScenario::validate() const
    {
        if (T < 1)
            throw std::domain_error("RectilinearScenario: T must be positive");
        if (ap_positions.empty())
            throw std::domain_error("RectilinearScenario: no access points");
        if (!(sigma_theta > 0.0))
            throw std::domain_error("RectilinearScenario: sigma_theta must be positive");
        if (!(d_min() > 1e-12))
            throw std::domain_error("RectilinearScenario: trajectory passes through an access point");
    }

    double aod_loglik(const RectilinearScenario &scn, const Psi &psi, const AodGrid &theta)
    {
        if (theta.rows() != scn.T || theta.cols() != scn.Q())
            throw std::domain_error("aod_loglik: observation grid does not match T x Q");
        const Vec2 x(psi(0), psi(1));
        const Vec2 v(psi(2), psi(3));
        const double s2 = scn.sigma_theta * scn.sigma_theta;
        const double c = -std::log(kTwoPi * s2);
        double f = 0.0;
        for (int t = 1; t <= scn.T; ++t)
        {
            const Vec2 p = x + t * v;
            for (int q = 0; q < scn.Q(); ++q)
            {
                const double r = wrap_to_pi(theta(t - 1, q) - azimuth(scn.ap_positions[q], p));
                f += c - r * r / (2.0 * s2);
            }
        }
        return f;
    }

    double aod_loglik(const RectilinearScenario &scn, const AodGrid &theta)
    {
        return aod_loglik(scn, make_psi(scn.x0, scn.v), theta);
    }

    AodGrid sample_aod_grid(const RectilinearScenario &scn, double sigma_theta, std::uint64_t seed)
    {
        sim::Rng rng(seed);
        AodGrid g(scn.T, scn.Q());
        for (int t = 1; t <= scn.T; ++t)
            for (int q = 0; q < scn.Q(); ++q)
                g(t - 1, q) = sim::sample_aod(scn.position(t), scn.ap_positions[q], sigma_theta, rng);
        return g;
    }

    Eigen::Vector4d azimuth_gradient(const Vec2 &l, int t, const Vec2 &v)
    {
        const Vec2 d = l + t * v;
        const double n2 = d.squaredNorm();
        if (!(n2 > 0.0))
            throw std::domain_error("azimuth_gradient: position coincides with the access point");
        const Vec2 g(-d.y() / n2, d.x() / n2);
        return {g.x(), g.y(), t * g.x(), t * g.y()};
    }

    FisherMatrix fim(const RectilinearScenario &scn)
    {
        scn.validate();
        const double s2 = scn.sigma_theta * scn.sigma_theta;
        FisherMatrix F;
        for (int q = 0; q < scn.Q(); ++q)
        {
            const Vec2 l = scn.x0 - scn.ap_positions[q];
            for (int t = 1; t <= scn.T; ++t)
            {
                const Vec2 d = l + t * scn.v;
                const double d4 = d.squaredNorm() * d.squaredNorm();
                const Mat2 B = perp_outer(d) / (s2 * d4);
                const double td = static_cast<double>(t);
                F.full.block<2, 2>(0, 0) += B;
                F.full.block<2, 2>(0, 2) += td * B;
                F.full.block<2, 2>(2, 0) += td * B;
                F.full.block<2, 2>(2, 2) += td * td * B;
            }
        }
        F.block_x = F.full.block<2, 2>(0, 0);
        F.block_v = F.full.block<2, 2>(2, 2);
        return F;
    }

    double single_snapshot_angle_crlb(double d, double phi, double G1, double sigma_n2, int n_antennas)
    {
        if (n_antennas < 2)
            throw std::domain_error("single_snapshot_angle_crlb: need at least two antennas");
        const double c = std::cos(phi);
        if (std::abs(c) < 1e-12)
            return kInf;
        return d * d * sigma_n2 / (G1 * aperture_factor(n_antennas) * c * c);
    }

    std::vector<LimitedBound> crlb_limited_series(const RectilinearScenario &scn, std::span<const int> T_grid)
    {
        if (scn.ap_positions.empty())
            throw std::domain_error("crlb_limited: no access points");
        for (std::size_t i = 0; i < T_grid.size(); ++i)
            if (T_grid[i] < 1 || (i > 0 && T_grid[i] <= T_grid[i - 1]))
                throw std::domain_error("crlb_limited: T grid must be positive and increasing");

        const int Q = scn.Q();
        const Vec2 &v = scn.v;
        std::vector<Vec2> l(Q);
        double rho = kInf;
        for (int q = 0; q < Q; ++q)
        {
            l[q] = scn.x0 - scn.ap_positions[q];
            rho = std::min(rho, rho_for(l[q], v));
        }

        std::vector<std::array<double, 5>> s(Q, std::array<double, 5>{});
        double dmin = kInf;
        std::vector<LimitedBound> out;
        out.reserve(T_grid.size());
        int t = 0;
        for (const int T : T_grid)
        {
            for (++t; t <= T; ++t)
            {
                const double td = static_cast<double>(t);
                for (int q = 0; q < Q; ++q)
                {
                    const Vec2 d = l[q] + td * v;
                    const double n2 = d.squaredNorm();
                    dmin = std::min(dmin, std::sqrt(n2));
                    double w = 1.0 / (n2 * n2);
                    for (int n = 0; n < 5; ++n, w *= td)
                        s[q][n] += w;
                }
            }
            --t;
            if (!(dmin > 1e-12))
                throw std::domain_error("crlb_limited: trajectory passes through an access point");

            LimitedBound b;
            b.T = T;
            b.C0 = scn.G1 * aperture_factor(scn.n_antennas) / (scn.sigma_n2 * dmin * dmin);
            const Mat2 Pv = perp_outer(v);
            double proj = 0.0;
            const double vn2 = v.squaredNorm();
            for (int q = 0; q < Q; ++q)
            {
                const Mat2 Pl = perp_outer(l[q]);
                const Mat2 X = cross_term(l[q], v);
                b.A_x += s[q][0] * Pl + s[q][1] * X + s[q][2] * Pv;
                b.A_v += s[q][2] * Pl + s[q][3] * X + s[q][4] * Pv;
                const Vec2 pl = vn2 > 0.0 ? Vec2(l[q] - v * (v.dot(l[q]) / vn2)) : l[q];
                proj += s[q][2] * pl.squaredNorm();
            }
            const Mat2 Fx = b.C0 * b.A_x;
            b.delta_x = std::abs(Fx.determinant()) > 0.0 ? Fx.inverse().trace() : kInf;
            Eigen::SelfAdjointEigenSolver<Mat2> es(b.A_v);
            const double lmin = es.eigenvalues()(0);
            b.delta_v = lmin > 0.0 ? 1.0 / (b.C0 * lmin) : kInf;
            b.c_v = proj > 0.0 ? 1.0 / (b.C0 * proj) : kInf;
            b.s = s;
            b.rho = rho;
            const double r4 = rho * rho * rho * rho;
            const double Td = static_cast<double>(T);
            for (int n = 0; n < 3; ++n)
                b.tail_bound[n] = std::pow(Td, n - 3) / ((3.0 - n) * r4);
            out.push_back(std::move(b));
        }
        return out;
    }

    LimitedBound crlb_limited(const RectilinearScenario &scn)
    {
        const int T[1] = {scn.T};
        return crlb_limited_series(scn, T).front();
    }

    UnlimitedAsymptote crlb_unlimited_asymptote(double r0, double R, double kappa_density, double G1,
                                                double sigma_n2, int n_antennas)
    {
        if (!(r0 > 0.0 && r0 < R))
            throw std::domain_error("crlb_unlimited_asymptote: need 0 < r0 < R");
        if (!(kappa_density > 0.0))
            throw std::domain_error("crlb_unlimited_asymptote: density must be positive");
        if (n_antennas < 2)
            throw std::domain_error("crlb_unlimited_asymptote: need at least two antennas");
        const double inv_R2 = std::isinf(R) ? 0.0 : 1.0 / (R * R);
        const double denom = kappa_density * kPi * (1.0 / (r0 * r0) - inv_R2) * G1 * aperture_factor(n_antennas);
        return {16.0 * sigma_n2 / denom, 96.0 * sigma_n2 / denom};
    }

    double ppp_fisher_density(double kappa_density, double r0, double R)
    {
        if (!(r0 > 0.0 && r0 < R))
            throw std::domain_error("ppp_fisher_density: need 0 < r0 < R");
        const double inv_R2 = std::isinf(R) ? 0.0 : 1.0 / (R * R);
        return kappa_density * kPi / 8.0 * (1.0 / (r0 * r0) - inv_R2);
    }

    MonteCarloEstimate ppp_fisher_density_mc(double kappa_density, double r0, double R, int n_draws,
                                             std::uint64_t seed)
    {
        if (n_draws < 2)
            throw std::domain_error("ppp_fisher_density_mc: need at least two draws");
        sim::Rng rng(seed);
        double sum = 0.0;
        double sum2 = 0.0;
        for (int i = 0; i < n_draws; ++i)
        {
            double acc = 0.0;
            for (const Vec2 &o : sim::sample_ppp_aps(kappa_density, R, r0, rng))
            {
                const double r2 = o.squaredNorm();
                acc += o.x() * o.x() * o.y() * o.y() / (r2 * r2 * r2 * r2);
            }
            sum += acc;
            sum2 += acc * acc;
        }
        MonteCarloEstimate e;
        e.draws = n_draws;
        e.mean = sum / n_draws;
        const double var = std::max(0.0, (sum2 - n_draws * e.mean * e.mean) / (n_draws - 1));
        e.std_error = std::sqrt(var / n_draws);
        return e;
    }

    cdouble theoretical_Ru(double u, double d, double bandwidth_hz, int M, int L, double C_d)
    {
        if (M < 8)
            throw std::domain_error("theoretical_Ru: need M >= 8");
        const double omega = bandwidth_hz * d / kSpeedOfLight;
        cdouble acc = 0.0;
        for (int m = 0; m < M; ++m)
        {
            const double f = kTwoPi * m / M;
            acc += bessel_j0(f * omega) * std::polar(1.0, f * u);
        }
        return C_d * L * acc / static_cast<double>(M);
    }

    std::vector<cdouble> theoretical_Ru_grid(double d, double bandwidth_hz, int M, int L, double C_d)
    {
        if (M < 8)
            throw std::domain_error("theoretical_Ru: need M >= 8");
        const double omega = bandwidth_hz * d / kSpeedOfLight;
        std::vector<double> j0(M);
        for (int m = 0; m < M; ++m)
            j0[m] = bessel_j0(kTwoPi * m / M * omega);
        std::vector<cdouble> out(M);
        for (int u = 0; u < M; ++u)
        {
            cdouble acc = 0.0;
            for (int m = 0; m < M; ++m)
                acc += j0[m] * std::polar(1.0, kTwoPi * ((static_cast<long>(m) * u) % M) / M);
            out[u] = C_d * L * acc / static_cast<double>(M);
        }
        return out;
    }

    int theoretical_Ru_peak(double d, double bandwidth_hz, int M)
    {
        const auto r = theoretical_Ru_grid(d, bandwidth_hz, M, 1, 1.0);
        int best = 0;
        double best_mag = -1.0;
        for (int u = 0; u <= M / 2; ++u)
        {
            const double mag = std::max(std::abs(r[u]), std::abs(r[(M - u) % M]));
            if (mag > best_mag)
            {
                best_mag = mag;
                best = u;
            }
        }
        return best;
    }

} // namespace blindmap::bounds
