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

#include "blindmap/features.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <fstream>
#include <iomanip>
#include <limits>

namespace blindmap::features
{
    double rss(const Eigen::MatrixXcd &H)
    {
        const double power = H.squaredNorm();
        if (!(power > 0.0))
            throw std::domain_error("rss: all-zero channel");
        return 10.0 * std::log10(power);
    }

    std::vector<double> aod_grid_uniform(double step)
    {
        if (!(step > 0.0))
            throw std::domain_error("aod grid step must be positive");
        const int k_max = static_cast<int>(std::ceil(kPi / 2.0 / step)) - 1;
        std::vector<double> out;
        for (int k = -k_max; k <= k_max; ++k)
            if (std::abs(k * step) < kPi / 2.0)
                out.push_back(k * step);
        return out;
    }

    std::vector<double> aod_grid_sine(int half_points)
    {
        if (half_points < 2)
            throw std::domain_error("aod sine grid needs at least 2 points per side");
        std::vector<double> out;
        for (int k = -(half_points - 1); k <= half_points - 1; ++k)
            out.push_back(std::asin(static_cast<double>(k) / half_points));
        return out;
    }

    namespace
    {
        Eigen::MatrixXcd noise_subspace(const Eigen::MatrixXcd &H)
        {
            const Eigen::Index Nt = H.rows();
            if (Nt < 2)
                throw std::domain_error("aod_estimate: need at least 2 antennas");
            const Eigen::MatrixXcd R = (H * H.adjoint()) / static_cast<double>(H.cols());
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(R);
            if (eig.info() != Eigen::Success)
                throw NumericalError("aod_estimate: eigendecomposition failed");
            const double top = eig.eigenvalues()(Nt - 1);
            if (!(top > 1e-300) || !std::isfinite(top))
                throw std::domain_error("aod_estimate: degenerate covariance");
            return eig.eigenvectors().leftCols(Nt - 1);
        }

        Eigen::VectorXcd steering_unchecked(double sine, const sim::ArrayGeometry &geom)
        {
            const double k = kTwoPi / geom.wavelength() * geom.spacing_m * sine;
            Eigen::VectorXcd a(geom.n_antennas);
            for (int n = 0; n < geom.n_antennas; ++n)
                a[n] = std::polar(1.0, -k * n);
            return a;
        }
    } // namespace

    std::vector<double> music_pseudospectrum(const Eigen::MatrixXcd &H, const sim::ArrayGeometry &geom,
                                             const std::vector<double> &angles)
    {
        if (H.rows() != geom.n_antennas)
            throw std::domain_error("aod_estimate: channel rows do not match the array");
        const Eigen::MatrixXcd U = noise_subspace(H);
        std::vector<double> p(angles.size());
        for (std::size_t i = 0; i < angles.size(); ++i)
        {
            const double denom = (U.adjoint() * steering_unchecked(std::sin(angles[i]), geom)).squaredNorm();
            p[i] = 1.0 / std::max(denom, 1e-300);
        }
        return p;
    }

    double aod_estimate_on_grid(const Eigen::MatrixXcd &H, const sim::ArrayGeometry &geom,
                                const std::vector<double> &angles)
    {
        if (angles.empty())
            throw std::domain_error("aod_estimate: empty grid");
        const auto p = music_pseudospectrum(H, geom, angles);
        std::size_t best = 0;
        for (std::size_t i = 1; i < p.size(); ++i)
            if (p[i] > p[best])
                best = i;
        return wrap_to_2pi(angles[best] + geom.reference_angle);
    }

    double aod_estimate(const Eigen::MatrixXcd &H, const sim::ArrayGeometry &geom, double grid_step)
    {
        return aod_estimate_on_grid(H, geom, aod_grid_uniform(grid_step));
    }

    double delay_spread_feature(const Eigen::MatrixXcd &H, SpreadNorm norm)
    {
        double scale = 0.0;
        if (norm == SpreadNorm::frobenius)
            scale = H.norm();
        else if (H.size() > 0)
            scale = Eigen::JacobiSVD<Eigen::MatrixXcd>(H).singularValues()(0);
        if (!(scale > 0.0))
            return kSpreadFloorDb;
        const Eigen::ArrayXXd mag = H.array().abs() / scale;
        const double mean = mag.mean();
        const double var = (mag - mean).square().mean();
        const double floor_lin = std::pow(10.0, kSpreadFloorDb / 10.0);
        if (!(var > floor_lin))
            return kSpreadFloorDb;
        return 10.0 * std::log10(var);
    }

    std::vector<double> csi_lag_profile(const Eigen::MatrixXcd &Hi, const Eigen::MatrixXcd &Hj)
    {
        if (Hi.rows() != Hj.rows() || Hi.cols() != Hj.cols())
            throw std::domain_error("csi_distance: shape mismatch");
        const Eigen::Index Nt = Hi.rows();
        const Eigen::Index M = Hi.cols();
        // c_m = sum over antennas of h_i conj(h_j)
        const Eigen::VectorXcd c = (Hi.array() * Hj.array().conjugate()).colwise().sum().transpose();
        std::vector<cdouble> twiddle(static_cast<std::size_t>(M));
        for (Eigen::Index k = 0; k < M; ++k)
            twiddle[k] = std::polar(1.0, kTwoPi * static_cast<double>(k) / static_cast<double>(M));
        std::vector<double> out(static_cast<std::size_t>(M));
        const double norm = 1.0 / static_cast<double>(Nt * M);
        for (Eigen::Index u = 0; u < M; ++u)
        {
            cdouble acc = 0.0;
            for (Eigen::Index m = 0; m < M; ++m)
                acc += c[m] * twiddle[(m * u) % M];
            out[u] = std::abs(acc) * norm;
        }
        return out;
    }

    int csi_distance(const Eigen::MatrixXcd &Hi, const Eigen::MatrixXcd &Hj, bool half_range)
    {
        const auto p = csi_lag_profile(Hi, Hj);
        const std::size_t limit = half_range ? p.size() / 2 + 1 : p.size();
        std::size_t best = 0;
        for (std::size_t u = 1; u < limit && u < p.size(); ++u)
            if (p[u] > p[best])
                best = u;
        return static_cast<int>(best);
    }

    Eigen::MatrixXd padp_profile(const Eigen::MatrixXcd &H, const sim::ArrayGeometry &geom, int dict_size)
    {
        if (H.rows() != geom.n_antennas)
            throw std::domain_error("padp: channel rows do not match the array");
        const int N = dict_size > 0 ? dict_size : 8 * geom.n_antennas;
        const Eigen::Index M = H.cols();
        Eigen::MatrixXcd D(geom.n_antennas, N);
        for (int k = 0; k < N; ++k)
            D.col(k) = steering_unchecked(-1.0 + 2.0 * k / N, geom);
        Eigen::MatrixXcd F(M, M);
        const double s = 1.0 / std::sqrt(static_cast<double>(M));
        for (Eigen::Index k = 0; k < M; ++k)
            for (Eigen::Index m = 0; m < M; ++m)
                F(k, m) = std::polar(s, -kTwoPi * static_cast<double>((k * m) % M) / static_cast<double>(M));
        const Eigen::MatrixXd G = (D.adjoint() * H * F.adjoint()).cwiseAbs();
        const double n = G.norm();
        if (!(n > 0.0))
            return G;
        return G / n;
    }

    double padp_distance(const Eigen::MatrixXcd &Hi, const Eigen::MatrixXcd &Hj, const sim::ArrayGeometry &geom,
                         int dict_size)
    {
        if (Hi.rows() != Hj.rows() || Hi.cols() != Hj.cols())
            throw std::domain_error("padp_distance: shape mismatch");
        return (padp_profile(Hi, geom, dict_size) - padp_profile(Hj, geom, dict_size)).norm();
    }

    std::vector<RadioSignature> extract_signatures(const Dataset &ds, const ExtractOptions &options)
    {
        const auto grid = aod_grid_sine(options.aod_half_points);
        std::vector<RadioSignature> out(static_cast<std::size_t>(ds.T()) * ds.Q());
        for (int t = 0; t < ds.T(); ++t)
            for (int q = 0; q < ds.Q(); ++q)
            {
                const Eigen::MatrixXcd &H = ds.channel(t, q);
                RadioSignature &s = out[ds.index(t, q)];
                s.ap_id = q;
                s.time_index = t;
                s.rss_db = rss(H);
                s.aod_rad = aod_estimate_on_grid(H, ds.scene.env.aps[q].array, grid);
                s.spread_db = delay_spread_feature(H, options.spread_norm);
            }
        return out;
    }

    void write_feature_csv(const std::vector<RadioSignature> &sigs, const std::filesystem::path &path)
    {
        std::ofstream out(path);
        if (!out)
            throw ConfigError("cannot write " + path.string());
        out << std::setprecision(std::numeric_limits<double>::max_digits10);
        out << "t,q,rss_db,aod_rad,spread_db\n";
        for (const auto &s : sigs)
            out << s.time_index << ',' << s.ap_id << ',' << s.rss_db << ',' << s.aod_rad << ',' << s.spread_db << '\n';
    }

    void write_pairwise_csv(const std::vector<CsiPair> &pairs, const std::filesystem::path &path)
    {
        std::ofstream out(path);
        if (!out)
            throw ConfigError("cannot write " + path.string());
        out << "i,j,q,u_hat\n";
        for (const auto &p : pairs)
            out << p.i << ',' << p.j << ',' << p.q << ',' << p.u_hat << '\n';
    }

} // namespace blindmap::features
