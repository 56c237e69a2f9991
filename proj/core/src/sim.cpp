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

#include "blindmap/sim.hpp"
#include "blindmap/log.hpp"

#include <algorithm>
#include <sstream>

namespace blindmap::sim
{
    namespace
    {
        constexpr double kRearPanelMargin = 1e-9;

        Rng cluster_rng(std::uint64_t seed, int ap_id, int cluster_id)
        {
            std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                              static_cast<std::uint32_t>(ap_id), static_cast<std::uint32_t>(cluster_id), 0x6d6cu};
            return Rng(seq);
        }

        Mat2 rotation(double angle)
        {
            Mat2 r;
            r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
            return r;
        }

        std::vector<int> surface_chain(const ImageCluster &c)
        {
            std::vector<int> out;
            for (const auto &e : c.chain)
                if (e.kind == ChainElement::Kind::surface)
                    out.push_back(e.index);
            return out;
        }

        bool leg_clear(const Vec2 &p, const Vec2 &q, const EnvironmentModel &env, int skip_a, int skip_b)
        {
            for (int s = 0; s < static_cast<int>(env.surfaces.size()); ++s)
            {
                if (s == skip_a || s == skip_b)
                    continue;
                if (blocks(p, q, env.surfaces[s].segment))
                    return false;
            }
            return true;
        }

        // Walks a specular chain backwards from the receiver to the AP. Every
        // unfolded leg must cross its generating surface inside the segment and
        // every physical leg must be free of other surfaces.
        bool specular_backtrack(const Vec2 &receiver, const std::vector<int> &chain, const Vec2 &ap,
                                const EnvironmentModel &env)
        {
            std::vector<Vec2> images{ap};
            for (int s : chain)
                images.push_back(reflect_point(images.back(), env.surfaces[s].segment));

            Vec2 cur = receiver;
            int prev = -1;
            for (int i = static_cast<int>(chain.size()); i >= 1; --i)
            {
                const int s = chain[i - 1];
                const auto hit = intersect(cur, images[i], env.surfaces[s].segment);
                if (!hit)
                    return false;
                const double along = hit->t_path * (images[i] - cur).norm();
                if (along <= 1e-9)
                    return false;
                if (!leg_clear(cur, hit->point, env, s, prev))
                    return false;
                cur = hit->point;
                prev = s;
            }
            return leg_clear(cur, ap, env, prev, -1);
        }

        // Maps a direction of the last unfolded leg back to the departure direction at the AP.
        Vec2 unfold_departure(Vec2 dir, const std::vector<int> &chain, const EnvironmentModel &env)
        {
            for (auto it = chain.rbegin(); it != chain.rend(); ++it)
                dir = reflect_direction(dir, env.surfaces[*it].segment);
            return dir;
        }

        double nominal_spread(const ImageCluster &c, const Vec2 &ap)
        {
            return c.angular_spread * std::max(1.0, (c.center - ap).norm());
        }
    } // namespace

    void ArrayGeometry::validate() const
    {
        if (n_antennas < 2)
            throw ParameterError("array needs at least 2 antennas");
        if (!(spacing_m > 0.0))
            throw ParameterError("antenna spacing must be positive");
        if (!(carrier_hz > 0.0))
            throw ParameterError("carrier frequency must be positive");
        if (!(reference_angle >= 0.0 && reference_angle < kTwoPi))
            throw ParameterError("array reference angle must lie in [0, 2pi)");
    }

    void OfdmConfig::validate(int n_antennas) const
    {
        if (n_subcarriers <= n_antennas)
            throw ParameterError("number of subcarriers must exceed the number of antennas");
        if (!(bandwidth_hz > 0.0))
            throw ParameterError("bandwidth must be positive");
    }

    void MobilityParams::validate() const
    {
        if (!(gamma > 0.0 && gamma <= 1.0))
            throw ParameterError("gamma must lie in (0, 1]");
        if (!(slot_s > 0.0))
            throw ParameterError("slot duration must be positive");
        if (!(sigma_v >= 0.0))
            throw ParameterError("sigma_v must be non-negative");
    }

    void EnvironmentModel::validate() const
    {
        for (const auto &s : surfaces)
        {
            if (!(s.segment.length() > 0.0))
                throw ParameterError("degenerate surface of zero length");
            if (!(s.absorption > 0.0 && s.absorption < 1.0))
                throw ParameterError("surface absorption must lie in (0, 1)");
            if (!(s.scattering_spread >= 0.0))
                throw ParameterError("scattering spread must be non-negative");
        }
        for (const auto &sc : scatterers)
            if (!(sc.max_bend >= 0.0) || !(sc.attenuation > 0.0 && sc.attenuation <= 1.0))
                throw ParameterError("invalid scatterer parameters");
        if (max_reflection_order < 0)
            throw ParameterError("max_reflection_order must be non-negative");
        if (n_virtual_tx < 1)
            throw ParameterError("n_virtual_tx must be at least 1");
        for (const auto &ap : aps)
        {
            ap.array.validate();
            if (region.size() >= 3 && !inside_polygon(ap.position, region, 1e-6))
                throw ParameterError("access point outside the region");
        }
    }

    EnvironmentModel make_rectangular_room(double width, double height, double absorption, double scattering_spread)
    {
        if (!(width > 0.0 && height > 0.0))
            throw ParameterError("room dimensions must be positive");
        EnvironmentModel env;
        env.region = rectangle_polygon(Vec2(0.0, 0.0), Vec2(width, height));
        for (std::size_t i = 0; i < 4; ++i)
            env.surfaces.push_back({Segment{env.region[i], env.region[(i + 1) % 4]}, absorption, scattering_spread});
        return env;
    }

    Eigen::VectorXcd steering_vector(double aod_relative, const ArrayGeometry &geom)
    {
        if (!(std::abs(aod_relative) < kPi / 2.0))
            throw std::domain_error("steering_vector: angle outside (-pi/2, pi/2)");
        const double k = kTwoPi / geom.wavelength() * geom.spacing_m * std::sin(aod_relative);
        Eigen::VectorXcd a(geom.n_antennas);
        for (int n = 0; n < geom.n_antennas; ++n)
            a[n] = std::polar(1.0, -k * n);
        return a;
    }

    MirrorLattice build_mirror_lattice(const EnvironmentModel &env, int ap_id)
    {
        if (env.max_reflection_order < 0)
            throw std::domain_error("build_mirror_lattice: negative reflection order");
        if (ap_id < 0 || ap_id >= static_cast<int>(env.aps.size()))
            throw std::domain_error("build_mirror_lattice: unknown access point");

        MirrorLattice lat;
        lat.ap_id = ap_id;
        lat.ap_position = env.aps[ap_id].position;

        auto finish = [&](ImageCluster &c) {
            c.id = static_cast<int>(lat.clusters.size());
            Rng rng = cluster_rng(env.cluster_seed, ap_id, c.id);
            std::normal_distribution<double> n01;
            std::uniform_real_distribution<double> uphase(0.0, kTwoPi);
            for (int k = 0; k < c.n_virtual_tx; ++k)
            {
                const double zx = n01(rng);
                const double zy = n01(rng);
                c.jitter.emplace_back(zx, zy);
                c.phases.push_back(uphase(rng));
            }
            lat.clusters.push_back(std::move(c));
        };

        ImageCluster direct;
        direct.kind = ClusterKind::direct;
        direct.center = lat.ap_position;
        finish(direct);

        std::size_t level_begin = 0;
        for (int order = 1; order <= env.max_reflection_order; ++order)
        {
            const std::size_t level_end = lat.clusters.size();
            for (std::size_t p = level_begin; p < level_end; ++p)
            {
                if (lat.clusters[p].kind == ClusterKind::diffraction_arc)
                    continue; // arcs are terminal
                const ImageCluster parent = lat.clusters[p];
                const int last_surface = parent.chain.empty() || parent.chain.back().kind != ChainElement::Kind::surface
                                             ? -1
                                             : parent.chain.back().index;
                for (int s = 0; s < static_cast<int>(env.surfaces.size()); ++s)
                {
                    if (s == last_surface)
                        continue;
                    ImageCluster c;
                    c.parent = parent.id;
                    c.kind = ClusterKind::mirror;
                    c.center = reflect_point(parent.center, env.surfaces[s].segment);
                    c.n_virtual_tx = env.n_virtual_tx;
                    c.angular_spread = env.surfaces[s].scattering_spread;
                    c.chain = parent.chain;
                    c.chain.push_back({ChainElement::Kind::surface, s});
                    c.amplitude_factor = parent.amplitude_factor * (1.0 - env.surfaces[s].absorption);
                    finish(c);
                }
                for (int d = 0; d < static_cast<int>(env.scatterers.size()); ++d)
                {
                    const Scatterer &sc = env.scatterers[d];
                    const double radius = (sc.position - parent.center).norm();
                    if (radius <= 0.0)
                        continue;
                    ImageCluster c;
                    c.parent = parent.id;
                    c.kind = ClusterKind::diffraction_arc;
                    c.center = sc.position;
                    c.arc_radius = radius;
                    c.n_virtual_tx = env.n_virtual_tx;
                    c.angular_spread = sc.spread;
                    c.chain = parent.chain;
                    c.chain.push_back({ChainElement::Kind::scatterer, d});
                    c.amplitude_factor = parent.amplitude_factor * sc.attenuation;
                    finish(c);
                }
            }
            level_begin = level_end;
        }

        for (std::size_t i = 1; i < lat.clusters.size(); ++i)
        {
            const auto &a = lat.clusters[i];
            if (a.kind != ClusterKind::mirror)
                continue;
            for (std::size_t j = i + 1; j < lat.clusters.size(); ++j)
            {
                const auto &b = lat.clusters[j];
                if (b.kind != ClusterKind::mirror)
                    continue;
                const double limit = 2.0 * std::max(nominal_spread(a, lat.ap_position), nominal_spread(b, lat.ap_position));
                if ((a.center - b.center).norm() < limit)
                {
                    std::ostringstream msg;
                    msg << "virtual-TX clusters " << a.id << " and " << b.id << " of AP " << ap_id
                        << " overlap (center distance " << (a.center - b.center).norm() << " m)";
                    log_message(LogLevel::debug, msg.str());
                }
            }
        }
        return lat;
    }

    Vec2 parent_image_of(const ImageCluster &cluster, const EnvironmentModel &env)
    {
        if (cluster.chain.empty() || cluster.chain.back().kind != ChainElement::Kind::surface)
            throw std::domain_error("parent_image_of: cluster is not a specular image");
        return reflect_point(cluster.center, env.surfaces[cluster.chain.back().index].segment);
    }

    bool line_of_sight(const Vec2 &ap, const Vec2 &position, const EnvironmentModel &env)
    {
        return leg_clear(position, ap, env, -1, -1);
    }

    namespace
    {
        bool cluster_visible(const Vec2 &position, const ImageCluster &c, const EnvironmentModel &env,
                             const MirrorLattice &lat)
        {
            switch (c.kind)
            {
            case ClusterKind::direct:
                return line_of_sight(lat.ap_position, position, env);
            case ClusterKind::mirror:
                return specular_backtrack(position, surface_chain(c), lat.ap_position, env);
            case ClusterKind::diffraction_arc: {
                const Scatterer &sc = env.scatterers[c.chain.back().index];
                const Vec2 to_rx = position - sc.position;
                if (to_rx.norm() <= 1e-9)
                    return false;
                const ImageCluster &parent = lat.clusters[c.parent];
                const Vec2 incoming = (sc.position - parent.center).normalized();
                const double bend = std::acos(std::clamp(incoming.dot(to_rx.normalized()), -1.0, 1.0));
                if (bend > sc.max_bend)
                    return false;
                if (!leg_clear(position, sc.position, env, -1, -1))
                    return false;
                return specular_backtrack(sc.position, surface_chain(parent), lat.ap_position, env);
            }
            }
            return false;
        }
    } // namespace

    std::vector<int> visible_images(const Vec2 &position, const EnvironmentModel &env, const MirrorLattice &lattice)
    {
        std::vector<int> out;
        for (const auto &c : lattice.clusters)
            if (cluster_visible(position, c, env, lattice))
                out.push_back(c.id);
        return out;
    }

    PathSet trace_paths(const Vec2 &position, const EnvironmentModel &env, const MirrorLattice &lattice, bool rear_panel)
    {
        const ArrayGeometry &geom = env.aps.at(lattice.ap_id).array;
        PathSet paths;
        auto emit = [&](const ImageCluster &c, const Vec2 &vtx, const Vec2 &departure, double magnitude, double phase,
                        bool los) {
            const double dist = (position - vtx).norm();
            if (dist <= 0.0)
                return;
            Path p;
            p.aod_rad = wrap_to_2pi(std::atan2(departure.y(), departure.x()));
            p.aod_relative = wrap_to_pi(p.aod_rad - geom.reference_angle);
            if (std::abs(p.aod_relative) >= kPi / 2.0 - kRearPanelMargin)
            {
                if (rear_panel)
                    return;
                p.aod_relative = std::clamp(p.aod_relative, -kPi / 2.0 + kRearPanelMargin, kPi / 2.0 - kRearPanelMargin);
            }
            p.gain = std::polar(magnitude / dist, phase);
            p.delay_s = dist / kSpeedOfLight;
            p.is_los = los;
            p.source_cluster_id = c.id;
            p.virtual_tx = vtx;
            paths.push_back(p);
        };

        for (int id : visible_images(position, env, lattice))
        {
            const ImageCluster &c = lattice.clusters[id];
            switch (c.kind)
            {
            case ClusterKind::direct:
                emit(c, c.center, position - c.center, 1.0, c.phases.front(), true);
                break;
            case ClusterKind::mirror: {
                const std::vector<int> chain = surface_chain(c);
                const double scale = c.amplitude_factor / std::sqrt(static_cast<double>(c.n_virtual_tx));
                const double jitter_std = c.angular_spread * (c.center - position).norm();
                for (int k = 0; k < c.n_virtual_tx; ++k)
                {
                    const Vec2 vtx = c.center + jitter_std * c.jitter[k];
                    emit(c, vtx, unfold_departure(position - vtx, chain, env), scale, c.phases[k], false);
                }
                break;
            }
            case ClusterKind::diffraction_arc: {
                const ImageCluster &parent = lattice.clusters[c.parent];
                const Vec2 departure = unfold_departure(c.center - parent.center, surface_chain(parent), env);
                const Vec2 back = (c.center - position).normalized();
                const double scale = c.amplitude_factor / std::sqrt(static_cast<double>(c.n_virtual_tx));
                for (int k = 0; k < c.n_virtual_tx; ++k)
                {
                    const Vec2 vtx = c.center + c.arc_radius * (rotation(c.angular_spread * c.jitter[k].x()) * back);
                    emit(c, vtx, departure, scale, c.phases[k], false);
                }
                break;
            }
            }
        }
        return paths;
    }

    Eigen::MatrixXcd assemble_channel(std::span<const Path> paths, const ArrayGeometry &geom, const OfdmConfig &ofdm,
                                      bool tap_delay)
    {
        const int M = ofdm.n_subcarriers;
        Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(geom.n_antennas, M);
        for (const Path &p : paths)
        {
            double tau = p.delay_s;
            if (tap_delay)
                tau = std::round(tau * ofdm.bandwidth_hz) / ofdm.bandwidth_hz;
            const Eigen::VectorXcd a = steering_vector(p.aod_relative, geom);
            for (int m = 0; m < M; ++m)
            {
                const double phase = -kTwoPi * (static_cast<double>(m) / M) * ofdm.bandwidth_hz * tau;
                H.col(m) += (p.gain * std::polar(1.0, phase)) * a;
            }
        }
        return H;
    }

    SynthResult synth_channel(const Vec2 &position, int ap_id, const EnvironmentModel &env, const MirrorLattice &lattice,
                              const OfdmConfig &ofdm, Rng &rng, const SynthOptions &options)
    {
        if (lattice.ap_id != ap_id)
            throw std::domain_error("synth_channel: lattice belongs to a different access point");
        const ArrayGeometry &geom = env.aps.at(ap_id).array;
        SynthResult out;
        out.paths = trace_paths(position, env, lattice, options.rear_panel);
        if (out.paths.empty())
        {
            std::ostringstream msg;
            msg << "no propagation path from AP " << ap_id << " to (" << position.x() << ", " << position.y() << ")";
            throw CoverageGapError(msg.str());
        }
        out.channel.ap_id = ap_id;
        out.channel.entries = assemble_channel(out.paths, geom, ofdm, options.tap_delay);
        if (options.noise_variance > 0.0)
        {
            std::normal_distribution<double> n01;
            const double s = std::sqrt(options.noise_variance / 2.0);
            for (Eigen::Index j = 0; j < out.channel.entries.cols(); ++j)
                for (Eigen::Index i = 0; i < out.channel.entries.rows(); ++i)
                {
                    const double re = n01(rng);
                    const double im = n01(rng);
                    out.channel.entries(i, j) += cdouble(s * re, s * im);
                }
        }
        return out;
    }

    std::vector<Vec2> simulate_trajectory(const MobilityParams &params, const Vec2 &start, const Vec2 &start_velocity,
                                          int T, Rng &rng)
    {
        params.validate();
        if (T < 2)
            throw std::domain_error("simulate_trajectory: need at least 2 steps");
        std::vector<Vec2> x(T);
        if (params.gamma == 1.0)
        {
            for (int t = 0; t < T; ++t)
                x[t] = start + (t * params.slot_s) * start_velocity;
            return x;
        }
        const double g = params.gamma;
        const double noise = std::sqrt(1.0 - g * g) * params.slot_s * params.sigma_v;
        std::normal_distribution<double> n01;
        x[0] = start;
        x[1] = start + params.slot_s * start_velocity;
        for (int t = 2; t < T; ++t)
        {
            const double ex = n01(rng);
            const double ey = n01(rng);
            x[t] = x[t - 1] + g * (x[t - 1] - x[t - 2]) + (1.0 - g) * params.slot_s * params.mean_velocity +
                   noise * Vec2(ex, ey);
        }
        return x;
    }

    std::vector<Vec2> simulate_trajectory_in_region(const MobilityParams &params, const Vec2 &start,
                                                    const Vec2 &start_velocity, int T, std::span<const Vec2> region,
                                                    Rng &rng)
    {
        params.validate();
        if (T < 2)
            throw std::domain_error("simulate_trajectory_in_region: need at least 2 steps");
        if (!inside_polygon(start, region))
            throw std::domain_error("simulate_trajectory_in_region: start outside region");
        const double g = params.gamma;
        const double noise = std::sqrt(1.0 - g * g) * params.slot_s * params.sigma_v;
        std::normal_distribution<double> n01;

        // Folds a proposed step back into the region; returns the accepted point and
        // updates the step so the velocity memory follows the bounce.
        auto fold = [&](const Vec2 &from, Vec2 &step) {
            const Vec2 proposal = from + step;
            if (inside_polygon(proposal, region))
                return proposal;
            for (std::size_t i = 0; i < region.size(); ++i)
            {
                const Segment edge{region[i], region[(i + 1) % region.size()]};
                if (!intersect(from, proposal, edge))
                    continue;
                const Vec2 mirrored = reflect_point(proposal, edge);
                if (inside_polygon(mirrored, region))
                {
                    step = reflect_direction(step, edge);
                    return mirrored;
                }
            }
            step = -step;
            return from;
        };

        std::vector<Vec2> x(T);
        x[0] = start;
        Vec2 step = params.slot_s * start_velocity;
        x[1] = fold(x[0], step);
        for (int t = 2; t < T; ++t)
        {
            const double ex = n01(rng);
            const double ey = n01(rng);
            step = g * step + (1.0 - g) * params.slot_s * params.mean_velocity + noise * Vec2(ex, ey);
            x[t] = fold(x[t - 1], step);
        }
        return x;
    }

    std::vector<Vec2> sample_ppp_aps(double density, double region_radius, double min_range, Rng &rng,
                                     std::span<const Vec2> trajectory)
    {
        if (!(density >= 0.0))
            throw std::domain_error("sample_ppp_aps: negative density");
        if (!(min_range > 0.0 && min_range < region_radius))
            throw std::domain_error("sample_ppp_aps: need 0 < r0 < R");
        std::vector<Vec2> out;
        if (density == 0.0)
            return out;
        std::poisson_distribution<long> count(density * kPi * region_radius * region_radius);
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        const long n = count(rng);
        for (long i = 0; i < n; ++i)
        {
            const double r = region_radius * std::sqrt(u01(rng));
            const double a = kTwoPi * u01(rng);
            const Vec2 p(r * std::cos(a), r * std::sin(a));
            bool keep = true;
            if (trajectory.empty())
                keep = p.norm() > min_range;
            else
                for (const Vec2 &x : trajectory)
                    if ((p - x).norm() <= min_range)
                    {
                        keep = false;
                        break;
                    }
            if (keep)
                out.push_back(p);
        }
        return out;
    }

    double sample_aod(const Vec2 &position, const Vec2 &ap_position, double sigma_theta, Rng &rng)
    {
        if ((position - ap_position).norm() == 0.0)
            throw std::domain_error("sample_aod: position coincides with the access point");
        if (!(sigma_theta >= 0.0))
            throw std::domain_error("sample_aod: negative sigma");
        const double phi = azimuth(ap_position, position);
        if (sigma_theta == 0.0)
            return phi;
        std::normal_distribution<double> n01;
        return wrap_to_2pi(phi + sigma_theta * n01(rng));
    }

    std::pair<ChannelTensor, ChannelTensor> synth_rich_scattering_pair(int n_paths, double distance_m,
                                                                       const ArrayGeometry &geom,
                                                                       const OfdmConfig &ofdm, Rng &rng)
    {
        if (n_paths < 1)
            throw std::domain_error("synth_rich_scattering_pair: need at least one path");
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        const double window = ofdm.n_subcarriers / ofdm.bandwidth_hz;
        std::vector<Path> first(n_paths);
        std::vector<Path> second(n_paths);
        for (int l = 0; l < n_paths; ++l)
        {
            Path p;
            p.gain = std::polar(1.0, kTwoPi * u01(rng));
            p.delay_s = window * u01(rng);
            p.aod_relative = (u01(rng) - 0.5) * 0.98 * kPi;
            const double theta_prime = kTwoPi * u01(rng);
            first[l] = p;
            p.delay_s += distance_m / kSpeedOfLight * std::cos(theta_prime);
            second[l] = p;
        }
        ChannelTensor a;
        ChannelTensor b;
        a.entries = assemble_channel(first, geom, ofdm);
        b.entries = assemble_channel(second, geom, ofdm);
        return {std::move(a), std::move(b)};
    }

} // namespace blindmap::sim
