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

#ifndef BLINDMAP_SIM_HPP
#define BLINDMAP_SIM_HPP

#include "blindmap/common.hpp"
#include "blindmap/geometry.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <vector>

// Synthetic indoor environments under the quasi-specular model: a polygonal
// scene of reflecting surfaces and diffracting edges, the mirror-image lattice
// per access point, path visibility, and MIMO-OFDM channel synthesis.
namespace blindmap::sim
{
    using Rng = std::mt19937_64;

    /// Uniform linear array at an access point.
    struct ArrayGeometry
    {
        int n_antennas = 8;
        double spacing_m = 0.0625;   // inter-element spacing
        double carrier_hz = 2.4e9;   // carrier frequency
        double reference_angle = 0.0; // broadside direction, [0, 2*pi)

        double wavelength() const { return kSpeedOfLight / carrier_hz; }
        void validate() const;
    };

    struct OfdmConfig
    {
        int n_subcarriers = 64;
        double bandwidth_hz = 400e6;

        void validate(int n_antennas) const;
    };

    struct Surface
    {
        Segment segment;
        double absorption = 0.3;        ///< fraction of amplitude absorbed per bounce, in (0,1)
        double scattering_spread = 0.05; ///< angular spread of the scattered cluster [rad]
    };

    struct Scatterer
    {
        Vec2 position;
        double max_bend = 0.6;     ///< largest diffraction bend [rad]
        double attenuation = 0.3;  ///< amplitude factor applied per diffraction
        double spread = 0.02;      ///< angular jitter of the diffracted sub-paths [rad]
    };

    struct AccessPoint
    {
        Vec2 position;
        ArrayGeometry array;
    };

    struct EnvironmentModel
    {
        std::vector<Surface> surfaces;
        std::vector<Scatterer> scatterers;
        int max_reflection_order = 2;
        std::vector<AccessPoint> aps;
        std::vector<Vec2> region; ///< closed polygon of the walkable area
        int n_virtual_tx = 8;     ///< sub-paths per mirror / arc cluster
        std::uint64_t cluster_seed = 1; ///< fixes the virtual-TX realization of the scene

        void validate() const;
    };

    /// Axis-aligned room: four walls, region polygon, no access points.
    EnvironmentModel make_rectangular_room(double width, double height, double absorption = 0.3,
                                           double scattering_spread = 0.05);

    enum class ClusterKind
    {
        direct,
        mirror,
        diffraction_arc
    };

    struct ChainElement
    {
        enum class Kind
        {
            surface,
            scatterer
        };
        Kind kind = Kind::surface;
        int index = 0;

        bool operator==(const ChainElement &) const = default;
    };

    struct ImageCluster
    {
        int id = 0;
        int parent = -1;
        ClusterKind kind = ClusterKind::direct;
        Vec2 center;              ///< image position; the pivot scatterer for arcs
        double arc_radius = 0.0;  ///< arcs only: distance pivot -> parent image
        int n_virtual_tx = 1;
        double angular_spread = 0.0;
        std::vector<ChainElement> chain;
        double amplitude_factor = 1.0; ///< product of (1 - absorption) and diffraction losses
        std::vector<Vec2> jitter;      ///< standardized virtual-TX offsets (one per sub-path)
        std::vector<double> phases;    ///< per sub-path gain phase
    };

    struct MirrorLattice
    {
        int ap_id = 0;
        Vec2 ap_position;
        std::vector<ImageCluster> clusters; ///< clusters[0] is the true AP
    };

    struct Path
    {
        cdouble gain;
        double delay_s = 0.0;
        double aod_rad = 0.0;      ///< departure azimuth in the global frame, [0, 2*pi)
        double aod_relative = 0.0; ///< w.r.t. the array broadside, (-pi/2, pi/2)
        bool is_los = false;
        int source_cluster_id = 0;
        Vec2 virtual_tx;
    };

    using PathSet = std::vector<Path>;

    struct ChannelTensor
    {
        Eigen::MatrixXcd entries; ///< N_t x M
        int ap_id = 0;
        int time_index = 0;
    };

    struct MobilityParams
    {
        double gamma = 0.5;
        double slot_s = 0.2;
        Vec2 mean_velocity = Vec2::Zero();
        double sigma_v = 1.0;

        void validate() const;
    };

    /// ULA steering vector; entry n = exp(-j 2pi/lambda n Delta sin(phi)).
    Eigen::VectorXcd steering_vector(double aod_relative, const ArrayGeometry &geom);

    /// Breadth-first lattice of specular images and diffraction arcs of one AP.
    MirrorLattice build_mirror_lattice(const EnvironmentModel &env, int ap_id);

    /// Reflects an image about the generating surface of its last chain element.
    Vec2 parent_image_of(const ImageCluster &cluster, const EnvironmentModel &env);

    /// Ids of clusters with a valid unobstructed unfolded path to the position.
    std::vector<int> visible_images(const Vec2 &position, const EnvironmentModel &env,
                                    const MirrorLattice &lattice);

    /// True when the straight segment AP -> position is unobstructed.
    bool line_of_sight(const Vec2 &ap, const Vec2 &position, const EnvironmentModel &env);

    struct SynthOptions
    {
        double noise_variance = 0.0; ///< per complex entry
        bool tap_delay = false;      ///< round delays to multiples of 1/B
        bool rear_panel = true;      ///< drop paths departing behind the array
    };

    struct SynthResult
    {
        ChannelTensor channel;
        PathSet paths;
    };

    /// Enumerates the propagation paths from the AP to the position.
    PathSet trace_paths(const Vec2 &position, const EnvironmentModel &env, const MirrorLattice &lattice,
                        bool rear_panel = true);

    /// Assembles H = sum_l gain_l exp(-j2pi (m/M) B tau_l) a(phi_l) (noise-free).
    Eigen::MatrixXcd assemble_channel(std::span<const Path> paths, const ArrayGeometry &geom,
                                      const OfdmConfig &ofdm, bool tap_delay = false);

    SynthResult synth_channel(const Vec2 &position, int ap_id, const EnvironmentModel &env,
                              const MirrorLattice &lattice, const OfdmConfig &ofdm, Rng &rng,
                              const SynthOptions &options = {});

    /// Gauss-Markov trajectory of T points, x_0 = start, x_1 = start + slot * start_velocity.
    std::vector<Vec2> simulate_trajectory(const MobilityParams &params, const Vec2 &start,
                                          const Vec2 &start_velocity, int T, Rng &rng);

    /// Same recursion, with increments that leave the polygon folded back at the crossed edge.
    std::vector<Vec2> simulate_trajectory_in_region(const MobilityParams &params, const Vec2 &start,
                                                    const Vec2 &start_velocity, int T,
                                                    std::span<const Vec2> region, Rng &rng);

    /// Homogeneous PPP on the disc of radius R around the origin. Points within
    /// min_range of any trajectory point (or of the origin when none is given) are dropped.
    std::vector<Vec2> sample_ppp_aps(double density, double region_radius, double min_range, Rng &rng,
                                     std::span<const Vec2> trajectory = {});

    /// AoD observation drawn from N(azimuth(ap -> position), sigma^2), wrapped to [0, 2*pi).
    double sample_aod(const Vec2 &position, const Vec2 &ap_position, double sigma_theta, Rng &rng);

    /// Rich-scattering pair for the delay-domain continuity law: L paths with
    /// unit gains of uniform phase shared by both channels, delays uniform over the unambiguous
    /// window, and the second channel's delays shifted by (d/c) cos(theta'_l).
    std::pair<ChannelTensor, ChannelTensor> synth_rich_scattering_pair(int n_paths, double distance_m,
                                                                       const ArrayGeometry &geom,
                                                                       const OfdmConfig &ofdm, Rng &rng);

} // namespace blindmap::sim

#endif
