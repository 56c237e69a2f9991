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

#include "blindmap/dataset.hpp"
#include "blindmap/log.hpp"

#include <json.hpp>

#include <bit>
#include <cstring>
#include <fstream>

namespace blindmap
{
    namespace
    {
        constexpr char kMagic[8] = {'B', 'L', 'M', 'A', 'P', 'D', 'S', '1'};

        static_assert(std::endian::native == std::endian::little, "dataset I/O assumes a little-endian host");

        template <typename T>
        void put(std::ostream &out, const T &v)
        {
            out.write(reinterpret_cast<const char *>(&v), sizeof(T));
        }

        template <typename T>
        T get(std::istream &in)
        {
            T v{};
            in.read(reinterpret_cast<char *>(&v), sizeof(T));
            if (!in)
                throw ConfigError("dataset: truncated file");
            return v;
        }
    } // namespace

    Dataset generate_dataset(const Scene &scene, const GenerationSpec &spec)
    {
        scene.validate();
        if (spec.T < 2)
            throw ParameterError("dataset needs at least 2 time steps");
        const int Q = static_cast<int>(scene.env.aps.size());
        std::vector<sim::MirrorLattice> lattices;
        for (int q = 0; q < Q; ++q)
            lattices.push_back(sim::build_mirror_lattice(scene.env, q));

        sim::Rng rng(spec.seed);
        sim::SynthOptions opts;
        opts.noise_variance = scene.noise_variance;
        for (int attempt = 0; attempt < spec.max_attempts; ++attempt)
        {
            Dataset ds;
            ds.scene = scene;
            ds.trajectory = sim::simulate_trajectory_in_region(spec.mobility, spec.start, spec.start_velocity, spec.T,
                                                               scene.env.region, rng);
            ds.los.resize(static_cast<std::size_t>(spec.T) * Q);
            ds.aod_true.resize(ds.los.size());
            ds.channels.resize(ds.los.size());
            bool gap = false;
            for (int t = 0; t < spec.T && !gap; ++t)
                for (int q = 0; q < Q; ++q)
                {
                    const std::size_t i = ds.index(t, q);
                    try
                    {
                        auto res = sim::synth_channel(ds.trajectory[t], q, scene.env, lattices[q], scene.ofdm, rng, opts);
                        res.channel.time_index = t;
                        ds.channels[i] = std::move(res.channel);
                        bool los = false;
                        for (const auto &p : res.paths)
                            los = los || p.is_los;
                        ds.los[i] = los ? 1 : 0;
                        ds.aod_true[i] = azimuth(scene.env.aps[q].position, ds.trajectory[t]);
                    }
                    catch (const CoverageGapError &e)
                    {
                        log_message(LogLevel::debug, e.what());
                        gap = true;
                        break;
                    }
                }
            if (!gap)
                return ds;
            log_warning("dataset: trajectory crossed a coverage gap, redrawing");
        }
        throw CoverageGapError("dataset: no gap-free trajectory after the allowed attempts");
    }

    void write_dataset(const Dataset &ds, const std::filesystem::path &path)
    {
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw ConfigError("cannot write dataset " + path.string());
        nlohmann::json h;
        h["version"] = "blindmap-ds/1";
        h["T"] = ds.T();
        h["Q"] = ds.Q();
        h["n_antennas"] = ds.Q() > 0 ? ds.scene.env.aps[0].array.n_antennas : 0;
        h["n_subcarriers"] = ds.scene.ofdm.n_subcarriers;
        h["bandwidth_hz"] = ds.scene.ofdm.bandwidth_hz;
        h["scene"] = nlohmann::json::parse(scene_to_json(ds.scene));
        const std::string header = h.dump();
        out.write(kMagic, sizeof(kMagic));
        put<std::uint64_t>(out, header.size());
        out.write(header.data(), static_cast<std::streamsize>(header.size()));
        const char pad[7] = {};
        for (int t = 0; t < ds.T(); ++t)
            for (int q = 0; q < ds.Q(); ++q)
            {
                const std::size_t i = ds.index(t, q);
                put<std::uint32_t>(out, static_cast<std::uint32_t>(t));
                put<std::uint32_t>(out, static_cast<std::uint32_t>(q));
                put<double>(out, ds.trajectory[t].x());
                put<double>(out, ds.trajectory[t].y());
                put<std::uint8_t>(out, ds.los[i]);
                out.write(pad, sizeof(pad));
                put<double>(out, ds.aod_true[i]);
                const Eigen::MatrixXcd &H = ds.channels[i].entries;
                for (Eigen::Index n = 0; n < H.rows(); ++n)
                    for (Eigen::Index m = 0; m < H.cols(); ++m)
                    {
                        put<double>(out, H(n, m).real());
                        put<double>(out, H(n, m).imag());
                    }
            }
        if (!out)
            throw ConfigError("dataset: write failed for " + path.string());
    }

    Dataset read_dataset(const std::filesystem::path &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw ConfigError("cannot open dataset " + path.string());
        char magic[8];
        in.read(magic, sizeof(magic));
        if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
            throw ConfigError("dataset: bad magic in " + path.string());
        const auto len = get<std::uint64_t>(in);
        if (len > (1u << 28))
            throw ConfigError("dataset: implausible header length");
        std::string header(len, '\0');
        in.read(header.data(), static_cast<std::streamsize>(len));
        if (!in)
            throw ConfigError("dataset: truncated header");

        Dataset ds;
        int T = 0, Q = 0, Nt = 0, M = 0;
        try
        {
            const auto h = nlohmann::json::parse(header);
            if (h.at("version") != "blindmap-ds/1")
                throw ConfigError("dataset: unsupported version");
            T = h.at("T").get<int>();
            Q = h.at("Q").get<int>();
            Nt = h.at("n_antennas").get<int>();
            M = h.at("n_subcarriers").get<int>();
            ds.scene = parse_scene(h.at("scene").dump());
        }
        catch (const nlohmann::json::exception &e)
        {
            throw ConfigError(std::string("dataset header: ") + e.what());
        }
        if (T < 1 || Q != ds.Q() || Nt < 1 || M < 1)
            throw ConfigError("dataset: inconsistent header dimensions");

        ds.trajectory.resize(T);
        ds.los.resize(static_cast<std::size_t>(T) * Q);
        ds.aod_true.resize(ds.los.size());
        ds.channels.resize(ds.los.size());
        for (std::size_t r = 0; r < ds.los.size(); ++r)
        {
            const auto t = get<std::uint32_t>(in);
            const auto q = get<std::uint32_t>(in);
            if (t >= static_cast<std::uint32_t>(T) || q >= static_cast<std::uint32_t>(Q))
                throw ConfigError("dataset: record index out of range");
            const double x = get<double>(in);
            const double y = get<double>(in);
            ds.trajectory[t] = Vec2(x, y);
            const std::size_t i = ds.index(static_cast<int>(t), static_cast<int>(q));
            ds.los[i] = get<std::uint8_t>(in);
            char pad[7];
            in.read(pad, sizeof(pad));
            ds.aod_true[i] = get<double>(in);
            auto &ch = ds.channels[i];
            ch.ap_id = static_cast<int>(q);
            ch.time_index = static_cast<int>(t);
            ch.entries.resize(Nt, M);
            for (int n = 0; n < Nt; ++n)
                for (int m = 0; m < M; ++m)
                {
                    const double re = get<double>(in);
                    const double im = get<double>(in);
                    ch.entries(n, m) = cdouble(re, im);
                }
        }
        return ds;
    }

} // namespace blindmap
