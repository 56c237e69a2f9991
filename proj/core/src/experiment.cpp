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

#include "blindmap/experiment.hpp"

#include "blindmap/baselines.hpp"
#include "blindmap/beam_map.hpp"
#include "blindmap/bounds.hpp"
#include "blindmap/features.hpp"
#include "blindmap/graph.hpp"
#include "blindmap/log.hpp"
#include "blindmap/obsmodel.hpp"
#include "blindmap/params_io.hpp"
#include "blindmap/scene_io.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace blindmap::eval
{
    namespace fs = std::filesystem;
    using nlohmann::json;

    namespace
    {
        std::string fmt(double v)
        {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.10g", v);
            return buf;
        }

        Vec2 read_vec2(const json &j, const char *key, const Vec2 &fallback)
        {
            if (!j.contains(key))
                return fallback;
            const auto &a = j.at(key);
            if (!a.is_array() || a.size() != 2)
                throw ConfigError(std::string("experiment config: ") + key + " must be [x, y]");
            return {a[0].get<double>(), a[1].get<double>()};
        }

        fs::path resolve(const fs::path &base, const std::string &p)
        {
            const fs::path path(p);
            return path.is_absolute() || base.empty() ? path : base / path;
        }

        std::ofstream open_out(const fs::path &path)
        {
            std::ofstream os(path, std::ios::binary);
            if (!os)
                throw std::runtime_error("cannot write " + path.string());
            return os;
        }

        void write_text(const fs::path &path, const std::string &text)
        {
            auto os = open_out(path);
            os << text;
        }

        std::vector<Vec2> node_positions(const inference::MobilityGraph &g, const std::vector<int> &nodes)
        {
            std::vector<Vec2> out;
            out.reserve(nodes.size());
            for (int n : nodes)
                out.push_back(g.nodes[n]);
            return out;
        }

        std::vector<std::uint8_t> truth_nlos(const Dataset &ds)
        {
            std::vector<std::uint8_t> out(ds.los.size());
            for (std::size_t i = 0; i < out.size(); ++i)
                out[i] = ds.los[i] ? 0 : 1;
            return out;
        }

        /// Stage bookkeeping for the failure manifest.
        struct StageLog
        {
            fs::path dir;
            std::vector<std::string> completed;
            std::vector<std::string> outputs;

            template <class F>
            void run(const std::string &name, F &&body)
            {
                try
                {
                    body();
                    completed.push_back(name);
                }
                catch (const std::exception &e)
                {
                    json m;
                    m["failed_stage"] = name;
                    m["error"] = e.what();
                    m["completed_stages"] = completed;
                    m["outputs"] = outputs;
                    try
                    {
                        write_text(dir / "failure.json", m.dump(2) + "\n");
                    }
                    catch (const std::exception &)
                    {
                    }
                    log_warning("run_experiment: stage " + name + " failed: " + e.what());
                    throw;
                }
            }
            void wrote(const std::string &file) { outputs.push_back(file); }
        };
    } // namespace

    std::uint64_t fnv1a64(std::string_view bytes)
    {
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (unsigned char c : bytes)
        {
            h ^= c;
            h *= 0x100000001b3ull;
        }
        return h;
    }

    std::string config_hash(const ExperimentConfig &cfg)
    {
        char buf[20];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(cfg.canonical)));
        return buf;
    }

    ExperimentConfig ExperimentConfig::from_json(const std::string &text, const fs::path &base_dir)
    {
        ExperimentConfig c;
        json j;
        try
        {
            j = json::parse(text);
        }
        catch (const json::exception &e)
        {
            throw ConfigError(std::string("experiment config: ") + e.what());
        }
        if (!j.is_object())
            throw ConfigError("experiment config: top level must be an object");
        try
        {
            c.seed = j.value("seed", c.seed);
            if (j.contains("scene"))
                c.scene_path = resolve(base_dir, j.at("scene").get<std::string>());
            if (j.contains("dataset"))
                c.dataset_path = resolve(base_dir, j.at("dataset").get<std::string>());

            c.generation.seed = c.seed;
            if (j.contains("generation"))
            {
                const auto &g = j.at("generation");
                c.generation.T = g.value("T", c.generation.T);
                c.generation.seed = g.value("seed", c.generation.seed);
                c.generation.start = read_vec2(g, "start", c.generation.start);
                c.generation.start_velocity = read_vec2(g, "start_velocity", c.generation.start_velocity);
                c.generation.mobility.gamma = g.value("gamma", c.generation.mobility.gamma);
                c.generation.mobility.slot_s = g.value("slot_s", c.generation.mobility.slot_s);
                c.generation.mobility.sigma_v = g.value("sigma_v", c.generation.mobility.sigma_v);
                c.generation.mobility.mean_velocity =
                    read_vec2(g, "mean_velocity", c.generation.mobility.mean_velocity);
                c.generation.max_attempts = g.value("max_attempts", c.generation.max_attempts);
            }

            json inf = j.value("inference", json::object());
            if (!inf.contains("seed"))
                inf["seed"] = c.seed;
            c.inference = inference::InferenceConfig::from_json(inf.dump());

            if (j.contains("eta_sweep"))
                c.eta_sweep = j.at("eta_sweep").get<std::vector<double>>();
            c.beam_map_resolution_m = j.value("beam_map_resolution_m", c.beam_map_resolution_m);
            c.csi_pair_lag_max = j.value("csi_pair_lag_max", c.csi_pair_lag_max);
            c.plot_data = j.value("plot_data", c.plot_data);
            c.record_runtime = j.value("record_runtime", c.record_runtime);
            if (j.contains("output_dir"))
                c.output_dir = resolve(base_dir, j.at("output_dir").get<std::string>());
        }
        catch (const json::exception &e)
        {
            throw ConfigError(std::string("experiment config: ") + e.what());
        }
        if (c.generation.T < 3 || c.generation.max_attempts < 1)
            throw ConfigError("experiment config: generation.T must be at least 3");
        if (!(c.beam_map_resolution_m > 0.0) || c.csi_pair_lag_max < 0)
            throw ConfigError("experiment config: beam_map_resolution_m must be positive");
        for (double eta : c.eta_sweep)
            if (!(eta >= 0.0))
                throw ConfigError("experiment config: eta_sweep values must be non-negative");
        try
        {
            c.generation.mobility.validate();
        }
        catch (const std::exception &e)
        {
            throw ConfigError(std::string("experiment config: ") + e.what());
        }

        // The output location does not change results, so it stays out of the hash.
        j.erase("output_dir");
        c.canonical = j.dump();
        return c;
    }

    ExperimentConfig ExperimentConfig::load(const fs::path &path)
    {
        std::ifstream is(path, std::ios::binary);
        if (!is)
            throw ConfigError("cannot open experiment config " + path.string());
        std::stringstream ss;
        ss << is.rdbuf();
        return from_json(ss.str(), path.parent_path());
    }

    std::string metrics_to_json(const ExperimentMetrics &m)
    {
        json j;
        j["e_loc"] = {{"all", m.e_loc.all.mean},
                      {"nlos", m.e_loc.nlos.mean},
                      {"single_los", m.e_loc.single_los.mean},
                      {"double_los", m.e_loc.double_los.mean}};
        j["losnlos_error"] = m.losnlos_error;
        j["e_map"] = m.e_map;
        j["runtime_s"] = m.runtime_s;
        j["config_hash"] = m.config_hash;
        return j.dump(2) + "\n";
    }

    void write_trajectory_csv(const fs::path &path, const std::vector<Vec2> &positions, const std::vector<int> &nodes)
    {
        auto os = open_out(path);
        os << "t,x,y,node_id\n";
        for (std::size_t t = 0; t < positions.size(); ++t)
            os << t << ',' << fmt(positions[t].x()) << ',' << fmt(positions[t].y()) << ','
               << (t < nodes.size() ? nodes[t] : -1) << '\n';
    }

    void write_trace_csv(const fs::path &path, const std::vector<inference::IterationRecord> &trace)
    {
        auto os = open_out(path);
        os << "iteration,objective,p2_loglik,changed_nodes\n";
        for (const auto &r : trace)
            os << r.iteration << ',' << fmt(r.objective) << ',' << fmt(r.p2_loglik) << ',' << r.changed_nodes << '\n';
    }

    namespace
    {
        struct PipelineState
        {
            std::vector<features::RadioSignature> signatures;
            obs::Observations observations;
            inference::MobilityGraph graph;
        };

        PipelineState prepare(const Dataset &ds, const ExperimentConfig &cfg)
        {
            PipelineState st;
            st.signatures = features::extract_signatures(ds);
            st.observations = obs::make_observations(ds, st.signatures);
            st.graph = inference::build_graph(ds.scene.env.region, cfg.inference.resolution_m, cfg.inference.d_max_m);
            return st;
        }

        void score(const Dataset &ds, const PipelineState &st, const ExperimentConfig &cfg, ExperimentResult &res)
        {
            const auto nlos_true = truth_nlos(ds);
            res.metrics.e_loc = e_loc(ds.trajectory, res.estimate, ds.los, ds.Q());
            res.metrics.losnlos_error = losnlos_error(nlos_true, res.inference.params.nlos);
            const BeamMap map = build_beam_map(ds.channels, ds.Q(), res.estimate, ds.scene.env.region,
                                               cfg.beam_map_resolution_m);
            const MapError me = e_map(map, ds.channels, ds.trajectory);
            res.metrics.e_map = me.e_map;
            res.metrics.e_map_excluded = me.excluded;
            res.metrics.config_hash = config_hash(cfg);

            const auto wcl = baseline_wcl(st.signatures, st.observations.ap_positions);
            const auto aodl = baseline_aodl(st.signatures, st.observations.ap_positions);
            const auto wcl_err = e_loc(ds.trajectory, wcl, ds.los, ds.Q());
            const auto aodl_err = e_loc(ds.trajectory, aodl.trajectory, ds.los, ds.Q());
            res.comparison = {{"proposed", res.metrics.e_loc.all.mean, res.metrics.e_loc.nlos.mean},
                              {"wcl", wcl_err.all.mean, wcl_err.nlos.mean},
                              {"aodl", aodl_err.all.mean, aodl_err.nlos.mean}};
        }

        std::vector<SweepPoint> sweep(const Dataset &ds, const PipelineState &st, const ExperimentConfig &cfg)
        {
            std::vector<SweepPoint> out;
            for (double eta : cfg.eta_sweep)
            {
                inference::InferenceConfig ic = cfg.inference;
                ic.eta = eta;
                const auto r = inference::alternate_optimize(st.observations, st.graph, ic);
                const auto est = node_positions(st.graph, r.estimate.nodes);
                const auto err = e_loc(ds.trajectory, est, ds.los, ds.Q());
                out.push_back({eta, err.all.mean, err.nlos.mean});
            }
            return out;
        }
    } // namespace

    ExperimentResult evaluate_dataset(const Dataset &ds, const ExperimentConfig &cfg)
    {
        const auto t0 = std::chrono::steady_clock::now();
        const PipelineState st = prepare(ds, cfg);
        ExperimentResult res;
        res.inference = inference::alternate_optimize(st.observations, st.graph, cfg.inference);
        res.estimate = node_positions(st.graph, res.inference.estimate.nodes);
        score(ds, st, cfg, res);
        res.sweep = sweep(ds, st, cfg);
        if (cfg.record_runtime)
            res.metrics.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return res;
    }

    ExperimentResult run_experiment(const ExperimentConfig &cfg)
    {
        const auto t0 = std::chrono::steady_clock::now();
        // Inputs are resolved first so a bad path never leaves a half-written directory.
        Scene scene = cfg.scene_path.empty() ? default_office_scene() : load_scene(cfg.scene_path);
        if (!cfg.dataset_path.empty() && !fs::exists(cfg.dataset_path))
            throw ConfigError("dataset file not found: " + cfg.dataset_path.string());

        std::error_code ec;
        fs::create_directories(cfg.output_dir, ec);
        if (ec)
            throw ConfigError("cannot create output directory " + cfg.output_dir.string() + ": " + ec.message());
        fs::remove(cfg.output_dir / "failure.json", ec);

        StageLog log{cfg.output_dir, {}, {}};
        const fs::path &dir = cfg.output_dir;
        Dataset ds;
        PipelineState st;
        ExperimentResult res;

        log.run("dataset", [&] {
            if (cfg.dataset_path.empty())
            {
                ds = generate_dataset(scene, cfg.generation);
                write_dataset(ds, dir / "dataset.bin");
                log.wrote("dataset.bin");
            }
            else
                ds = read_dataset(cfg.dataset_path);
            save_scene(ds.scene, dir / "scene.json");
            log.wrote("scene.json");
            write_trajectory_csv(dir / "trajectory_true.csv", ds.trajectory);
            log.wrote("trajectory_true.csv");
        });
        log.run("features", [&] {
            st = prepare(ds, cfg);
            features::write_feature_csv(st.signatures, dir / "signatures.csv");
            log.wrote("signatures.csv");
        });
        log.run("inference", [&] {
            res.inference = inference::alternate_optimize(st.observations, st.graph, cfg.inference);
            res.estimate = node_positions(st.graph, res.inference.estimate.nodes);
            write_trajectory_csv(dir / "trajectory.csv", res.estimate, res.inference.estimate.nodes);
            save_params(dir / "params.json", res.inference.params, &res.inference.mobility);
            write_trace_csv(dir / "trace.csv", res.inference.trace);
            log.wrote("trajectory.csv");
            log.wrote("params.json");
            log.wrote("trace.csv");
        });
        log.run("metrics", [&] {
            score(ds, st, cfg, res);
            write_trajectory_csv(dir / "trajectory_wcl.csv",
                                 baseline_wcl(st.signatures, st.observations.ap_positions));
            write_trajectory_csv(dir / "trajectory_aodl.csv",
                                 baseline_aodl(st.signatures, st.observations.ap_positions).trajectory);
            auto os = open_out(dir / "comparison.csv");
            os << "method,e_loc,e_loc_nlos\n";
            for (const auto &m : res.comparison)
                os << m.method << ',' << fmt(m.e_loc) << ',' << fmt(m.e_loc_nlos) << '\n';
            log.wrote("trajectory_wcl.csv");
            log.wrote("trajectory_aodl.csv");
            log.wrote("comparison.csv");
        });
        if (!cfg.eta_sweep.empty())
            log.run("eta_sweep", [&] {
                res.sweep = sweep(ds, st, cfg);
                auto os = open_out(dir / "eta_sweep.csv");
                os << "eta,e_loc,e_loc_nlos\n";
                for (const auto &p : res.sweep)
                    os << fmt(p.eta) << ',' << fmt(p.e_loc) << ',' << fmt(p.e_loc_nlos) << '\n';
                log.wrote("eta_sweep.csv");
            });
        if (cfg.plot_data)
            log.run("plot_data", [&] {
                // Delay-domain continuity: u_hat against B/c times the true distance.
                {
                    auto os = open_out(dir / "csi_distance.csv");
                    os << "q,t1,t2,d_m,u_hat,u_expected\n";
                    const double bc = ds.scene.ofdm.bandwidth_hz / kSpeedOfLight;
                    for (int q = 0; q < ds.Q(); ++q)
                        for (int t = 0; t < ds.T(); ++t)
                            for (int k = 1; k <= cfg.csi_pair_lag_max && t + k < ds.T(); ++k)
                            {
                                if (ds.is_los(t, q) || ds.is_los(t + k, q))
                                    continue;
                                const double d = (ds.trajectory[t] - ds.trajectory[t + k]).norm();
                                const int u = features::csi_distance(ds.channel(t, q), ds.channel(t + k, q), true);
                                os << q << ',' << t << ',' << t + k << ',' << fmt(d) << ',' << u << ','
                                   << fmt(bc * d) << '\n';
                            }
                }
                // Limited-region floor for the scene's own APs on a straight exit path.
                {
                    bounds::RectilinearScenario scn;
                    for (const auto &ap : ds.scene.env.aps)
                        scn.ap_positions.push_back(ap.position);
                    scn.x0 = ds.trajectory.front();
                    scn.v = Vec2(0.3, 0.1);
                    scn.n_antennas = ds.scene.env.aps.front().array.n_antennas;
                    const std::vector<int> Ts{10, 30, 100, 300, 1000, 3000, 10000};
                    auto os = open_out(dir / "bounds_limited.csv");
                    os << "T,bound_x,bound_v\n";
                    for (const auto &b : bounds::crlb_limited_series(scn, Ts))
                        os << b.T << ',' << fmt(b.delta_x) << ',' << fmt(b.delta_v) << '\n';
                }
                // Antenna scaling of the unlimited-region asymptote.
                {
                    auto os = open_out(dir / "antenna_scaling.csv");
                    os << "n_antennas,x_limit,v_limit,angle_crlb\n";
                    for (int n = 2; n <= 128; n *= 2)
                    {
                        const auto a = bounds::crlb_unlimited_asymptote(1.0, 10.0, 2.55e-2, 1.0, 1.0, n);
                        os << n << ',' << fmt(a.x_limit) << ',' << fmt(a.v_limit) << ','
                           << fmt(bounds::single_snapshot_angle_crlb(1.0, 0.0, 1.0, 1.0, n)) << '\n';
                    }
                }
                log.wrote("csi_distance.csv");
                log.wrote("bounds_limited.csv");
                log.wrote("antenna_scaling.csv");
            });
        log.run("report", [&] {
            if (cfg.record_runtime)
                res.metrics.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            write_text(dir / "metrics.json", metrics_to_json(res.metrics));
            log.wrote("metrics.json");
        });
        return res;
    }

} // namespace blindmap::eval
