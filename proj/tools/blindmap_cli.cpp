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

// blindmap command line front end.

#include "blindmap/beam_map.hpp"
#include "blindmap/bounds.hpp"
#include "blindmap/dataset.hpp"
#include "blindmap/experiment.hpp"
#include "blindmap/features.hpp"
#include "blindmap/graph.hpp"
#include "blindmap/log.hpp"
#include "blindmap/mse_study.hpp"
#include "blindmap/obsmodel.hpp"
#include "blindmap/params_io.hpp"
#include "blindmap/scene_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace blindmap;

namespace
{
    constexpr int kExitConfig = 2;
    constexpr int kExitNumerical = 3;

    std::string read_file(const fs::path &path)
    {
        std::ifstream is(path, std::ios::binary);
        if (!is)
            throw ConfigError("cannot open " + path.string());
        std::stringstream ss;
        ss << is.rdbuf();
        return ss.str();
    }

    std::string fmt(double v)
    {
        if (!std::isfinite(v))
            return "";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.10g", v);
        return buf;
    }

    eval::ExperimentConfig experiment_config(const std::string &config, std::optional<std::uint64_t> seed)
    {
        std::string text = config.empty() ? std::string("{}") : read_file(config);
        const fs::path base = config.empty() ? fs::path() : fs::path(config).parent_path();
        if (seed)
        {
            // A command-line seed overrides every seed in the file.
            json j;
            try
            {
                j = json::parse(text);
            }
            catch (const json::exception &e)
            {
                throw ConfigError(std::string("config: ") + e.what());
            }
            j["seed"] = *seed;
            if (j.contains("generation"))
                j["generation"].erase("seed");
            if (j.contains("inference"))
                j["inference"].erase("seed");
            text = j.dump();
        }
        return eval::ExperimentConfig::from_json(text, base);
    }

    Vec2 vec2_of(const json &a)
    {
        if (!a.is_array() || a.size() != 2)
            throw ConfigError("bounds config: expected a [x, y] pair");
        return {a[0].get<double>(), a[1].get<double>()};
    }

    bounds::RectilinearScenario scenario_of(const json &j)
    {
        bounds::RectilinearScenario s;
        s.x0 = j.contains("x0") ? vec2_of(j["x0"]) : s.x0;
        s.v = j.contains("v") ? vec2_of(j["v"]) : s.v;
        if (j.contains("aps"))
            for (const auto &a : j["aps"])
                s.ap_positions.push_back(vec2_of(a));
        s.sigma_theta = j.value("sigma_theta", s.sigma_theta);
        s.G1 = j.value("G1", s.G1);
        s.sigma_n2 = j.value("sigma_n2", s.sigma_n2);
        s.n_antennas = j.value("n_antennas", s.n_antennas);
        s.r0 = j.value("r0", s.r0);
        s.R = j.value("R", s.R);
        s.kappa_density = j.value("kappa_density", s.kappa_density);
        return s;
    }

    /// Eight APs on a 20 m x 12 m rectangle: the default limited-region deployment.
    std::vector<Vec2> default_limited_aps()
    {
        return {{0, 0}, {10, 0}, {20, 0}, {20, 12}, {10, 12}, {0, 12}, {5, 6}, {15, 6}};
    }

    void write_bounds_rows(std::ostream &os, const std::vector<int> &Ts, const std::vector<double> &bx,
                           const std::vector<double> &bv, const std::vector<double> &mx,
                           const std::vector<double> &mv)
    {
        os << "T,bound_x,bound_v,mse_x,mse_v,slope\n";
        for (std::size_t i = 0; i < Ts.size(); ++i)
        {
            // Local log-log slope of the x series (MSE when present, else the bound).
            std::string slope;
            if (i > 0)
            {
                const auto &y = mx.empty() ? bx : mx;
                if (y[i] > 0.0 && y[i - 1] > 0.0)
                    slope = fmt(std::log(y[i] / y[i - 1]) / std::log(static_cast<double>(Ts[i]) / Ts[i - 1]));
            }
            os << Ts[i] << ',' << fmt(bx[i]) << ',' << fmt(bv[i]) << ',' << (mx.empty() ? "" : fmt(mx[i])) << ','
               << (mv.empty() ? "" : fmt(mv[i])) << ',' << slope << '\n';
        }
    }

    int cmd_bounds(const std::string &mode, const std::string &config, const std::string &out,
                   std::optional<std::uint64_t> seed)
    {
        json j = config.empty() ? json::object() : json::parse(read_file(config), nullptr, false);
        if (j.is_discarded() || !j.is_object())
            throw ConfigError("bounds config: not a JSON object");
        std::ofstream os(out, std::ios::binary);
        if (!os)
            throw ConfigError("cannot write " + out);
        try
        {
            const json sj = j.value("scenario", json::object());
            std::vector<int> Ts = j.value("T_grid", std::vector<int>{});
            if (mode == "limited")
            {
                auto scn = scenario_of(sj);
                if (scn.ap_positions.empty())
                    scn.ap_positions = default_limited_aps();
                if (!sj.contains("x0"))
                    scn.x0 = Vec2(2.0, 3.0);
                if (!sj.contains("v"))
                    scn.v = Vec2(0.4, 0.15);
                if (Ts.empty())
                    Ts = {10, 30, 100, 300, 1000, 3000, 10000, 20000};
                std::vector<double> bx, bv;
                for (const auto &b : bounds::crlb_limited_series(scn, Ts))
                {
                    bx.push_back(b.delta_x);
                    bv.push_back(b.delta_v);
                }
                write_bounds_rows(os, Ts, bx, bv, {}, {});
            }
            else if (mode == "unlimited")
            {
                const auto scn = scenario_of(sj);
                if (Ts.empty())
                    Ts = {100, 300, 1000, 3000, 10000};
                const auto a = bounds::crlb_unlimited_asymptote(scn.r0, scn.R, scn.kappa_density, scn.G1,
                                                                scn.sigma_n2, scn.n_antennas);
                std::vector<double> bx, bv;
                for (int T : Ts)
                {
                    const double Td = T;
                    bx.push_back(a.x_limit / Td);
                    bv.push_back(a.v_limit / (Td * (Td + 1.0) * (2.0 * Td + 1.0)));
                }
                write_bounds_rows(os, Ts, bx, bv, {}, {});
            }
            else if (mode == "mse")
            {
                bounds::MseStudyConfig mc;
                const auto scn = scenario_of(sj);
                mc.family = j.value("family", std::string("unlimited")) == "limited"
                                ? bounds::ScenarioFamily::limited_fixed
                                : bounds::ScenarioFamily::unlimited_ppp;
                mc.kappa_density = scn.kappa_density;
                mc.R = scn.R;
                mc.r0 = scn.r0;
                mc.sigma_theta = scn.sigma_theta;
                mc.speed = j.value("speed", mc.speed);
                mc.fixed_aps = scn.ap_positions.empty() ? default_limited_aps() : scn.ap_positions;
                mc.fixed_start = sj.contains("x0") ? scn.x0 : Vec2(2.0, 3.0);
                if (!Ts.empty())
                    mc.T_grid = Ts;
                mc.n_trials = j.value("n_trials", mc.n_trials);
                mc.n_restarts = j.value("n_restarts", mc.n_restarts);
                mc.seed = seed ? *seed : j.value("seed", mc.seed);
                const auto res = bounds::mse_study(mc);
                std::vector<int> Tout;
                std::vector<double> bx, bv, mx, mv;
                for (const auto &r : res.rows)
                {
                    Tout.push_back(r.T);
                    bx.push_back(r.bound_x);
                    bv.push_back(r.bound_v);
                    mx.push_back(r.mse_x);
                    mv.push_back(r.mse_v);
                }
                write_bounds_rows(os, Tout, bx, bv, mx, mv);
                log_info("mse slopes: x " + fmt(res.slope_x) + ", v " + fmt(res.slope_v));
            }
            else if (mode == "ru")
            {
                const json rj = j.value("ru", json::object());
                const double d = rj.value("d_m", 1.0);
                const double B = rj.value("bandwidth_hz", 400e6);
                const int M = rj.value("M", 256);
                const int L = rj.value("L", 64);
                const double C = rj.value("C_d", 1.0);
                const auto r = bounds::theoretical_Ru_grid(d, B, M, L, C);
                os << "u,re,im,abs\n";
                for (int u = 0; u < M; ++u)
                    os << u << ',' << fmt(r[u].real()) << ',' << fmt(r[u].imag()) << ',' << fmt(std::abs(r[u]))
                       << '\n';
            }
            else
                throw ConfigError("bounds: unknown mode " + mode);
        }
        catch (const json::exception &e)
        {
            throw ConfigError(std::string("bounds config: ") + e.what());
        }
        return 0;
    }

    std::vector<Vec2> read_trajectory_csv(const fs::path &path)
    {
        std::istringstream is(read_file(path));
        std::string line;
        std::getline(is, line);
        std::vector<Vec2> out;
        while (std::getline(is, line))
        {
            if (line.empty())
                continue;
            std::istringstream ls(line);
            std::string t, x, y;
            if (!std::getline(ls, t, ',') || !std::getline(ls, x, ',') || !std::getline(ls, y, ','))
                throw ConfigError("malformed trajectory row in " + path.string());
            try
            {
                out.emplace_back(std::stod(x), std::stod(y));
            }
            catch (const std::exception &)
            {
                throw ConfigError("malformed trajectory row in " + path.string());
            }
        }
        return out;
    }

    std::string inference_config_text(const std::string &config)
    {
        return config.empty() ? std::string("{}") : read_file(config);
    }
} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"blindmap: blind trajectory inference and radio mapping from MIMO-OFDM channels"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string log_level = "warning";
    app.add_option("--log-level", log_level, "debug, info, warning or silent")->check(
        CLI::IsMember({"debug", "info", "warning", "silent"}));

    std::string config, out, dataset, trajectory, params_path, mode;
    std::optional<std::uint64_t> seed;
    auto common = [&](CLI::App *sub, bool need_out) {
        sub->add_option("--config", config, "JSON configuration file");
        sub->add_option("--seed", seed, "random seed overriding the configuration");
        auto *o = sub->add_option("--out", out, "output path");
        if (need_out)
            o->required();
    };

    auto *simulate = app.add_subcommand("simulate", "synthesize a channel dataset");
    common(simulate, true);
    auto *feat = app.add_subcommand("features", "extract per-sample radio signatures");
    common(feat, true);
    feat->add_option("--dataset", dataset, "dataset file")->required();
    auto *infer = app.add_subcommand("infer", "blind trajectory inference");
    common(infer, true);
    infer->add_option("--dataset", dataset, "dataset file")->required();
    auto *bnd = app.add_subcommand("bounds", "Cramer-Rao bound tables");
    common(bnd, true);
    bnd->add_option("--mode", mode, "limited, unlimited, mse or ru")
        ->required()
        ->check(CLI::IsMember({"limited", "unlimited", "mse", "ru"}));
    auto *ev = app.add_subcommand("eval", "score an estimated trajectory");
    common(ev, true);
    ev->add_option("--dataset", dataset, "dataset file")->required();
    ev->add_option("--trajectory", trajectory, "trajectory CSV (t,x,y,...)")->required();
    ev->add_option("--params", params_path, "propagation parameters JSON for the LOS/NLOS error");
    auto *run = app.add_subcommand("run", "full pipeline with all artifacts");
    common(run, false);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    set_log_level(log_level == "debug"  ? LogLevel::debug
                  : log_level == "info" ? LogLevel::info
                  : log_level == "silent" ? LogLevel::silent
                                          : LogLevel::warning);

    try
    {
        if (*simulate)
        {
            const auto cfg = experiment_config(config, seed);
            const Scene scene = cfg.scene_path.empty() ? default_office_scene() : load_scene(cfg.scene_path);
            write_dataset(generate_dataset(scene, cfg.generation), out);
        }
        else if (*feat)
        {
            const Dataset ds = read_dataset(dataset);
            features::write_feature_csv(features::extract_signatures(ds), out);
        }
        else if (*infer)
        {
            auto ic = inference::InferenceConfig::from_json(inference_config_text(config));
            if (seed)
                ic.seed = *seed;
            const Dataset ds = read_dataset(dataset);
            const auto obs = obs::make_observations(ds, features::extract_signatures(ds));
            const auto graph = inference::build_graph(ds.scene.env.region, ic.resolution_m, ic.d_max_m);
            const auto res = inference::alternate_optimize(obs, graph, ic);
            fs::create_directories(out);
            std::vector<Vec2> pos;
            for (int n : res.estimate.nodes)
                pos.push_back(graph.nodes[n]);
            eval::write_trajectory_csv(fs::path(out) / "trajectory.csv", pos, res.estimate.nodes);
            save_params(fs::path(out) / "params.json", res.params, &res.mobility);
            eval::write_trace_csv(fs::path(out) / "trace.csv", res.trace);
        }
        else if (*bnd)
            return cmd_bounds(mode, config, out, seed);
        else if (*ev)
        {
            const Dataset ds = read_dataset(dataset);
            const auto est = read_trajectory_csv(trajectory);
            eval::ExperimentMetrics m;
            m.e_loc = eval::e_loc(ds.trajectory, est, ds.los, ds.Q());
            if (!params_path.empty())
            {
                const auto p = load_params(params_path);
                std::vector<std::uint8_t> truth(ds.los.size());
                for (std::size_t i = 0; i < truth.size(); ++i)
                    truth[i] = ds.los[i] ? 0 : 1;
                m.losnlos_error = eval::losnlos_error(truth, p.nlos);
            }
            const double res_m = config.empty() ? eval::ExperimentConfig{}.beam_map_resolution_m
                                                : experiment_config(config, seed).beam_map_resolution_m;
            const auto map = eval::build_beam_map(ds.channels, ds.Q(), est, ds.scene.env.region, res_m);
            m.e_map = eval::e_map(map, ds.channels, ds.trajectory).e_map;
            if (!config.empty())
                m.config_hash = eval::config_hash(experiment_config(config, seed));
            std::ofstream os(out, std::ios::binary);
            if (!os)
                throw ConfigError("cannot write " + out);
            os << eval::metrics_to_json(m);
        }
        else if (*run)
        {
            auto cfg = experiment_config(config, seed);
            if (!out.empty())
                cfg.output_dir = out;
            const auto res = eval::run_experiment(cfg);
            std::cout << "e_loc " << res.metrics.e_loc.all.mean << " m, e_map " << res.metrics.e_map
                      << ", output " << cfg.output_dir.string() << '\n';
        }
    }
    catch (const ConfigError &e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    catch (const ParameterError &e)
    {
        std::cerr << "parameter error: " << e.what() << '\n';
        return kExitConfig;
    }
    catch (const NumericalError &e)
    {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
