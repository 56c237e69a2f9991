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

#include "blindmap/params_io.hpp"

#include <json.hpp>

#include <array>
#include <fstream>
#include <sstream>

namespace blindmap
{
    using nlohmann::json;

    std::string params_to_json(const obs::PropagationParams &p, const inference::MobilityModel *mobility)
    {
        json j;
        j["version"] = "blindmap-params/1";
        j["T"] = p.T;
        j["Q"] = p.Q;
        json comps = json::array();
        for (int k = 0; k < 2; ++k)
        {
            const Mat2 &U = p.upsilon[k];
            comps.push_back({{"beta", p.beta[k]},
                             {"alpha", p.alpha[k]},
                             {"sigma_s2", p.sigma_s2[k]},
                             {"sigma_theta2", p.sigma_theta2[k]},
                             {"m", {p.m[k].x(), p.m[k].y()}},
                             {"upsilon", {U(0, 0), U(0, 1), U(1, 0), U(1, 1)}}});
        }
        j["components"] = comps;
        json pi = json::array();
        for (const auto &w : p.pi)
            pi.push_back({w[0], w[1]});
        j["pi"] = pi;
        j["nlos"] = p.nlos;
        j["sigma_u2"] = p.sigma_u2;
        if (mobility)
            j["mobility"] = {{"gamma", mobility->gamma},
                             {"slot_s", mobility->slot_s},
                             {"mean_velocity", {mobility->mean_velocity.x(), mobility->mean_velocity.y()}},
                             {"sigma_v2", mobility->sigma_v2},
                             {"step_variance_floor", mobility->step_variance_floor}};
        return j.dump(1);
    }

    obs::PropagationParams params_from_json(const std::string &text, inference::MobilityModel *mobility)
    {
        obs::PropagationParams p;
        try
        {
            const json j = json::parse(text);
            if (j.at("version") != "blindmap-params/1")
                throw ConfigError("params: unsupported version " + j.at("version").dump());
            p.T = j.at("T").get<int>();
            p.Q = j.at("Q").get<int>();
            const auto &comps = j.at("components");
            if (comps.size() != 2)
                throw ConfigError("params: expected two mixture components");
            for (int k = 0; k < 2; ++k)
            {
                const auto &c = comps[k];
                p.beta[k] = c.at("beta").get<std::vector<double>>();
                p.alpha[k] = c.at("alpha").get<std::vector<double>>();
                p.sigma_s2[k] = c.at("sigma_s2").get<std::vector<double>>();
                p.sigma_theta2[k] = c.at("sigma_theta2").get<double>();
                const auto m = c.at("m").get<std::vector<double>>();
                const auto u = c.at("upsilon").get<std::vector<double>>();
                if (m.size() != 2 || u.size() != 4)
                    throw ConfigError("params: malformed component block");
                p.m[k] = Vec2(m[0], m[1]);
                p.upsilon[k] << u[0], u[1], u[2], u[3];
            }
            p.pi = j.at("pi").get<std::vector<std::array<double, 2>>>();
            p.nlos = j.at("nlos").get<std::vector<std::uint8_t>>();
            p.sigma_u2 = j.at("sigma_u2").get<double>();
            if (mobility && j.contains("mobility"))
            {
                const auto &mj = j["mobility"];
                mobility->gamma = mj.at("gamma").get<double>();
                mobility->slot_s = mj.at("slot_s").get<double>();
                const auto v = mj.at("mean_velocity").get<std::vector<double>>();
                if (v.size() != 2)
                    throw ConfigError("params: malformed mean velocity");
                mobility->mean_velocity = Vec2(v[0], v[1]);
                mobility->sigma_v2 = mj.at("sigma_v2").get<double>();
                mobility->step_variance_floor = mj.value("step_variance_floor", mobility->step_variance_floor);
            }
        }
        catch (const json::exception &e)
        {
            throw ConfigError(std::string("params: ") + e.what());
        }
        try
        {
            p.validate();
        }
        catch (const ParameterError &e)
        {
            throw ConfigError(std::string("params: ") + e.what());
        }
        return p;
    }

    void save_params(const std::filesystem::path &path, const obs::PropagationParams &params,
                     const inference::MobilityModel *mobility)
    {
        std::ofstream out(path);
        if (!out)
            throw ConfigError("cannot write params file " + path.string());
        out << params_to_json(params, mobility) << '\n';
    }

    obs::PropagationParams load_params(const std::filesystem::path &path, inference::MobilityModel *mobility)
    {
        std::ifstream in(path);
        if (!in)
            throw ConfigError("cannot open params file " + path.string());
        std::ostringstream buf;
        buf << in.rdbuf();
        return params_from_json(buf.str(), mobility);
    }

} // namespace blindmap
