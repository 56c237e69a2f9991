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

#include "blindmap/scene_io.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace blindmap
{
    using nlohmann::json;

    namespace
    {
        Vec2 read_point(const json &j)
        {
            if (!j.is_array() || j.size() != 2)
                throw ConfigError("scene: expected a point [x, y]");
            return {j[0].get<double>(), j[1].get<double>()};
        }

        json write_point(const Vec2 &p) { return json::array({p.x(), p.y()}); }

        sim::ArrayGeometry read_array(const json &j, sim::ArrayGeometry g)
        {
            g.n_antennas = j.value("n_antennas", g.n_antennas);
            g.spacing_m = j.value("spacing_m", g.spacing_m);
            g.carrier_hz = j.value("carrier_hz", g.carrier_hz);
            g.reference_angle = j.value("reference_angle", g.reference_angle);
            return g;
        }

        json write_array(const sim::ArrayGeometry &g)
        {
            return {{"n_antennas", g.n_antennas},
                    {"spacing_m", g.spacing_m},
                    {"carrier_hz", g.carrier_hz},
                    {"reference_angle", g.reference_angle}};
        }
    } // namespace

    void Scene::validate() const
    {
        env.validate();
        if (env.aps.empty())
            throw ParameterError("scene has no access points");
        for (const auto &ap : env.aps)
            ofdm.validate(ap.array.n_antennas);
        if (!(noise_variance >= 0.0))
            throw ParameterError("noise variance must be non-negative");
        if (env.region.size() < 3)
            throw ParameterError("scene region needs at least 3 vertices");
    }

    Scene parse_scene(const std::string &text)
    {
        Scene scene;
        try
        {
            const json j = json::parse(text);
            if (j.contains("version") && j["version"] != "blindmap-scene/1")
                throw ConfigError("scene: unsupported version " + j["version"].dump());
            auto &env = scene.env;
            if (j.contains("room"))
            {
                const auto &room = j["room"];
                env = sim::make_rectangular_room(room.at("width").get<double>(), room.at("height").get<double>(),
                                                 room.value("absorption", 0.3), room.value("spread", 0.05));
            }
            if (j.contains("region"))
            {
                env.region.clear();
                for (const auto &p : j["region"])
                    env.region.push_back(read_point(p));
            }
            for (const auto &s : j.value("surfaces", json::array()))
                env.surfaces.push_back({Segment{read_point(s.at("a")), read_point(s.at("b"))}, s.value("absorption", 0.3),
                                        s.value("spread", 0.05)});
            for (const auto &s : j.value("scatterers", json::array()))
            {
                sim::Scatterer sc;
                sc.position = read_point(s.at("position"));
                sc.max_bend = s.value("max_bend", sc.max_bend);
                sc.attenuation = s.value("attenuation", sc.attenuation);
                sc.spread = s.value("spread", sc.spread);
                env.scatterers.push_back(sc);
            }
            env.max_reflection_order = j.value("max_reflection_order", env.max_reflection_order);
            env.n_virtual_tx = j.value("n_virtual_tx", env.n_virtual_tx);
            env.cluster_seed = j.value("cluster_seed", env.cluster_seed);

            const sim::ArrayGeometry base = read_array(j.value("array", json::object()), sim::ArrayGeometry{});
            for (const auto &a : j.value("aps", json::array()))
            {
                sim::AccessPoint ap;
                ap.position = read_point(a.at("position"));
                ap.array = read_array(a.value("array", json::object()), base);
                ap.array.reference_angle = wrap_to_2pi(a.value("reference_angle", ap.array.reference_angle));
                env.aps.push_back(ap);
            }
            if (j.contains("ofdm"))
            {
                scene.ofdm.n_subcarriers = j["ofdm"].value("n_subcarriers", scene.ofdm.n_subcarriers);
                scene.ofdm.bandwidth_hz = j["ofdm"].value("bandwidth_hz", scene.ofdm.bandwidth_hz);
            }
            scene.noise_variance = j.value("noise_variance", 0.0);
        }
        catch (const json::exception &e)
        {
            throw ConfigError(std::string("scene: ") + e.what());
        }
        try
        {
            scene.validate();
        }
        catch (const ParameterError &e)
        {
            throw ConfigError(std::string("scene: ") + e.what());
        }
        return scene;
    }

    Scene load_scene(const std::filesystem::path &path)
    {
        std::ifstream in(path);
        if (!in)
            throw ConfigError("cannot open scene file " + path.string());
        std::ostringstream buf;
        buf << in.rdbuf();
        return parse_scene(buf.str());
    }

    std::string scene_to_json(const Scene &scene)
    {
        const auto &env = scene.env;
        json j;
        j["version"] = "blindmap-scene/1";
        j["region"] = json::array();
        for (const auto &p : env.region)
            j["region"].push_back(write_point(p));
        j["surfaces"] = json::array();
        for (const auto &s : env.surfaces)
            j["surfaces"].push_back({{"a", write_point(s.segment.a)},
                                     {"b", write_point(s.segment.b)},
                                     {"absorption", s.absorption},
                                     {"spread", s.scattering_spread}});
        j["scatterers"] = json::array();
        for (const auto &s : env.scatterers)
            j["scatterers"].push_back({{"position", write_point(s.position)},
                                       {"max_bend", s.max_bend},
                                       {"attenuation", s.attenuation},
                                       {"spread", s.spread}});
        j["max_reflection_order"] = env.max_reflection_order;
        j["n_virtual_tx"] = env.n_virtual_tx;
        j["cluster_seed"] = env.cluster_seed;
        j["aps"] = json::array();
        for (const auto &ap : env.aps)
            j["aps"].push_back({{"position", write_point(ap.position)}, {"array", write_array(ap.array)}});
        j["ofdm"] = {{"n_subcarriers", scene.ofdm.n_subcarriers}, {"bandwidth_hz", scene.ofdm.bandwidth_hz}};
        j["noise_variance"] = scene.noise_variance;
        return j.dump(2);
    }

    void save_scene(const Scene &scene, const std::filesystem::path &path)
    {
        std::ofstream out(path);
        if (!out)
            throw ConfigError("cannot write scene file " + path.string());
        out << scene_to_json(scene) << '\n';
    }

    Scene default_office_scene()
    {
        Scene scene;
        auto &env = scene.env;
        env = sim::make_rectangular_room(12.0, 10.0, 0.35, 0.04);
        // Two partitions leave doorways and create LOS shadows for every corner AP.
        env.surfaces.push_back({Segment{Vec2(4.0, 0.0), Vec2(4.0, 6.0)}, 0.5, 0.04});
        env.surfaces.push_back({Segment{Vec2(8.0, 10.0), Vec2(8.0, 4.0)}, 0.5, 0.04});
        env.scatterers.push_back({Vec2(4.0, 6.0), 0.7, 0.3, 0.02});
        env.scatterers.push_back({Vec2(8.0, 4.0), 0.7, 0.3, 0.02});
        env.max_reflection_order = 2;
        env.n_virtual_tx = 8;
        env.cluster_seed = 7;

        sim::ArrayGeometry array;
        array.n_antennas = 8;
        array.carrier_hz = 2.4e9;
        array.spacing_m = array.wavelength() / 2.0;
        const Vec2 corners[4] = {Vec2(0.05, 0.05), Vec2(11.95, 0.05), Vec2(11.95, 9.95), Vec2(0.05, 9.95)};
        const Vec2 centre(6.0, 5.0);
        for (const Vec2 &c : corners)
        {
            sim::AccessPoint ap;
            ap.position = c;
            ap.array = array;
            ap.array.reference_angle = azimuth(c, centre);
            env.aps.push_back(ap);
        }
        scene.ofdm.n_subcarriers = 64;
        // Wide band so metre-scale moves span several lag bins of the CSI distance.
        scene.ofdm.bandwidth_hz = 2e9;
        scene.noise_variance = 1e-6;
        return scene;
    }

} // namespace blindmap
