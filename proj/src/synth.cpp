#include "uavad/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <json.hpp>

#include "uavad/errors.hpp"
#include "uavad/io.hpp"
#include "uavad/rng.hpp"

namespace uavad {

using nlohmann::json;

std::string to_string(AnomalyType t) {
    switch (t) {
        case AnomalyType::pedestrian_on_road: return "pedestrian-on-road";
        case AnomalyType::vehicle_off_road: return "vehicle-off-road";
        case AnomalyType::over_speed: return "over-speed";
        case AnomalyType::erratic_trajectory: return "erratic-trajectory";
        case AnomalyType::stopped_on_road: return "stopped-on-road";
        case AnomalyType::pedestrian_gathering: return "pedestrian-gathering";
        default: return "wrong-zone-parking";
    }
}

AnomalyType anomaly_type_from_string(const std::string& s) {
    static const std::map<std::string, AnomalyType> kMap = {
        {"pedestrian-on-road", AnomalyType::pedestrian_on_road},
        {"vehicle-off-road", AnomalyType::vehicle_off_road},
        {"over-speed", AnomalyType::over_speed},
        {"erratic-trajectory", AnomalyType::erratic_trajectory},
        {"stopped-on-road", AnomalyType::stopped_on_road},
        {"pedestrian-gathering", AnomalyType::pedestrian_gathering},
        {"wrong-zone-parking", AnomalyType::wrong_zone_parking},
    };
    const auto it = kMap.find(s);
    if (it == kMap.end()) throw ConfigError("unknown anomaly type '" + s + "'");
    return it->second;
}

namespace {

struct Footprint {
    int w, h;
};

Footprint footprint_of(ObjectClass cls) {
    return cls == ObjectClass::vehicle ? Footprint{10, 6} : Footprint{4, 4};
}

std::array<double, 3> agent_color(const AgentSpec& agent, int agent_id) {
    if (agent.color) return *agent.color;
    static const std::array<double, 3> kVehicle[] = {
        {0.85, 0.15, 0.15}, {0.15, 0.25, 0.85}, {0.90, 0.90, 0.95},
        {0.20, 0.20, 0.25}, {0.70, 0.50, 0.10},
    };
    static const std::array<double, 3> kHuman[] = {
        {0.95, 0.85, 0.20}, {0.90, 0.50, 0.70}, {0.30, 0.90, 0.90},
    };
    if (agent.cls == ObjectClass::vehicle) return kVehicle[agent_id % 5];
    return kHuman[agent_id % 3];
}

// Position along the closed waypoint loop at a given travelled distance.
std::pair<double, double> path_position(const std::vector<std::pair<double, double>>& wp,
                                        double dist) {
    if (wp.size() == 1) return wp[0];
    std::vector<double> seg_len;
    double total = 0.0;
    for (size_t i = 0; i < wp.size(); ++i) {
        const auto& a = wp[i];
        const auto& b = wp[(i + 1) % wp.size()];
        const double len = std::hypot(b.first - a.first, b.second - a.second);
        seg_len.push_back(len);
        total += len;
    }
    if (total <= 0.0) return wp[0];
    double d = std::fmod(dist, total);
    if (d < 0.0) d += total;
    for (size_t i = 0; i < wp.size(); ++i) {
        if (d <= seg_len[i] && seg_len[i] > 0.0) {
            const auto& a = wp[i];
            const auto& b = wp[(i + 1) % wp.size()];
            const double t = d / seg_len[i];
            return {a.first + t * (b.first - a.first), a.second + t * (b.second - a.second)};
        }
        d -= seg_len[i];
    }
    return wp[0];
}

// Linear ramp inside the interval so positional overrides enter and leave
// within labeled frames instead of spiking flow in a neighboring normal frame.
double interval_ramp(const AnomalyInjection& inj, int frame) {
    const double in = static_cast<double>(frame - inj.start_frame + 1);
    const double out = static_cast<double>(inj.end_frame - frame);
    return std::min({1.0, in / 3.0, out / 3.0});
}

} // namespace

BoundingBox agent_box(const AgentSpec& agent, const AgentState& state) {
    const Footprint fp = footprint_of(agent.cls);
    return BoundingBox{static_cast<int>(std::lround(state.x)) - fp.w / 2,
                       static_cast<int>(std::lround(state.y)) - fp.h / 2, fp.w, fp.h};
}

int frame_label(const ScenarioConfig& config, int frame) {
    for (const auto& inj : config.anomalies)
        if (inj.active(frame)) return 1;
    return 0;
}

bool agent_anomalous_at(const ScenarioConfig& config, int agent_id, int frame) {
    for (const auto& inj : config.anomalies)
        if (inj.active(frame) &&
            std::find(inj.agents.begin(), inj.agents.end(), agent_id) != inj.agents.end())
            return true;
    return false;
}

void validate_scenario_config(const ScenarioConfig& config) {
    if (config.width < 16 || config.height < 16)
        throw ConfigError("scene must be at least 16x16");
    if (config.frame_count < 2) throw ConfigError("frame count must be >= 2");
    if (config.layout.road_y0 < 0 || config.layout.road_y1 > config.height ||
        config.layout.road_y0 >= config.layout.road_y1)
        throw ConfigError("road band must lie inside the scene");
    if (config.agents.empty()) throw ConfigError("scenario needs at least one agent");
    for (size_t a = 0; a < config.agents.size(); ++a) {
        if (config.agents[a].waypoints.empty())
            throw ConfigError("agent " + std::to_string(a) + " has no waypoints");
        if (config.agents[a].speed < 0.0)
            throw ConfigError("agent " + std::to_string(a) + " has negative speed");
        for (const auto& [x, y] : config.agents[a].waypoints)
            if (x < 0.0 || x >= config.width || y < 0.0 || y >= config.height)
                throw ConfigError("agent " + std::to_string(a) + " waypoint outside the scene");
    }
    for (const auto& inj : config.anomalies) {
        if (inj.start_frame < 0 || inj.end_frame > config.frame_count ||
            inj.start_frame >= inj.end_frame)
            throw ConfigError("anomaly interval [" + std::to_string(inj.start_frame) + "," +
                              std::to_string(inj.end_frame) + ") outside [0," +
                              std::to_string(config.frame_count) + ")");
        if (inj.agents.empty()) throw ConfigError("anomaly lists no agents");
        for (int id : inj.agents)
            if (id < 0 || id >= static_cast<int>(config.agents.size()))
                throw ConfigError("anomaly references unknown agent id " + std::to_string(id));
        if (inj.type == AnomalyType::pedestrian_gathering && inj.agents.size() < 3)
            throw ConfigError("pedestrian gathering needs at least 3 agents");
    }
}

Scenario generate_scenario(const ScenarioConfig& config) {
    validate_scenario_config(config);
    const size_t n_agents = config.agents.size();
    const double road_mid = (config.layout.road_y0 + config.layout.road_y1) / 2.0;
    // Parking strip sits above the road if there is room, below otherwise.
    const double off_road_y = config.layout.road_y0 >= 12
                                  ? config.layout.road_y0 - 6.0
                                  : std::min<double>(config.height - 4, config.layout.road_y1 + 6);

    std::vector<double> travelled(n_agents, 0.0);
    std::vector<Rng> agent_rng;
    for (size_t a = 0; a < n_agents; ++a)
        agent_rng.emplace_back(mix_seed(config.seed, 0xa9e27 + a));
    std::vector<double> erratic_dx(n_agents, 0.0), erratic_dy(n_agents, 0.0);
    std::vector<double> erratic_heading(n_agents, 0.0);

    // Gathering points are drawn once per injection.
    std::vector<std::pair<double, double>> gather_points(config.anomalies.size());
    {
        Rng rng(mix_seed(config.seed, 0x6a7e));
        for (size_t i = 0; i < config.anomalies.size(); ++i)
            gather_points[i] = {rng.uniform(config.width * 0.25, config.width * 0.75), road_mid};
    }

    Scenario scenario;
    scenario.frames.assign(config.frame_count, std::vector<AgentState>(n_agents));

    for (int t = 0; t < config.frame_count; ++t) {
        for (size_t a = 0; a < n_agents; ++a) {
            const AgentSpec& spec = config.agents[a];
            const AnomalyInjection* active = nullptr;
            size_t active_idx = 0;
            for (size_t i = 0; i < config.anomalies.size(); ++i) {
                const auto& inj = config.anomalies[i];
                if (inj.active(t) && std::find(inj.agents.begin(), inj.agents.end(),
                                               static_cast<int>(a)) != inj.agents.end()) {
                    active = &inj;
                    active_idx = i;
                    break;
                }
            }

            auto [px, py] = path_position(spec.waypoints, travelled[a]);
            double advance = spec.speed;

            if (active) {
                const double ramp = interval_ramp(*active, t);
                switch (active->type) {
                    case AnomalyType::over_speed:
                        advance = spec.speed * active->speed_factor;
                        break;
                    case AnomalyType::stopped_on_road:
                        advance = 0.0;
                        break;
                    case AnomalyType::wrong_zone_parking:
                        advance = 0.0;
                        py += ramp * (off_road_y - py);
                        break;
                    case AnomalyType::pedestrian_on_road:
                        py += ramp * (road_mid - py);
                        break;
                    case AnomalyType::vehicle_off_road:
                        py += ramp * (off_road_y - py);
                        break;
                    case AnomalyType::pedestrian_gathering: {
                        const auto& gp = gather_points[active_idx];
                        const size_t rank = std::find(active->agents.begin(),
                                                      active->agents.end(),
                                                      static_cast<int>(a)) -
                                            active->agents.begin();
                        const double angle = 2.0 * 3.14159265358979323846 *
                                             static_cast<double>(rank) /
                                             static_cast<double>(active->agents.size());
                        const double r = active->radius * 0.6;
                        const double gx = gp.first + r * std::cos(angle);
                        const double gy = gp.second + r * std::sin(angle);
                        px += ramp * (gx - px);
                        py += ramp * (gy - py);
                        advance = 0.0;
                        break;
                    }
                    case AnomalyType::erratic_trajectory: {
                        erratic_heading[a] += agent_rng[a].uniform(-1.2, 1.2);
                        erratic_dx[a] += spec.speed * 1.5 * std::cos(erratic_heading[a]);
                        erratic_dy[a] += spec.speed * 1.5 * std::sin(erratic_heading[a]);
                        const double cap = 12.0;
                        erratic_dx[a] = std::clamp(erratic_dx[a], -cap, cap);
                        erratic_dy[a] = std::clamp(erratic_dy[a], -cap, cap);
                        px += ramp * erratic_dx[a];
                        py += ramp * erratic_dy[a];
                        advance = 0.0;
                        break;
                    }
                }
            } else {
                erratic_dx[a] = 0.0;
                erratic_dy[a] = 0.0;
                erratic_heading[a] = std::atan2(0.0, 1.0);
            }

            AgentState& state = scenario.frames[t][a];
            state.x = std::clamp(px, 0.0, static_cast<double>(config.width - 1));
            state.y = std::clamp(py, 0.0, static_cast<double>(config.height - 1));
            travelled[a] += advance;
        }
    }

    // Velocities are the realized displacement to the next frame.
    for (int t = 0; t < config.frame_count; ++t)
        for (size_t a = 0; a < n_agents; ++a) {
            AgentState& state = scenario.frames[t][a];
            if (t + 1 < config.frame_count) {
                state.vx = scenario.frames[t + 1][a].x - state.x;
                state.vy = scenario.frames[t + 1][a].y - state.y;
            }
            state.heading = std::atan2(state.vy, state.vx);
        }
    return scenario;
}

namespace {

ClassMask layout_mask(const ScenarioConfig& config) {
    ClassMask mask;
    mask.width = config.width;
    mask.height = config.height;
    mask.labels.assign(static_cast<size_t>(config.width) * config.height, kClassGreenery);
    for (int y = config.layout.road_y0; y < config.layout.road_y1; ++y)
        for (int x = 0; x < config.width; ++x) mask.at(x, y) = kClassRoad;
    for (const auto& r : config.layout.regions) {
        for (int y = std::max(0, r.y); y < std::min(config.height, r.y + r.h); ++y)
            for (int x = std::max(0, r.x); x < std::min(config.width, r.x + r.w); ++x)
                mask.at(x, y) = r.cls;
    }
    return mask;
}

const std::array<double, 3>& class_base_color(uint8_t cls) {
    static const std::array<double, 3> kColors[4] = {
        {0.13, 0.55, 0.13}, // greenery
        {0.35, 0.35, 0.38}, // road
        {0.60, 0.45, 0.30}, // construction
        {0.10, 0.30, 0.75}, // water
    };
    return kColors[cls];
}

void draw_agent(Image& img, const AgentSpec& spec, const AgentState& state, int agent_id) {
    const BoundingBox box = agent_box(spec, state);
    if (!box.intersects(img.width, img.height)) return;
    const BoundingBox c = box.clipped(img.width, img.height);
    const auto color = agent_color(spec, agent_id);
    for (int y = c.y; y < c.y + c.h; ++y)
        for (int x = c.x; x < c.x + c.w; ++x) {
            double r = color[0], g = color[1], b = color[2];
            const int ly = y - box.y;
            const int lx = x - box.x;
            if (spec.cls == ObjectClass::vehicle) {
                // Lighter roof stripe gives the patch internal texture.
                if (ly >= 2 && ly < box.h - 2 && lx >= 2 && lx < box.w - 2) {
                    r = std::min(1.0, r + 0.25);
                    g = std::min(1.0, g + 0.25);
                    b = std::min(1.0, b + 0.25);
                }
            } else if (ly == 0) {
                r *= 0.4;
                g *= 0.4;
                b *= 0.4;
            }
            img.at(x, y, 0) = static_cast<float>(r);
            img.at(x, y, 1) = static_cast<float>(g);
            img.at(x, y, 2) = static_cast<float>(b);
        }
}

} // namespace

SynthDataset render_dataset(const Scenario& scenario, const ScenarioConfig& config) {
    if (scenario.frames.size() != static_cast<size_t>(config.frame_count))
        throw ConfigError("scenario frame count does not match the config");

    SynthDataset ds;
    ds.config = config;
    ds.mask = layout_mask(config);

    // Static per-scene texture.
    std::vector<float> noise(static_cast<size_t>(config.width) * config.height * 3);
    {
        Rng rng(mix_seed(config.seed, 0xbac9));
        for (float& v : noise)
            v = static_cast<float>(rng.uniform(-config.noise_amplitude, config.noise_amplitude));
    }

    Rng jitter_rng(mix_seed(config.seed, 0xde7ec7));

    for (int t = 0; t < config.frame_count; ++t) {
        Image frame(config.width, config.height, 3);
        const int shift_x = static_cast<int>(std::lround(config.drift.first * t));
        const int shift_y = static_cast<int>(std::lround(config.drift.second * t));
        Rng flicker_rng(mix_seed(config.seed, 0xf11c000 + t));
        for (int y = 0; y < config.height; ++y)
            for (int x = 0; x < config.width; ++x) {
                const auto& base = class_base_color(ds.mask.at(x, y));
                const int nx = ((x + shift_x) % config.width + config.width) % config.width;
                const int ny = ((y + shift_y) % config.height + config.height) % config.height;
                const size_t ni = (static_cast<size_t>(ny) * config.width + nx) * 3;
                for (int ch = 0; ch < 3; ++ch) {
                    double v = base[ch] + noise[ni + ch];
                    if (config.flicker_amplitude > 0.0)
                        v += flicker_rng.uniform(-config.flicker_amplitude,
                                                 config.flicker_amplitude);
                    frame.at(x, y, ch) = static_cast<float>(std::clamp(v, 0.0, 1.0));
                }
            }
        for (size_t a = 0; a < config.agents.size(); ++a)
            draw_agent(frame, config.agents[a], scenario.frames[t][a], static_cast<int>(a));
        ds.frames.push_back(std::move(frame));

        // Ground-truth flow from frame t to t+1.
        if (t + 1 < config.frame_count) {
            FlowField flow;
            flow.width = config.width;
            flow.height = config.height;
            flow.u.assign(static_cast<size_t>(config.width) * config.height, 0.0f);
            flow.v.assign(flow.u.size(), 0.0f);
            for (size_t a = 0; a < config.agents.size(); ++a) {
                const AgentState& st = scenario.frames[t][a];
                const BoundingBox box = agent_box(config.agents[a], st);
                if (!box.intersects(config.width, config.height)) continue;
                const BoundingBox c = box.clipped(config.width, config.height);
                for (int y = c.y; y < c.y + c.h; ++y)
                    for (int x = c.x; x < c.x + c.w; ++x) {
                        flow.u_at(x, y) = static_cast<float>(st.vx);
                        flow.v_at(x, y) = static_cast<float>(st.vy);
                    }
            }
            ds.flows.push_back(std::move(flow));
        }

        for (size_t a = 0; a < config.agents.size(); ++a) {
            BoundingBox box = agent_box(config.agents[a], scenario.frames[t][a]);
            if (config.detection_jitter > 0.0) {
                box.x += static_cast<int>(std::lround(
                    jitter_rng.uniform(-config.detection_jitter, config.detection_jitter)));
                box.y += static_cast<int>(std::lround(
                    jitter_rng.uniform(-config.detection_jitter, config.detection_jitter)));
            }
            if (!box.intersects(config.width, config.height)) continue;
            DetectionRecord det;
            det.frame_index = t;
            det.object_id = static_cast<int>(a);
            det.object_class = config.agents[a].cls;
            det.bbox = box;
            ds.detections.push_back(std::move(det));
        }

        ds.annotations.push_back(FrameAnnotation{t, frame_label(config, t)});
    }
    return ds;
}

void write_synth_dataset(const SynthDataset& dataset, const std::filesystem::path& dir,
                         const std::string& video_id) {
    namespace fs = std::filesystem;
    fs::create_directories(dir / "frames");
    fs::create_directories(dir / "flow");

    char name[32];
    for (size_t t = 0; t < dataset.frames.size(); ++t) {
        std::snprintf(name, sizeof(name), "%06zu.ppm", t);
        save_image_ppm(dataset.frames[t], dir / "frames" / name);
    }
    for (size_t t = 0; t < dataset.flows.size(); ++t) {
        std::snprintf(name, sizeof(name), "%06zu.flo", t);
        save_flow_field(dataset.flows[t], dir / "flow" / name);
    }
    save_class_mask(dataset.mask, dir / "mask.pgm");

    std::vector<DetectionRecord> dets = dataset.detections;
    for (auto& d : dets) d.video_id = video_id;
    save_detections(dets, dir / "detections.jsonl");
    save_frame_annotations(dataset.annotations, dir / "annotations.csv");

    json manifest;
    manifest["video"] = video_id;
    manifest["width"] = dataset.config.width;
    manifest["height"] = dataset.config.height;
    manifest["frames"] = dataset.config.frame_count;
    manifest["seed"] = dataset.config.seed;
    manifest["flow_convention"] = "t_to_t_plus_1";
    manifest["anomalies"] = json::array();
    for (const auto& inj : dataset.config.anomalies)
        manifest["anomalies"].push_back({{"type", to_string(inj.type)},
                                         {"start", inj.start_frame},
                                         {"end", inj.end_frame},
                                         {"agents", inj.agents}});
    atomic_write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

// -------------------------------------------------------------------- config

namespace {

AnomalyInjection injection_from_json(const json& j) {
    AnomalyInjection inj;
    inj.type = anomaly_type_from_string(j.at("type").get<std::string>());
    inj.start_frame = j.at("start").get<int>();
    inj.end_frame = j.at("end").get<int>();
    inj.agents = j.at("agents").get<std::vector<int>>();
    if (j.contains("speed_factor")) inj.speed_factor = j["speed_factor"].get<double>();
    if (j.contains("radius")) inj.radius = j["radius"].get<double>();
    return inj;
}

} // namespace

ScenarioConfig scenario_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("scenario config: ") + e.what());
    }
    ScenarioConfig cfg;
    try {
        cfg.width = j.at("width").get<int>();
        cfg.height = j.at("height").get<int>();
        cfg.frame_count = j.at("frames").get<int>();
        if (j.contains("seed")) cfg.seed = j["seed"].get<uint64_t>();
        if (j.contains("noise_amplitude")) cfg.noise_amplitude = j["noise_amplitude"].get<double>();
        if (j.contains("flicker_amplitude"))
            cfg.flicker_amplitude = j["flicker_amplitude"].get<double>();
        if (j.contains("detection_jitter"))
            cfg.detection_jitter = j["detection_jitter"].get<double>();
        if (j.contains("drift")) {
            cfg.drift.first = j["drift"][0].get<double>();
            cfg.drift.second = j["drift"][1].get<double>();
        }
        const auto& layout = j.at("layout");
        cfg.layout.road_y0 = layout.at("road_y0").get<int>();
        cfg.layout.road_y1 = layout.at("road_y1").get<int>();
        if (layout.contains("regions"))
            for (const auto& r : layout["regions"]) {
                RegionRect rect;
                rect.x = r.at("x").get<int>();
                rect.y = r.at("y").get<int>();
                rect.w = r.at("w").get<int>();
                rect.h = r.at("h").get<int>();
                const std::string cls = r.at("class").get<std::string>();
                if (cls == "greenery") rect.cls = kClassGreenery;
                else if (cls == "road") rect.cls = kClassRoad;
                else if (cls == "construction") rect.cls = kClassConstruction;
                else if (cls == "water") rect.cls = kClassWater;
                else throw ConfigError("unknown region class '" + cls + "'");
                cfg.layout.regions.push_back(rect);
            }
        for (const auto& a : j.at("agents")) {
            AgentSpec agent;
            agent.cls = object_class_from_string(a.at("class").get<std::string>());
            for (const auto& w : a.at("waypoints"))
                agent.waypoints.emplace_back(w[0].get<double>(), w[1].get<double>());
            agent.speed = a.at("speed").get<double>();
            if (a.contains("tag")) agent.tag = a["tag"].get<std::string>();
            if (a.contains("color"))
                agent.color = std::array<double, 3>{a["color"][0].get<double>(),
                                                    a["color"][1].get<double>(),
                                                    a["color"][2].get<double>()};
            cfg.agents.push_back(std::move(agent));
        }
        if (j.contains("anomalies"))
            for (const auto& inj : j["anomalies"]) cfg.anomalies.push_back(injection_from_json(inj));
    } catch (const json::exception& e) {
        throw ParseError(std::string("scenario config: ") + e.what());
    }
    validate_scenario_config(cfg);
    return cfg;
}

ScenarioConfig scenario_from_json_file(const std::filesystem::path& path) {
    return scenario_from_json_text(read_file(path));
}

std::string scenario_to_json_text(const ScenarioConfig& cfg) {
    json j;
    j["width"] = cfg.width;
    j["height"] = cfg.height;
    j["frames"] = cfg.frame_count;
    j["seed"] = cfg.seed;
    j["noise_amplitude"] = cfg.noise_amplitude;
    j["flicker_amplitude"] = cfg.flicker_amplitude;
    j["detection_jitter"] = cfg.detection_jitter;
    j["drift"] = {cfg.drift.first, cfg.drift.second};
    j["layout"]["road_y0"] = cfg.layout.road_y0;
    j["layout"]["road_y1"] = cfg.layout.road_y1;
    j["layout"]["regions"] = json::array();
    static const char* kClassNames[] = {"greenery", "road", "construction", "water"};
    for (const auto& r : cfg.layout.regions)
        j["layout"]["regions"].push_back(
            {{"x", r.x}, {"y", r.y}, {"w", r.w}, {"h", r.h}, {"class", kClassNames[r.cls]}});
    j["agents"] = json::array();
    for (const auto& a : cfg.agents) {
        json agent;
        agent["class"] = to_string(a.cls);
        agent["speed"] = a.speed;
        agent["waypoints"] = json::array();
        for (const auto& [x, y] : a.waypoints) agent["waypoints"].push_back({x, y});
        if (!a.tag.empty()) agent["tag"] = a.tag;
        if (a.color) agent["color"] = {(*a.color)[0], (*a.color)[1], (*a.color)[2]};
        j["agents"].push_back(std::move(agent));
    }
    j["anomalies"] = json::array();
    for (const auto& inj : cfg.anomalies)
        j["anomalies"].push_back({{"type", to_string(inj.type)},
                                  {"start", inj.start_frame},
                                  {"end", inj.end_frame},
                                  {"agents", inj.agents},
                                  {"speed_factor", inj.speed_factor},
                                  {"radius", inj.radius}});
    return j.dump(2) + "\n";
}

// ------------------------------------------------------------------- presets

ScenarioConfig preset_scenario(const std::string& family, bool with_anomalies, int frame_count,
                               uint64_t seed) {
    ScenarioConfig cfg;
    cfg.width = 96;
    cfg.height = 72;
    cfg.frame_count = frame_count;
    cfg.seed = seed;
    cfg.layout.road_y0 = 28;
    cfg.layout.road_y1 = 44;
    cfg.layout.regions.push_back(RegionRect{64, 2, 28, 18, kClassConstruction});
    cfg.layout.regions.push_back(RegionRect{4, 52, 24, 14, kClassWater});

    const auto vehicle_loop = [](double y_top, double y_bot) {
        return std::vector<std::pair<double, double>>{
            {8.0, y_top}, {88.0, y_top}, {88.0, y_bot}, {8.0, y_bot}};
    };
    const auto add_vehicle = [&](double y_top, double y_bot, double speed) {
        AgentSpec a;
        a.cls = ObjectClass::vehicle;
        a.waypoints = vehicle_loop(y_top, y_bot);
        a.speed = speed;
        cfg.agents.push_back(std::move(a));
    };
    const auto add_pedestrian = [&](std::vector<std::pair<double, double>> wp, double speed) {
        AgentSpec a;
        a.cls = ObjectClass::human;
        a.waypoints = std::move(wp);
        a.speed = speed;
        cfg.agents.push_back(std::move(a));
    };

    // Agents 0-2: vehicles on the road; agents 3-4: pedestrians on greenery.
    add_vehicle(32.0, 34.0, 2.2);
    add_vehicle(38.0, 40.0, 1.8);
    add_vehicle(34.0, 37.0, 2.6);
    add_pedestrian({{34.0, 6.0}, {58.0, 6.0}, {58.0, 22.0}, {34.0, 22.0}}, 0.9);
    add_pedestrian({{36.0, 50.0}, {88.0, 50.0}, {88.0, 66.0}, {36.0, 66.0}}, 0.8);

    if (family == "context") {
        if (with_anomalies) {
            const int span = std::max(12, frame_count / 8);
            const auto at = [&](double frac) {
                return std::clamp(static_cast<int>(frame_count * frac), 0, frame_count - span);
            };
            cfg.anomalies.push_back(AnomalyInjection{AnomalyType::pedestrian_on_road, at(0.12),
                                                     at(0.12) + span, {3}});
            cfg.anomalies.push_back(AnomalyInjection{AnomalyType::vehicle_off_road, at(0.42),
                                                     at(0.42) + span, {0}});
            cfg.anomalies.push_back(AnomalyInjection{AnomalyType::pedestrian_on_road, at(0.72),
                                                     at(0.72) + span, {4}});
        }
    } else if (family == "local") {
        // Extra vehicle so speeds span a range and over-speed stays "local".
        add_vehicle(41.0, 42.0, 2.4);
        if (with_anomalies) {
            const int span = std::max(12, frame_count / 8);
            const auto at = [&](double frac) {
                return std::clamp(static_cast<int>(frame_count * frac), 0, frame_count - span);
            };
            AnomalyInjection fast{AnomalyType::over_speed, at(0.10), at(0.10) + span, {0}};
            fast.speed_factor = 1.7;
            cfg.anomalies.push_back(fast);
            cfg.anomalies.push_back(AnomalyInjection{AnomalyType::stopped_on_road, at(0.40),
                                                     at(0.40) + span, {1}});
            AnomalyInjection fast2{AnomalyType::over_speed, at(0.68), at(0.68) + span, {2}};
            fast2.speed_factor = 1.7;
            cfg.anomalies.push_back(fast2);
        }
    } else {
        throw ConfigError("unknown scenario family '" + family + "'");
    }
    return cfg;
}

} // namespace uavad
