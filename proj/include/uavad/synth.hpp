#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "uavad/types.hpp"

namespace uavad {

enum class AnomalyType {
    pedestrian_on_road,
    vehicle_off_road,
    over_speed,
    erratic_trajectory,
    stopped_on_road,
    pedestrian_gathering,
    wrong_zone_parking,
};

std::string to_string(AnomalyType t);
AnomalyType anomaly_type_from_string(const std::string& s);

struct AnomalyInjection {
    AnomalyType type = AnomalyType::over_speed;
    int start_frame = 0;
    int end_frame = 0; // exclusive
    std::vector<int> agents;
    double speed_factor = 3.0; // over_speed only
    double radius = 6.0;       // pedestrian_gathering only

    bool active(int frame) const { return frame >= start_frame && frame < end_frame; }
};

struct RegionRect {
    int x = 0, y = 0, w = 0, h = 0;
    uint8_t cls = kClassConstruction;
};

// Greenery base, a full-width horizontal road band, optional override rects.
struct SceneLayout {
    int road_y0 = 0;
    int road_y1 = 0; // exclusive
    std::vector<RegionRect> regions;
};

struct AgentSpec {
    ObjectClass cls = ObjectClass::vehicle;
    std::vector<std::pair<double, double>> waypoints; // cycled polyline
    double speed = 1.0;                               // px/frame
    std::string tag;
    std::optional<std::array<double, 3>> color;       // overrides the class palette
};

struct ScenarioConfig {
    int width = 96;
    int height = 72;
    int frame_count = 2;
    uint64_t seed = 0;
    SceneLayout layout;
    std::vector<AgentSpec> agents;
    std::vector<AnomalyInjection> anomalies;
    double noise_amplitude = 0.04; // static per-scene texture
    double flicker_amplitude = 0.0;
    double detection_jitter = 0.0; // max |offset| applied to emitted boxes
    std::pair<double, double> drift{0.0, 0.0};
};

struct AgentState {
    double x = 0.0, y = 0.0;   // footprint center
    double vx = 0.0, vy = 0.0; // displacement to the next frame
    double heading = 0.0;
};

struct Scenario {
    std::vector<std::vector<AgentState>> frames; // [frame][agent]
};

struct SynthDataset {
    std::vector<Image> frames;
    ClassMask mask;
    std::vector<FlowField> flows; // flows[t] maps frame t to t+1 (frame_count-1 fields)
    std::vector<DetectionRecord> detections;
    std::vector<FrameAnnotation> annotations;
    ScenarioConfig config;
};

void validate_scenario_config(const ScenarioConfig& config);

// Advances every agent along its waypoints; active injections override motion
// or position. Identical (config, seed) produce identical trajectories.
Scenario generate_scenario(const ScenarioConfig& config);

// Composites textured frames, the static class mask, ground-truth flow (agent
// displacement inside footprints, 0 elsewhere), detections and frame labels.
SynthDataset render_dataset(const Scenario& scenario, const ScenarioConfig& config);

// Agent footprint box at a given state.
BoundingBox agent_box(const AgentSpec& agent, const AgentState& state);

// True if the agent participates in an anomaly active at the frame.
bool agent_anomalous_at(const ScenarioConfig& config, int agent_id, int frame);

// Frame is anomalous iff any injection interval covers it.
int frame_label(const ScenarioConfig& config, int frame);

// Writes frames/, mask.pgm, flow/, detections.jsonl, annotations.csv and
// manifest.json (anomaly intervals with agent ids) under dir.
void write_synth_dataset(const SynthDataset& dataset, const std::filesystem::path& dir,
                         const std::string& video_id = "synth");

ScenarioConfig scenario_from_json_file(const std::filesystem::path& path);
ScenarioConfig scenario_from_json_text(const std::string& text);
std::string scenario_to_json_text(const ScenarioConfig& config);

// Built-in scenario families used by the experiment harness and fixtures.
// "context": normal vehicles on road + pedestrians on green paths; anomalies
// are purely contextual (pedestrian-on-road, vehicle-off-road).
// "local": anomalies stay near normal patterns (moderate over-speed,
// stopped-on-road), the few-shot study's regime.
ScenarioConfig preset_scenario(const std::string& family, bool with_anomalies, int frame_count,
                               uint64_t seed);

} // namespace uavad
