#include "uavad/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

#include <json.hpp>

#include "uavad/rng.hpp"

namespace uavad {

namespace fs = std::filesystem;
using nlohmann::json;

LoadedDataset load_dataset_dir(const fs::path& dir) {
    LoadedDataset ds;
    if (!fs::exists(dir / "annotations.csv"))
        throw ConfigError("dataset directory " + dir.string() + " is missing annotations.csv");
    ds.annotations = load_frame_annotations(dir / "annotations.csv");
    ds.detections = load_detections(dir / "detections.jsonl");
    ds.mask = load_class_mask(dir / "mask.pgm");

    char name[32];
    const size_t frame_count = ds.annotations.size();
    for (size_t t = 0; t < frame_count; ++t) {
        std::snprintf(name, sizeof(name), "%06zu.ppm", t);
        const fs::path p = dir / "frames" / name;
        if (!fs::exists(p)) throw ConfigError("dataset is missing frame file " + p.string());
        ds.frames.push_back(load_image_ppm(p));
    }
    for (size_t t = 0; t + 1 < frame_count; ++t) {
        std::snprintf(name, sizeof(name), "%06zu.flo", t);
        const fs::path p = dir / "flow" / name;
        if (!fs::exists(p)) break; // flow is optional; extraction can compute it
        ds.flows.push_back(load_flow_field(p));
    }

    if (fs::exists(dir / "manifest.json")) {
        json manifest;
        try {
            manifest = json::parse(read_file(dir / "manifest.json"));
        } catch (const json::exception& e) {
            throw ParseError(std::string("dataset manifest: ") + e.what());
        }
        ds.video_id = manifest.value("video", "video");
        if (manifest.contains("anomalies"))
            for (const auto& a : manifest["anomalies"]) {
                AnomalyInjection inj;
                inj.type = anomaly_type_from_string(a.at("type").get<std::string>());
                inj.start_frame = a.at("start").get<int>();
                inj.end_frame = a.at("end").get<int>();
                inj.agents = a.at("agents").get<std::vector<int>>();
                ds.anomalies.push_back(std::move(inj));
            }
    }
    return ds;
}

LoadedDataset dataset_from_synth(const SynthDataset& synth, const std::string& video_id) {
    LoadedDataset ds;
    ds.frames = synth.frames;
    ds.mask = synth.mask;
    ds.flows = synth.flows;
    ds.detections = synth.detections;
    for (auto& d : ds.detections) d.video_id = video_id;
    ds.annotations = synth.annotations;
    ds.anomalies = synth.config.anomalies;
    ds.video_id = video_id;
    return ds;
}

int object_label(const std::vector<AnomalyInjection>& anomalies, int frame, int object_id) {
    for (const auto& inj : anomalies)
        if (inj.active(frame) &&
            std::find(inj.agents.begin(), inj.agents.end(), object_id) != inj.agents.end())
            return 1;
    return 0;
}

int frame_label_of(const LoadedDataset& ds, int frame) {
    for (const auto& a : ds.annotations)
        if (a.frame_index == frame) return a.label;
    return 0;
}

namespace {

// Flow for the detection's frame: the stored t -> t+1 field (the last frame
// reuses the final field), or a Horn-Schunck solve on the frame pair.
FlowField flow_for_frame(const LoadedDataset& ds, int frame, const ExtractionConfig& cfg) {
    if (cfg.flow_source == FlowSource::ground_truth) {
        if (ds.flows.empty()) throw ConfigError("dataset has no stored flow fields");
        const size_t idx = std::min(static_cast<size_t>(frame), ds.flows.size() - 1);
        return ds.flows[idx];
    }
    const int a = frame + 1 < static_cast<int>(ds.frames.size()) ? frame : frame - 1;
    if (a < 0) throw ValidationError("cannot compute flow for a single-frame dataset");
    return compute_dense_flow(ds.frames[a], ds.frames[a + 1], cfg.hs_params);
}

} // namespace

std::vector<FeatureRow> extract_dataset_features(const LoadedDataset& ds,
                                                 const AutoencoderState& ae_appearance,
                                                 const AutoencoderState& ae_temporal,
                                                 const ExtractionConfig& cfg) {
    std::vector<FeatureRow> rows;
    int current_frame = -1;
    FlowField flow;
    for (const auto& det : ds.detections) {
        if (det.frame_index >= static_cast<int>(ds.frames.size()))
            throw ValidationError("detection references missing frame " +
                                  std::to_string(det.frame_index));
        if (det.frame_index != current_frame) {
            current_frame = det.frame_index;
            flow = flow_for_frame(ds, current_frame, cfg);
        }
        FeatureRow row;
        row.video_id = det.video_id.empty() ? ds.video_id : det.video_id;
        row.frame_index = det.frame_index;
        row.object_id = det.object_id;
        row.descriptor = extract_object_descriptor(det, ds.frames[det.frame_index], flow, ds.mask,
                                                   ae_appearance, ae_temporal, cfg.extractor);
        rows.push_back(std::move(row));
    }
    return rows;
}

PatchSets gather_training_patches(const LoadedDataset& ds, const ExtractionConfig& cfg,
                                  size_t max_patches, uint64_t seed) {
    std::vector<size_t> candidates;
    for (size_t i = 0; i < ds.detections.size(); ++i)
        if (frame_label_of(ds, ds.detections[i].frame_index) == 0) candidates.push_back(i);
    if (candidates.empty())
        throw ValidationError("no detections in normal frames to train on");

    Rng rng(mix_seed(seed, 0x9a7c4));
    rng.shuffle(candidates);
    if (candidates.size() > max_patches) candidates.resize(max_patches);
    std::sort(candidates.begin(), candidates.end());

    PatchSets sets;
    int current_frame = -1;
    FlowField flow;
    for (size_t i : candidates) {
        const auto& det = ds.detections[i];
        if (det.frame_index != current_frame) {
            current_frame = det.frame_index;
            flow = flow_for_frame(ds, current_frame, cfg);
        }
        sets.appearance.push_back(crop_image(ds.frames[det.frame_index], det.bbox));
        sets.temporal.push_back(
            flow_to_rgb(crop_flow_patch(flow, det.bbox), cfg.extractor.flow_color));
    }
    return sets;
}

} // namespace uavad
