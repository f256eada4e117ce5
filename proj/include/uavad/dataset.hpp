#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "uavad/features.hpp"
#include "uavad/io.hpp"
#include "uavad/synth.hpp"

namespace uavad {

// In-memory view of a dataset directory (synthesized or ingested).
struct LoadedDataset {
    std::vector<Image> frames; // indexed by frame
    ClassMask mask;
    std::vector<FlowField> flows; // flows[t] maps frame t to t+1; may be empty
    std::vector<DetectionRecord> detections;
    std::vector<FrameAnnotation> annotations;
    std::vector<AnomalyInjection> anomalies; // from manifest.json when present
    std::string video_id = "video";
};

LoadedDataset load_dataset_dir(const std::filesystem::path& dir);

LoadedDataset dataset_from_synth(const SynthDataset& synth, const std::string& video_id = "synth");

// Object-level label: 1 iff the object participates in an anomaly active at
// its frame.
int object_label(const std::vector<AnomalyInjection>& anomalies, int frame, int object_id);

int frame_label_of(const LoadedDataset& ds, int frame);

enum class FlowSource { ground_truth, computed };

struct ExtractionConfig {
    ExtractorConfig extractor;
    FlowSource flow_source = FlowSource::ground_truth;
    HornSchunckParams hs_params;
};

// Descriptor per detection, ordered by (frame, object id).
std::vector<FeatureRow> extract_dataset_features(const LoadedDataset& ds,
                                                 const AutoencoderState& ae_appearance,
                                                 const AutoencoderState& ae_temporal,
                                                 const ExtractionConfig& cfg);

struct PatchSets {
    std::vector<Image> appearance;
    std::vector<Image> temporal; // flow patches rendered to RGB
};

// Object patches from normal frames only, subsampled to at most max_patches
// per set with the given seed.
PatchSets gather_training_patches(const LoadedDataset& ds, const ExtractionConfig& cfg,
                                  size_t max_patches, uint64_t seed);

} // namespace uavad
