#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "uavad/types.hpp"

namespace uavad {

// Detections: JSON Lines with fields video, frame, id, class, bbox=[x,y,w,h].
std::vector<DetectionRecord> load_detections(const std::filesystem::path& path);
void save_detections(const std::vector<DetectionRecord>& dets, const std::filesystem::path& path);

// Masks: binary PGM (P5), maxval 255, pixel value = class index in {0..3}.
ClassMask load_class_mask(const std::filesystem::path& path);
void save_class_mask(const ClassMask& mask, const std::filesystem::path& path);

// Frames/patches: binary PPM (P6), maxval 255, intensities mapped to [0,1].
Image load_image_ppm(const std::filesystem::path& path);
void save_image_ppm(const Image& img, const std::filesystem::path& path);

// Flow: Middlebury .flo ("PIEH", i32 width, i32 height, interleaved f32 u,v).
FlowField load_flow_field(const std::filesystem::path& path);
void save_flow_field(const FlowField& flow, const std::filesystem::path& path);

// Annotations: CSV with header "frame,label"; frame indices strictly increasing.
std::vector<FrameAnnotation> load_frame_annotations(const std::filesystem::path& path);
void save_frame_annotations(const std::vector<FrameAnnotation>& ann,
                            const std::filesystem::path& path);

// Feature table: CSV with video, frame, id and the 22 descriptor columns.
struct FeatureRow {
    std::string video_id;
    int frame_index = 0;
    int object_id = 0;
    FeatureDescriptor descriptor;
};

std::vector<FeatureRow> load_feature_table(const std::filesystem::path& path);
void save_feature_table(const std::vector<FeatureRow>& rows, const std::filesystem::path& path);

// Frame scores: CSV "frame,score,verdict", score printed to 6 decimal places.
struct ScoreRow {
    int frame_index = 0;
    double score = 0.0;
    std::string verdict; // "normal" | "anomalous"
};

std::vector<ScoreRow> load_scores(const std::filesystem::path& path);
void save_scores(const std::vector<ScoreRow>& rows, const std::filesystem::path& path);

// Writes content to path atomically (temp file in the same directory + rename).
void atomic_write_file(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

// Shortest round-tripping decimal representation of a double.
std::string format_double(double v);

} // namespace uavad
