#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "uavad/autoencoder.hpp"
#include "uavad/inference.hpp"

namespace uavad {

inline constexpr const char* kBundleFormatVersion = "uavad-bundle-v1";

// Persisted model state: up to three components living side by side in one
// directory, each as a human-readable manifest plus a binary tensor file
// (little-endian f32, every tensor preceded by a rank/shape header).
struct ModelBundle {
    std::optional<AutoencoderState> ae_appearance;
    std::optional<AutoencoderState> ae_temporal;
    std::optional<InferenceModel> inference;
};

// Writes only the components present in `bundle`; existing files of other
// components are left in place so stages can extend a bundle incrementally.
void save_bundle(const ModelBundle& bundle, const std::filesystem::path& dir);

// Loads every component present in the directory. Version mismatches raise
// VersionError; payload/checksum mismatches raise CorruptionError.
ModelBundle load_bundle(const std::filesystem::path& dir);

bool bundle_has_component(const std::filesystem::path& dir, const std::string& component);

// FNV-1a 64-bit, used for payload checksums and config hashes.
uint64_t fnv1a64(const void* data, size_t size);

} // namespace uavad
