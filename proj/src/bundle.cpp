#include "uavad/bundle.hpp"

#include <cstring>

#include <json.hpp>

#include "uavad/errors.hpp"
#include "uavad/io.hpp"

namespace uavad {

namespace fs = std::filesystem;
using nlohmann::json;

uint64_t fnv1a64(const void* data, size_t size) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    uint64_t hash = 0xcbf29ce484222325ULL;
    for (size_t i = 0; i < size; ++i) {
        hash ^= bytes[i];
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

namespace {

using NamedTensor = std::pair<std::string, std::vector<double>>;

struct TensorEntry {
    std::string name;
    std::vector<uint32_t> shape;
};

void append_u32(std::string& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void append_f32(std::string& out, float v) {
    uint32_t bits;
    std::memcpy(&bits, &v, 4);
    append_u32(out, bits);
}

uint32_t read_u32(const std::string& data, size_t& pos) {
    if (pos + 4 > data.size()) throw FormatError("bundle payload truncated");
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= static_cast<uint32_t>(static_cast<unsigned char>(data[pos + i])) << (8 * i);
    pos += 4;
    return v;
}

float read_f32(const std::string& data, size_t& pos) {
    const uint32_t bits = read_u32(data, pos);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

// Tensors are stored flat; the manifest records names and shapes in order.
void write_component(const fs::path& dir, const std::string& component,
                     const std::vector<NamedTensor>& tensors,
                     const std::vector<std::vector<uint32_t>>& shapes, const json& config) {
    std::string payload;
    json index = json::array();
    for (size_t t = 0; t < tensors.size(); ++t) {
        const auto& [name, values] = tensors[t];
        const auto& shape = shapes[t];
        size_t expect = 1;
        for (uint32_t d : shape) expect *= d;
        if (expect != values.size())
            throw ValidationError("tensor '" + name + "' shape does not match its size");
        append_u32(payload, static_cast<uint32_t>(shape.size()));
        for (uint32_t d : shape) append_u32(payload, d);
        for (double v : values) append_f32(payload, static_cast<float>(v));
        index.push_back({{"name", name}, {"shape", shape}});
    }

    char checksum[32];
    std::snprintf(checksum, sizeof(checksum), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(payload.data(), payload.size())));

    json manifest;
    manifest["format_version"] = kBundleFormatVersion;
    manifest["component"] = component;
    manifest["checksum_fnv1a64"] = checksum;
    manifest["tensors"] = index;
    manifest["config"] = config;

    fs::create_directories(dir);
    atomic_write_file(dir / (component + ".bin"), payload);
    atomic_write_file(dir / (component + ".json"), manifest.dump(2) + "\n");
}

std::pair<std::vector<NamedTensor>, json> read_component(const fs::path& dir,
                                                         const std::string& component) {
    const fs::path manifest_path = dir / (component + ".json");
    const fs::path payload_path = dir / (component + ".bin");
    json manifest;
    try {
        manifest = json::parse(read_file(manifest_path));
    } catch (const json::exception& e) {
        throw FormatError("bundle manifest " + manifest_path.string() + ": " + e.what());
    }
    const std::string version = manifest.value("format_version", "");
    if (version != kBundleFormatVersion)
        throw VersionError("bundle component '" + component + "' has format version '" + version +
                           "', expected '" + kBundleFormatVersion + "'");

    const std::string payload = read_file(payload_path);
    char checksum[32];
    std::snprintf(checksum, sizeof(checksum), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(payload.data(), payload.size())));
    if (manifest.value("checksum_fnv1a64", "") != checksum)
        throw CorruptionError("bundle component '" + component + "' failed its checksum");

    std::vector<NamedTensor> tensors;
    size_t pos = 0;
    for (const auto& entry : manifest.at("tensors")) {
        const std::string name = entry.at("name").get<std::string>();
        const auto shape = entry.at("shape").get<std::vector<uint32_t>>();
        const uint32_t rank = read_u32(payload, pos);
        if (rank != shape.size())
            throw FormatError("tensor '" + name + "' rank mismatch between manifest and payload");
        size_t count = 1;
        for (uint32_t d : shape) {
            if (read_u32(payload, pos) != d)
                throw FormatError("tensor '" + name + "' shape mismatch");
            count *= d;
        }
        std::vector<double> values(count);
        for (size_t i = 0; i < count; ++i) values[i] = static_cast<double>(read_f32(payload, pos));
        tensors.emplace_back(name, std::move(values));
    }
    if (pos != payload.size()) throw FormatError("bundle payload has trailing bytes");
    return {std::move(tensors), manifest.at("config")};
}

json ae_config_json(const AutoencoderState& state) {
    json j;
    j["input_size"] = state.spec().input_size;
    j["encoder_widths"] = state.spec().encoder_widths;
    j["decoder_widths"] = state.spec().decoder_widths;
    return j;
}

void save_autoencoder(const fs::path& dir, const std::string& component,
                      const AutoencoderState& state) {
    std::vector<NamedTensor> tensors = state.named_tensors();
    std::vector<std::vector<uint32_t>> shapes;
    for (const auto& [name, values] : tensors)
        shapes.push_back({static_cast<uint32_t>(values.size())});
    write_component(dir, component, tensors, shapes, ae_config_json(state));
}

AutoencoderState load_autoencoder(const fs::path& dir, const std::string& component) {
    auto [tensors, config] = read_component(dir, component);
    AutoencoderSpec spec;
    spec.input_size = config.at("input_size").get<int>();
    spec.encoder_widths = config.at("encoder_widths").get<std::vector<int>>();
    spec.decoder_widths = config.at("decoder_widths").get<std::vector<int>>();
    AutoencoderState state(spec, 0);
    state.load_named_tensors(tensors);
    return state;
}

void save_inference(const fs::path& dir, const InferenceModel& model) {
    std::vector<NamedTensor> tensors;
    std::vector<std::vector<uint32_t>> shapes;
    const auto add = [&](const std::string& name, const std::vector<double>& v,
                         std::vector<uint32_t> shape) {
        tensors.emplace_back(name, v);
        shapes.push_back(std::move(shape));
    };
    const auto add_matrix = [&](const std::string& name,
                                const std::vector<std::vector<double>>& rows) {
        std::vector<double> flat;
        const uint32_t r = static_cast<uint32_t>(rows.size());
        const uint32_t c = r > 0 ? static_cast<uint32_t>(rows[0].size()) : 0;
        for (const auto& row : rows) flat.insert(flat.end(), row.begin(), row.end());
        add(name, flat, {r, c});
    };

    add("scaler.mean", model.scaler.mean, {static_cast<uint32_t>(model.scaler.mean.size())});
    add("scaler.scale", model.scaler.scale, {static_cast<uint32_t>(model.scaler.scale.size())});
    add_matrix("kmeans.normal", model.normal_clusters.centers);
    add_matrix("kmeans.anomaly", model.anomaly_clusters.centers);
    for (size_t i = 0; i < model.classifiers.size(); ++i) {
        const auto& svm = model.classifiers[i];
        const std::string prefix = "svm" + std::to_string(i);
        add_matrix(prefix + ".support", svm.support_x);
        add(prefix + ".coef", svm.coef, {static_cast<uint32_t>(svm.coef.size())});
        add(prefix + ".scalars", {svm.bias, svm.platt_a, svm.platt_b}, {3});
    }

    json config;
    config["k1"] = model.cfg.k1;
    config["k2"] = model.cfg.k2;
    config["mu"] = model.cfg.mu;
    config["eta"] = model.cfg.eta;
    config["kernel"] = model.cfg.kernel == KernelType::rbf ? "rbf" : "linear";
    config["c"] = model.cfg.c;
    config["gamma"] = model.gamma_effective;
    config["seed"] = model.cfg.seed;
    config["baseline_mode"] = model.baseline_mode;
    write_component(dir, "inference", tensors, shapes, config);
}

InferenceModel load_inference(const fs::path& dir) {
    auto [tensors, config] = read_component(dir, "inference");
    const auto find = [&](const std::string& name) -> const std::vector<double>& {
        for (const auto& [n, v] : tensors)
            if (n == name) return v;
        throw FormatError("bundle is missing tensor '" + name + "'");
    };
    InferenceModel model;
    model.cfg.k1 = config.at("k1").get<int>();
    model.cfg.k2 = config.at("k2").get<int>();
    model.cfg.mu = config.at("mu").get<double>();
    model.cfg.eta = config.at("eta").get<double>();
    model.cfg.kernel =
        config.at("kernel").get<std::string>() == "rbf" ? KernelType::rbf : KernelType::linear;
    model.cfg.c = config.at("c").get<double>();
    model.cfg.seed = config.at("seed").get<uint64_t>();
    model.gamma_effective = config.at("gamma").get<double>();
    model.baseline_mode = config.at("baseline_mode").get<bool>();

    model.scaler.mean = find("scaler.mean");
    model.scaler.scale = find("scaler.scale");
    const size_t dim = model.scaler.mean.size();
    const auto unflatten = [&](const std::vector<double>& flat) {
        std::vector<std::vector<double>> rows;
        if (dim == 0 || flat.empty()) return rows;
        if (flat.size() % dim != 0) throw FormatError("matrix tensor size not divisible by dim");
        for (size_t off = 0; off < flat.size(); off += dim)
            rows.emplace_back(flat.begin() + off, flat.begin() + off + dim);
        return rows;
    };
    model.normal_clusters.centers = unflatten(find("kmeans.normal"));
    model.anomaly_clusters.centers = unflatten(find("kmeans.anomaly"));

    for (int i = 0; i < model.cfg.k1 + model.cfg.k2; ++i) {
        const std::string prefix = "svm" + std::to_string(i);
        CalibratedSvm svm;
        svm.kernel = model.cfg.kernel;
        svm.gamma = model.gamma_effective;
        svm.support_x = unflatten(find(prefix + ".support"));
        svm.coef = find(prefix + ".coef");
        const auto& scalars = find(prefix + ".scalars");
        if (scalars.size() != 3) throw FormatError("bundle scalar block has wrong size");
        svm.bias = scalars[0];
        svm.platt_a = scalars[1];
        svm.platt_b = scalars[2];
        if (svm.coef.size() != svm.support_x.size())
            throw FormatError("bundle classifier has mismatched support data");
        model.classifiers.push_back(std::move(svm));
    }
    return model;
}

} // namespace

bool bundle_has_component(const fs::path& dir, const std::string& component) {
    return fs::exists(dir / (component + ".json")) && fs::exists(dir / (component + ".bin"));
}

void save_bundle(const ModelBundle& bundle, const fs::path& dir) {
    if (bundle.ae_appearance) save_autoencoder(dir, "appearance", *bundle.ae_appearance);
    if (bundle.ae_temporal) save_autoencoder(dir, "temporal", *bundle.ae_temporal);
    if (bundle.inference) save_inference(dir, *bundle.inference);
}

ModelBundle load_bundle(const fs::path& dir) {
    ModelBundle bundle;
    if (bundle_has_component(dir, "appearance"))
        bundle.ae_appearance = load_autoencoder(dir, "appearance");
    if (bundle_has_component(dir, "temporal"))
        bundle.ae_temporal = load_autoencoder(dir, "temporal");
    if (bundle_has_component(dir, "inference")) bundle.inference = load_inference(dir);
    if (!bundle.ae_appearance && !bundle.ae_temporal && !bundle.inference)
        throw FormatError("no bundle components found in " + dir.string());
    return bundle;
}

} // namespace uavad
