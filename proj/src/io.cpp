#include "uavad/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace uavad {

namespace fs = std::filesystem;
using nlohmann::json;

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void atomic_write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw FormatError("cannot open file for writing: " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw FormatError("short write: " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------- detections

std::vector<DetectionRecord> load_detections(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open detections file: " + path.string());
    std::vector<DetectionRecord> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError("detections line " + std::to_string(line_no) + ": " + e.what());
        }
        DetectionRecord rec;
        try {
            rec.video_id = j.at("video").get<std::string>();
            rec.frame_index = j.at("frame").get<int>();
            rec.object_id = j.at("id").get<int>();
            rec.object_class = object_class_from_string(j.at("class").get<std::string>());
            const auto& bb = j.at("bbox");
            if (!bb.is_array() || bb.size() != 4)
                throw ValidationError("bbox must be [x,y,w,h]");
            rec.bbox = BoundingBox{bb[0].get<int>(), bb[1].get<int>(), bb[2].get<int>(),
                                   bb[3].get<int>()};
        } catch (const json::exception& e) {
            throw ParseError("detections line " + std::to_string(line_no) + ": " + e.what());
        }
        if (rec.frame_index < 0)
            throw ValidationError("detections line " + std::to_string(line_no) +
                                  ": negative frame index");
        if (rec.object_id < 0)
            throw ValidationError("detections line " + std::to_string(line_no) +
                                  ": negative object id");
        if (!rec.bbox.valid())
            throw ValidationError("detections line " + std::to_string(line_no) +
                                  ": bbox extents must be >= 1");
        out.push_back(std::move(rec));
    }
    std::set<std::tuple<std::string, int, int>> keys;
    for (const auto& r : out)
        if (!keys.emplace(r.video_id, r.frame_index, r.object_id).second)
            throw ValidationError("duplicate detection key (" + r.video_id + ", " +
                                  std::to_string(r.frame_index) + ", " +
                                  std::to_string(r.object_id) + ")");
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return std::tie(a.frame_index, a.object_id) < std::tie(b.frame_index, b.object_id);
    });
    return out;
}

void save_detections(const std::vector<DetectionRecord>& dets, const fs::path& path) {
    std::string body;
    for (const auto& d : dets) {
        json j{{"video", d.video_id},
               {"frame", d.frame_index},
               {"id", d.object_id},
               {"class", to_string(d.object_class)},
               {"bbox", {d.bbox.x, d.bbox.y, d.bbox.w, d.bbox.h}}};
        body += j.dump();
        body += '\n';
    }
    atomic_write_file(path, body);
}

// ----------------------------------------------------------------- PGM / PPM

namespace {

// Parses a PNM header token, skipping whitespace and '#' comments.
int pnm_read_int(std::istream& in, const char* what) {
    for (;;) {
        const int c = in.peek();
        if (c == EOF) throw FormatError(std::string("truncated header before ") + what);
        if (c == '#') {
            std::string comment;
            std::getline(in, comment);
            continue;
        }
        if (std::isspace(c)) {
            in.get();
            continue;
        }
        break;
    }
    int value = 0;
    if (!(in >> value)) throw FormatError(std::string("bad integer field: ") + what);
    return value;
}

std::vector<uint8_t> pnm_read_body(std::istream& in, size_t count, const char* kind) {
    in.get(); // single whitespace after maxval
    std::vector<uint8_t> body(count);
    in.read(reinterpret_cast<char*>(body.data()), static_cast<std::streamsize>(count));
    if (static_cast<size_t>(in.gcount()) != count)
        throw FormatError(std::string(kind) + ": truncated pixel payload");
    return body;
}

} // namespace

ClassMask load_class_mask(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open mask file: " + path.string());
    char magic[2];
    in.read(magic, 2);
    if (in.gcount() != 2 || magic[0] != 'P' || magic[1] != '5')
        throw FormatError("mask is not a binary PGM (P5)");
    const int w = pnm_read_int(in, "width");
    const int h = pnm_read_int(in, "height");
    const int maxval = pnm_read_int(in, "maxval");
    if (w < 1 || h < 1) throw FormatError("mask dimensions must be positive");
    if (maxval != 255) throw FormatError("mask maxval must be 255");
    auto body = pnm_read_body(in, static_cast<size_t>(w) * h, "mask");
    for (size_t i = 0; i < body.size(); ++i)
        if (body[i] > 3)
            throw ValidationError("mask pixel " + std::to_string(i) + " has class " +
                                  std::to_string(body[i]) + " outside {0,1,2,3}");
    ClassMask mask;
    mask.width = w;
    mask.height = h;
    mask.labels = std::move(body);
    return mask;
}

void save_class_mask(const ClassMask& mask, const fs::path& path) {
    std::string body = "P5\n" + std::to_string(mask.width) + " " + std::to_string(mask.height) +
                       "\n255\n";
    body.append(reinterpret_cast<const char*>(mask.labels.data()), mask.labels.size());
    atomic_write_file(path, body);
}

Image load_image_ppm(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open image file: " + path.string());
    char magic[2];
    in.read(magic, 2);
    if (in.gcount() != 2 || magic[0] != 'P' || magic[1] != '6')
        throw FormatError("image is not a binary PPM (P6)");
    const int w = pnm_read_int(in, "width");
    const int h = pnm_read_int(in, "height");
    const int maxval = pnm_read_int(in, "maxval");
    if (w < 1 || h < 1) throw FormatError("image dimensions must be positive");
    if (maxval != 255) throw FormatError("image maxval must be 255");
    auto body = pnm_read_body(in, static_cast<size_t>(w) * h * 3, "image");
    Image img(w, h, 3);
    for (size_t i = 0; i < body.size(); ++i) img.data[i] = static_cast<float>(body[i]) / 255.0f;
    return img;
}

void save_image_ppm(const Image& img, const fs::path& path) {
    if (img.channels != 3) throw ValidationError("PPM output requires a 3-channel image");
    std::string body = "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) +
                       "\n255\n";
    body.reserve(body.size() + img.data.size());
    for (float v : img.data) {
        const int q = static_cast<int>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
        body.push_back(static_cast<char>(static_cast<uint8_t>(q)));
    }
    atomic_write_file(path, body);
}

// ------------------------------------------------------------------- .flo IO

namespace {

template <typename T>
T read_le(std::istream& in, const char* what) {
    unsigned char buf[sizeof(T)];
    in.read(reinterpret_cast<char*>(buf), sizeof(T));
    if (static_cast<size_t>(in.gcount()) != sizeof(T))
        throw FormatError(std::string("flow file truncated at ") + what);
    T out;
    uint64_t acc = 0;
    for (size_t i = 0; i < sizeof(T); ++i) acc |= static_cast<uint64_t>(buf[i]) << (8 * i);
    std::memcpy(&out, &acc, sizeof(T));
    return out;
}

template <typename T>
void write_le(std::string& out, T value) {
    uint64_t acc = 0;
    std::memcpy(&acc, &value, sizeof(T));
    for (size_t i = 0; i < sizeof(T); ++i)
        out.push_back(static_cast<char>((acc >> (8 * i)) & 0xff));
}

} // namespace

FlowField load_flow_field(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open flow file: " + path.string());
    char tag[4];
    in.read(tag, 4);
    if (in.gcount() != 4 || std::memcmp(tag, "PIEH", 4) != 0)
        throw FormatError("flow file magic tag mismatch (expected PIEH)");
    const int32_t w = read_le<int32_t>(in, "width");
    const int32_t h = read_le<int32_t>(in, "height");
    if (w < 1 || h < 1) throw FormatError("flow dimensions must be positive");
    FlowField flow;
    flow.width = w;
    flow.height = h;
    flow.u.resize(static_cast<size_t>(w) * h);
    flow.v.resize(static_cast<size_t>(w) * h);
    for (size_t i = 0; i < flow.u.size(); ++i) {
        flow.u[i] = read_le<float>(in, "payload");
        flow.v[i] = read_le<float>(in, "payload");
    }
    // Anything left over means the header lied about the size.
    if (in.get() != EOF) throw FormatError("flow payload longer than declared dimensions");
    for (size_t i = 0; i < flow.u.size(); ++i)
        if (!std::isfinite(flow.u[i]) || !std::isfinite(flow.v[i]))
            throw ValidationError("flow field contains non-finite values");
    return flow;
}

void save_flow_field(const FlowField& flow, const fs::path& path) {
    std::string body = "PIEH";
    write_le<int32_t>(body, flow.width);
    write_le<int32_t>(body, flow.height);
    for (size_t i = 0; i < flow.u.size(); ++i) {
        write_le<float>(body, flow.u[i]);
        write_le<float>(body, flow.v[i]);
    }
    atomic_write_file(path, body);
}

// --------------------------------------------------------------- annotations

std::vector<FrameAnnotation> load_frame_annotations(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open annotations file: " + path.string());
    std::string line;
    if (!std::getline(in, line) || line.rfind("frame,label", 0) != 0)
        throw FormatError("annotations CSV must start with header 'frame,label'");
    std::vector<FrameAnnotation> out;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ParseError("annotations line " + std::to_string(line_no) + ": missing comma");
        int frame = 0, label = 0;
        auto r1 = std::from_chars(line.data(), line.data() + comma, frame);
        auto r2 = std::from_chars(line.data() + comma + 1, line.data() + line.size(), label);
        if (r1.ec != std::errc{} || r2.ec != std::errc{})
            throw ParseError("annotations line " + std::to_string(line_no) + ": bad integer");
        if (label != 0 && label != 1)
            throw ValidationError("annotations line " + std::to_string(line_no) +
                                  ": label must be 0 or 1");
        if (!out.empty() && frame <= out.back().frame_index) {
            if (frame == out.back().frame_index)
                throw ValidationError("annotations line " + std::to_string(line_no) +
                                      ": duplicate frame " + std::to_string(frame));
            throw ValidationError("annotations line " + std::to_string(line_no) +
                                  ": frame indices must be strictly increasing");
        }
        out.push_back(FrameAnnotation{frame, label});
    }
    return out;
}

void save_frame_annotations(const std::vector<FrameAnnotation>& ann, const fs::path& path) {
    std::string body = "frame,label\n";
    for (const auto& a : ann)
        body += std::to_string(a.frame_index) + "," + std::to_string(a.label) + "\n";
    atomic_write_file(path, body);
}

// -------------------------------------------------------------- feature table

namespace {
const char* kFeatureHeader =
    "video,frame,id,"
    "ctx_h1,ctx_h2,ctx_h3,ctx_h4,"
    "tmp_er,tmp_eg,tmp_eb,tmp_s1,tmp_s2,tmp_s3,tmp_s4,tmp_s5,tmp_s6,"
    "app_er,app_eg,app_eb,app_s1,app_s2,app_s3,app_s4,app_s5,app_s6";

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}
} // namespace

std::vector<FeatureRow> load_feature_table(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open feature table: " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != kFeatureHeader)
        throw FormatError("feature table header mismatch");
    std::vector<FeatureRow> out;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto cells = split_csv(line);
        if (cells.size() != 25)
            throw ParseError("feature table line " + std::to_string(line_no) +
                             ": expected 25 columns");
        FeatureRow row;
        row.video_id = cells[0];
        try {
            row.frame_index = std::stoi(cells[1]);
            row.object_id = std::stoi(cells[2]);
            std::array<double, 22> vals{};
            for (int i = 0; i < 22; ++i) vals[i] = std::stod(cells[3 + i]);
            std::copy_n(vals.begin(), 4, row.descriptor.contextual.begin());
            std::copy_n(vals.begin() + 4, 9, row.descriptor.temporal.begin());
            std::copy_n(vals.begin() + 13, 9, row.descriptor.appearance.begin());
        } catch (const std::exception& e) {
            throw ParseError("feature table line " + std::to_string(line_no) + ": " + e.what());
        }
        out.push_back(std::move(row));
    }
    return out;
}

void save_feature_table(const std::vector<FeatureRow>& rows, const fs::path& path) {
    std::string body = std::string(kFeatureHeader) + "\n";
    for (const auto& r : rows) {
        body += r.video_id + "," + std::to_string(r.frame_index) + "," +
                std::to_string(r.object_id);
        for (double v : r.descriptor.flat()) {
            body += ',';
            body += format_double(v);
        }
        body += '\n';
    }
    atomic_write_file(path, body);
}

// ------------------------------------------------------------------- scores

std::vector<ScoreRow> load_scores(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open scores file: " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != "frame,score,verdict")
        throw FormatError("scores CSV must start with header 'frame,score,verdict'");
    std::vector<ScoreRow> out;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto cells = split_csv(line);
        if (cells.size() != 3)
            throw ParseError("scores line " + std::to_string(line_no) + ": expected 3 columns");
        ScoreRow row;
        try {
            row.frame_index = std::stoi(cells[0]);
            row.score = std::stod(cells[1]);
        } catch (const std::exception& e) {
            throw ParseError("scores line " + std::to_string(line_no) + ": " + e.what());
        }
        row.verdict = cells[2];
        out.push_back(std::move(row));
    }
    return out;
}

void save_scores(const std::vector<ScoreRow>& rows, const fs::path& path) {
    std::string body = "frame,score,verdict\n";
    char buf[64];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%d,%.6f,%s", r.frame_index, r.score, r.verdict.c_str());
        body += buf;
        body += '\n';
    }
    atomic_write_file(path, body);
}

} // namespace uavad
