#include "spnlab/dataset_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "spnlab/error.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace spnlab {

namespace {

std::string frame_name(int t) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "frame_%05d.ppm", t);
    return buf;
}
std::string mask_name(int t) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "mask_%05d.pgm", t);
    return buf;
}

void write_pnm(const std::string& path, const char* magic, const uint8_t* data, int H, int W,
               int channels) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path);
    os << magic << "\n" << W << " " << H << "\n255\n";
    os.write(reinterpret_cast<const char*>(data),
             static_cast<std::streamsize>(static_cast<size_t>(H) * W * channels));
    if (!os) throw IoError("write failed: " + path);
}

std::vector<uint8_t> read_pnm(const std::string& path, const char* magic, int channels, int& H,
                              int& W) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open: " + path);
    std::string m;
    is >> m;
    if (m != magic) throw CorruptMagicError("bad magic '" + m + "' in " + path + ", expected " + magic);
    int maxval = 0;
    is >> W >> H >> maxval;
    if (!is || W <= 0 || H <= 0) throw TruncatedFileError("bad header in " + path);
    if (maxval != 255) throw IoError("unsupported maxval in " + path);
    is.get();  // single whitespace after maxval
    std::vector<uint8_t> data(static_cast<size_t>(H) * W * channels);
    if (!is.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size())))
        throw TruncatedFileError("truncated pixel data in " + path);
    return data;
}

}  // namespace

void write_ppm(const std::string& path, const uint8_t* rgb, int H, int W) {
    write_pnm(path, "P6", rgb, H, W, 3);
}
std::vector<uint8_t> read_ppm(const std::string& path, int& H, int& W) {
    return read_pnm(path, "P6", 3, H, W);
}
void write_pgm(const std::string& path, const uint8_t* gray, int H, int W) {
    write_pnm(path, "P5", gray, H, W, 1);
}
std::vector<uint8_t> read_pgm(const std::string& path, int& H, int& W) {
    return read_pnm(path, "P5", 1, H, W);
}

void write_dataset(const std::vector<VideoSample>& samples, const std::string& dir) {
    fs::create_directories(dir);
    json manifest;
    manifest["samples"] = json::array();
    for (const auto& s : samples) {
        fs::create_directories(fs::path(dir) / s.id);
        for (int t = 0; t < s.T; ++t)
            write_ppm((fs::path(dir) / s.id / frame_name(t)).string(), s.frame(t), s.H, s.W);
        for (size_t i = 0; i < s.labeled_frames.size(); ++i)
            write_pgm((fs::path(dir) / s.id / mask_name(s.labeled_frames[i])).string(),
                      s.mask_at(static_cast<int>(i)), s.H, s.W);

        json e;
        e["id"] = s.id;
        e["split"] = s.split;
        e["T"] = s.T;
        e["H"] = s.H;
        e["W"] = s.W;
        e["labeled_frames"] = s.labeled_frames;
        if (s.has_keypoints()) {
            json kps = json::array();
            for (int t = 0; t < s.T; ++t) {
                json row = json::array();
                for (int k = 0; k < kNumJoints; ++k) {
                    const float* p = s.keypoints.data() + (static_cast<size_t>(t) * kNumJoints + k) * 3;
                    row.push_back({p[0], p[1], p[2]});
                }
                kps.push_back(row);
            }
            e["keypoints"] = kps;
        } else {
            e["keypoints"] = nullptr;
        }
        if (s.gma_label.has_value())
            e["gma_label"] = *s.gma_label == 1 ? "abnormal" : "normal";
        else
            e["gma_label"] = nullptr;
        manifest["samples"].push_back(e);
    }
    std::ofstream os(fs::path(dir) / "manifest.json");
    if (!os) throw IoError("cannot write manifest in " + dir);
    os << manifest.dump(1) << "\n";
}

std::vector<VideoSample> read_dataset(const std::string& dir) {
    std::ifstream is(fs::path(dir) / "manifest.json");
    if (!is) throw IoError("missing manifest.json in " + dir);
    json manifest;
    try {
        is >> manifest;
    } catch (const json::exception& e) {
        throw IoError("unparseable manifest.json in " + dir + ": " + e.what());
    }
    std::vector<VideoSample> out;
    for (const auto& e : manifest.at("samples")) {
        VideoSample s;
        s.id = e.at("id").get<std::string>();
        s.split = e.at("split").get<std::string>();
        s.T = e.at("T").get<int>();
        s.H = e.at("H").get<int>();
        s.W = e.at("W").get<int>();
        s.labeled_frames = e.at("labeled_frames").get<std::vector<int>>();
        for (int idx : s.labeled_frames)
            if (idx < 0 || idx >= s.T)
                throw ManifestMismatchError("labeled frame index " + std::to_string(idx) +
                                            " out of range in video " + s.id);

        s.frames.resize(static_cast<size_t>(s.T) * s.H * s.W * 3);
        for (int t = 0; t < s.T; ++t) {
            fs::path p = fs::path(dir) / s.id / frame_name(t);
            if (!fs::exists(p))
                throw ManifestMismatchError("manifest lists frame " + std::to_string(t) +
                                            " of video " + s.id + " but " + p.string() + " is missing");
            int H = 0, W = 0;
            auto rgb = read_ppm(p.string(), H, W);
            if (H != s.H || W != s.W)
                throw ManifestMismatchError("frame " + p.string() + " extent differs from manifest");
            std::copy(rgb.begin(), rgb.end(), s.frames.begin() + static_cast<size_t>(t) * s.H * s.W * 3);
        }
        s.masks.resize(s.labeled_frames.size() * static_cast<size_t>(s.H) * s.W);
        for (size_t i = 0; i < s.labeled_frames.size(); ++i) {
            fs::path p = fs::path(dir) / s.id / mask_name(s.labeled_frames[i]);
            if (!fs::exists(p))
                throw ManifestMismatchError("manifest lists mask for frame " +
                                            std::to_string(s.labeled_frames[i]) + " of video " + s.id +
                                            " but " + p.string() + " is missing");
            int H = 0, W = 0;
            auto gray = read_pgm(p.string(), H, W);
            if (H != s.H || W != s.W)
                throw ManifestMismatchError("mask " + p.string() + " extent differs from manifest");
            for (uint8_t v : gray)
                if (v >= kNumClasses)
                    throw ManifestMismatchError("mask " + p.string() + " holds class id " +
                                                std::to_string(v) + " >= " + std::to_string(kNumClasses));
            std::copy(gray.begin(), gray.end(),
                      s.masks.begin() + i * static_cast<size_t>(s.H) * s.W);
        }
        if (!e.at("keypoints").is_null()) {
            const auto& kps = e.at("keypoints");
            if (static_cast<int>(kps.size()) != s.T)
                throw ManifestMismatchError("keypoint track length differs from T in video " + s.id);
            s.keypoints.resize(static_cast<size_t>(s.T) * kNumJoints * 3);
            for (int t = 0; t < s.T; ++t) {
                const auto& row = kps[static_cast<size_t>(t)];
                if (static_cast<int>(row.size()) != kNumJoints)
                    throw ManifestMismatchError("keypoint row length differs from J in video " + s.id);
                for (int k = 0; k < kNumJoints; ++k)
                    for (int c = 0; c < 3; ++c)
                        s.keypoints[(static_cast<size_t>(t) * kNumJoints + k) * 3 + c] =
                            row[static_cast<size_t>(k)][static_cast<size_t>(c)].get<float>();
            }
        }
        if (!e.at("gma_label").is_null())
            s.gma_label = e.at("gma_label").get<std::string>() == "abnormal" ? 1 : 0;
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<const VideoSample*> split_of(const std::vector<VideoSample>& samples,
                                         const std::string& split) {
    std::vector<const VideoSample*> out;
    for (const auto& s : samples)
        if (s.split == split) out.push_back(&s);
    return out;
}

}  // namespace spnlab
