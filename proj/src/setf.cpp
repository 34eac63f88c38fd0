#include "sinbad/setf.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sinbad/atomic_file.hpp"
#include "sinbad/binary_io.hpp"
#include "sinbad/error.hpp"

namespace sinbad {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

void write_setf(std::ostream& out, const FeatureGrid& grid) {
    if (grid.values.size() != static_cast<std::size_t>(grid.height * grid.width * grid.depth))
        throw DimensionError("feature grid value count does not match its shape");
    io::write_magic(out, "SETF");
    io::write_le<std::uint32_t>(out, kSetfVersion);
    io::write_le<std::uint8_t>(out, kSetfFloat32);
    io::write_le<std::uint32_t>(out, 3);
    io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(grid.height));
    io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(grid.width));
    io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(grid.depth));
    io::write_array(out, grid.values.data(), grid.values.size());
    if (!out) throw DataError("failed writing SETF data");
}

void write_setf(const fs::path& path, const FeatureGrid& grid) {
    write_file_atomic(path, [&](std::ostream& out) { write_setf(out, grid); });
}

FeatureGrid read_setf(std::istream& in, LevelTag level, std::string sample_id) {
    io::expect_magic(in, "SETF");
    const auto version = io::read_le<std::uint32_t>(in, "SETF version");
    if (version != kSetfVersion) throw DataError("unsupported SETF version " + std::to_string(version));
    const auto dtype = io::read_le<std::uint8_t>(in, "SETF dtype");
    if (dtype != kSetfFloat32) throw DataError("unsupported SETF dtype code " + std::to_string(dtype));
    const auto rank = io::read_le<std::uint32_t>(in, "SETF rank");
    if (rank != 3) throw DataError("SETF rank must be 3, got " + std::to_string(rank));
    const auto h = io::read_le<std::uint32_t>(in, "SETF height");
    const auto w = io::read_le<std::uint32_t>(in, "SETF width");
    const auto d = io::read_le<std::uint32_t>(in, "SETF depth");
    if (h == 0 || w == 0 || d == 0) throw DataError("SETF dimensions must be positive");
    const std::uint64_t count = std::uint64_t{h} * w * d;
    if (count > (1ULL << 32)) throw DataError("SETF tensor is implausibly large");
    FeatureGrid grid(h, w, d, level, std::move(sample_id));
    io::read_array(in, grid.values.data(), grid.values.size(), "SETF payload");
    if (in.peek() != std::char_traits<char>::eof()) throw DataError("trailing bytes after SETF payload");
    return grid;
}

FeatureGrid read_setf(const fs::path& path, LevelTag level, std::string sample_id) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open SETF file " + path.string());
    try {
        return read_setf(in, level, sample_id.empty() ? path.stem().string() : std::move(sample_id));
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

namespace {

ImageManifestEntry parse_entry(const ordered_json& j, std::string id, const fs::path& root,
                               const fs::path& data_root) {
    ImageManifestEntry e;
    e.sample_id = j.contains("sample_id") ? j.at("sample_id").get<std::string>() : std::move(id);
    if (e.sample_id.empty()) throw DataError("manifest entry without sample_id");
    const auto& label = j.at("label");
    e.label = label.is_number() ? (label.get<int>() ? Label::anomalous : Label::normal)
                                : parse_label(label.get<std::string>());
    e.split = parse_split(j.at("split").get<std::string>());
    for (const auto& [level, file] : j.at("files").items()) {
        fs::path p = file.get<std::string>();
        if (p.is_relative()) {
            fs::path local = root / p;
            if (!fs::exists(local) && !data_root.empty() && fs::exists(data_root / p)) local = data_root / p;
            p = local;
        }
        e.files[parse_level_tag(level)] = p;
    }
    return e;
}

} // namespace

std::vector<ImageManifestEntry> read_image_manifest(const fs::path& path, const fs::path& data_root) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(read_file_text(path));
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path.string() + ": invalid JSON: " + e.what());
    }
    std::vector<ImageManifestEntry> out;
    const fs::path root = path.parent_path();
    try {
        const auto& samples = doc.at("samples");
        if (samples.is_array()) {
            for (const auto& s : samples) out.push_back(parse_entry(s, {}, root, data_root));
        } else {
            for (const auto& [id, s] : samples.items()) out.push_back(parse_entry(s, id, root, data_root));
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path.string() + ": malformed manifest: " + e.what());
    } catch (const ConfigError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
    return out;
}

void write_image_manifest(const fs::path& path, const std::vector<ImageManifestEntry>& entries) {
    ordered_json doc;
    doc["version"] = 1;
    doc["samples"] = ordered_json::array();
    const fs::path root = path.parent_path();
    for (const auto& e : entries) {
        ordered_json s;
        s["sample_id"] = e.sample_id;
        s["label"] = to_string(e.label);
        s["split"] = to_string(e.split);
        ordered_json files = ordered_json::object();
        for (const auto& [level, file] : e.files) {
            const fs::path p = path_for_manifest(file, root);
            files[to_string(level)] = p.generic_string();
        }
        s["files"] = files;
        doc["samples"].push_back(std::move(s));
    }
    write_file_atomic(path, [&](std::ostream& out) { out << doc.dump(2) << '\n'; }, false);
}

FeatureGrid read_ppm_pixels(const fs::path& path, std::string sample_id) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open image " + path.string());
    auto token = [&]() {
        std::string t;
        char c;
        while (in.get(c)) {
            if (c == '#') {
                std::string skip;
                std::getline(in, skip);
                continue;
            }
            if (std::isspace(static_cast<unsigned char>(c))) {
                if (!t.empty()) break;
                continue;
            }
            t.push_back(c);
        }
        return t;
    };
    if (token() != "P6") throw DataError(path.string() + ": only binary PPM (P6) images are supported");
    Index w = 0, h = 0;
    int maxval = 0;
    try {
        w = std::stol(token());
        h = std::stol(token());
        maxval = std::stoi(token());
    } catch (const std::exception&) {
        throw DataError(path.string() + ": malformed PPM header");
    }
    if (w < 1 || h < 1 || maxval != 255) throw DataError(path.string() + ": unsupported PPM dimensions or maxval");
    std::vector<unsigned char> bytes(static_cast<std::size_t>(w * h * 3));
    if (!in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size())))
        throw DataError(path.string() + ": truncated PPM payload");
    const Index side = std::max(w, h);
    FeatureGrid square(side, side, 3, LevelTag::raw_pixels, sample_id.empty() ? path.stem().string() : std::move(sample_id));
    const Index top = (side - h) / 2;
    const Index left = (side - w) / 2;
    for (Index y = 0; y < h; ++y)
        for (Index x = 0; x < w; ++x)
            for (Index c = 0; c < 3; ++c)
                square.at(top + y, left + x, c) = static_cast<float>(bytes[static_cast<std::size_t>((y * w + x) * 3 + c)]) / 255.0f;
    return resize_grid(square, kRawPixelSide, kRawPixelSide);
}

} // namespace sinbad
