#pragma once

// SETF feature-grid files and the JSON image manifest.
//
// SETF v1 layout, all integers little-endian:
//
//   offset  size  field
//   0       4     magic "SETF"
//   4       4     u32 version = 1
//   8       1     u8 dtype code (1 = float32 little-endian)
//   9       4     u32 rank = 3
//   13      12    u32 H, u32 W, u32 D
//   25      4*HWD float32 values, row-major (h, w, d)

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "sinbad/image_sets.hpp"
#include "sinbad/ts_io.hpp"

namespace sinbad {

inline constexpr std::uint32_t kSetfVersion = 1;
inline constexpr std::uint8_t kSetfFloat32 = 1;
inline constexpr std::size_t kSetfHeaderBytes = 25;

void write_setf(std::ostream& out, const FeatureGrid& grid);
void write_setf(const std::filesystem::path& path, const FeatureGrid& grid);

/// Validates every header field and the payload length; trailing bytes are an
/// error. The level tag is not stored in the file and is taken from `level`.
FeatureGrid read_setf(std::istream& in, LevelTag level = LevelTag::block3, std::string sample_id = {});
FeatureGrid read_setf(const std::filesystem::path& path, LevelTag level = LevelTag::block3,
                      std::string sample_id = {});

struct ImageManifestEntry {
    std::string sample_id;
    Label label = Label::normal;
    Split split = Split::train;
    std::map<LevelTag, std::filesystem::path> files;
};

/// Accepts {"samples": [ {"sample_id", "label", "split", "files": {level: path}} ]}
/// or {"samples": {id: {...}}} (insertion order kept). Relative paths resolve
/// against the manifest directory, falling back to `data_root` when the
/// resolved file does not exist.
std::vector<ImageManifestEntry> read_image_manifest(const std::filesystem::path& path,
                                                    const std::filesystem::path& data_root = {});
void write_image_manifest(const std::filesystem::path& path, const std::vector<ImageManifestEntry>& entries);

/// Binary PPM (P6, maxval 255) as an H x W x 3 raw-pixel grid scaled to [0, 1],
/// zero-padded to a square and resized to 224 x 224.
FeatureGrid read_ppm_pixels(const std::filesystem::path& path, std::string sample_id = {});

} // namespace sinbad
