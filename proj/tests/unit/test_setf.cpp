#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "sinbad/error.hpp"
#include "sinbad/setf.hpp"
#include "support.hpp"

using namespace sinbad;
namespace fs = std::filesystem;

namespace {

FeatureGrid sample_grid() {
    FeatureGrid g(2, 3, 4, LevelTag::block4, "s");
    for (std::size_t i = 0; i < g.values.size(); ++i) g.values[i] = static_cast<float>(i) * 0.5f - 3.0f;
    return g;
}

std::string encode(const FeatureGrid& g) {
    std::ostringstream out(std::ios::binary);
    write_setf(out, g);
    return out.str();
}

void put_u32(std::string& bytes, std::size_t at, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes[at + static_cast<std::size_t>(i)] = static_cast<char>((v >> (8 * i)) & 0xFF);
}

FeatureGrid decode(const std::string& bytes) {
    std::istringstream in(bytes, std::ios::binary);
    return read_setf(in);
}

} // namespace

TEST(Setf, HeaderLayout) {
    const std::string bytes = encode(sample_grid());
    ASSERT_EQ(bytes.size(), kSetfHeaderBytes + 4 * 24);
    EXPECT_EQ(bytes.substr(0, 4), "SETF");
    EXPECT_EQ(bytes[4], 1);
    EXPECT_EQ(bytes[8], 1);
    EXPECT_EQ(bytes[9], 3);
    EXPECT_EQ(bytes[13], 2);
    EXPECT_EQ(bytes[17], 3);
    EXPECT_EQ(bytes[21], 4);
}

TEST(Setf, RoundTripIsBitExact) {
    const auto g = sample_grid();
    const std::string bytes = encode(g);
    const auto back = decode(bytes);
    EXPECT_EQ(back.height, 2);
    EXPECT_EQ(back.width, 3);
    EXPECT_EQ(back.depth, 4);
    EXPECT_EQ(back.values, g.values);
    EXPECT_EQ(encode(back), bytes);

    const auto dir = support::scratch_dir("setf");
    write_setf(dir / "g.setf", g);
    EXPECT_EQ(support::read_bytes(dir / "g.setf"), bytes);
    const auto file = read_setf(dir / "g.setf", LevelTag::raw_pixels, "id");
    EXPECT_EQ(file.level, LevelTag::raw_pixels);
    EXPECT_EQ(file.sample_id, "id");
}

TEST(Setf, HeaderErrors) {
    const std::string good = encode(sample_grid());
    auto bad = good;
    bad[0] = 'X';
    EXPECT_THROW(decode(bad), DataError);
    bad = good;
    put_u32(bad, 4, 2);
    EXPECT_THROW(decode(bad), DataError);
    bad = good;
    bad[8] = 2;
    EXPECT_THROW(decode(bad), DataError);
    bad = good;
    put_u32(bad, 9, 2);
    EXPECT_THROW(decode(bad), DataError);
    bad = good;
    put_u32(bad, 13, 0);
    EXPECT_THROW(decode(bad), DataError);
    EXPECT_THROW(decode(good.substr(0, good.size() - 1)), DataError);
    EXPECT_THROW(decode(good + "x"), DataError);
    EXPECT_THROW(decode(good.substr(0, 10)), DataError);
    EXPECT_THROW(read_setf(fs::path("/nonexistent/x.setf")), DataError);
}

TEST(ImageManifest, ArrayAndObjectForms) {
    const auto dir = support::scratch_dir("image_manifest");
    fs::create_directories(dir / "grids");
    fs::create_directories(dir / "root" / "extra");
    std::ofstream(dir / "array.json") << R"({"samples": [
        {"sample_id": "a", "label": "normal", "split": "train",
         "files": {"block3": "grids/a3.setf", "raw_pixels": "extra/a.setf"}},
        {"sample_id": "b", "label": "anomalous", "split": "test", "files": {"block3": "/abs/b3.setf"}}
    ]})";
    std::ofstream(dir / "root" / "extra" / "a.setf") << "x";
    const auto arr = read_image_manifest(dir / "array.json", dir / "root");
    ASSERT_EQ(arr.size(), 2u);
    EXPECT_EQ(arr[0].sample_id, "a");
    EXPECT_EQ(arr[0].files.at(LevelTag::block3), dir / "grids" / "a3.setf");
    EXPECT_EQ(arr[0].files.at(LevelTag::raw_pixels), dir / "root" / "extra" / "a.setf");
    EXPECT_EQ(arr[1].label, Label::anomalous);
    EXPECT_EQ(arr[1].split, Split::test);
    EXPECT_EQ(arr[1].files.at(LevelTag::block3), fs::path("/abs/b3.setf"));

    std::ofstream(dir / "object.json") << R"({"samples": {
        "z": {"label": "normal", "split": "train", "files": {"block4": "z.setf"}},
        "y": {"label": "1", "split": "test", "files": {"block4": "y.setf"}}
    }})";
    const auto obj = read_image_manifest(dir / "object.json");
    ASSERT_EQ(obj.size(), 2u);
    EXPECT_EQ(obj[0].sample_id, "z");
    EXPECT_EQ(obj[1].sample_id, "y");
    EXPECT_EQ(obj[1].label, Label::anomalous);
}

TEST(ImageManifest, WriteThenRead) {
    const auto dir = support::scratch_dir("image_manifest_rt");
    std::vector<ImageManifestEntry> entries(2);
    entries[0].sample_id = "p";
    entries[0].files[LevelTag::block3] = dir / "p3.setf";
    entries[1].sample_id = "q";
    entries[1].label = Label::anomalous;
    entries[1].split = Split::test;
    entries[1].files[LevelTag::block4] = dir / "sub" / "q4.setf";
    write_image_manifest(dir / "m.json", entries);
    const auto back = read_image_manifest(dir / "m.json");
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[0].files, entries[0].files);
    EXPECT_EQ(back[1].files, entries[1].files);
    EXPECT_EQ(back[1].label, Label::anomalous);
}

TEST(ImageManifest, Errors) {
    const auto dir = support::scratch_dir("image_manifest_err");
    std::ofstream(dir / "bad.json") << "{";
    std::ofstream(dir / "nosamples.json") << R"({"items": []})";
    std::ofstream(dir / "badlevel.json") << R"({"samples": [{"sample_id": "a", "label": "normal", "split": "train", "files": {"block9": "x"}}]})";
    std::ofstream(dir / "noid.json") << R"({"samples": [{"label": "normal", "split": "train", "files": {}}]})";
    for (const char* f : {"bad.json", "nosamples.json", "badlevel.json", "noid.json"})
        EXPECT_THROW(read_image_manifest(dir / f), Error) << f;
}

TEST(Ppm, PadsToSquareAndResizes) {
    const auto dir = support::scratch_dir("ppm");
    {
        std::ofstream out(dir / "img.ppm", std::ios::binary);
        out << "P6\n# comment\n4 2\n255\n";
        for (int i = 0; i < 8; ++i) out.put(static_cast<char>(255)).put(0).put(0);
    }
    const auto g = read_ppm_pixels(dir / "img.ppm");
    EXPECT_EQ(g.height, kRawPixelSide);
    EXPECT_EQ(g.width, kRawPixelSide);
    EXPECT_EQ(g.depth, 3);
    EXPECT_EQ(g.level, LevelTag::raw_pixels);
    // center row is image content, top rows are padding
    EXPECT_FLOAT_EQ(g.at(112, 112, 0), 1.0f);
    EXPECT_FLOAT_EQ(g.at(0, 112, 0), 0.0f);
    std::ofstream(dir / "p3.ppm") << "P3\n1 1\n255\n0 0 0\n";
    EXPECT_THROW(read_ppm_pixels(dir / "p3.ppm"), DataError);
}
