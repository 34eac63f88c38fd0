#include <gtest/gtest.h>

#include <fstream>

#include "sinbad/error.hpp"
#include "sinbad/ts_io.hpp"
#include "support.hpp"

using namespace sinbad;
namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path());
    std::ofstream(p) << text;
}

} // namespace

TEST(SeriesCsv, HeaderAndValues) {
    const auto dir = support::scratch_dir("csv");
    write_text(dir / "a.csv", "x,y\n1,2\n3,4.5\n-1e3,0\n");
    const Series s = read_series_csv(dir / "a.csv", "a");
    ASSERT_EQ(s.length(), 3);
    ASSERT_EQ(s.channels(), 2);
    EXPECT_EQ(s.values(1, 1), 4.5);
    EXPECT_EQ(s.values(2, 0), -1000.0);
    EXPECT_EQ(s.sample_id, "a");
}

TEST(SeriesCsv, RoundTrip) {
    const auto dir = support::scratch_dir("csv_rt");
    Series s;
    s.values.resize(4, 3);
    Xoshiro256 rng(1);
    for (Index i = 0; i < 4; ++i)
        for (Index j = 0; j < 3; ++j) s.values(i, j) = rng.normal() * 1e3;
    write_series_csv(dir / "s.csv", s);
    const Series back = read_series_csv(dir / "s.csv");
    EXPECT_TRUE(back.values == s.values);
}

TEST(SeriesCsv, Errors) {
    const auto dir = support::scratch_dir("csv_err");
    write_text(dir / "ragged.csv", "1,2\n3\n");
    write_text(dir / "bad.csv", "1,2\n3,abc\n");
    write_text(dir / "empty.csv", "a,b\n");
    EXPECT_THROW(read_series_csv(dir / "ragged.csv"), DataError);
    try {
        read_series_csv(dir / "bad.csv");
        FAIL();
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find(":2"), std::string::npos) << e.what();
    }
    EXPECT_THROW(read_series_csv(dir / "empty.csv"), DataError);
    EXPECT_THROW(read_series_csv(dir / "missing.csv"), DataError);
}

TEST(SeriesManifest, ResolvesAndDefaultsIds) {
    const auto dir = support::scratch_dir("manifest");
    write_text(dir / "m" / "manifest.csv",
               "file,label,split\nseries/a.csv,normal,train\nseries/b.csv,1,test\nother.csv,anomalous,test\n");
    write_text(dir / "m" / "series" / "a.csv", "1\n");
    write_text(dir / "root" / "series" / "b.csv", "1\n");
    const auto entries = read_series_manifest(dir / "m" / "manifest.csv", dir / "root");
    ASSERT_EQ(entries.size(), 3u);
    EXPECT_EQ(entries[0].sample_id, "a");
    EXPECT_EQ(entries[0].file, dir / "m" / "series" / "a.csv");
    EXPECT_EQ(entries[1].file, dir / "root" / "series" / "b.csv");
    EXPECT_EQ(entries[1].label, Label::anomalous);
    EXPECT_EQ(entries[1].split, Split::test);
    EXPECT_EQ(entries[2].file, dir / "m" / "other.csv");
}

TEST(SeriesManifest, WriteThenRead) {
    const auto dir = support::scratch_dir("manifest_rt");
    std::vector<SeriesManifestEntry> entries{{"s0", dir / "x" / "s0.csv", Label::normal, Split::train},
                                             {"s1", dir / "x" / "s1.csv", Label::anomalous, Split::test}};
    write_series_manifest(dir / "manifest.csv", entries);
    const auto back = read_series_manifest(dir / "manifest.csv");
    ASSERT_EQ(back.size(), 2u);
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_EQ(back[i].sample_id, entries[i].sample_id);
        EXPECT_EQ(back[i].file, entries[i].file);
        EXPECT_EQ(back[i].label, entries[i].label);
        EXPECT_EQ(back[i].split, entries[i].split);
    }
}

TEST(SeriesManifest, Errors) {
    const auto dir = support::scratch_dir("manifest_err");
    write_text(dir / "nolabel.csv", "file,split\na.csv,train\n");
    write_text(dir / "badsplit.csv", "file,label,split\na.csv,normal,validation\n");
    write_text(dir / "cols.csv", "file,label,split\na.csv,normal\n");
    EXPECT_THROW(read_series_manifest(dir / "nolabel.csv"), DataError);
    EXPECT_THROW(read_series_manifest(dir / "badsplit.csv"), DataError);
    EXPECT_THROW(read_series_manifest(dir / "cols.csv"), DataError);
}

TEST(TsFile, ParsesDimensionsMissingValuesAndLabels) {
    const auto dir = support::scratch_dir("ts");
    write_text(dir / "Toy_TRAIN.ts",
               "# comment\n@problemName Toy\n@timeStamps false\n@univariate false\n@classLabel true a b\n@data\n"
               "1,2,3:4,5,6:a\n"
               "1,?,3,7:4,5:b\n"
               "1,2:3,4:a\n");
    const auto all = read_ts_file(dir / "Toy_TRAIN.ts");
    EXPECT_EQ(all.problem_name, "Toy");
    ASSERT_EQ(all.series.size(), 3u);
    EXPECT_EQ(all.series[0].channels(), 2);
    EXPECT_EQ(all.series[0].values(2, 1), 6.0);
    EXPECT_EQ(all.series[1].length(), 4);
    EXPECT_EQ(all.series[1].values(1, 0), 0.0);
    EXPECT_EQ(all.series[1].values(3, 1), 0.0);
    EXPECT_EQ(all.classes[1], "b");
    EXPECT_EQ(class_names(all), (std::vector<std::string>{"a", "b"}));

    const auto filtered = read_ts_file(dir / "Toy_TRAIN.ts", {3, 3});
    EXPECT_EQ(filtered.series.size(), 1u);
    EXPECT_EQ(filtered.dropped, 2u);
}

TEST(TsFile, Errors) {
    const auto dir = support::scratch_dir("ts_err");
    write_text(dir / "nodata.ts", "@problemName X\n");
    write_text(dir / "bad.ts", "@classLabel true a\n@data\n1,x:a\n");
    write_text(dir / "dims.ts", "@classLabel true a\n@data\n1:2:a\n1:a\n");
    write_text(dir / "stamps.ts", "@timeStamps true\n@data\n");
    EXPECT_THROW(read_ts_file(dir / "nodata.ts"), DataError);
    EXPECT_THROW(read_ts_file(dir / "bad.ts"), DataError);
    EXPECT_THROW(read_ts_file(dir / "dims.ts"), DataError);
    EXPECT_THROW(read_ts_file(dir / "stamps.ts"), DataError);
}

TEST(OneClassSplit, LabelsByNormalClass) {
    const auto dir = support::scratch_dir("split");
    write_text(dir / "train.ts", "@classLabel true a b\n@data\n1,2:a\n3,4:b\n5,6:a\n");
    write_text(dir / "test.ts", "@classLabel true a b\n@data\n1,2:b\n3,4:a\n");
    const auto split = one_class_split(read_ts_file(dir / "train.ts"), read_ts_file(dir / "test.ts"), "a");
    EXPECT_EQ(split.train.size(), 2u);
    ASSERT_EQ(split.test.size(), 2u);
    EXPECT_EQ(split.test[0].label, Label::anomalous);
    EXPECT_EQ(split.test[1].label, Label::normal);
    EXPECT_THROW(one_class_split(read_ts_file(dir / "train.ts"), read_ts_file(dir / "test.ts"), "z"), DataError);
}

TEST(Labels, Parse) {
    EXPECT_EQ(parse_label("normal"), Label::normal);
    EXPECT_EQ(parse_label("0"), Label::normal);
    EXPECT_EQ(parse_label("anomalous"), Label::anomalous);
    EXPECT_THROW(parse_label("maybe"), DataError);
    EXPECT_EQ(parse_split("train"), Split::train);
    EXPECT_EQ(to_string(Split::test), "test");
}
