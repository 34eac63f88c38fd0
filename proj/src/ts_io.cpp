#include "sinbad/ts_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "sinbad/atomic_file.hpp"
#include "sinbad/error.hpp"

namespace sinbad {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

bool parse_double(const std::string& cell, double& out) {
    if (cell.empty()) return false;
    char* end = nullptr;
    out = std::strtod(cell.c_str(), &end);
    return end == cell.c_str() + cell.size();
}

[[noreturn]] void fail_at(const fs::path& path, std::size_t line, const std::string& what) {
    std::ostringstream msg;
    msg << path.string() << ":" << line << ": " << what;
    throw DataError(msg.str());
}

} // namespace

std::string to_string(Split split) { return split == Split::train ? "train" : "test"; }

std::string to_string(Label label) { return label == Label::normal ? "normal" : "anomalous"; }

Label parse_label(const std::string& raw) {
    const std::string s = lower(trim(raw));
    if (s == "normal" || s == "0") return Label::normal;
    if (s == "anomalous" || s == "anomaly" || s == "1") return Label::anomalous;
    throw DataError("unknown label '" + raw + "' (normal|anomalous|0|1)");
}

Split parse_split(const std::string& raw) {
    const std::string s = lower(trim(raw));
    if (s == "train") return Split::train;
    if (s == "test") return Split::test;
    throw DataError("unknown split '" + raw + "' (train|test)");
}

Series read_series_csv(const fs::path& path, std::string sample_id) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open series file " + path.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto cells = split(t, ',');
        std::vector<double> row(cells.size());
        bool numeric = true;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (!parse_double(cells[i], row[i])) {
                numeric = false;
                if (rows.empty() && lineno == 1) break;
                fail_at(path, lineno, "non-numeric cell '" + cells[i] + "'");
            }
        }
        if (!numeric) continue; // header
        if (!rows.empty() && row.size() != rows.front().size()) {
            std::ostringstream msg;
            msg << "row has " << row.size() << " columns, expected " << rows.front().size();
            fail_at(path, lineno, msg.str());
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw DataError("series file " + path.string() + " has no data rows");
    Series s;
    s.sample_id = sample_id.empty() ? path.stem().string() : std::move(sample_id);
    s.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c) s.values(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
    check_series(s);
    return s;
}

void write_series_csv(const fs::path& path, const Series& series) {
    write_file_atomic(path, [&](std::ostream& out) {
        out << std::setprecision(std::numeric_limits<double>::max_digits10);
        for (Index t = 0; t < series.length(); ++t) {
            for (Index c = 0; c < series.channels(); ++c) {
                if (c) out << ',';
                out << series.values(t, c);
            }
            out << '\n';
        }
    }, false);
}

std::vector<SeriesManifestEntry> read_series_manifest(const fs::path& path, const fs::path& data_root) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open manifest " + path.string());
    std::string line;
    std::size_t lineno = 0;
    std::vector<std::string> header;
    std::vector<SeriesManifestEntry> out;
    const fs::path root = path.parent_path();
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto cells = split(t, ',');
        if (header.empty()) {
            for (auto& c : cells) c = lower(c);
            header = std::move(cells);
            for (const char* required : {"file", "label", "split"})
                if (std::find(header.begin(), header.end(), required) == header.end())
                    fail_at(path, lineno, std::string("manifest header lacks column '") + required + "'");
            continue;
        }
        if (cells.size() != header.size()) fail_at(path, lineno, "column count does not match header");
        SeriesManifestEntry e;
        try {
            for (std::size_t i = 0; i < header.size(); ++i) {
                if (header[i] == "file") e.file = cells[i];
                else if (header[i] == "label") e.label = parse_label(cells[i]);
                else if (header[i] == "split") e.split = parse_split(cells[i]);
                else if (header[i] == "sample_id") e.sample_id = cells[i];
            }
        } catch (const DataError& err) {
            fail_at(path, lineno, err.what());
        }
        if (e.sample_id.empty()) e.sample_id = e.file.stem().string();
        if (e.file.is_relative()) {
            fs::path local = root / e.file;
            if (!fs::exists(local) && !data_root.empty() && fs::exists(data_root / e.file)) local = data_root / e.file;
            e.file = local;
        }
        out.push_back(std::move(e));
    }
    if (header.empty()) throw DataError("manifest " + path.string() + " is empty");
    return out;
}

void write_series_manifest(const fs::path& path, const std::vector<SeriesManifestEntry>& entries) {
    const fs::path root = path.parent_path();
    write_file_atomic(path, [&](std::ostream& out) {
        out << "sample_id,file,label,split\n";
        for (const auto& e : entries) {
            const fs::path file = path_for_manifest(e.file, root);
            out << e.sample_id << ',' << file.generic_string() << ',' << to_string(e.label) << ','
                << to_string(e.split) << '\n';
        }
    }, false);
}

TsDataset read_ts_file(const fs::path& path, const TsReadOptions& options) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open .ts file " + path.string());
    TsDataset data;
    bool in_data = false;
    bool has_labels = true;
    std::string line;
    std::size_t lineno = 0;
    std::size_t index = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (!in_data) {
            if (t[0] != '@') fail_at(path, lineno, "expected a header line before @data");
            std::istringstream ss(t);
            std::string key;
            std::string value;
            ss >> key;
            std::getline(ss, value);
            key = lower(key);
            value = trim(value);
            if (key == "@problemname") data.problem_name = value;
            else if (key == "@timestamps" && lower(value) == "true")
                fail_at(path, lineno, "timestamped .ts files are not supported");
            else if (key == "@classlabel") has_labels = lower(value).rfind("true", 0) == 0;
            else if (key == "@data") in_data = true;
            continue;
        }
        auto fields = split(t, ':');
        std::string cls;
        if (has_labels) {
            if (fields.size() < 2) fail_at(path, lineno, "expected at least one dimension and a class label");
            cls = fields.back();
            fields.pop_back();
        }
        std::vector<std::vector<double>> dims;
        std::size_t longest = 0;
        for (const auto& f : fields) {
            std::vector<double> values;
            for (const auto& cell : split(f, ',')) {
                double v = 0.0;
                if (cell == "?" || lower(cell) == "nan") v = 0.0;
                else if (!parse_double(cell, v)) fail_at(path, lineno, "bad value '" + cell + "'");
                values.push_back(std::isfinite(v) ? v : 0.0);
            }
            longest = std::max(longest, values.size());
            dims.push_back(std::move(values));
        }
        if (!data.series.empty() && static_cast<Index>(dims.size()) != data.series.front().channels())
            fail_at(path, lineno, "dimension count differs from earlier series");
        ++index;
        if ((options.min_length && longest < options.min_length) ||
            (options.max_length && longest > options.max_length)) {
            ++data.dropped;
            continue;
        }
        Series s;
        s.sample_id = (data.problem_name.empty() ? path.stem().string() : data.problem_name) + "_" + std::to_string(index - 1);
        s.values = RowMatrix::Zero(static_cast<Index>(longest), static_cast<Index>(dims.size()));
        for (std::size_t c = 0; c < dims.size(); ++c)
            for (std::size_t r = 0; r < dims[c].size(); ++r) s.values(static_cast<Index>(r), static_cast<Index>(c)) = dims[c][r];
        check_series(s);
        data.series.push_back(std::move(s));
        data.classes.push_back(cls);
    }
    if (!in_data) throw DataError(path.string() + ": no @data section");
    return data;
}

OneClassSplit one_class_split(const TsDataset& train, const TsDataset& test, const std::string& normal_class) {
    OneClassSplit out;
    for (std::size_t i = 0; i < train.series.size(); ++i) {
        if (train.classes[i] != normal_class) continue;
        Series s = train.series[i];
        s.label = Label::normal;
        out.train.push_back(std::move(s));
    }
    for (std::size_t i = 0; i < test.series.size(); ++i) {
        Series s = test.series[i];
        s.label = test.classes[i] == normal_class ? Label::normal : Label::anomalous;
        out.test.push_back(std::move(s));
    }
    if (out.train.empty()) throw DataError("no training series of class '" + normal_class + "'");
    return out;
}

std::vector<std::string> class_names(const TsDataset& data) {
    std::vector<std::string> out;
    for (const auto& c : data.classes)
        if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
    return out;
}

} // namespace sinbad
