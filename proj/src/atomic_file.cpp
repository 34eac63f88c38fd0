#include "sinbad/atomic_file.hpp"

#include <fstream>
#include <sstream>
#include <system_error>

#include "sinbad/error.hpp"

#ifdef __unix__
#include <unistd.h>
#endif

namespace sinbad {

namespace fs = std::filesystem;

void write_file_atomic(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body,
                       bool binary) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        if (ec) throw DataError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
    std::string suffix = ".tmp";
#ifdef __unix__
    suffix += "." + std::to_string(::getpid());
#endif
    fs::path tmp = path;
    tmp += suffix;
    {
        std::ofstream out(tmp, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
        if (!out) throw DataError("cannot open " + tmp.string() + " for writing");
        try {
            body(out);
        } catch (...) {
            out.close();
            std::error_code ignored;
            fs::remove(tmp, ignored);
            throw;
        }
        out.flush();
        if (!out) {
            std::error_code ignored;
            fs::remove(tmp, ignored);
            throw DataError("failed writing " + path.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        std::error_code ignored;
        fs::remove(tmp, ignored);
        throw DataError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

std::string read_file_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path path_for_manifest(const std::filesystem::path& file, const std::filesystem::path& dir) {
    std::error_code ec;
    const fs::path abs_file = fs::absolute(file, ec).lexically_normal();
    if (ec) return file;
    const fs::path abs_dir = fs::absolute(dir.empty() ? fs::path(".") : dir, ec).lexically_normal();
    if (ec) return file;
    const fs::path rel = abs_file.lexically_relative(abs_dir);
    if (rel.empty() || *rel.begin() == "..") return abs_file;
    return rel;
}

} // namespace sinbad
