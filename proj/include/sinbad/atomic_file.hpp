#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>

namespace sinbad {

/// Writes through a sibling temporary file and renames it over `path`, so a
/// reader never observes a partially written file. Throws DataError naming
/// the path on failure.
void write_file_atomic(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body,
                       bool binary = true);

std::string read_file_text(const std::filesystem::path& path);

/// `file` as written into a manifest stored in `dir`: relative when it lies
/// below `dir`, absolute otherwise. Relative inputs are taken against the
/// working directory.
std::filesystem::path path_for_manifest(const std::filesystem::path& file, const std::filesystem::path& dir);

} // namespace sinbad
