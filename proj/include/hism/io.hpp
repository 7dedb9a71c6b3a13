#pragma once

#include <filesystem>
#include <string>

namespace hism {

/// Throws IoFailure.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& bytes);
/// Writes to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& bytes);

}  // namespace hism
