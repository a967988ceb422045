#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace waynav {

/// Writes `contents` to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string read_file(const std::filesystem::path& path);

/// printf("%.6f") with negative zero folded to zero.
std::string fixed6(double v);

}  // namespace waynav
