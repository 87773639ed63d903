#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace zeus::detail {

// Writes to a sibling temp file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string read_file(const std::filesystem::path& path);

// printf("%.17g"), the round-trip form used in CSV output.
std::string format_double(double v);

}  // namespace zeus::detail
