#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace fewl::util {

std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it over `path`, so readers
// never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);

}  // namespace fewl::util
