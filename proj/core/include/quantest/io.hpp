#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace quantest {

/// Shortest decimal text that round-trips to the same double; "inf",
/// "-inf" and "nan" for the special values.
std::string format_real(double x);

/// Writes `content` to `path`, creating parent directories.
void write_text_file(const std::filesystem::path& path, std::string_view content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace quantest
