#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace coe::io {

/// Reads a whole file. Throws IoError when the file cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Splits on '\n' and strips one trailing '\r' per line. A final newline does
/// not open an extra line, so "a\nb\n" has two lines and "" has none.
std::vector<std::string> split_lines(std::string_view content);

/// Writes content, creating parent directories. Throws IoError on failure.
void write_file(const std::filesystem::path& path, std::string_view content);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

std::string sha256_hex(std::string_view bytes);

/// Tool version baked in at build time.
std::string tool_version();

}  // namespace coe::io
