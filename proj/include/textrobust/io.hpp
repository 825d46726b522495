#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace textrobust {

std::string read_text_file(const std::filesystem::path& path);

// Writes via a sibling temp file and renames into place.
void write_text_file(const std::filesystem::path& path, std::string_view content);

std::string base64_encode(const void* data, std::size_t n);
std::vector<std::uint8_t> base64_decode(std::string_view text);

// Doubles as base64 of little-endian 64-bit words, independent of host
// endianness, so checkpoints round-trip bit-exactly everywhere.
std::string encode_doubles(const double* values, std::size_t n);
std::vector<double> decode_doubles(std::string_view text);

// Fixed "%.6f"-style decimal used by every report CSV.
std::string format_fixed6(double value);

}  // namespace textrobust
