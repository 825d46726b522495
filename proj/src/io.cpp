#include "textrobust/io.hpp"

#include "textrobust/types.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace textrobust {

namespace {

constexpr char kBase64Chars[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int base64_value(char c) {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file", path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ParseError("cannot write file", tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw ParseError("write failed", tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string base64_encode(const void* data, std::size_t n) {
    const auto* bytes = static_cast<const std::uint8_t*>(data);
    std::string out;
    out.reserve((n + 2) / 3 * 4);
    for (std::size_t i = 0; i < n; i += 3) {
        std::uint32_t chunk = static_cast<std::uint32_t>(bytes[i]) << 16;
        if (i + 1 < n) chunk |= static_cast<std::uint32_t>(bytes[i + 1]) << 8;
        if (i + 2 < n) chunk |= bytes[i + 2];
        out += kBase64Chars[(chunk >> 18) & 0x3F];
        out += kBase64Chars[(chunk >> 12) & 0x3F];
        out += i + 1 < n ? kBase64Chars[(chunk >> 6) & 0x3F] : '=';
        out += i + 2 < n ? kBase64Chars[chunk & 0x3F] : '=';
    }
    return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
    std::vector<std::uint8_t> out;
    out.reserve(text.size() / 4 * 3);
    std::uint32_t chunk = 0;
    int bits = 0;
    for (char c : text) {
        if (c == '=' || c == '\n' || c == '\r') continue;
        const int v = base64_value(c);
        if (v < 0) throw ParseError("invalid base64 character");
        chunk = (chunk << 6) | static_cast<std::uint32_t>(v);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<std::uint8_t>((chunk >> bits) & 0xFF));
        }
    }
    return out;
}

std::string encode_doubles(const double* values, std::size_t n) {
    std::vector<std::uint8_t> bytes(n * 8);
    for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t bits;
        std::memcpy(&bits, &values[i], 8);
        for (int b = 0; b < 8; ++b) bytes[i * 8 + static_cast<std::size_t>(b)] =
            static_cast<std::uint8_t>((bits >> (8 * b)) & 0xFF);
    }
    return base64_encode(bytes.data(), bytes.size());
}

std::vector<double> decode_doubles(std::string_view text) {
    const auto bytes = base64_decode(text);
    if (bytes.size() % 8 != 0) throw ParseError("encoded doubles have truncated payload");
    std::vector<double> out(bytes.size() / 8);
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::uint64_t bits = 0;
        for (int b = 7; b >= 0; --b)
            bits = (bits << 8) | bytes[i * 8 + static_cast<std::size_t>(b)];
        std::memcpy(&out[i], &bits, 8);
    }
    return out;
}

std::string format_fixed6(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", value);
    return buf;
}

}  // namespace textrobust
