#include "textrobust/unicode.hpp"

#include "textrobust/types.hpp"

#include <cstdio>

namespace textrobust {

namespace {

int sequence_length(unsigned char lead) {
    if (lead < 0x80) return 1;
    if ((lead & 0xE0) == 0xC0) return 2;
    if ((lead & 0xF0) == 0xE0) return 3;
    if ((lead & 0xF8) == 0xF0) return 4;
    return 0;
}

}  // namespace

std::u32string utf8_decode(std::string_view s) {
    std::u32string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        const unsigned char lead = static_cast<unsigned char>(s[i]);
        const int len = sequence_length(lead);
        if (len == 0 || i + static_cast<std::size_t>(len) > s.size())
            throw ParseError("invalid UTF-8 at byte offset " + std::to_string(i));
        char32_t cp = 0;
        switch (len) {
            case 1:
                cp = lead;
                break;
            case 2:
                cp = lead & 0x1F;
                break;
            case 3:
                cp = lead & 0x0F;
                break;
            case 4:
                cp = lead & 0x07;
                break;
        }
        for (int k = 1; k < len; ++k) {
            const unsigned char cont = static_cast<unsigned char>(s[i + k]);
            if ((cont & 0xC0) != 0x80)
                throw ParseError("invalid UTF-8 continuation at byte offset " + std::to_string(i + k));
            cp = (cp << 6) | (cont & 0x3F);
        }
        // Reject overlong encodings and surrogate range.
        static constexpr char32_t kMin[5] = {0, 0, 0x80, 0x800, 0x10000};
        if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
            throw ParseError("invalid UTF-8 codepoint at byte offset " + std::to_string(i));
        out.push_back(cp);
        i += static_cast<std::size_t>(len);
    }
    return out;
}

std::string utf8_encode(std::u32string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char32_t cp : s) out += utf8_encode(cp);
    return out;
}

std::string utf8_encode(char32_t cp) {
    std::string out;
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
    return out;
}

std::size_t codepoint_count(std::string_view s) {
    std::size_t count = 0;
    for (char c : s)
        if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++count;
    return count;
}

bool is_space_cp(char32_t cp) {
    switch (cp) {
        case U' ':
        case U'\t':
        case U'\n':
        case U'\r':
        case U'\f':
        case U'\v':
        case 0x00A0:  // no-break space
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;  // en quad .. hair space
    }
}

bool is_punct_cp(char32_t cp) {
    if (cp < 0x80) {
        return (cp >= '!' && cp <= '/') || (cp >= ':' && cp <= '@') || (cp >= '[' && cp <= '`') ||
               (cp >= '{' && cp <= '~');
    }
    if (cp >= 0x2000 && cp <= 0x206F && !is_space_cp(cp)) return true;  // general punctuation
    switch (cp) {
        case 0x00A1:  // inverted exclamation
        case 0x00AB:  // left guillemet
        case 0x00BB:  // right guillemet
        case 0x00BF:  // inverted question mark
            return true;
        default:
            return false;
    }
}

std::string codepoint_name(char32_t cp) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "U+%04X", static_cast<unsigned>(cp));
    return buf;
}

}  // namespace textrobust
