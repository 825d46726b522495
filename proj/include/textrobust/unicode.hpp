#pragma once

#include <string>
#include <string_view>

namespace textrobust {

// Minimal UTF-8 layer. Perturbations and the confusables table work on
// codepoints; everything else in the pipeline stays std::string/UTF-8.

// Decodes UTF-8, throwing ParseError on malformed sequences.
std::u32string utf8_decode(std::string_view s);

std::string utf8_encode(std::u32string_view s);
std::string utf8_encode(char32_t cp);

// Number of codepoints in a valid UTF-8 string.
std::size_t codepoint_count(std::string_view s);

bool is_space_cp(char32_t cp);

// ASCII punctuation plus the Unicode general-punctuation block and a few
// common Latin-1 marks. Covers what tweet text realistically carries.
bool is_punct_cp(char32_t cp);

// "U+0430" style tag for receipts and error messages.
std::string codepoint_name(char32_t cp);

}  // namespace textrobust
