#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string_view>
#include <vector>

namespace textrobust {

// Symmetric, irreflexive map of visually-confusable codepoints. Only 1:1
// (single codepoint to single codepoint) pairs are kept so substitutions
// preserve character count. Immutable after load.
struct ConfusablesTable {
    std::map<char32_t, std::vector<char32_t>> map;  // values sorted ascending
    long source_line_count = 0;
    long skipped_line_count = 0;  // multi-codepoint or excluded entries

    // Empty when c has no confusables; ordering ascending by codepoint.
    const std::vector<char32_t>& alternatives(char32_t c) const;
    bool has(char32_t c) const { return map.count(c) != 0; }
    std::size_t pair_count() const;
};

// Parses the published intentional-confusables format: `<hex> ; <hex> ; ...`
// per line, `#` starts a comment, blank lines skipped. Entries whose first or
// second field holds more than one codepoint are skipped and counted. Pairs
// are inserted symmetrically. `exclude` drops any pair touching one of the
// listed codepoints (for font-dependent lookalikes a user wants filtered).
ConfusablesTable load_confusables(const std::filesystem::path& path,
                                  const std::set<char32_t>& exclude = {});

ConfusablesTable parse_confusables(std::string_view text, const std::string& origin,
                                   const std::set<char32_t>& exclude = {});

// Exclusion-list file: one entry per line, either a literal character or
// U+XXXX / bare-hex notation; `#` comments allowed.
std::set<char32_t> load_exclusions(const std::filesystem::path& path);

}  // namespace textrobust
