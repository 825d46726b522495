#include "textrobust/confusables.hpp"

#include "textrobust/types.hpp"
#include "textrobust/unicode.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace textrobust {

namespace {

std::string strip(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// A field is one or more space-separated 4-6 digit hex codepoints.
std::vector<char32_t> parse_hex_field(const std::string& field, const std::string& origin, long line_no) {
    std::vector<char32_t> cps;
    std::istringstream in(field);
    std::string word;
    while (in >> word) {
        if (word.size() < 4 || word.size() > 6)
            throw ParseError("malformed codepoint '" + word + "'", origin, line_no);
        char32_t cp = 0;
        for (char c : word) {
            cp <<= 4;
            if (c >= '0' && c <= '9')
                cp |= static_cast<char32_t>(c - '0');
            else if (c >= 'A' && c <= 'F')
                cp |= static_cast<char32_t>(c - 'A' + 10);
            else if (c >= 'a' && c <= 'f')
                cp |= static_cast<char32_t>(c - 'a' + 10);
            else
                throw ParseError("malformed codepoint '" + word + "'", origin, line_no);
        }
        if (cp > 0x10FFFF) throw ParseError("codepoint out of range '" + word + "'", origin, line_no);
        cps.push_back(cp);
    }
    return cps;
}

void insert_directed(std::map<char32_t, std::vector<char32_t>>& map, char32_t from, char32_t to) {
    auto& alts = map[from];
    auto it = std::lower_bound(alts.begin(), alts.end(), to);
    if (it == alts.end() || *it != to) alts.insert(it, to);
}

}  // namespace

const std::vector<char32_t>& ConfusablesTable::alternatives(char32_t c) const {
    static const std::vector<char32_t> kEmpty;
    auto it = map.find(c);
    return it == map.end() ? kEmpty : it->second;
}

std::size_t ConfusablesTable::pair_count() const {
    std::size_t directed = 0;
    for (const auto& [cp, alts] : map) directed += alts.size();
    return directed / 2;
}

ConfusablesTable parse_confusables(std::string_view text, const std::string& origin,
                                   const std::set<char32_t>& exclude) {
    ConfusablesTable table;
    std::istringstream in{std::string(text)};
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = strip(line);
        if (line.empty()) continue;
        ++table.source_line_count;

        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            const std::size_t semi = line.find(';', start);
            fields.push_back(strip(line.substr(start, semi - start)));
            if (semi == std::string::npos) break;
            start = semi + 1;
        }
        if (fields.size() < 2 || fields[0].empty() || fields[1].empty())
            throw ParseError("expected at least two ';'-separated fields", origin, line_no);

        const auto source = parse_hex_field(fields[0], origin, line_no);
        const auto target = parse_hex_field(fields[1], origin, line_no);
        if (source.empty() || target.empty())
            throw ParseError("empty codepoint field", origin, line_no);
        if (source.size() != 1 || target.size() != 1) {
            ++table.skipped_line_count;  // only 1:1 pairs preserve character count
            continue;
        }
        if (source[0] == target[0]) {
            ++table.skipped_line_count;  // self-map would violate irreflexivity
            continue;
        }
        if (exclude.count(source[0]) || exclude.count(target[0])) {
            ++table.skipped_line_count;
            continue;
        }
        insert_directed(table.map, source[0], target[0]);
        insert_directed(table.map, target[0], source[0]);
    }

    if (table.pair_count() == 0) throw ParseError("no usable confusable pairs", origin);
    return table;
}

ConfusablesTable load_confusables(const std::filesystem::path& path, const std::set<char32_t>& exclude) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open confusables file", path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_confusables(buf.str(), path.string(), exclude);
}

std::set<char32_t> load_exclusions(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open exclusion file", path.string());
    std::set<char32_t> out;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = strip(line);
        if (line.empty()) continue;
        std::string hex = line;
        if (hex.rfind("U+", 0) == 0 || hex.rfind("u+", 0) == 0) hex = hex.substr(2);
        const bool all_hex = !hex.empty() && hex.size() >= 2 &&
                             std::all_of(hex.begin(), hex.end(), [](char c) { return std::isxdigit(static_cast<unsigned char>(c)); });
        if (all_hex) {
            out.insert(static_cast<char32_t>(std::stoul(hex, nullptr, 16)));
        } else {
            const auto cps = utf8_decode(line);
            if (cps.size() != 1)
                throw ParseError("expected one character or a codepoint", path.string(), line_no);
            out.insert(cps[0]);
        }
    }
    return out;
}

}  // namespace textrobust
