#include "textrobust/corpus.hpp"

#include "textrobust/rng.hpp"
#include "textrobust/unicode.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace textrobust {

namespace {

using json = nlohmann::json;

bool is_url_token(const std::string& token) {
    return token.rfind("http://", 0) == 0 || token.rfind("https://", 0) == 0 ||
           token.rfind("www.", 0) == 0;
}

}  // namespace

TaskSchema TaskSchema::three_way() {
    TaskSchema s;
    s.name = "three_way";
    s.classes = {"trustworthy", "propaganda", "disinformation"};
    s.binary_classes = {"trustworthy", "deceptive"};
    s.binary_of = {0, 1, 1};
    return s;
}

TaskSchema TaskSchema::four_way() {
    TaskSchema s;
    s.name = "four_way";
    s.classes = {"clickbait", "hoax", "satire", "conspiracy"};
    s.binary_classes = {"satire", "not_satire"};
    s.binary_of = {1, 1, 0, 1};
    return s;
}

TaskSchema TaskSchema::custom(std::vector<std::string> classes) {
    if (classes.size() < 2) throw ConfigError("a task schema needs at least 2 classes");
    std::set<std::string> unique(classes.begin(), classes.end());
    if (unique.size() != classes.size()) throw ConfigError("duplicate class names in schema");
    TaskSchema s;
    s.name = "custom";
    s.classes = std::move(classes);
    return s;
}

TaskSchema TaskSchema::by_name(const std::string& name) {
    if (name == "three_way") return three_way();
    if (name == "four_way") return four_way();
    throw ConfigError("unknown task schema '" + name + "' (expected three_way or four_way)");
}

int TaskSchema::class_id(const std::string& label) const {
    for (std::size_t i = 0; i < classes.size(); ++i)
        if (classes[i] == label) return static_cast<int>(i);
    return -1;
}

int TaskSchema::collapse_class(int class_id) const {
    if (!has_binary()) throw ConfigError("schema '" + name + "' has no binary collapse");
    if (class_id < 0 || class_id >= num_classes()) throw ConfigError("class id out of range");
    return binary_of[static_cast<std::size_t>(class_id)];
}

TaskSchema TaskSchema::binary_schema() const {
    if (!has_binary()) throw ConfigError("schema '" + name + "' has no binary collapse");
    TaskSchema s;
    s.name = name + "_binary";
    s.classes = binary_classes;
    s.binary_classes = binary_classes;
    s.binary_of = {0, 1};
    return s;
}

const char* to_string(Provenance p) {
    switch (p) {
        case Provenance::original: return "original";
        case Provenance::char_perturbed: return "char_perturbed";
        case Provenance::word_perturbed: return "word_perturbed";
    }
    return "original";
}

std::optional<Provenance> provenance_from_string(const std::string& s) {
    if (s == "original") return Provenance::original;
    if (s == "char_perturbed") return Provenance::char_perturbed;
    if (s == "word_perturbed") return Provenance::word_perturbed;
    return std::nullopt;
}

const char* to_string(Variant v) {
    switch (v) {
        case Variant::Raw: return "Raw";
        case Variant::Tr: return "Tr";
        case Variant::TrHalfChar: return "TrHalfC";
        case Variant::TrHalfWord: return "TrHalfW";
        case Variant::TrFullChar: return "TrFullC";
        case Variant::TrFullWord: return "TrFullW";
        case Variant::Te: return "Te";
        case Variant::TeChar: return "TeC";
        case Variant::TeWord: return "TeW";
        case Variant::TeMixed: return "TeMixed";
    }
    return "Raw";
}

std::string preprocess(std::string_view raw_text) {
    std::u32string text = utf8_decode(raw_text);

    // ASCII lowercase; perturbed or non-Latin codepoints pass through.
    for (char32_t& cp : text)
        if (cp >= U'A' && cp <= U'Z') cp += 32;

    // Token-level pass first: mentions, hashtags, and URLs are deleted
    // wholesale, not just stripped of their sigil.
    std::vector<std::u32string> kept;
    std::u32string current;
    auto flush = [&] {
        if (current.empty()) return;
        const std::string utf8 = utf8_encode(current);
        if (current[0] != U'@' && current[0] != U'#' && !is_url_token(utf8)) kept.push_back(current);
        current.clear();
    };
    for (char32_t cp : text) {
        if (is_space_cp(cp))
            flush();
        else
            current.push_back(cp);
    }
    flush();

    // Then drop punctuation characters and collapse whitespace.
    std::u32string out;
    for (const auto& token : kept) {
        std::u32string cleaned;
        for (char32_t cp : token)
            if (!is_punct_cp(cp)) cleaned.push_back(cp);
        if (cleaned.empty()) continue;
        if (!out.empty()) out.push_back(U' ');
        out += cleaned;
    }
    return utf8_encode(out);
}

std::vector<std::string> tokenize(std::string_view clean_text) {
    std::vector<std::string> tokens;
    const std::u32string text = utf8_decode(clean_text);
    std::u32string current;
    for (char32_t cp : text) {
        if (is_space_cp(cp)) {
            if (!current.empty()) {
                tokens.push_back(utf8_encode(current));
                current.clear();
            }
        } else {
            current.push_back(cp);
        }
    }
    if (!current.empty()) tokens.push_back(utf8_encode(current));
    return tokens;
}

Vector lexicon_features(std::span<const std::string> tokens, std::span<const Lexicon> lexicons) {
    Vector out = Vector::Zero(static_cast<Eigen::Index>(lexicons.size()));
    const Scalar denom = static_cast<Scalar>(std::max<std::size_t>(1, tokens.size()));
    for (std::size_t l = 0; l < lexicons.size(); ++l) {
        long hits = 0;
        for (const auto& token : tokens)
            if (lexicons[l].tokens.count(token)) ++hits;
        out[static_cast<Eigen::Index>(l)] = static_cast<Scalar>(hits) / denom;
    }
    return out;
}

Lexicon load_lexicon(const std::filesystem::path& path, std::string name) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open lexicon file", path.string());
    Lexicon lex;
    lex.name = name.empty() ? path.stem().string() : std::move(name);
    std::string line;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::istringstream fields(line);
        std::string token;
        while (fields >> token) lex.tokens.insert(token);
    }
    return lex;
}

namespace {

Dataset load_corpus_impl(const std::filesystem::path& path, const TaskSchema* schema,
                         std::span<const Lexicon> lexicons) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open corpus file", path.string());

    struct RawRecord {
        std::string id, text, label;
        std::optional<Vector> aux;
        long line_no;
    };
    std::vector<RawRecord> records;
    std::set<std::string> labels_seen;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError(std::string("bad record: ") + e.what(), path.string(), line_no);
        }
        if (!rec.is_object() || !rec.contains("id") || !rec.contains("text") || !rec.contains("label"))
            throw ParseError("record needs id, text, and label fields", path.string(), line_no);
        RawRecord r;
        r.id = rec.at("id").is_string() ? rec.at("id").get<std::string>() : rec.at("id").dump();
        r.text = rec.at("text").get<std::string>();
        r.label = rec.at("label").get<std::string>();
        r.line_no = line_no;
        if (rec.contains("aux") && !rec.at("aux").is_null()) {
            const auto values = rec.at("aux").get<std::vector<Scalar>>();
            r.aux = Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
        }
        labels_seen.insert(r.label);
        records.push_back(std::move(r));
    }
    if (records.empty()) throw ParseError("no corpus records", path.string());

    TaskSchema auto_schema;
    if (schema == nullptr) {
        auto_schema = TaskSchema::custom({labels_seen.begin(), labels_seen.end()});
        schema = &auto_schema;
    }

    Dataset dataset;
    dataset.schema = *schema;
    dataset.tag = Variant::Raw;

    std::vector<std::string> bad_label_ids;
    std::set<std::string> ids;
    bool any_aux = false, any_no_aux = false;
    Eigen::Index aux_dim = -1;
    for (auto& r : records) {
        if (!ids.insert(r.id).second)
            throw ParseError("duplicate id '" + r.id + "'", path.string(), r.line_no);
        const int label = schema->class_id(r.label);
        if (label < 0) {
            bad_label_ids.push_back(r.id);
            continue;
        }
        if (r.aux) {
            any_aux = true;
            if (aux_dim < 0) aux_dim = r.aux->size();
            if (r.aux->size() != aux_dim)
                throw ParseError("aux length " + std::to_string(r.aux->size()) + " differs from " +
                                     std::to_string(aux_dim),
                                 path.string(), r.line_no);
        } else {
            any_no_aux = true;
        }

        LabeledExample ex;
        ex.id = std::move(r.id);
        ex.raw_text = std::move(r.text);
        ex.clean_text = preprocess(ex.raw_text);
        ex.tokens = tokenize(ex.clean_text);
        ex.label = label;
        ex.lexicon_features = lexicon_features(ex.tokens, lexicons);
        ex.aux = std::move(r.aux);
        dataset.examples.push_back(std::move(ex));
    }

    if (!bad_label_ids.empty()) {
        std::string msg = "unknown label for ids:";
        for (const auto& id : bad_label_ids) msg += " " + id;
        throw ParseError(msg, path.string());
    }
    if (any_aux && any_no_aux)
        throw ParseError("aux features must be present on all records or none", path.string());
    return dataset;
}

}  // namespace

Dataset load_corpus(const std::filesystem::path& path, const TaskSchema& schema,
                    std::span<const Lexicon> lexicons) {
    return load_corpus_impl(path, &schema, lexicons);
}

Dataset load_corpus_auto(const std::filesystem::path& path, std::span<const Lexicon> lexicons) {
    return load_corpus_impl(path, nullptr, lexicons);
}

void write_corpus(const Dataset& dataset, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write corpus file", path.string());
    for (const auto& ex : dataset.examples) {
        json rec;
        rec["id"] = ex.id;
        // Perturbations operate on clean text, so that is the text surface a
        // perturbed corpus carries; original examples keep their raw text.
        rec["text"] = ex.provenance == Provenance::original ? ex.raw_text : ex.clean_text;
        rec["label"] = dataset.schema.classes[static_cast<std::size_t>(ex.label)];
        if (ex.aux)
            rec["aux"] = std::vector<Scalar>(ex.aux->data(), ex.aux->data() + ex.aux->size());
        if (ex.provenance != Provenance::original) rec["provenance"] = to_string(ex.provenance);
        out << rec.dump() << '\n';
    }
}

LabeledExample rebuild_example(const LabeledExample& base, std::string clean_text, Provenance provenance,
                               std::span<const Lexicon> lexicons) {
    LabeledExample ex;
    ex.id = base.id;
    ex.raw_text = base.raw_text;
    ex.clean_text = std::move(clean_text);
    ex.tokens = tokenize(ex.clean_text);
    ex.label = base.label;
    ex.lexicon_features = lexicon_features(ex.tokens, lexicons);
    ex.aux = base.aux;
    ex.provenance = provenance;
    return ex;
}

Dataset collapse(const Dataset& dataset) {
    if (!dataset.schema.has_binary())
        throw ConfigError("dataset schema has no binary collapse");
    Dataset out;
    out.schema = dataset.schema.binary_schema();
    out.tag = dataset.tag;
    out.examples = dataset.examples;
    for (auto& ex : out.examples) ex.label = dataset.schema.collapse_class(ex.label);
    return out;
}

std::pair<Dataset, Dataset> stratified_split(const Dataset& dataset, double test_fraction,
                                             std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw ConfigError("test_fraction must be in (0, 1)");

    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < dataset.examples.size(); ++i)
        by_class[dataset.examples[i].label].push_back(i);
    for (const auto& [cls, rows] : by_class) {
        if (rows.size() < 2)
            throw ConfigError("class '" + dataset.schema.classes[static_cast<std::size_t>(cls)] +
                              "' has fewer than 2 examples");
    }

    std::vector<char> in_test(dataset.examples.size(), 0);
    for (auto& [cls, rows] : by_class) {
        Rng rng(derive_seed(seed, "split:" + dataset.schema.classes[static_cast<std::size_t>(cls)]));
        const auto n = rows.size();
        // Round to the proportional count but keep at least one example on
        // each side so both splits cover every class.
        std::size_t take = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
        take = std::clamp<std::size_t>(take, 1, n - 1);
        rng.shuffle_prefix(rows, take);
        for (std::size_t i = 0; i < take; ++i) in_test[rows[i]] = 1;
    }

    Dataset train, test;
    train.schema = test.schema = dataset.schema;
    train.tag = Variant::Tr;
    test.tag = Variant::Te;
    for (std::size_t i = 0; i < dataset.examples.size(); ++i) {
        if (in_test[i])
            test.examples.push_back(dataset.examples[i]);
        else
            train.examples.push_back(dataset.examples[i]);
    }
    return {std::move(train), std::move(test)};
}

}  // namespace textrobust
