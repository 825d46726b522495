#pragma once

#include "textrobust/types.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace textrobust {

// Class layout of a task plus its binary collapse. The stock tasks:
//   three_way: trustworthy / propaganda / disinformation,
//              collapsed to trustworthy vs deceptive;
//   four_way:  clickbait / hoax / satire / conspiracy,
//              collapsed to satire vs not_satire.
struct TaskSchema {
    std::string name;
    std::vector<std::string> classes;
    std::vector<int> binary_of;                // class id -> binary class id; empty if no collapse
    std::vector<std::string> binary_classes;   // size 2 when binary_of present

    static TaskSchema three_way();
    static TaskSchema four_way();
    static TaskSchema custom(std::vector<std::string> classes);  // no binary map
    static TaskSchema by_name(const std::string& name);          // "three_way" / "four_way"

    bool has_binary() const { return !binary_of.empty(); }
    int num_classes() const { return static_cast<int>(classes.size()); }
    int class_id(const std::string& label) const;  // -1 when unknown
    int collapse_class(int class_id) const;
    // Schema of the collapsed task; its own binary map is the identity, so
    // collapsing twice equals collapsing once.
    TaskSchema binary_schema() const;
};

enum class Provenance { original, char_perturbed, word_perturbed };

const char* to_string(Provenance p);
std::optional<Provenance> provenance_from_string(const std::string& s);

struct LabeledExample {
    std::string id;
    std::string raw_text;
    std::string clean_text;
    std::vector<std::string> tokens;  // whitespace split of clean_text
    int label = -1;
    Vector lexicon_features;  // one relative frequency per configured lexicon
    std::optional<Vector> aux;  // precomputed auxiliary features (image stand-in)
    Provenance provenance = Provenance::original;
};

// Which train/test regime a dataset represents.
enum class Variant {
    Raw,
    Tr,
    TrHalfChar,
    TrHalfWord,
    TrFullChar,
    TrFullWord,
    Te,
    TeChar,
    TeWord,
    TeMixed,
};

const char* to_string(Variant v);

struct Dataset {
    TaskSchema schema;
    std::vector<LabeledExample> examples;
    Variant tag = Variant::Raw;

    std::size_t size() const { return examples.size(); }
};

struct Lexicon {
    std::string name;
    std::unordered_set<std::string> tokens;
};

// Lowercases, deletes @-mention / #-hashtag / URL tokens wholesale, strips
// remaining punctuation characters, and collapses whitespace. Idempotent.
std::string preprocess(std::string_view raw_text);

std::vector<std::string> tokenize(std::string_view clean_text);

// Component l = |{t in tokens : t in lexicon l}| / max(1, |tokens|).
Vector lexicon_features(std::span<const std::string> tokens, std::span<const Lexicon> lexicons);

// One lowercase token per line; '#' comments and blank lines skipped.
Lexicon load_lexicon(const std::filesystem::path& path, std::string name = {});

// JSON-lines records {"id","text","label"[,"aux"]}. Preprocessing, token and
// lexicon features applied on load. Unknown labels, duplicate ids, and
// inconsistent aux presence are errors.
Dataset load_corpus(const std::filesystem::path& path, const TaskSchema& schema,
                    std::span<const Lexicon> lexicons);

// Same, but the schema is built from the labels found in the file (sorted).
Dataset load_corpus_auto(const std::filesystem::path& path, std::span<const Lexicon> lexicons);

void write_corpus(const Dataset& dataset, const std::filesystem::path& path);

// Rebuilds an example from new clean text: tokens and lexicon features are
// recomputed, id/label/aux preserved.
LabeledExample rebuild_example(const LabeledExample& base, std::string clean_text, Provenance provenance,
                               std::span<const Lexicon> lexicons);

// Labels remapped through the binary map; examples otherwise unchanged.
Dataset collapse(const Dataset& dataset);

// Per-class proportions preserved within one example; both sides keep at
// least one member of every class. Deterministic per seed.
std::pair<Dataset, Dataset> stratified_split(const Dataset& dataset, double test_fraction,
                                             std::uint64_t seed);

}  // namespace textrobust
