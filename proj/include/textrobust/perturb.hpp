#pragma once

#include "textrobust/confusables.hpp"
#include "textrobust/corpus.hpp"
#include "textrobust/neighbor_index.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace textrobust {

// One perturbation policy. Char mode needs `table`, word mode needs `index`;
// both pointers are borrowed. The per-example RNG stream is seeded with
// seed XOR hash(example id), so outputs do not depend on iteration order.
struct PerturbationSpec {
    enum class Mode { chars, words };

    Mode mode = Mode::chars;
    double rate = 0.25;
    std::uint64_t seed = 0;
    const ConfusablesTable* table = nullptr;
    const NeighborIndex* index = nullptr;
    int neighbor_rank = 1;

    void validate() const;
};

struct Replacement {
    std::string original;
    std::string replacement;
};

struct PerturbationReceipt {
    std::string example_id;
    std::vector<int> positions_changed;  // codepoint indices (char) or token indices (word), ascending
    std::vector<Replacement> replacements;
    int eligible_count = 0;
};

// Replaces min(floor(rate * #codepoints), #eligible) positions with a
// uniformly drawn confusable. Output has exactly the same codepoint count as
// the input and differs at exactly the receipt's positions.
std::pair<std::string, PerturbationReceipt> perturb_chars(std::string_view text,
                                                          const PerturbationSpec& spec,
                                                          std::string_view example_id = {});

// Replaces min(floor(rate * #tokens), #in-vocabulary) tokens with their
// rank-`neighbor_rank` nearest neighbor (self excluded). Token count is
// preserved.
std::pair<std::vector<std::string>, PerturbationReceipt> perturb_words(
    const std::vector<std::string>& tokens, const PerturbationSpec& spec,
    std::string_view example_id = {});

// Applies `spec` to one example and recomputes its text-derived features.
std::pair<LabeledExample, PerturbationReceipt> perturb_example(const LabeledExample& example,
                                                               const PerturbationSpec& spec,
                                                               std::span<const Lexicon> lexicons);

enum class DefenseStrategy { Tr, TrHalf, TrFull };

// Training-set regimes: Tr copies, TrHalf perturbs a uniformly chosen half of
// the examples in place, TrFull perturbs all of them. Lexicon features are
// recomputed from the perturbed text; labels never change.
Dataset build_defense_set(const Dataset& train, DefenseStrategy strategy, const PerturbationSpec& spec,
                          std::span<const Lexicon> lexicons);

enum class AttackTactic { none, chars, words };

// Test-set attacks: none copies Te, chars/words perturb every example.
Dataset build_attack_set(const Dataset& test, AttackTactic tactic, const PerturbationSpec& spec,
                         std::span<const Lexicon> lexicons);

// Concatenation of Te, TeC, and TeW (ids suffixed by variant). All three must
// carry the same id and label multiset.
Dataset build_mixed_set(const Dataset& te, const Dataset& te_char, const Dataset& te_word);

}  // namespace textrobust
