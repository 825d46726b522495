#include "textrobust/perturb.hpp"

#include "textrobust/rng.hpp"
#include "textrobust/unicode.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace textrobust {

namespace {

// Chosen positions come from a partial Fisher-Yates over the eligible set;
// replacements are then drawn in ascending position order so the stream of
// RNG draws is independent of container iteration details.
std::vector<int> sample_positions(std::vector<int> eligible, std::size_t target, Rng& rng) {
    rng.shuffle_prefix(eligible, target);
    eligible.resize(target);
    std::sort(eligible.begin(), eligible.end());
    return eligible;
}

std::size_t target_count(double rate, std::size_t total, std::size_t eligible) {
    const auto want = static_cast<std::size_t>(std::floor(rate * static_cast<double>(total)));
    return std::min(want, eligible);
}

std::string join_tokens(const std::vector<std::string>& tokens) {
    std::string out;
    for (const auto& t : tokens) {
        if (!out.empty()) out += ' ';
        out += t;
    }
    return out;
}

}  // namespace

void PerturbationSpec::validate() const {
    if (!(rate >= 0.0 && rate <= 1.0)) throw ConfigError("perturbation rate must be in [0, 1]");
    if (mode == Mode::chars && table == nullptr)
        throw ConfigError("char perturbation needs a confusables table");
    if (mode == Mode::words && index == nullptr)
        throw ConfigError("word perturbation needs a neighbor index");
    if (neighbor_rank < 1) throw ConfigError("neighbor_rank must be positive");
}

std::pair<std::string, PerturbationReceipt> perturb_chars(std::string_view text,
                                                          const PerturbationSpec& spec,
                                                          std::string_view example_id) {
    if (spec.mode != PerturbationSpec::Mode::chars) throw ConfigError("spec mode is not char");
    spec.validate();

    std::u32string cps = utf8_decode(text);
    PerturbationReceipt receipt;
    receipt.example_id = std::string(example_id);

    std::vector<int> eligible;
    for (std::size_t i = 0; i < cps.size(); ++i)
        if (spec.table->has(cps[i])) eligible.push_back(static_cast<int>(i));
    receipt.eligible_count = static_cast<int>(eligible.size());

    const std::size_t target = target_count(spec.rate, cps.size(), eligible.size());
    if (target == 0) return {std::string(text), std::move(receipt)};

    Rng rng(derive_seed(spec.seed, example_id));
    receipt.positions_changed = sample_positions(std::move(eligible), target, rng);
    for (int pos : receipt.positions_changed) {
        const char32_t original = cps[static_cast<std::size_t>(pos)];
        const auto& alts = spec.table->alternatives(original);
        const char32_t chosen = alts[static_cast<std::size_t>(rng.below(alts.size()))];
        cps[static_cast<std::size_t>(pos)] = chosen;
        receipt.replacements.push_back({utf8_encode(original), utf8_encode(chosen)});
    }
    return {utf8_encode(cps), std::move(receipt)};
}

std::pair<std::vector<std::string>, PerturbationReceipt> perturb_words(
    const std::vector<std::string>& tokens, const PerturbationSpec& spec, std::string_view example_id) {
    if (spec.mode != PerturbationSpec::Mode::words) throw ConfigError("spec mode is not word");
    spec.validate();

    const EmbeddingStore& store = spec.index->store();
    PerturbationReceipt receipt;
    receipt.example_id = std::string(example_id);

    std::vector<int> eligible;
    for (std::size_t i = 0; i < tokens.size(); ++i)
        if (store.contains(tokens[i])) eligible.push_back(static_cast<int>(i));
    receipt.eligible_count = static_cast<int>(eligible.size());

    const std::size_t target = target_count(spec.rate, tokens.size(), eligible.size());
    if (target == 0) return {tokens, std::move(receipt)};

    Rng rng(derive_seed(spec.seed, example_id));
    receipt.positions_changed = sample_positions(std::move(eligible), target, rng);

    std::vector<std::string> out = tokens;
    for (int pos : receipt.positions_changed) {
        const std::string& original = out[static_cast<std::size_t>(pos)];
        auto neighbors = spec.index->nearest(original, spec.neighbor_rank, /*exclude_self=*/true);
        if (static_cast<int>(neighbors.size()) < spec.neighbor_rank) {
            // Candidate set came up short (tiny store); fall back to the
            // exact scan and use the deepest rank available.
            neighbors = brute_force_nearest(store, original, spec.neighbor_rank, true);
        }
        if (neighbors.empty()) continue;  // unreachable for stores of >= 2 tokens
        const auto& pick = neighbors.size() >= static_cast<std::size_t>(spec.neighbor_rank)
                               ? neighbors[static_cast<std::size_t>(spec.neighbor_rank) - 1]
                               : neighbors.back();
        receipt.replacements.push_back({original, pick.token});
        out[static_cast<std::size_t>(pos)] = pick.token;
    }
    return {std::move(out), std::move(receipt)};
}

std::pair<LabeledExample, PerturbationReceipt> perturb_example(const LabeledExample& example,
                                                               const PerturbationSpec& spec,
                                                               std::span<const Lexicon> lexicons) {
    if (spec.mode == PerturbationSpec::Mode::chars) {
        auto [text, receipt] = perturb_chars(example.clean_text, spec, example.id);
        return {rebuild_example(example, std::move(text), Provenance::char_perturbed, lexicons),
                std::move(receipt)};
    }
    auto [tokens, receipt] = perturb_words(example.tokens, spec, example.id);
    return {rebuild_example(example, join_tokens(tokens), Provenance::word_perturbed, lexicons),
            std::move(receipt)};
}

namespace {

Variant defense_variant(DefenseStrategy strategy, PerturbationSpec::Mode mode) {
    const bool chars = mode == PerturbationSpec::Mode::chars;
    switch (strategy) {
        case DefenseStrategy::Tr: return Variant::Tr;
        case DefenseStrategy::TrHalf: return chars ? Variant::TrHalfChar : Variant::TrHalfWord;
        case DefenseStrategy::TrFull: return chars ? Variant::TrFullChar : Variant::TrFullWord;
    }
    return Variant::Tr;
}

}  // namespace

Dataset build_defense_set(const Dataset& train, DefenseStrategy strategy, const PerturbationSpec& spec,
                          std::span<const Lexicon> lexicons) {
    if (train.tag != Variant::Tr) throw ConfigError("defense sets are built from a Tr dataset");
    Dataset out;
    out.schema = train.schema;
    out.examples = train.examples;

    if (strategy == DefenseStrategy::Tr) {
        out.tag = Variant::Tr;
        return out;
    }
    spec.validate();
    out.tag = defense_variant(strategy, spec.mode);

    std::vector<std::string> chosen_ids;
    if (strategy == DefenseStrategy::TrFull) {
        for (const auto& ex : train.examples) chosen_ids.push_back(ex.id);
    } else {
        // Uniform half of the examples, selected over the sorted id list so
        // the choice is independent of dataset order.
        for (const auto& ex : train.examples) chosen_ids.push_back(ex.id);
        std::sort(chosen_ids.begin(), chosen_ids.end());
        Rng rng(derive_seed(spec.seed, "half-select"));
        const std::size_t take = chosen_ids.size() / 2;
        rng.shuffle_prefix(chosen_ids, take);
        chosen_ids.resize(take);
    }

    std::sort(chosen_ids.begin(), chosen_ids.end());
    for (auto& ex : out.examples) {
        if (std::binary_search(chosen_ids.begin(), chosen_ids.end(), ex.id))
            ex = perturb_example(ex, spec, lexicons).first;
    }
    return out;
}

Dataset build_attack_set(const Dataset& test, AttackTactic tactic, const PerturbationSpec& spec,
                         std::span<const Lexicon> lexicons) {
    if (test.tag != Variant::Te) throw ConfigError("attack sets are built from a Te dataset");
    Dataset out;
    out.schema = test.schema;
    out.examples = test.examples;
    if (tactic == AttackTactic::none) {
        out.tag = Variant::Te;
        return out;
    }
    spec.validate();
    const bool chars = tactic == AttackTactic::chars;
    if (chars != (spec.mode == PerturbationSpec::Mode::chars))
        throw ConfigError("attack tactic does not match perturbation spec mode");
    out.tag = chars ? Variant::TeChar : Variant::TeWord;
    for (auto& ex : out.examples) ex = perturb_example(ex, spec, lexicons).first;
    return out;
}

Dataset build_mixed_set(const Dataset& te, const Dataset& te_char, const Dataset& te_word) {
    if (te.tag != Variant::Te || te_char.tag != Variant::TeChar || te_word.tag != Variant::TeWord)
        throw ConfigError("mixed set needs Te, TeC, and TeW datasets");

    std::map<std::string, int> base_labels;
    for (const auto& ex : te.examples) base_labels[ex.id] = ex.label;
    for (const Dataset* d : {&te_char, &te_word}) {
        if (d->size() != te.size()) throw ConfigError("mixed set id mismatch: sizes differ");
        for (const auto& ex : d->examples) {
            auto it = base_labels.find(ex.id);
            if (it == base_labels.end())
                throw ConfigError("mixed set id mismatch: '" + ex.id + "' not in Te");
            if (it->second != ex.label)
                throw ConfigError("mixed set label mismatch for id '" + ex.id + "'");
        }
    }

    Dataset out;
    out.schema = te.schema;
    out.tag = Variant::TeMixed;
    out.examples.reserve(te.size() * 3);
    auto append = [&out](const Dataset& d, const char* suffix) {
        for (const auto& ex : d.examples) {
            out.examples.push_back(ex);
            out.examples.back().id += suffix;
        }
    };
    append(te, "#Te");
    append(te_char, "#TeC");
    append(te_word, "#TeW");
    return out;
}

}  // namespace textrobust
