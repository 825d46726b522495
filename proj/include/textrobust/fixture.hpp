#pragma once

#include "textrobust/corpus.hpp"
#include "textrobust/embedding_store.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace textrobust {

// Synthetic three-way corpus for desk-scale experiments. Class signal rides
// on two channels the attacks can degrade: token vectors clustered by class
// (the deceptive classes share a direction, so they confuse each other more
// than they confuse trustworthy), and two lexicons tracking the deceptive
// vocabularies. Label noise keeps every model's clean error strictly
// positive so relative differences stay well defined.
struct FixtureSpec {
    int docs = 2000;
    int dim = 32;
    int class_vocab = 220;   // informative tokens per class
    int noise_vocab = 700;   // shared filler tokens
    int doc_len_min = 18;
    int doc_len_max = 36;
    double informative_rate = 0.50;  // slot draws from the label's own pool
    double confusion_rate = 0.12;    // slot draws from another class's pool
    double label_noise = 0.06;
    double class_spread = 0.9;        // within-class vector sigma
    double attack_space_noise = 1.2;  // sigma added to make the word-attack space
    std::uint64_t seed = 42;
};

struct Fixture {
    EmbeddingStore model_store;
    EmbeddingStore attack_store;  // same vocabulary, perturbed geometry
    Dataset corpus;               // Raw-tagged, three_way schema
    std::vector<Lexicon> lexicons;
};

Fixture make_fixture(const FixtureSpec& spec);

// Writes embeddings.txt, attack_embeddings.txt, corpus.jsonl, hedges.txt,
// factives.txt, and a ready-to-run run_config.json into `dir`.
void write_fixture_files(const Fixture& fixture, const std::filesystem::path& dir,
                         const std::filesystem::path& confusables_path);

}  // namespace textrobust
