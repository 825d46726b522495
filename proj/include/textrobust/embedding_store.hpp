#pragma once

#include "textrobust/types.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace textrobust {

// Vocabulary plus one dense vector per token. Immutable after load; safe for
// concurrent read-only queries.
struct EmbeddingStore {
    int dim = 0;
    std::vector<std::string> vocab;
    RowMatrix vectors;  // vocab.size() x dim
    std::unordered_map<std::string, int> token_index;
    int duplicate_count = 0;  // duplicate token lines dropped at parse time (first wins)

    std::size_t size() const { return vocab.size(); }
    bool contains(const std::string& token) const { return token_index.count(token) != 0; }

    // Row id for a token, -1 when out of vocabulary.
    int row_of(const std::string& token) const {
        auto it = token_index.find(token);
        return it == token_index.end() ? -1 : it->second;
    }

    // Stable fingerprint over dim, vocab, and vector bit patterns. Written
    // into index files so a mismatched store is rejected at load.
    std::uint64_t checksum() const;
};

// Plain-text word-vector format: one record per line,
// `<token> <d1> <d2> ... <dD>`, no header.
EmbeddingStore load_embeddings(const std::filesystem::path& path,
                               std::optional<int> expected_dim = std::nullopt);

// Parses from an already-loaded string; `origin` names the source in errors.
EmbeddingStore parse_embeddings(std::string_view text, const std::string& origin,
                                std::optional<int> expected_dim = std::nullopt);

void write_embeddings(const EmbeddingStore& store, const std::filesystem::path& path);

struct EmbedResult {
    Vector mean;  // arithmetic mean of in-vocabulary token vectors, zero if none
    int oov_count = 0;
};

EmbedResult embed_tokens(const EmbeddingStore& store, std::span<const std::string> tokens);

// Angular distance 1 - cos(u, v). Inputs must be nonzero.
Scalar angular_distance(const Eigen::Ref<const Vector>& u, const Eigen::Ref<const Vector>& v);

}  // namespace textrobust
