#pragma once

#include "textrobust/embedding_store.hpp"
#include "textrobust/types.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace textrobust {

struct Neighbor {
    int row = -1;
    std::string token;
    Scalar distance = 0.0;  // angular, 1 - cosine
};

// Exact k-NN by full scan; ties broken by ascending row id. Test oracle for
// the approximate index and fallback for tiny stores. Throws ConfigError on
// out-of-vocabulary queries.
std::vector<Neighbor> brute_force_nearest(const EmbeddingStore& store, const std::string& token, int k,
                                          bool exclude_self);
std::vector<Neighbor> brute_force_nearest_row(const EmbeddingStore& store, int row, int k, bool exclude_self);

// Forest of random-hyperplane trees over the store's vectors (angular
// metric). Each split normal is the normalized difference of two randomly
// chosen member vectors; recursion stops at leaf_size items. Queries walk the
// forest best-first, collect candidate leaves, and re-rank candidates
// exactly. Immutable after build; concurrent queries are safe. Holds a
// pointer to the store it was built from, which must outlive the index.
class NeighborIndex {
public:
    struct Node {
        Vector split;          // empty for leaves
        Scalar threshold = 0;  // ~0 for unit vectors; kept explicit
        int left = -1;
        int right = -1;
        std::vector<int> items;  // leaf payload

        bool is_leaf() const { return left < 0; }
    };

    static NeighborIndex build(const EmbeddingStore& store, int n_trees, int leaf_size, std::uint64_t seed);

    // search_k caps the number of candidate items examined; 0 picks a default
    // generous enough to hold the recall property on stores up to ~10k.
    std::vector<Neighbor> nearest(const std::string& token, int k, bool exclude_self, int search_k = 0) const;
    std::vector<Neighbor> nearest_row(int row, int k, bool exclude_self, int search_k = 0) const;

    int n_trees() const { return n_trees_; }
    int leaf_size() const { return leaf_size_; }
    std::uint64_t seed() const { return seed_; }
    std::uint64_t store_checksum() const { return store_checksum_; }
    const EmbeddingStore& store() const { return *store_; }
    const std::vector<std::vector<Node>>& trees() const { return trees_; }

    void save(const std::filesystem::path& path) const;
    // Validates the stored checksum against `store`; ConfigError on mismatch.
    static NeighborIndex load(const std::filesystem::path& path, const EmbeddingStore& store);

    static constexpr int kDefaultTrees = 16;
    static constexpr int kDefaultLeafSize = 32;

private:
    NeighborIndex() = default;

    int default_search_k(int k) const;

    const EmbeddingStore* store_ = nullptr;
    RowMatrix unit_;  // row-normalized copy of the store vectors
    std::vector<std::vector<Node>> trees_;
    int n_trees_ = 0;
    int leaf_size_ = 0;
    std::uint64_t seed_ = 0;
    std::uint64_t store_checksum_ = 0;
};

}  // namespace textrobust
