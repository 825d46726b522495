#include "textrobust/neighbor_index.hpp"

#include "textrobust/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <queue>
#include <tuple>

namespace textrobust {

namespace {

using json = nlohmann::json;

// Sort key (distance, row) gives a total order; equal distances fall back to
// ascending row id.
void sort_and_trim(std::vector<Neighbor>& out, int k) {
    std::sort(out.begin(), out.end(), [](const Neighbor& a, const Neighbor& b) {
        return std::tie(a.distance, a.row) < std::tie(b.distance, b.row);
    });
    if (static_cast<int>(out.size()) > k) out.resize(static_cast<std::size_t>(k));
}

int require_row(const EmbeddingStore& store, const std::string& token) {
    const int row = store.row_of(token);
    if (row < 0) throw ConfigError("token '" + token + "' is not in the vocabulary");
    return row;
}

}  // namespace

std::vector<Neighbor> brute_force_nearest_row(const EmbeddingStore& store, int row, int k, bool exclude_self) {
    if (row < 0 || row >= static_cast<int>(store.size())) throw ConfigError("row out of range");
    if (k < 1) throw ConfigError("k must be positive");
    const Vector query = store.vectors.row(row).transpose();
    std::vector<Neighbor> out;
    out.reserve(store.size());
    for (int i = 0; i < static_cast<int>(store.size()); ++i) {
        if (exclude_self && i == row) continue;
        out.push_back({i, store.vocab[static_cast<std::size_t>(i)],
                       angular_distance(query, store.vectors.row(i).transpose())});
    }
    sort_and_trim(out, k);
    return out;
}

std::vector<Neighbor> brute_force_nearest(const EmbeddingStore& store, const std::string& token, int k,
                                          bool exclude_self) {
    return brute_force_nearest_row(store, require_row(store, token), k, exclude_self);
}

NeighborIndex NeighborIndex::build(const EmbeddingStore& store, int n_trees, int leaf_size,
                                   std::uint64_t seed) {
    if (store.size() < 2) throw ConfigError("index requires a vocabulary of at least 2 tokens");
    if (n_trees < 1) throw ConfigError("n_trees must be positive");
    if (leaf_size < 1) throw ConfigError("leaf_size must be positive");

    NeighborIndex index;
    index.store_ = &store;
    index.n_trees_ = n_trees;
    index.leaf_size_ = leaf_size;
    index.seed_ = seed;
    index.store_checksum_ = store.checksum();

    // Angular metric: work on unit vectors, so hyperplanes through the
    // midpoint of two sampled points pass (numerically) through the origin.
    index.unit_ = store.vectors;
    for (Eigen::Index r = 0; r < index.unit_.rows(); ++r) index.unit_.row(r).normalize();

    index.trees_.resize(static_cast<std::size_t>(n_trees));
    for (int t = 0; t < n_trees; ++t) {
        Rng rng(derive_seed(seed, "tree:" + std::to_string(t)));
        auto& nodes = index.trees_[static_cast<std::size_t>(t)];

        std::vector<int> all(store.size());
        for (std::size_t i = 0; i < store.size(); ++i) all[i] = static_cast<int>(i);

        // Iterative split; stack holds (node id, member rows).
        nodes.emplace_back();
        std::vector<std::pair<int, std::vector<int>>> stack;
        stack.emplace_back(0, std::move(all));
        while (!stack.empty()) {
            auto [node_id, items] = std::move(stack.back());
            stack.pop_back();

            if (static_cast<int>(items.size()) <= leaf_size) {
                nodes[static_cast<std::size_t>(node_id)].items = std::move(items);
                continue;
            }

            Vector split;
            Scalar threshold = 0;
            std::vector<int> left, right;
            bool ok = false;
            for (int attempt = 0; attempt < 8 && !ok; ++attempt) {
                const std::size_t ia = static_cast<std::size_t>(rng.below(items.size()));
                std::size_t ib = static_cast<std::size_t>(rng.below(items.size() - 1));
                if (ib >= ia) ++ib;
                const Vector a = index.unit_.row(items[ia]).transpose();
                const Vector b = index.unit_.row(items[ib]).transpose();
                Vector diff = a - b;
                const Scalar norm = diff.norm();
                if (norm < 1e-12) continue;  // parallel duplicates, resample
                diff /= norm;
                const Scalar thr = diff.dot((a + b) / 2.0);
                left.clear();
                right.clear();
                for (int item : items) {
                    if (diff.dot(index.unit_.row(item).transpose()) < thr)
                        left.push_back(item);
                    else
                        right.push_back(item);
                }
                if (!left.empty() && !right.empty()) {
                    split = std::move(diff);
                    threshold = thr;
                    ok = true;
                }
            }
            if (!ok) {
                // Degenerate cluster (e.g. many identical vectors): keep as an
                // oversized leaf, queries still re-rank exactly.
                nodes[static_cast<std::size_t>(node_id)].items = std::move(items);
                continue;
            }

            const int left_id = static_cast<int>(nodes.size());
            nodes.emplace_back();
            const int right_id = static_cast<int>(nodes.size());
            nodes.emplace_back();
            auto& node = nodes[static_cast<std::size_t>(node_id)];
            node.split = std::move(split);
            node.threshold = threshold;
            node.left = left_id;
            node.right = right_id;
            stack.emplace_back(left_id, std::move(left));
            stack.emplace_back(right_id, std::move(right));
        }
    }
    return index;
}

int NeighborIndex::default_search_k(int k) const {
    // Generous for desk-scale stores: candidates are cheap to re-rank and the
    // recall floor (0.95 @ 16 trees) must hold even on unstructured vectors.
    const long base = static_cast<long>(n_trees_) * std::max(leaf_size_, 32) * 4;
    const long per_k = static_cast<long>(k) * n_trees_ * 8;
    return static_cast<int>(std::max(base, per_k));
}

std::vector<Neighbor> NeighborIndex::nearest_row(int row, int k, bool exclude_self, int search_k) const {
    if (row < 0 || row >= static_cast<int>(store_->size())) throw ConfigError("row out of range");
    if (k < 1) throw ConfigError("k must be positive");
    if (search_k <= 0) search_k = default_search_k(k);

    const Vector query = unit_.row(row).transpose();

    // Best-first walk over all trees at once, Annoy style: each frontier
    // entry carries the smallest margin seen on its path; ties resolved by
    // (tree, node) so traversal order is fully deterministic.
    struct Entry {
        Scalar priority;
        int tree;
        int node;
    };
    auto cmp = [](const Entry& a, const Entry& b) {
        return std::tie(a.priority, a.tree, a.node) < std::tie(b.priority, b.tree, b.node);
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> frontier(cmp);
    constexpr Scalar kInf = std::numeric_limits<Scalar>::infinity();
    for (int t = 0; t < n_trees_; ++t) frontier.push({kInf, t, 0});

    std::vector<char> seen(store_->size(), 0);
    std::vector<int> candidates;
    candidates.reserve(static_cast<std::size_t>(search_k));
    while (!frontier.empty() && static_cast<int>(candidates.size()) < search_k) {
        const Entry e = frontier.top();
        frontier.pop();
        const Node& node = trees_[static_cast<std::size_t>(e.tree)][static_cast<std::size_t>(e.node)];
        if (node.is_leaf()) {
            for (int item : node.items) {
                if (!seen[static_cast<std::size_t>(item)]) {
                    seen[static_cast<std::size_t>(item)] = 1;
                    candidates.push_back(item);
                }
            }
        } else {
            const Scalar margin = node.split.dot(query) - node.threshold;
            const int near = margin < 0 ? node.left : node.right;
            const int far = margin < 0 ? node.right : node.left;
            frontier.push({std::min(e.priority, std::abs(margin)), e.tree, near});
            frontier.push({std::min(e.priority, -std::abs(margin)), e.tree, far});
        }
    }

    std::vector<Neighbor> out;
    out.reserve(candidates.size());
    const Vector raw_query = store_->vectors.row(row).transpose();
    for (int item : candidates) {
        if (exclude_self && item == row) continue;
        out.push_back({item, store_->vocab[static_cast<std::size_t>(item)],
                       angular_distance(raw_query, store_->vectors.row(item).transpose())});
    }
    sort_and_trim(out, k);
    return out;
}

std::vector<Neighbor> NeighborIndex::nearest(const std::string& token, int k, bool exclude_self,
                                             int search_k) const {
    return nearest_row(require_row(*store_, token), k, exclude_self, search_k);
}

void NeighborIndex::save(const std::filesystem::path& path) const {
    json doc;
    doc["format"] = "textrobust-index";
    doc["version"] = kVersion;
    doc["n_trees"] = n_trees_;
    doc["leaf_size"] = leaf_size_;
    doc["seed"] = seed_;
    doc["store_checksum"] = store_checksum_;
    doc["dim"] = store_->dim;
    json trees = json::array();
    for (const auto& nodes : trees_) {
        json tree = json::array();
        for (const auto& node : nodes) {
            json n;
            if (node.is_leaf()) {
                n["items"] = node.items;
            } else {
                n["split"] = std::vector<Scalar>(node.split.data(), node.split.data() + node.split.size());
                n["threshold"] = node.threshold;
                n["left"] = node.left;
                n["right"] = node.right;
            }
            tree.push_back(std::move(n));
        }
        trees.push_back(std::move(tree));
    }
    doc["trees"] = std::move(trees);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write index file", path.string());
    out << doc.dump() << '\n';
}

NeighborIndex NeighborIndex::load(const std::filesystem::path& path, const EmbeddingStore& store) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open index file", path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad index file: ") + e.what(), path.string());
    }
    if (doc.value("format", "") != "textrobust-index")
        throw ParseError("not a textrobust index file", path.string());

    NeighborIndex index;
    index.store_ = &store;
    index.n_trees_ = doc.at("n_trees").get<int>();
    index.leaf_size_ = doc.at("leaf_size").get<int>();
    index.seed_ = doc.at("seed").get<std::uint64_t>();
    index.store_checksum_ = doc.at("store_checksum").get<std::uint64_t>();
    if (index.store_checksum_ != store.checksum())
        throw ConfigError("index was built from a different embedding store (checksum mismatch)");

    index.unit_ = store.vectors;
    for (Eigen::Index r = 0; r < index.unit_.rows(); ++r) index.unit_.row(r).normalize();

    for (const auto& tree : doc.at("trees")) {
        std::vector<Node> nodes;
        nodes.reserve(tree.size());
        for (const auto& n : tree) {
            Node node;
            if (n.contains("items")) {
                node.items = n.at("items").get<std::vector<int>>();
            } else {
                const auto split = n.at("split").get<std::vector<Scalar>>();
                node.split = Eigen::Map<const Vector>(split.data(), static_cast<Eigen::Index>(split.size()));
                node.threshold = n.at("threshold").get<Scalar>();
                node.left = n.at("left").get<int>();
                node.right = n.at("right").get<int>();
            }
            nodes.push_back(std::move(node));
        }
        index.trees_.push_back(std::move(nodes));
    }
    if (static_cast<int>(index.trees_.size()) != index.n_trees_)
        throw ParseError("tree count mismatch in index file", path.string());
    return index;
}

}  // namespace textrobust
