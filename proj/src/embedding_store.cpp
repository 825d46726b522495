#include "textrobust/embedding_store.hpp"

#include "textrobust/rng.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace textrobust {

namespace {

// strtod on a pre-trimmed field; rejects trailing junk and non-finite values.
bool parse_number(const std::string& field, Scalar& out) {
    if (field.empty()) return false;
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (end != field.c_str() + field.size()) return false;
    if (!std::isfinite(v)) return false;
    out = v;
    return true;
}

}  // namespace

std::uint64_t EmbeddingStore::checksum() const {
    std::uint64_t h = fnv1a64_bytes(&dim, sizeof(dim));
    for (const auto& token : vocab) {
        h = fnv1a64(token, h);
        h = fnv1a64("\n", h);
    }
    if (vectors.size() > 0)
        h = fnv1a64_bytes(vectors.data(), static_cast<std::size_t>(vectors.size()) * sizeof(Scalar), h);
    return h;
}

EmbeddingStore parse_embeddings(std::string_view text, const std::string& origin,
                                std::optional<int> expected_dim) {
    EmbeddingStore store;
    std::vector<Vector> rows;
    std::istringstream in{std::string(text)};
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        std::istringstream fields(line);
        std::string token;
        fields >> token;
        if (token.empty()) continue;

        Vector vec;
        std::vector<Scalar> values;
        std::string field;
        while (fields >> field) {
            Scalar v;
            if (!parse_number(field, v))
                throw ParseError("bad number '" + field + "' for token '" + token + "'", origin, line_no);
            values.push_back(v);
        }
        if (values.empty()) throw ParseError("token '" + token + "' has no vector", origin, line_no);

        if (store.dim == 0) {
            store.dim = static_cast<int>(values.size());
            if (expected_dim && *expected_dim != store.dim)
                throw ParseError("dimension " + std::to_string(store.dim) + " does not match expected " +
                                     std::to_string(*expected_dim),
                                 origin, line_no);
        } else if (static_cast<int>(values.size()) != store.dim) {
            throw ParseError("dimension mismatch: got " + std::to_string(values.size()) + ", expected " +
                                 std::to_string(store.dim),
                             origin, line_no);
        }

        vec = Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
        if (vec.isZero(0.0))
            throw ParseError("all-zero vector for token '" + token + "'", origin, line_no);

        if (store.token_index.count(token)) {
            ++store.duplicate_count;  // first occurrence wins
            continue;
        }
        store.token_index.emplace(token, static_cast<int>(rows.size()));
        store.vocab.push_back(token);
        rows.push_back(std::move(vec));
    }

    if (rows.empty()) throw ParseError("no embedding records", origin);

    store.vectors.resize(static_cast<Eigen::Index>(rows.size()), store.dim);
    for (std::size_t i = 0; i < rows.size(); ++i) store.vectors.row(static_cast<Eigen::Index>(i)) = rows[i];
    return store;
}

EmbeddingStore load_embeddings(const std::filesystem::path& path, std::optional<int> expected_dim) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open embeddings file", path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_embeddings(buf.str(), path.string(), expected_dim);
}

void write_embeddings(const EmbeddingStore& store, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write embeddings file", path.string());
    out.precision(17);
    for (std::size_t i = 0; i < store.vocab.size(); ++i) {
        out << store.vocab[i];
        for (int d = 0; d < store.dim; ++d) out << ' ' << store.vectors(static_cast<Eigen::Index>(i), d);
        out << '\n';
    }
}

EmbedResult embed_tokens(const EmbeddingStore& store, std::span<const std::string> tokens) {
    EmbedResult result;
    result.mean = Vector::Zero(store.dim);
    int in_vocab = 0;
    for (const auto& token : tokens) {
        const int row = store.row_of(token);
        if (row < 0) {
            ++result.oov_count;
        } else {
            result.mean += store.vectors.row(row).transpose();
            ++in_vocab;
        }
    }
    if (in_vocab > 0) result.mean /= static_cast<Scalar>(in_vocab);
    return result;
}

Scalar angular_distance(const Eigen::Ref<const Vector>& u, const Eigen::Ref<const Vector>& v) {
    const Scalar nu = u.norm();
    const Scalar nv = v.norm();
    if (nu == 0.0 || nv == 0.0) throw ConfigError("angular distance undefined for zero vector");
    return 1.0 - u.dot(v) / (nu * nv);
}

}  // namespace textrobust
