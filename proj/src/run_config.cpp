#include "textrobust/run_config.hpp"

#include "textrobust/io.hpp"

#include <nlohmann/json.hpp>

#include <fcntl.h>
#include <unistd.h>

#include <set>
#include <sstream>

namespace textrobust {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

fs::path resolve(const fs::path& base, const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path : base / path;
}

// Exclusive lock file next to the output directory, removed on scope exit.
class OutputLock {
public:
    explicit OutputLock(const fs::path& out_dir) : path_(out_dir.string() + ".lock") {
        fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (fd_ < 0)
            throw ConfigError("output dir '" + out_dir.string() +
                              "' is locked by another run (remove " + path_.string() +
                              " if that run is dead)");
    }
    ~OutputLock() {
        if (fd_ >= 0) {
            ::close(fd_);
            ::unlink(path_.c_str());
        }
    }
    OutputLock(const OutputLock&) = delete;
    OutputLock& operator=(const OutputLock&) = delete;

private:
    std::string path_;
    int fd_ = -1;
};

}  // namespace

RunConfig RunConfig::from_file(const fs::path& path) {
    json doc;
    try {
        doc = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw ConfigError("bad config file " + path.string() + ": " + e.what());
    }
    const fs::path base = fs::absolute(path).parent_path();

    RunConfig cfg;
    try {
        cfg.task = doc.at("task").get<std::string>();
        cfg.corpus = resolve(base, doc.at("corpus").get<std::string>());
        cfg.model_embeddings = resolve(base, doc.at("model_embeddings").get<std::string>());
        if (doc.contains("attack_embeddings") && !doc.at("attack_embeddings").is_null())
            cfg.attack_embeddings = resolve(base, doc.at("attack_embeddings").get<std::string>());
        cfg.confusables = resolve(base, doc.at("confusables").get<std::string>());
        if (doc.contains("exclusions") && !doc.at("exclusions").is_null())
            cfg.exclusions = resolve(base, doc.at("exclusions").get<std::string>());
        for (const auto& lex : doc.at("lexicons"))
            cfg.lexicons.push_back(resolve(base, lex.get<std::string>()));
        if (doc.contains("out_dir")) cfg.out_dir = resolve(base, doc.at("out_dir").get<std::string>());
        cfg.test_fraction = doc.value("test_fraction", 0.2);
        cfg.split_seed = doc.value("split_seed", std::uint64_t{0});
        if (doc.contains("index")) {
            cfg.index_trees = doc.at("index").value("n_trees", NeighborIndex::kDefaultTrees);
            cfg.index_leaf_size = doc.at("index").value("leaf_size", NeighborIndex::kDefaultLeafSize);
            cfg.index_seed = doc.at("index").value("seed", std::uint64_t{0});
        }

        const auto& grid = doc.at("grid");
        cfg.grid.schema = TaskSchema::by_name(cfg.task);
        for (const auto& d : grid.at("defenses"))
            cfg.grid.defenses.push_back(defense_from_string(d.get<std::string>()));
        for (const auto& a : grid.at("attacks"))
            cfg.grid.attacks.push_back(attack_from_string(a.get<std::string>()));
        cfg.grid.char_rate = grid.value("char_rate", 0.25);
        cfg.grid.word_rate = grid.value("word_rate", 0.25);
        cfg.grid.neighbor_rank = grid.value("neighbor_rank", 1);
        cfg.grid.confidence_threshold = grid.value("confidence_threshold", 0.9);
        cfg.grid.histogram_bins = grid.value("histogram_bins", 20);
        cfg.grid.char_seed = grid.value("char_seed", std::uint64_t{0});
        cfg.grid.word_seed = grid.value("word_seed", std::uint64_t{0});
        if (grid.contains("hyperparams")) {
            const auto& hp = grid.at("hyperparams");
            cfg.grid.hyperparams.learning_rate = hp.value("learning_rate", 1e-3);
            cfg.grid.hyperparams.dropout = hp.value("dropout", 0.2);
            cfg.grid.hyperparams.epochs = hp.value("epochs", 10);
            cfg.grid.hyperparams.hidden_width = hp.value("hidden_width", 32);
            cfg.grid.hyperparams.batch_size = hp.value("batch_size", 32);
            cfg.grid.hyperparams.seed = hp.value("seed", std::uint64_t{0});
            cfg.grid.hyperparams.adam_beta1 = hp.value("adam_beta1", 0.9);
            cfg.grid.hyperparams.adam_beta2 = hp.value("adam_beta2", 0.999);
            cfg.grid.hyperparams.adam_eps = hp.value("adam_eps", 1e-8);
        }
    } catch (const json::exception& e) {
        throw ConfigError("bad config file " + path.string() + ": " + e.what());
    }
    return cfg;
}

void RunConfig::validate() const {
    TaskSchema::by_name(task);  // throws on unknown task
    grid.validate();
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw ConfigError("test_fraction must be in (0, 1)");
    if (index_trees < 1) throw ConfigError("index n_trees must be positive");
    if (index_leaf_size < 1) throw ConfigError("index leaf_size must be positive");
    if (out_dir.empty()) throw ConfigError("no output directory configured (out_dir or --out)");

    auto require = [](const fs::path& p, const char* what) {
        if (p.empty()) throw ConfigError(std::string("missing ") + what + " path");
        if (!fs::exists(p)) throw ConfigError(std::string(what) + " path does not exist: " + p.string());
    };
    require(corpus, "corpus");
    require(model_embeddings, "model_embeddings");
    if (!attack_embeddings.empty()) require(attack_embeddings, "attack_embeddings");
    require(confusables, "confusables");
    if (exclusions) require(*exclusions, "exclusions");
    if (lexicons.empty()) throw ConfigError("at least one lexicon is required");
    for (const auto& lex : lexicons) require(lex, "lexicon");
}

std::string plan_run(const RunConfig& config) {
    std::ostringstream out;
    out << "task: " << config.task << "\n";
    out << "corpus: " << config.corpus.string() << "\n";
    out << "model embeddings: " << config.model_embeddings.string() << "\n";
    out << "attack embeddings: "
        << (config.attack_embeddings.empty() ? config.model_embeddings : config.attack_embeddings).string()
        << "\n";
    out << "confusables: " << config.confusables.string() << "\n";
    out << "split: test_fraction=" << config.test_fraction << " seed=" << config.split_seed << "\n";
    out << "planned cells (" << config.grid.defenses.size() * config.grid.attacks.size() << "):\n";
    for (Defense d : config.grid.defenses)
        for (Attack a : config.grid.attacks)
            out << "  " << to_string(d) << " x " << to_string(a) << "\n";
    out << "output: " << config.out_dir.string() << "\n";
    return out.str();
}

GridResult execute_run(const RunConfig& config) {
    config.validate();

    std::vector<Lexicon> lexicons;
    for (const auto& path : config.lexicons) lexicons.push_back(load_lexicon(path));

    std::set<char32_t> exclude;
    if (config.exclusions) exclude = load_exclusions(*config.exclusions);
    const ConfusablesTable confusables = load_confusables(config.confusables, exclude);

    const EmbeddingStore model_store = load_embeddings(config.model_embeddings);
    EmbeddingStore attack_store_storage;
    const EmbeddingStore* attack_store = &model_store;
    if (!config.attack_embeddings.empty() && config.attack_embeddings != config.model_embeddings) {
        attack_store_storage = load_embeddings(config.attack_embeddings);
        attack_store = &attack_store_storage;
    }
    const NeighborIndex word_index =
        NeighborIndex::build(*attack_store, config.index_trees, config.index_leaf_size, config.index_seed);

    const TaskSchema schema = TaskSchema::by_name(config.task);
    const Dataset corpus = load_corpus(config.corpus, schema, lexicons);
    auto [train, test] = stratified_split(corpus, config.test_fraction, config.split_seed);

    OutputLock lock(config.out_dir);
    GridResult result =
        run_grid(config.grid, train, test, model_store, word_index, confusables, lexicons);
    write_reports(result, config.out_dir);
    return result;
}

}  // namespace textrobust
