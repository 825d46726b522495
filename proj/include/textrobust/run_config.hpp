#pragma once

#include "textrobust/grid.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace textrobust {

// One experiment run, parsed from a JSON config file. Relative paths resolve
// against the config file's directory. Seeds are all explicit so any report
// bundle can be regenerated from its config echo.
struct RunConfig {
    std::string task;  // three_way | four_way
    std::filesystem::path corpus;
    std::filesystem::path model_embeddings;
    std::filesystem::path attack_embeddings;  // empty: reuse model_embeddings
    std::filesystem::path confusables;
    std::optional<std::filesystem::path> exclusions;
    std::vector<std::filesystem::path> lexicons;
    std::filesystem::path out_dir;
    double test_fraction = 0.2;
    std::uint64_t split_seed = 0;
    int index_trees = NeighborIndex::kDefaultTrees;
    int index_leaf_size = NeighborIndex::kDefaultLeafSize;
    std::uint64_t index_seed = 0;
    GridConfig grid;

    static RunConfig from_file(const std::filesystem::path& path);

    // Fails fast (ConfigError) on any missing input path or invalid grid,
    // before corpora are loaded or models trained.
    void validate() const;
};

// Human-readable plan of what a run would do; used by --dry-run.
std::string plan_run(const RunConfig& config);

// Loads all inputs, splits, runs the grid, and writes the report bundle to
// config.out_dir. Holds a sibling lock file for the duration so two runs
// cannot write the same bundle.
GridResult execute_run(const RunConfig& config);

}  // namespace textrobust
