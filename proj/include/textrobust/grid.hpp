#pragma once

#include "textrobust/confusables.hpp"
#include "textrobust/corpus.hpp"
#include "textrobust/metrics.hpp"
#include "textrobust/model.hpp"
#include "textrobust/neighbor_index.hpp"
#include "textrobust/perturb.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace textrobust {

enum class Defense { Tr, TrHalfChar, TrHalfWord, TrFullChar, TrFullWord, EnsChar, EnsWord, EnsCharWord };
enum class Attack { Te, TeChar, TeWord, TeMixed };

const char* to_string(Defense d);
const char* to_string(Attack a);
Defense defense_from_string(const std::string& name);
Attack attack_from_string(const std::string& name);

bool is_ensemble(Defense d);
// Single-model defenses an ensemble votes over (empty for non-ensembles).
std::vector<Defense> ensemble_members(Defense d);

struct GridConfig {
    TaskSchema schema;
    std::vector<Defense> defenses;
    std::vector<Attack> attacks;
    double char_rate = 0.25;
    double word_rate = 0.25;
    int neighbor_rank = 1;
    double confidence_threshold = 0.90;
    int histogram_bins = 20;
    std::uint64_t char_seed = 0;
    std::uint64_t word_seed = 0;
    Hyperparams hyperparams;  // hyperparams.seed is the per-defense train seed base

    // Rejects empty axes, out-of-range knobs, duplicate entries, schemas
    // without a binary collapse, and ensembles whose member defenses are not
    // themselves listed. Runs before any training.
    void validate() const;
};

struct CellResult {
    Defense defense{};
    Attack attack{};
    long n = 0;
    long wrong = 0;
    long binary_wrong = 0;
    long high_conf_wrong = 0;
    long low_conf_wrong = 0;
    // Rates derive from the counts above; error_rate is stored as
    // high + low so the partition law holds bit-exactly.
    double error_rate = 0;
    double high_conf_error_rate = 0;
    double low_conf_error_rate = 0;
    double binary_error_rate = 0;
    std::optional<double> relative_diff;  // vs the same defense on Te; empty when that baseline is 0
    double multiclass_f1 = 0;
    double binary_f1 = 0;
    std::vector<long> confidence_histogram;
    std::map<std::string, double> subset_error_rates;  // TeMixed: per Te/TeC/TeW slice
};

struct DefenseSummary {
    Defense defense{};
    std::uint64_t train_seed = 0;          // single models only
    std::vector<double> loss_trace;        // single models only
    std::vector<std::string> member_tags;  // ensembles only
};

struct GridResult {
    GridConfig config;
    long train_size = 0;
    long test_size = 0;
    std::vector<DefenseSummary> defenses;
    std::vector<CellResult> cells;

    const CellResult* cell(Defense d, Attack a) const;
};

// Builds every requested defense training set, trains the single models,
// assembles the ensembles, builds every attack test set, and scores each
// (defense, attack) cell. The clean Te cell is always evaluated internally as
// the relative-difference baseline even when Te is not a requested attack.
// Deterministic for fixed config and inputs.
GridResult run_grid(const GridConfig& config, const Dataset& train, const Dataset& test,
                    const EmbeddingStore& model_store, const NeighborIndex& word_index,
                    const ConfusablesTable& confusables, std::span<const Lexicon> lexicons);

// Report bundle: table1.csv, fig4_confidence.csv, fig5_highconf.csv,
// fig6_impact.csv, run.json. Written to a staging area first and moved into
// place only when every file succeeded. run.json carries a `generated_at`
// stamp; everything else in the bundle is a pure function of the run.
void write_reports(const GridResult& result, const std::filesystem::path& out_dir);

// Re-renders the CSVs from an existing run.json (the `report` subcommand).
GridResult read_run_json(const std::filesystem::path& path);

std::string render_table1_csv(const GridResult& result);
std::string render_fig4_csv(const GridResult& result);
std::string render_fig5_csv(const GridResult& result);
std::string render_fig6_csv(const GridResult& result);
std::string render_run_json(const GridResult& result, const std::string& generated_at);

}  // namespace textrobust
