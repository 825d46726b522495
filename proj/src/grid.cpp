#include "textrobust/grid.hpp"

#include "textrobust/io.hpp"
#include "textrobust/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <set>
#include <sstream>

namespace textrobust {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr Defense kAllDefenses[] = {Defense::Tr,         Defense::TrHalfChar, Defense::TrHalfWord,
                                    Defense::TrFullChar, Defense::TrFullWord, Defense::EnsChar,
                                    Defense::EnsWord,    Defense::EnsCharWord};
constexpr Attack kAllAttacks[] = {Attack::Te, Attack::TeChar, Attack::TeWord, Attack::TeMixed};

}  // namespace

const char* to_string(Defense d) {
    switch (d) {
        case Defense::Tr: return "Tr";
        case Defense::TrHalfChar: return "TrHalfC";
        case Defense::TrHalfWord: return "TrHalfW";
        case Defense::TrFullChar: return "TrFullC";
        case Defense::TrFullWord: return "TrFullW";
        case Defense::EnsChar: return "EnsC";
        case Defense::EnsWord: return "EnsW";
        case Defense::EnsCharWord: return "EnsCW";
    }
    return "Tr";
}

const char* to_string(Attack a) {
    switch (a) {
        case Attack::Te: return "Te";
        case Attack::TeChar: return "TeC";
        case Attack::TeWord: return "TeW";
        case Attack::TeMixed: return "TeMixed";
    }
    return "Te";
}

Defense defense_from_string(const std::string& name) {
    for (Defense d : kAllDefenses)
        if (name == to_string(d)) return d;
    throw ConfigError("unknown defense '" + name + "'");
}

Attack attack_from_string(const std::string& name) {
    for (Attack a : kAllAttacks)
        if (name == to_string(a)) return a;
    throw ConfigError("unknown attack '" + name + "'");
}

bool is_ensemble(Defense d) {
    return d == Defense::EnsChar || d == Defense::EnsWord || d == Defense::EnsCharWord;
}

std::vector<Defense> ensemble_members(Defense d) {
    switch (d) {
        case Defense::EnsChar:
            return {Defense::Tr, Defense::TrHalfChar, Defense::TrFullChar};
        case Defense::EnsWord:
            return {Defense::Tr, Defense::TrHalfWord, Defense::TrFullWord};
        case Defense::EnsCharWord:
            return {Defense::Tr, Defense::TrHalfChar, Defense::TrFullChar, Defense::TrHalfWord,
                    Defense::TrFullWord};
        default:
            return {};
    }
}

void GridConfig::validate() const {
    if (defenses.empty()) throw ConfigError("grid needs at least one defense");
    if (attacks.empty()) throw ConfigError("grid needs at least one attack");
    if (!(confidence_threshold > 0.0 && confidence_threshold < 1.0))
        throw ConfigError("confidence_threshold must be in (0, 1)");
    if (!(char_rate >= 0.0 && char_rate <= 1.0)) throw ConfigError("char_rate must be in [0, 1]");
    if (!(word_rate >= 0.0 && word_rate <= 1.0)) throw ConfigError("word_rate must be in [0, 1]");
    if (neighbor_rank < 1) throw ConfigError("neighbor_rank must be positive");
    if (histogram_bins < 2) throw ConfigError("histogram_bins must be at least 2");
    if (!schema.has_binary())
        throw ConfigError("grid schema needs a binary collapse (use three_way or four_way)");

    std::set<Defense> defense_set(defenses.begin(), defenses.end());
    if (defense_set.size() != defenses.size()) throw ConfigError("duplicate defense in grid config");
    std::set<Attack> attack_set(attacks.begin(), attacks.end());
    if (attack_set.size() != attacks.size()) throw ConfigError("duplicate attack in grid config");

    for (Defense d : defenses) {
        for (Defense member : ensemble_members(d)) {
            if (!defense_set.count(member))
                throw ConfigError(std::string("ensemble ") + to_string(d) + " requires defense " +
                                  to_string(member) + " in the grid");
        }
    }
}

const CellResult* GridResult::cell(Defense d, Attack a) const {
    for (const auto& c : cells)
        if (c.defense == d && c.attack == a) return &c;
    return nullptr;
}

namespace {

struct EvaluatedCell {
    std::vector<Prediction> preds;
    std::vector<int> labels;
};

CellResult score_cell(Defense defense, Attack attack, const EvaluatedCell& eval,
                      const GridConfig& config, const Dataset& attack_set) {
    CellResult cell;
    cell.defense = defense;
    cell.attack = attack;
    cell.n = static_cast<long>(eval.labels.size());

    const auto split = high_confidence_split(eval.preds, eval.labels, config.confidence_threshold);
    cell.high_conf_wrong = split.high_errors;
    cell.low_conf_wrong = split.low_errors;
    cell.wrong = split.high_errors + split.low_errors;
    // Rates are count-derived; summing the two split rates keeps the
    // partition law exact in floating point.
    cell.high_conf_error_rate = static_cast<double>(cell.high_conf_wrong) / static_cast<double>(cell.n);
    cell.low_conf_error_rate = static_cast<double>(cell.low_conf_wrong) / static_cast<double>(cell.n);
    cell.error_rate = cell.high_conf_error_rate + cell.low_conf_error_rate;

    std::vector<int> pred_labels(eval.preds.size());
    for (std::size_t i = 0; i < eval.preds.size(); ++i) pred_labels[i] = eval.preds[i].label;

    const auto impact = high_impact_compare(pred_labels, eval.labels, config.schema);
    cell.multiclass_f1 = impact.multiclass_f1;
    cell.binary_f1 = impact.binary_f1;

    long binary_wrong = 0;
    for (std::size_t i = 0; i < pred_labels.size(); ++i)
        if (config.schema.collapse_class(pred_labels[i]) != config.schema.collapse_class(eval.labels[i]))
            ++binary_wrong;
    cell.binary_wrong = binary_wrong;
    cell.binary_error_rate = static_cast<double>(binary_wrong) / static_cast<double>(cell.n);

    cell.confidence_histogram = confidence_histogram(eval.preds, config.histogram_bins);

    if (attack == Attack::TeMixed) {
        // Transparency breakdown per source slice, keyed by the id suffix.
        std::map<std::string, std::pair<long, long>> counts;  // suffix -> (wrong, total)
        for (std::size_t i = 0; i < attack_set.examples.size(); ++i) {
            const std::string& id = attack_set.examples[i].id;
            const auto hash_pos = id.rfind('#');
            const std::string suffix = hash_pos == std::string::npos ? "?" : id.substr(hash_pos + 1);
            auto& entry = counts[suffix];
            if (pred_labels[i] != eval.labels[i]) ++entry.first;
            ++entry.second;
        }
        for (const auto& [suffix, wt] : counts)
            cell.subset_error_rates[suffix] =
                static_cast<double>(wt.first) / static_cast<double>(std::max(1L, wt.second));
    }
    return cell;
}

}  // namespace

GridResult run_grid(const GridConfig& config, const Dataset& train, const Dataset& test,
                    const EmbeddingStore& model_store, const NeighborIndex& word_index,
                    const ConfusablesTable& confusables, std::span<const Lexicon> lexicons) {
    config.validate();
    if (train.tag != Variant::Tr) throw ConfigError("run_grid expects a Tr-tagged training set");
    if (test.tag != Variant::Te) throw ConfigError("run_grid expects a Te-tagged test set");
    if (train.schema.classes != config.schema.classes || test.schema.classes != config.schema.classes)
        throw ConfigError("datasets and grid config disagree on the class schema");

    PerturbationSpec char_spec;
    char_spec.mode = PerturbationSpec::Mode::chars;
    char_spec.rate = config.char_rate;
    char_spec.seed = config.char_seed;
    char_spec.table = &confusables;

    PerturbationSpec word_spec;
    word_spec.mode = PerturbationSpec::Mode::words;
    word_spec.rate = config.word_rate;
    word_spec.seed = config.word_seed;
    word_spec.index = &word_index;
    word_spec.neighbor_rank = config.neighbor_rank;

    // Which single models must exist (requested directly or via an ensemble).
    std::set<Defense> single_needed;
    for (Defense d : config.defenses) {
        if (is_ensemble(d)) {
            for (Defense m : ensemble_members(d)) single_needed.insert(m);
        } else {
            single_needed.insert(d);
        }
    }

    GridResult result;
    result.config = config;
    result.train_size = static_cast<long>(train.size());
    result.test_size = static_cast<long>(test.size());

    std::map<Defense, ReferenceClassifier> models;
    for (Defense d : single_needed) {
        Dataset defense_set;
        switch (d) {
            case Defense::Tr:
                defense_set = build_defense_set(train, DefenseStrategy::Tr, char_spec, lexicons);
                break;
            case Defense::TrHalfChar:
                defense_set = build_defense_set(train, DefenseStrategy::TrHalf, char_spec, lexicons);
                break;
            case Defense::TrFullChar:
                defense_set = build_defense_set(train, DefenseStrategy::TrFull, char_spec, lexicons);
                break;
            case Defense::TrHalfWord:
                defense_set = build_defense_set(train, DefenseStrategy::TrHalf, word_spec, lexicons);
                break;
            case Defense::TrFullWord:
                defense_set = build_defense_set(train, DefenseStrategy::TrFull, word_spec, lexicons);
                break;
            default:
                throw ConfigError("unexpected ensemble in single-model set");
        }
        Hyperparams hp = config.hyperparams;
        hp.seed = derive_seed(config.hyperparams.seed, std::string("train:") + to_string(d));
        try {
            models.emplace(d, ReferenceClassifier::train(defense_set, model_store, hp));
        } catch (const TrainError& e) {
            throw TrainError(std::string("defense ") + to_string(d) + ": " + e.what());
        }
        DefenseSummary summary;
        summary.defense = d;
        summary.train_seed = hp.seed;
        summary.loss_trace = models.at(d).loss_trace();
        result.defenses.push_back(std::move(summary));
    }
    for (Defense d : config.defenses) {
        if (!is_ensemble(d)) continue;
        DefenseSummary summary;
        summary.defense = d;
        for (Defense m : ensemble_members(d)) summary.member_tags.push_back(to_string(m));
        result.defenses.push_back(std::move(summary));
    }

    // Attack sets. Te is always needed as the relative-difference baseline;
    // TeMixed pulls in both single attacks.
    std::set<Attack> attacks_needed(config.attacks.begin(), config.attacks.end());
    attacks_needed.insert(Attack::Te);
    const bool want_mixed = attacks_needed.count(Attack::TeMixed) != 0;

    std::map<Attack, Dataset> attack_sets;
    attack_sets.emplace(Attack::Te, build_attack_set(test, AttackTactic::none, char_spec, lexicons));
    if (attacks_needed.count(Attack::TeChar) || want_mixed)
        attack_sets.emplace(Attack::TeChar,
                            build_attack_set(test, AttackTactic::chars, char_spec, lexicons));
    if (attacks_needed.count(Attack::TeWord) || want_mixed)
        attack_sets.emplace(Attack::TeWord,
                            build_attack_set(test, AttackTactic::words, word_spec, lexicons));
    if (want_mixed)
        attack_sets.emplace(Attack::TeMixed,
                            build_mixed_set(attack_sets.at(Attack::Te), attack_sets.at(Attack::TeChar),
                                            attack_sets.at(Attack::TeWord)));

    // Member predictions per (single defense, attack), reused by ensembles.
    const FeatureLayout layout = models.begin()->second.layout();
    std::map<Attack, RowMatrix> features;
    std::map<Attack, std::vector<int>> labels;
    for (const auto& [attack, dataset] : attack_sets) {
        RowMatrix X(static_cast<Eigen::Index>(dataset.size()), layout.total());
        std::vector<int> y(dataset.size());
        for (std::size_t i = 0; i < dataset.size(); ++i) {
            X.row(static_cast<Eigen::Index>(i)) =
                featurize(dataset.examples[i], model_store, layout).transpose();
            y[i] = dataset.examples[i].label;
        }
        features.emplace(attack, std::move(X));
        labels.emplace(attack, std::move(y));
    }

    std::map<std::pair<Defense, Attack>, EvaluatedCell> evaluated;
    for (const auto& [d, model] : models) {
        for (const auto& [attack, dataset] : attack_sets) {
            EvaluatedCell cell;
            cell.labels = labels.at(attack);
            const RowMatrix& X = features.at(attack);
            cell.preds.reserve(static_cast<std::size_t>(X.rows()));
            for (Eigen::Index i = 0; i < X.rows(); ++i)
                cell.preds.push_back(model.predict(X.row(i).transpose()));
            evaluated.emplace(std::make_pair(d, attack), std::move(cell));
        }
    }
    for (Defense d : config.defenses) {
        if (!is_ensemble(d)) continue;
        const auto members = ensemble_members(d);
        for (const auto& [attack, dataset] : attack_sets) {
            EvaluatedCell cell;
            cell.labels = labels.at(attack);
            const std::size_t n = dataset.size();
            cell.preds.reserve(n);
            std::vector<Prediction> member_preds(members.size());
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t m = 0; m < members.size(); ++m)
                    member_preds[m] = evaluated.at({members[m], attack}).preds[i];
                cell.preds.push_back(vote_predictions(member_preds, config.schema.num_classes()));
            }
            evaluated.emplace(std::make_pair(d, attack), std::move(cell));
        }
    }

    // Score cells in config order (defense-major), baseline Te per defense.
    for (Defense d : config.defenses) {
        const CellResult baseline =
            score_cell(d, Attack::Te, evaluated.at({d, Attack::Te}), config, attack_sets.at(Attack::Te));
        for (Attack a : config.attacks) {
            CellResult cell = a == Attack::Te
                                  ? baseline
                                  : score_cell(d, a, evaluated.at({d, a}), config, attack_sets.at(a));
            cell.relative_diff = relative_difference(cell.error_rate, baseline.error_rate);
            result.cells.push_back(std::move(cell));
        }
    }
    return result;
}

namespace {

std::string csv_number(double v) { return format_fixed6(v); }

std::string csv_optional(const std::optional<double>& v) { return v ? format_fixed6(*v) : "NA"; }

}  // namespace

std::string render_table1_csv(const GridResult& result) {
    std::ostringstream out;
    out << "defense";
    for (Attack a : result.config.attacks)
        out << ',' << to_string(a) << "_error_rate," << to_string(a) << "_relative_diff";
    out << '\n';
    for (Defense d : result.config.defenses) {
        out << to_string(d);
        for (Attack a : result.config.attacks) {
            const CellResult* cell = result.cell(d, a);
            out << ',' << csv_number(cell->error_rate) << ',' << csv_optional(cell->relative_diff);
        }
        out << '\n';
    }
    return out.str();
}

std::string render_fig4_csv(const GridResult& result) {
    std::ostringstream out;
    out << "defense,attack,bin,bin_low,bin_high,count\n";
    const int bins = result.config.histogram_bins;
    for (const auto& cell : result.cells) {
        for (int b = 0; b < bins; ++b) {
            out << to_string(cell.defense) << ',' << to_string(cell.attack) << ',' << b << ','
                << csv_number(static_cast<double>(b) / bins) << ','
                << csv_number(static_cast<double>(b + 1) / bins) << ','
                << cell.confidence_histogram[static_cast<std::size_t>(b)] << '\n';
        }
    }
    return out.str();
}

std::string render_fig5_csv(const GridResult& result) {
    std::ostringstream out;
    out << "defense,attack,n,error_rate,high_conf_error_rate,low_conf_error_rate,"
           "high_conf_errors,low_conf_errors\n";
    for (const auto& cell : result.cells) {
        out << to_string(cell.defense) << ',' << to_string(cell.attack) << ',' << cell.n << ','
            << csv_number(cell.error_rate) << ',' << csv_number(cell.high_conf_error_rate) << ','
            << csv_number(cell.low_conf_error_rate) << ',' << cell.high_conf_wrong << ','
            << cell.low_conf_wrong << '\n';
    }
    return out.str();
}

std::string render_fig6_csv(const GridResult& result) {
    std::ostringstream out;
    out << "defense,attack,multiclass_f1,binary_f1\n";
    for (const auto& cell : result.cells) {
        out << to_string(cell.defense) << ',' << to_string(cell.attack) << ','
            << csv_number(cell.multiclass_f1) << ',' << csv_number(cell.binary_f1) << '\n';
    }
    return out.str();
}

std::string render_run_json(const GridResult& result, const std::string& generated_at) {
    ordered_json doc;
    doc["format"] = "textrobust-run";
    doc["version"] = kVersion;
    doc["generated_at"] = generated_at;

    ordered_json cfg;
    cfg["schema"] = {{"name", result.config.schema.name},
                     {"classes", result.config.schema.classes},
                     {"binary_classes", result.config.schema.binary_classes},
                     {"binary_of", result.config.schema.binary_of}};
    ordered_json defenses = ordered_json::array();
    for (Defense d : result.config.defenses) defenses.push_back(to_string(d));
    cfg["defenses"] = defenses;
    ordered_json attacks = ordered_json::array();
    for (Attack a : result.config.attacks) attacks.push_back(to_string(a));
    cfg["attacks"] = attacks;
    cfg["char_rate"] = result.config.char_rate;
    cfg["word_rate"] = result.config.word_rate;
    cfg["neighbor_rank"] = result.config.neighbor_rank;
    cfg["confidence_threshold"] = result.config.confidence_threshold;
    cfg["histogram_bins"] = result.config.histogram_bins;
    cfg["char_seed"] = result.config.char_seed;
    cfg["word_seed"] = result.config.word_seed;
    const Hyperparams& hp = result.config.hyperparams;
    cfg["hyperparams"] = {{"learning_rate", hp.learning_rate}, {"dropout", hp.dropout},
                          {"epochs", hp.epochs},               {"hidden_width", hp.hidden_width},
                          {"batch_size", hp.batch_size},       {"seed", hp.seed},
                          {"adam_beta1", hp.adam_beta1},       {"adam_beta2", hp.adam_beta2},
                          {"adam_eps", hp.adam_eps}};
    doc["config"] = cfg;
    doc["train_size"] = result.train_size;
    doc["test_size"] = result.test_size;

    ordered_json defense_summaries = ordered_json::array();
    for (const auto& s : result.defenses) {
        ordered_json js;
        js["defense"] = to_string(s.defense);
        if (s.member_tags.empty()) {
            js["train_seed"] = s.train_seed;
            js["loss_trace"] = s.loss_trace;
        } else {
            js["members"] = s.member_tags;
        }
        defense_summaries.push_back(std::move(js));
    }
    doc["defenses"] = defense_summaries;

    ordered_json cells = ordered_json::array();
    for (const auto& cell : result.cells) {
        ordered_json jc;
        jc["defense"] = to_string(cell.defense);
        jc["attack"] = to_string(cell.attack);
        jc["n"] = cell.n;
        jc["wrong"] = cell.wrong;
        jc["binary_wrong"] = cell.binary_wrong;
        jc["high_conf_wrong"] = cell.high_conf_wrong;
        jc["low_conf_wrong"] = cell.low_conf_wrong;
        jc["error_rate"] = cell.error_rate;
        jc["high_conf_error_rate"] = cell.high_conf_error_rate;
        jc["low_conf_error_rate"] = cell.low_conf_error_rate;
        jc["binary_error_rate"] = cell.binary_error_rate;
        if (cell.relative_diff)
            jc["relative_diff"] = *cell.relative_diff;
        else
            jc["relative_diff"] = nullptr;
        jc["multiclass_f1"] = cell.multiclass_f1;
        jc["binary_f1"] = cell.binary_f1;
        jc["confidence_histogram"] = cell.confidence_histogram;
        if (!cell.subset_error_rates.empty()) jc["subset_error_rates"] = cell.subset_error_rates;
        cells.push_back(std::move(jc));
    }
    doc["cells"] = cells;
    return doc.dump(2) + "\n";
}

namespace {

std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

void write_reports(const GridResult& result, const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    const std::vector<std::pair<std::string, std::string>> files = {
        {"table1.csv", render_table1_csv(result)},
        {"fig4_confidence.csv", render_fig4_csv(result)},
        {"fig5_highconf.csv", render_fig5_csv(result)},
        {"fig6_impact.csv", render_fig6_csv(result)},
        {"run.json", render_run_json(result, timestamp_utc())},
    };

    if (!fs::exists(out_dir)) {
        // Fresh destination: stage the whole bundle and rename the directory.
        const fs::path staging = out_dir.string() + ".staging";
        fs::remove_all(staging);
        fs::create_directories(staging);
        for (const auto& [name, content] : files) write_text_file(staging / name, content);
        fs::rename(staging, out_dir);
        return;
    }
    if (!fs::is_directory(out_dir)) throw ConfigError("output path is not a directory");
    // Existing directory: stage inside it, then move files into place.
    const fs::path staging = out_dir / ".staging";
    fs::remove_all(staging);
    fs::create_directories(staging);
    for (const auto& [name, content] : files) write_text_file(staging / name, content);
    for (const auto& [name, content] : files) fs::rename(staging / name, out_dir / name);
    fs::remove_all(staging);
}

GridResult read_run_json(const std::filesystem::path& path) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad run file: ") + e.what(), path.string());
    }
    if (doc.value("format", "") != "textrobust-run")
        throw ParseError("not a textrobust run file", path.string());

    GridResult result;
    const auto& cfg = doc.at("config");
    TaskSchema schema;
    schema.name = cfg.at("schema").at("name").get<std::string>();
    schema.classes = cfg.at("schema").at("classes").get<std::vector<std::string>>();
    schema.binary_classes = cfg.at("schema").at("binary_classes").get<std::vector<std::string>>();
    schema.binary_of = cfg.at("schema").at("binary_of").get<std::vector<int>>();
    result.config.schema = std::move(schema);
    for (const auto& name : cfg.at("defenses"))
        result.config.defenses.push_back(defense_from_string(name.get<std::string>()));
    for (const auto& name : cfg.at("attacks"))
        result.config.attacks.push_back(attack_from_string(name.get<std::string>()));
    result.config.char_rate = cfg.at("char_rate").get<double>();
    result.config.word_rate = cfg.at("word_rate").get<double>();
    result.config.neighbor_rank = cfg.at("neighbor_rank").get<int>();
    result.config.confidence_threshold = cfg.at("confidence_threshold").get<double>();
    result.config.histogram_bins = cfg.at("histogram_bins").get<int>();
    result.config.char_seed = cfg.at("char_seed").get<std::uint64_t>();
    result.config.word_seed = cfg.at("word_seed").get<std::uint64_t>();
    const auto& hp = cfg.at("hyperparams");
    result.config.hyperparams.learning_rate = hp.at("learning_rate").get<double>();
    result.config.hyperparams.dropout = hp.at("dropout").get<double>();
    result.config.hyperparams.epochs = hp.at("epochs").get<int>();
    result.config.hyperparams.hidden_width = hp.at("hidden_width").get<int>();
    result.config.hyperparams.batch_size = hp.at("batch_size").get<int>();
    result.config.hyperparams.seed = hp.at("seed").get<std::uint64_t>();
    result.config.hyperparams.adam_beta1 = hp.at("adam_beta1").get<double>();
    result.config.hyperparams.adam_beta2 = hp.at("adam_beta2").get<double>();
    result.config.hyperparams.adam_eps = hp.at("adam_eps").get<double>();
    result.train_size = doc.at("train_size").get<long>();
    result.test_size = doc.at("test_size").get<long>();

    for (const auto& js : doc.at("defenses")) {
        DefenseSummary s;
        s.defense = defense_from_string(js.at("defense").get<std::string>());
        if (js.contains("members")) {
            s.member_tags = js.at("members").get<std::vector<std::string>>();
        } else {
            s.train_seed = js.at("train_seed").get<std::uint64_t>();
            s.loss_trace = js.at("loss_trace").get<std::vector<double>>();
        }
        result.defenses.push_back(std::move(s));
    }

    for (const auto& jc : doc.at("cells")) {
        CellResult cell;
        cell.defense = defense_from_string(jc.at("defense").get<std::string>());
        cell.attack = attack_from_string(jc.at("attack").get<std::string>());
        cell.n = jc.at("n").get<long>();
        cell.wrong = jc.at("wrong").get<long>();
        cell.binary_wrong = jc.at("binary_wrong").get<long>();
        cell.high_conf_wrong = jc.at("high_conf_wrong").get<long>();
        cell.low_conf_wrong = jc.at("low_conf_wrong").get<long>();
        cell.error_rate = jc.at("error_rate").get<double>();
        cell.high_conf_error_rate = jc.at("high_conf_error_rate").get<double>();
        cell.low_conf_error_rate = jc.at("low_conf_error_rate").get<double>();
        cell.binary_error_rate = jc.at("binary_error_rate").get<double>();
        if (!jc.at("relative_diff").is_null()) cell.relative_diff = jc.at("relative_diff").get<double>();
        cell.multiclass_f1 = jc.at("multiclass_f1").get<double>();
        cell.binary_f1 = jc.at("binary_f1").get<double>();
        cell.confidence_histogram = jc.at("confidence_histogram").get<std::vector<long>>();
        if (jc.contains("subset_error_rates"))
            cell.subset_error_rates = jc.at("subset_error_rates").get<std::map<std::string, double>>();
        result.cells.push_back(std::move(cell));
    }
    return result;
}

}  // namespace textrobust
