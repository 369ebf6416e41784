// Command-line front end: dataset labeling, split construction, input
// reconstruction, training, evaluation, pilot runs, and report emission.

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "taco/catalog.hpp"
#include "taco/checkpoint.hpp"
#include "taco/common.hpp"
#include "taco/config.hpp"
#include "taco/harness.hpp"
#include "taco/model.hpp"
#include "taco/reconstructor.hpp"
#include "taco/split.hpp"
#include "taco/text_graph.hpp"
#include "taco/type_embeddings.hpp"
#include "taco/type_extractor.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

taco::Dataset load_any(const std::string& path, const std::string& format) {
    return taco::load_dataset(path, taco::parse_dataset_format(format));
}

taco::TriggerBase triggers_from(const std::string& path, int fallback_tolerance) {
    if (!path.empty()) return taco::TriggerBase::load(path);
    return taco::build_trigger_base({"which", "one", "of", "the", "following"}, fallback_tolerance);
}

taco::TrainConfig config_from(const std::string& path) {
    if (path.empty()) return taco::TrainConfig();
    return taco::TrainConfig::load(path);
}

int run_extract_types(const std::string& in, const std::string& base_path, const std::string& out,
                      const std::string& format, bool trace) {
    taco::Dataset d = load_any(in, format);
    taco::KeywordBase base =
        base_path.empty() ? taco::KeywordBase::builtin() : taco::KeywordBase::load(base_path);
    if (trace) {
        for (const auto& e : d.examples) {
            taco::ExtractTrace tr;
            taco::extract_type(e.question, base, &tr);
            std::cout << e.id << " -> " << tr.result << (tr.fallback ? " (fallback)" : "") << "\n";
            for (const auto& pass : tr.passes) {
                std::cout << "  window " << pass.window << ":";
                for (int t = 0; t < taco::kNumTypes; ++t)
                    if (pass.counts[static_cast<size_t>(t)] > 0)
                        std::cout << " type" << t << "=" << pass.counts[static_cast<size_t>(t)];
                if (pass.decided) std::cout << " -> decided " << pass.winner;
                std::cout << "\n";
            }
        }
    }
    taco::Dataset labeled = taco::label_dataset(d, base);
    taco::save_dataset(labeled, out);
    std::map<int, int> counts;
    for (const auto& e : labeled.examples) counts[*e.rtype] += 1;
    std::cout << "labeled " << labeled.examples.size() << " examples -> " << out << "\n";
    for (const auto& [t, c] : counts) std::cout << "  type " << t << ": " << c << "\n";
    return 0;
}

int run_build_splits(const std::string& train_path, const std::string& test_path,
                     const std::string& dev_path, const std::string& spec_path,
                     const std::string& out_dir, const std::string& format) {
    taco::Dataset train = load_any(train_path, format);
    taco::Dataset test = load_any(test_path, format);
    std::optional<taco::Dataset> dev;
    if (!dev_path.empty()) dev = load_any(dev_path, format);

    taco::SplitSpec spec = taco::SplitSpec::load(spec_path);
    taco::MaterializedSplit ms =
        taco::materialize(train, test, spec, dev ? &*dev : nullptr);

    fs::create_directories(out_dir);
    auto save_part = [&](const std::vector<taco::Example>& examples, const std::string& name) {
        taco::Dataset d;
        d.name = spec.version + "-" + name;
        d.examples = examples;
        taco::save_dataset(d, out_dir + "/" + name + ".json");
    };
    save_part(ms.train, "train");
    save_part(ms.test_all, "test_all");
    save_part(ms.test_unseen, "test_unseen");
    if (dev) save_part(ms.dev_seen, "dev_seen");
    spec.save(out_dir + "/spec.json");

    json counts;
    counts["seen_types"] = spec.seen_types;
    counts["train_seen"] = ms.train.size();
    counts["test_seen"] = ms.test_all.size() - ms.test_unseen.size();
    counts["test_unseen"] = ms.test_unseen.size();
    json per_type = json::object();
    for (const auto& [t, c] : ms.train_counts()) per_type[std::to_string(t)] = c;
    counts["train_per_type"] = per_type;
    taco::write_file(out_dir + "/counts.json", counts.dump(2) + "\n");

    std::cout << "split " << spec.version << ": train " << ms.train.size() << ", test "
              << ms.test_all.size() << " (" << ms.test_unseen.size() << " unseen)\n";
    if (auto target = taco::table1_target(spec.version)) {
        std::cout << "  published counts: train " << target->train_seen << ", test "
                  << target->test_seen << " (" << target->test_unseen << " unseen)\n"
                  << "  deviation: train "
                  << static_cast<long>(ms.train.size()) - target->train_seen << ", test unseen "
                  << static_cast<long>(ms.test_unseen.size()) - target->test_unseen
                  << " (sample counts depend on the keyword base)\n";
    }
    return 0;
}

int run_make_spec(const std::string& train_path, const std::string& format,
                  const std::string& version, const std::string& strategy, int k, double p,
                  uint64_t seed, int target_count, const std::string& difficulty_path,
                  const std::string& mode, const std::string& out) {
    taco::SpecRequest req;
    req.version = version;
    req.strategy = taco::parse_strategy(strategy);
    req.k = k;
    req.p = p;
    req.seed = seed;
    req.target_count = target_count;
    if (!difficulty_path.empty()) req.difficulty_scores = taco::load_difficulty_scores(difficulty_path);
    if (mode == "easiest")
        req.mode = taco::DifficultyMode::Easiest;
    else if (mode != "hardest")
        throw taco::Error("make-spec: --mode must be hardest or easiest");
    taco::Dataset train = load_any(train_path, format);
    taco::SplitSpec spec = taco::derive_spec(train, req);
    spec.save(out);
    std::cout << "wrote " << out << " with seen types {";
    bool first = true;
    for (int t : spec.seen_types) {
        std::cout << (first ? "" : ", ") << t;
        first = false;
    }
    std::cout << "}\n";
    return 0;
}

int run_reconstruct(const std::string& in, const std::string& trig_path, const std::string& out,
                    const std::string& format, int max_len) {
    taco::Dataset d = load_any(in, format);
    taco::TypeCatalog catalog = taco::TypeCatalog::builtin();
    taco::TriggerBase base = triggers_from(trig_path, 2);
    std::string text = "[";
    bool first = true;
    for (const auto& e : d.examples) {
        for (int opt = 0; opt < taco::kNumOptions; ++opt) {
            taco::InputSequence seq = taco::build_sequence(e, catalog, base, opt, max_len);
            json j;
            j["id"] = e.id;
            j["option"] = opt;
            j["prefix"] = seq.prefix;
            j["qa_pair"] = seq.qa.text;
            j["fallback_used"] = seq.qa.fallback_used;
            j["full"] = seq.full;
            text += first ? "\n" : ",\n";
            text += j.dump();
            first = false;
        }
    }
    text += "\n]\n";
    taco::write_file(out, text);
    std::cout << "reconstructed " << d.examples.size() << " examples x 4 options -> " << out << "\n";
    return 0;
}

taco::MaterializedSplit load_split_dir(const std::string& dir) {
    taco::MaterializedSplit ms;
    ms.spec = taco::SplitSpec::load(dir + "/spec.json");
    ms.train = taco::load_dataset(dir + "/train.json", taco::DatasetFormat::Canonical).examples;
    ms.test_all = taco::load_dataset(dir + "/test_all.json", taco::DatasetFormat::Canonical).examples;
    ms.test_unseen =
        taco::load_dataset(dir + "/test_unseen.json", taco::DatasetFormat::Canonical).examples;
    if (fs::exists(dir + "/dev_seen.json"))
        ms.dev_seen = taco::load_dataset(dir + "/dev_seen.json", taco::DatasetFormat::Canonical).examples;
    return ms;
}

int run_train(const std::string& split_dir, const std::string& config_path, uint64_t seed,
              const std::string& out_dir) {
    taco::MaterializedSplit ms = load_split_dir(split_dir);
    taco::TrainConfig cfg = config_from(config_path);
    std::cout << "training on split " << ms.spec.version << " (" << ms.train.size()
              << " examples, seed " << seed << ", config " << cfg.hash() << ")\n";
    taco::TrainResult tr = taco::train(ms, cfg, seed);
    fs::create_directories(out_dir);
    tr.best_checkpoint.save(out_dir + "/model.ckpt");
    taco::write_file(out_dir + "/train_log.json", tr.log_json());
    std::cout << "best epoch " << tr.best_epoch << " dev accuracy " << tr.best_dev_accuracy
              << "\nwrote " << out_dir << "/model.ckpt and train_log.json\n";
    return 0;
}

int run_evaluate(const std::string& ckpt_path, const std::string& pred_path,
                 const std::string& split_dir, const std::string& out_path) {
    taco::MaterializedSplit ms = load_split_dir(split_dir);
    taco::PredictionFile preds;
    std::string config_hash;
    uint64_t seed = 0;
    if (!ckpt_path.empty()) {
        taco::Checkpoint ck = taco::Checkpoint::load(ckpt_path);
        config_hash = ck.config.hash();
        taco::TacoModel model = taco::model_from_checkpoint(ck);
        preds = taco::predict_dataset(model, ms.test_all);
    } else if (!pred_path.empty()) {
        preds = taco::load_predictions(pred_path);
    } else {
        std::cerr << "evaluate: need --ckpt or --pred\n";
        return 2;
    }
    taco::EvalResult r = taco::evaluate(preds, ms);
    r.config_hash = config_hash;
    r.seed = seed;
    r.save(out_path);
    std::cout << "test-all " << r.test_all << ", test-unseen "
              << (r.test_unseen ? std::to_string(*r.test_unseen) : std::string("undefined"))
              << " -> " << out_path << "\n";
    return 0;
}

int run_pilot_cmd(const std::string& split_dir, const std::string& full_train_path,
                  const std::string& config_path, const std::string& out_path,
                  const std::string& format) {
    taco::MaterializedSplit ms = load_split_dir(split_dir);
    taco::Dataset full = load_any(full_train_path, format);
    taco::TrainConfig cfg = config_from(config_path);
    taco::PilotResult pr = taco::run_pilot(ms, full, cfg, cfg.seeds);
    taco::write_file(out_path, pr.serialize());
    std::cout << "seen-only mean test-all " << pr.seen_only.mean_test_all
              << " vs all-types " << pr.all_types.mean_test_all << " -> " << out_path << "\n";
    return 0;
}

int run_report(const std::vector<std::string>& inputs, const std::string& out_path,
               const std::string& fmt) {
    std::vector<taco::EvalResult> results;
    for (const auto& p : inputs) results.push_back(taco::EvalResult::load(p));
    std::string text = fmt == "csv" ? taco::report_csv(results) : taco::report(results);
    taco::write_file(out_path, text);
    std::cout << "wrote " << out_path << " (" << results.size() << " results)\n";
    return 0;
}

int run_dump_graph(const std::string& in, const std::string& format, const std::string& id,
                   int option, const std::string& out_path) {
    taco::Dataset d = load_any(in, format);
    const taco::Example* found = nullptr;
    for (const auto& e : d.examples)
        if (e.id == id) found = &e;
    if (!found) throw taco::Error("dump-graph: no example with id " + id);
    taco::TypeCatalog catalog = taco::TypeCatalog::builtin();
    taco::TriggerBase base = triggers_from("", 2);
    taco::InputSequence seq = taco::build_sequence(*found, catalog, base, option);
    taco::TextGraph g = taco::build_sequence_graph(seq, taco::GraphConfig::defaults());
    std::string text = taco::dump_graph(g);
    if (out_path.empty())
        std::cout << text;
    else
        taco::write_file(out_path, text);
    return 0;
}

int run_gen_type_embeddings(const std::string& catalog_path, int dim, const std::string& import_path,
                            const std::string& out_path) {
    taco::TypeCatalog catalog =
        catalog_path.empty() ? taco::TypeCatalog::builtin() : taco::TypeCatalog::load(catalog_path);
    taco::TypeEmbeddings emb;
    if (import_path.empty())
        emb = taco::TypeEmbeddings::fixture(catalog, dim);
    else
        emb = taco::TypeEmbeddings::import_raw(taco::read_file(import_path), "import:" + import_path);
    emb.save(out_path);
    std::cout << "wrote " << out_path << " (" << emb.provenance << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"TaCo: generalized zero-shot logical reasoning benchmark and model"};
    app.require_subcommand(1);

    std::string in, out, format = "canonical", base_path, trig_path, spec_path, out_dir;
    std::string train_path, test_path, dev_path, config_path, ckpt_path, pred_path, split_dir;
    std::string example_id, import_path, catalog_path, report_format = "markdown";
    std::vector<std::string> report_inputs;
    uint64_t seed = 42;
    int option = 0, dim = 32, max_len = taco::kDefaultMaxSeqLen;
    bool trace = false;

    auto* extract = app.add_subcommand("extract-types", "label reasoning types via keywords");
    extract->add_option("--in", in)->required();
    extract->add_option("--base", base_path, "keyword base JSON (builtin default)");
    extract->add_option("--out", out)->required();
    extract->add_option("--format", format, "canonical | reclor-json | logiqa-text");
    extract->add_flag("--trace", trace, "print per-window match counts");

    auto* splits = app.add_subcommand("build-splits", "materialize a zero-shot split");
    splits->add_option("--train", train_path)->required();
    splits->add_option("--test", test_path)->required();
    splits->add_option("--dev", dev_path, "development set for the seen-type dev view");
    splits->add_option("--spec", spec_path)->required();
    splits->add_option("--out-dir", out_dir)->required();
    splits->add_option("--format", format);

    std::string spec_version = "custom", spec_strategy = "amount", diff_mode = "hardest";
    std::string diff_path;
    int spec_k = 5, target_count = 5;
    double spec_p = 0.1;
    auto* mk = app.add_subcommand("make-spec", "derive a new split spec from labeled data");
    mk->add_option("--train", train_path)->required();
    mk->add_option("--format", format);
    mk->add_option("--version", spec_version);
    mk->add_option("--strategy", spec_strategy, "amount | randomness | difficulty");
    mk->add_option("--k", spec_k, "seen-type count for amount/difficulty");
    mk->add_option("--p", spec_p, "geometric parameter for randomness");
    mk->add_option("--seed", seed);
    mk->add_option("--target-count", target_count, "seen-type count for randomness");
    mk->add_option("--difficulty", diff_path, "JSON map type -> accuracy");
    mk->add_option("--mode", diff_mode, "hardest | easiest");
    mk->add_option("--out", out)->required();

    auto* rec = app.add_subcommand("reconstruct", "emit prefixed declarative sequences");
    rec->add_option("--in", in)->required();
    rec->add_option("--triggers", trig_path, "trigger config JSON (builtin default)");
    rec->add_option("--out", out)->required();
    rec->add_option("--format", format);
    rec->add_option("--max-len", max_len);

    auto* tr = app.add_subcommand("train", "train the desk-scale model on a split");
    tr->add_option("--split", split_dir)->required();
    tr->add_option("--config", config_path);
    tr->add_option("--seed", seed);
    tr->add_option("--out", out_dir)->required();

    auto* ev = app.add_subcommand("evaluate", "score a checkpoint or prediction file");
    ev->add_option("--ckpt", ckpt_path);
    ev->add_option("--pred", pred_path);
    ev->add_option("--split", split_dir)->required();
    ev->add_option("--out", out)->required();

    auto* pilot = app.add_subcommand("pilot", "seen-only vs equal-size all-type comparison");
    pilot->add_option("--split", split_dir)->required();
    pilot->add_option("--full-train", train_path)->required();
    pilot->add_option("--config", config_path);
    pilot->add_option("--out", out)->required();
    pilot->add_option("--format", format);

    auto* rep = app.add_subcommand("report", "aggregate result files into a table");
    rep->add_option("--in", report_inputs)->required()->expected(-1);
    rep->add_option("--out", out)->required();
    rep->add_option("--table-format", report_format, "markdown | csv");

    auto* dg = app.add_subcommand("dump-graph", "dump one example's text graph as JSON");
    dg->add_option("--in", in)->required();
    dg->add_option("--id", example_id)->required();
    dg->add_option("--option", option);
    dg->add_option("--out", out);
    dg->add_option("--format", format);

    auto* gte = app.add_subcommand("gen-type-embeddings", "fixture or imported type embeddings");
    gte->add_option("--catalog", catalog_path);
    gte->add_option("--dim", dim);
    gte->add_option("--import", import_path, "raw embedder output to re-shape");
    gte->add_option("--out", out)->required();

    CLI11_PARSE(app, argc, argv);

    if (!taco::deterministic_mode())
        std::cout << "note: TACO_DETERMINISTIC=0 (results still single-threaded this build)\n";

    try {
        if (extract->parsed()) return run_extract_types(in, base_path, out, format, trace);
        if (mk->parsed())
            return run_make_spec(train_path, format, spec_version, spec_strategy, spec_k, spec_p,
                                 seed, target_count, diff_path, diff_mode, out);
        if (splits->parsed())
            return run_build_splits(train_path, test_path, dev_path, spec_path, out_dir, format);
        if (rec->parsed()) return run_reconstruct(in, trig_path, out, format, max_len);
        if (tr->parsed()) return run_train(split_dir, config_path, seed, out_dir);
        if (ev->parsed()) return run_evaluate(ckpt_path, pred_path, split_dir, out);
        if (pilot->parsed()) return run_pilot_cmd(split_dir, train_path, config_path, out, format);
        if (rep->parsed()) return run_report(report_inputs, out, report_format);
        if (dg->parsed()) return run_dump_graph(in, format, example_id, option, out);
        if (gte->parsed()) return run_gen_type_embeddings(catalog_path, dim, import_path, out);
    } catch (const taco::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
