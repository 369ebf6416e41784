#include "taco/harness.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <set>

#include <json.hpp>

#include "taco/common.hpp"
#include "taco/rng.hpp"
#include "taco/type_extractor.hpp"

namespace taco {

using nlohmann::json;

std::string EvalResult::serialize() const {
    json j;
    j["config_hash"] = config_hash;
    json pt = json::object();
    for (const auto& [t, b] : per_type) pt[std::to_string(t)] = json::array({b.correct, b.total});
    j["per_type"] = pt;
    j["seed"] = seed;
    j["split_version"] = split_version;
    j["test_all"] = test_all;
    j["test_unseen"] = test_unseen ? json(*test_unseen) : json(nullptr);
    return j.dump(2) + "\n";
}

EvalResult EvalResult::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& ex) {
        throw Error(std::string("eval result: invalid JSON: ") + ex.what());
    }
    EvalResult r;
    r.config_hash = j.value("config_hash", "");
    r.seed = j.value("seed", 0ull);
    r.split_version = j.value("split_version", "");
    r.test_all = j.at("test_all").get<double>();
    if (j.contains("test_unseen") && !j.at("test_unseen").is_null())
        r.test_unseen = j.at("test_unseen").get<double>();
    if (j.contains("per_type"))
        for (const auto& [key, v] : j.at("per_type").items())
            r.per_type[std::stoi(key)] = TypeBucket{v[0].get<int>(), v[1].get<int>()};
    return r;
}

EvalResult EvalResult::load(const std::string& path) {
    return from_json_text(read_file(path));
}

void EvalResult::save(const std::string& path) const { write_file(path, serialize()); }

EvalResult evaluate(const PredictionFile& predictions, const MaterializedSplit& split) {
    std::map<std::string, int> pred_by_id;
    for (const auto& p : predictions.entries) {
        if (!pred_by_id.emplace(p.id, p.pred).second)
            throw Error("evaluate: duplicate prediction for id " + p.id);
    }
    std::set<std::string> test_ids;
    for (const auto& e : split.test_all) test_ids.insert(e.id);
    for (const auto& p : predictions.entries)
        if (!test_ids.count(p.id))
            throw Error("evaluate: prediction for unknown id " + p.id);

    EvalResult r;
    r.split_version = split.spec.version;
    for (int t = 0; t < kNumTypes; ++t) r.per_type[t] = TypeBucket{};

    int correct_all = 0;
    int correct_unseen = 0, total_unseen = 0;
    for (const auto& e : split.test_all) {
        auto it = pred_by_id.find(e.id);
        if (it == pred_by_id.end()) throw Error("evaluate: missing prediction for id " + e.id);
        bool hit = it->second == e.label;
        TypeBucket& bucket = r.per_type[*e.rtype];
        bucket.total += 1;
        if (hit) bucket.correct += 1;
        if (hit) ++correct_all;
        if (!split.spec.seen_types.count(*e.rtype)) {
            ++total_unseen;
            if (hit) ++correct_unseen;
        }
    }
    if (split.test_all.empty()) throw Error("evaluate: empty test set");
    r.test_all = static_cast<double>(correct_all) / static_cast<double>(split.test_all.size());
    if (total_unseen > 0)
        r.test_unseen = static_cast<double>(correct_unseen) / static_cast<double>(total_unseen);
    return r;
}

PredictionFile predict_dataset(TacoModel& model, const std::vector<Example>& examples) {
    PredictionFile out;
    for (const auto& e : examples) out.entries.push_back({e.id, model.predict(e)});
    return out;
}

double accuracy(TacoModel& model, const std::vector<Example>& examples) {
    if (examples.empty()) return 0.0;
    int correct = 0;
    for (const auto& e : examples)
        if (model.predict(e) == e.label) ++correct;
    return static_cast<double>(correct) / static_cast<double>(examples.size());
}

namespace {

Vocab build_train_vocab(const MaterializedSplit& split, const TrainConfig& cfg,
                        const TypeCatalog& catalog, const TriggerBase& triggers) {
    std::vector<std::vector<std::string>> sequences;
    for (const auto& e : split.train)
        for (int opt = 0; opt < kNumOptions; ++opt)
            sequences.push_back(build_sequence(e, catalog, triggers, opt, cfg.max_seq_len).tokens);
    // Type names of unseen types still appear in dev/test prefixes.
    for (const auto& entry : catalog.entries) sequences.push_back(model_tokens(entry.name));
    sequences.push_back(model_tokens("This is the task of"));
    return Vocab::build(sequences);
}

TypeEmbeddings resolve_type_embeddings(const TrainConfig& cfg, const TypeCatalog& catalog) {
    if (cfg.type_embedding_file.empty())
        return TypeEmbeddings::fixture(catalog, cfg.type_embedding_dim);
    return TypeEmbeddings::load(cfg.type_embedding_file);
}

}  // namespace

TrainResult train(const MaterializedSplit& split, const TrainConfig& config, uint64_t seed) {
    config.validate();
    if (split.train.empty()) throw Error("train: split has no training examples");
    for (const auto& e : split.train)
        if (!e.rtype) throw Error("train: unlabeled example " + e.id);

    TypeCatalog catalog = TypeCatalog::builtin();
    TriggerBase triggers = build_trigger_base({"which", "one", "of", "the", "following"},
                                              config.trigger_tolerance);
    Vocab vocab = build_train_vocab(split, config, catalog, triggers);
    TacoModel model(config, catalog, triggers, resolve_type_embeddings(config, catalog),
                    vocab, seed);
    AdamOptimizer opt(config.desk_learning_rate);

    const std::vector<Example>& dev = split.dev_seen.empty() ? split.train : split.dev_seen;

    TrainResult result;
    result.seed = seed;
    result.config_hash = config.hash();
    std::vector<size_t> order(split.train.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        Rng shuffle_rng(seed * 1000003ull + static_cast<uint64_t>(epoch));
        shuffle_rng.shuffle(order);
        double sum_mc = 0.0, sum_con = 0.0, sum_total = 0.0;
        for (size_t idx : order) {
            const Example& e = split.train[idx];
            ad::Tape tape;
            ExampleForward f = model.forward(tape, e, true);
            if (!std::isfinite(f.loss_total))
                throw Error("train: non-finite loss at epoch " + std::to_string(epoch) +
                            " on example " + e.id);
            tape.backward(f.loss_var);
            opt.step(model.params());
            sum_mc += f.loss_mc;
            sum_con += f.loss_con;
            sum_total += f.loss_total;
        }
        EpochLog log;
        log.epoch = epoch;
        log.mean_loss_mc = sum_mc / static_cast<double>(order.size());
        log.mean_loss_con = sum_con / static_cast<double>(order.size());
        log.mean_loss_total = sum_total / static_cast<double>(order.size());
        log.dev_accuracy = accuracy(model, dev);
        result.epochs.push_back(log);

        if (result.epochs.size() == 1 || log.dev_accuracy > result.best_dev_accuracy) {
            result.best_epoch = epoch;
            result.best_dev_accuracy = log.dev_accuracy;
            result.best_checkpoint.config = config;
            result.best_checkpoint.vocab_words = vocab.words();
            result.best_checkpoint.params.all() = model.params().all();
        }
    }
    return result;
}

TacoModel model_from_checkpoint(const Checkpoint& ck) {
    TypeCatalog catalog = TypeCatalog::builtin();
    TriggerBase triggers = build_trigger_base({"which", "one", "of", "the", "following"},
                                              ck.config.trigger_tolerance);
    TacoModel model(ck.config, catalog, triggers, resolve_type_embeddings(ck.config, catalog),
                    Vocab::from_words(ck.vocab_words), 0);
    for (const auto& [name, m] : model.params().all()) {
        const Mat& stored = ck.params.get(name);
        if (!stored.same_shape(m))
            throw Error("checkpoint: tensor shape mismatch for " + name);
    }
    model.params().all() = ck.params.all();
    return model;
}

std::string TrainResult::log_json() const {
    json j;
    j["best_dev_accuracy"] = best_dev_accuracy;
    j["best_epoch"] = best_epoch;
    j["config_hash"] = config_hash;
    j["seed"] = seed;
    json eps = json::array();
    for (const auto& e : epochs) {
        json je;
        je["dev_accuracy"] = e.dev_accuracy;
        je["epoch"] = e.epoch;
        je["mean_loss_con"] = e.mean_loss_con;
        je["mean_loss_mc"] = e.mean_loss_mc;
        je["mean_loss_total"] = e.mean_loss_total;
        eps.push_back(je);
    }
    j["epochs"] = eps;
    return j.dump(2) + "\n";
}

PilotResult run_pilot(const MaterializedSplit& split, const Dataset& full_train,
                      const TrainConfig& config, const std::vector<uint64_t>& seeds) {
    if (seeds.empty()) throw Error("run_pilot: no seeds");
    std::set<std::string> excluded;
    for (const auto& e : split.test_all) excluded.insert(e.id);
    for (const auto& e : split.dev_seen) excluded.insert(e.id);

    Dataset candidates;
    candidates.name = full_train.name + "-pilot-candidates";
    for (const auto& e : full_train.examples)
        if (!excluded.count(e.id)) candidates.examples.push_back(e);

    size_t n = split.train.size();
    if (candidates.examples.size() < n)
        throw Error("run_pilot: candidate pool (" + std::to_string(candidates.examples.size()) +
                    ") smaller than seen train size (" + std::to_string(n) + ")");

    PilotResult result;
    int unseen_all = 0, unseen_cmp = 0;
    for (uint64_t seed : seeds) {
      try {
        TrainResult seen_run = train(split, config, seed);
        TacoModel seen_model = model_from_checkpoint(seen_run.best_checkpoint);
        EvalResult seen_eval = evaluate(predict_dataset(seen_model, split.test_all), split);
        seen_eval.seed = seed;
        seen_eval.config_hash = config.hash();
        result.seen_only.runs.push_back(seen_eval);
        result.seen_only.mean_test_all += seen_eval.test_all;
        if (seen_eval.test_unseen) {
            result.seen_only.mean_test_unseen += *seen_eval.test_unseen;
            ++unseen_all;
        }

        MaterializedSplit comparison = split;
        comparison.train = build_pilot_group(candidates, n, seed);
        TrainResult cmp_run = train(comparison, config, seed);
        TacoModel cmp_model = model_from_checkpoint(cmp_run.best_checkpoint);
        EvalResult cmp_eval = evaluate(predict_dataset(cmp_model, comparison.test_all), comparison);
        cmp_eval.seed = seed;
        cmp_eval.config_hash = config.hash();
        result.all_types.runs.push_back(cmp_eval);
        result.all_types.mean_test_all += cmp_eval.test_all;
        if (cmp_eval.test_unseen) {
            result.all_types.mean_test_unseen += *cmp_eval.test_unseen;
            ++unseen_cmp;
        }
      } catch (const Error& err) {
        // Abort the pilot but leave the completed runs on record.
        std::cerr << "pilot aborted at seed " << seed << " after "
                  << result.seen_only.runs.size() << " completed seed(s): " << err.what() << "\n"
                  << result.serialize();
        throw;
      }
    }
    double ns = static_cast<double>(seeds.size());
    result.seen_only.mean_test_all /= ns;
    result.all_types.mean_test_all /= ns;
    if (unseen_all > 0) result.seen_only.mean_test_unseen /= unseen_all;
    if (unseen_cmp > 0) result.all_types.mean_test_unseen /= unseen_cmp;
    return result;
}

std::string PilotResult::serialize() const {
    auto arm_json = [](const PilotArm& arm) {
        json j;
        j["mean_test_all"] = arm.mean_test_all;
        j["mean_test_unseen"] = arm.mean_test_unseen;
        json runs = json::array();
        for (const auto& r : arm.runs) runs.push_back(json::parse(r.serialize()));
        j["runs"] = runs;
        return j;
    };
    json j;
    j["all_types"] = arm_json(all_types);
    j["seen_only"] = arm_json(seen_only);
    return j.dump(2) + "\n";
}

namespace {

struct SplitAgg {
    double sum_all = 0.0;
    int n_all = 0;
    double sum_unseen = 0.0;
    int n_unseen = 0;
    std::map<int, TypeBucket> per_type;
};

std::string fmt_acc(double v) { return format_fixed(v, 4); }

}  // namespace

std::string report(const std::vector<EvalResult>& results) {
    if (results.empty()) throw Error("report: no results");
    std::map<std::string, SplitAgg> by_split;
    for (const auto& r : results) {
        SplitAgg& agg = by_split[r.split_version];
        agg.sum_all += r.test_all;
        agg.n_all += 1;
        if (r.test_unseen) {
            agg.sum_unseen += *r.test_unseen;
            agg.n_unseen += 1;
        }
        for (const auto& [t, b] : r.per_type) {
            agg.per_type[t].correct += b.correct;
            agg.per_type[t].total += b.total;
        }
    }

    std::string out = "# Evaluation results\n\n| Metric |";
    for (const auto& [version, agg] : by_split) out += " " + version + " |";
    out += "\n|---|";
    for (size_t i = 0; i < by_split.size(); ++i) out += "---|";
    out += "\n| Test-All |";
    for (const auto& [version, agg] : by_split)
        out += " " + fmt_acc(agg.sum_all / agg.n_all) + " |";
    out += "\n| Test-Unseen |";
    for (const auto& [version, agg] : by_split)
        out += agg.n_unseen > 0 ? " " + fmt_acc(agg.sum_unseen / agg.n_unseen) + " |" : " — |";
    out += "\n\n## Per-type breakdown\n";
    for (const auto& [version, agg] : by_split) {
        out += "\n### " + version + "\n\n| Type | Correct | Total | Accuracy |\n|---|---|---|---|\n";
        for (const auto& [t, b] : agg.per_type) {
            out += "| " + std::to_string(t) + " | ";
            if (b.total == 0) {
                out += "— | — | — |\n";
            } else {
                out += std::to_string(b.correct) + " | " + std::to_string(b.total) + " | " +
                       fmt_acc(static_cast<double>(b.correct) / b.total) + " |\n";
            }
        }
    }
    return out;
}

std::string report_csv(const std::vector<EvalResult>& results) {
    if (results.empty()) throw Error("report: no results");
    std::map<std::string, SplitAgg> by_split;
    for (const auto& r : results) {
        SplitAgg& agg = by_split[r.split_version];
        agg.sum_all += r.test_all;
        agg.n_all += 1;
        if (r.test_unseen) {
            agg.sum_unseen += *r.test_unseen;
            agg.n_unseen += 1;
        }
    }
    std::string out = "split,test_all,test_unseen\n";
    for (const auto& [version, agg] : by_split) {
        out += version + "," + fmt_acc(agg.sum_all / agg.n_all) + ",";
        out += agg.n_unseen > 0 ? fmt_acc(agg.sum_unseen / agg.n_unseen) : std::string("");
        out += "\n";
    }
    return out;
}

}  // namespace taco
