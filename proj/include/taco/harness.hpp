#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "taco/checkpoint.hpp"
#include "taco/model.hpp"
#include "taco/split.hpp"

namespace taco {

struct TypeBucket {
    int correct = 0;
    int total = 0;
};

struct EvalResult {
    double test_all = 0.0;
    std::optional<double> test_unseen;  // absent when the split has no unseen-type test examples
    std::map<int, TypeBucket> per_type;
    std::string split_version;
    uint64_t seed = 0;
    std::string config_hash;

    std::string serialize() const;
    static EvalResult from_json_text(const std::string& text);
    static EvalResult load(const std::string& path);
    void save(const std::string& path) const;
};

// Exact-match accuracy over the generalized zero-shot metrics. Predictions
// must cover every test example exactly once.
EvalResult evaluate(const PredictionFile& predictions, const MaterializedSplit& split);

struct EpochLog {
    int epoch = 0;
    double mean_loss_mc = 0.0;
    double mean_loss_con = 0.0;
    double mean_loss_total = 0.0;
    double dev_accuracy = 0.0;
};

struct TrainResult {
    std::vector<EpochLog> epochs;
    int best_epoch = 0;        // 1-based
    double best_dev_accuracy = 0.0;
    Checkpoint best_checkpoint;
    uint64_t seed = 0;
    std::string config_hash;

    std::string log_json() const;
};

// Trains on the seen-type train set, evaluates each epoch on the seen-type
// dev view, and keeps the best epoch (ties resolved toward the earlier one).
// When the split has no dev view, training accuracy selects the epoch.
TrainResult train(const MaterializedSplit& split, const TrainConfig& config, uint64_t seed);

TacoModel model_from_checkpoint(const Checkpoint& ck);

PredictionFile predict_dataset(TacoModel& model, const std::vector<Example>& examples);
double accuracy(TacoModel& model, const std::vector<Example>& examples);

struct PilotArm {
    double mean_test_all = 0.0;
    double mean_test_unseen = 0.0;
    std::vector<EvalResult> runs;
};

struct PilotResult {
    PilotArm seen_only;  // zero-shot arm: train restricted to seen types
    PilotArm all_types;  // comparison arm: equal-size sample over all types
    std::string serialize() const;
};

// Comparison-group protocol: per seed, trains the seen-only arm and an
// equal-size all-type sample (drawn from full_train, excluding dev/test ids),
// then averages each arm over the seeds.
PilotResult run_pilot(const MaterializedSplit& split, const Dataset& full_train,
                      const TrainConfig& config, const std::vector<uint64_t>& seeds);

// Markdown table: one column pair (Test-A / Test-U) per split version, plus
// a per-type appendix. Identical inputs yield identical bytes.
std::string report(const std::vector<EvalResult>& results);
std::string report_csv(const std::vector<EvalResult>& results);

}  // namespace taco
