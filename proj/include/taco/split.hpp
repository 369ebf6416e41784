#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "taco/dataset.hpp"

namespace taco {

enum class SplitStrategy { Amount, Randomness, Difficulty };

SplitStrategy parse_strategy(const std::string& name);
std::string strategy_name(SplitStrategy s);

// A zero-shot split definition: which types are seen during training.
// The unseen set is always the complement within {0..16}.
struct SplitSpec {
    std::string version;
    SplitStrategy strategy = SplitStrategy::Amount;
    std::set<int> seen_types;
    uint64_t rng_seed = 0;               // randomness strategy only
    double p = 0.1;                      // randomness strategy only
    std::map<int, double> difficulty_scores;  // difficulty strategy only

    std::set<int> unseen_types() const;
    void validate() const;

    static SplitSpec load(const std::string& path);
    std::string serialize() const;
    void save(const std::string& path) const;
};

struct MaterializedSplit {
    SplitSpec spec;
    std::vector<Example> train;        // seen types only, source order
    std::vector<Example> test_all;     // the whole test set
    std::vector<Example> test_unseen;  // unseen-type subset of test_all
    std::vector<Example> dev_seen;     // seen-type dev view, used for epoch selection

    std::map<int, int> train_counts() const;
    std::map<int, int> test_counts() const;
};

// Eq-1 geometric pmf: probability that the rank-k type is drawn, k >= 1.
double geometric_pmf(int k, double p);

// Top-k types by training count; ties broken toward the smaller type index.
std::set<int> select_seen_amount(const std::map<int, int>& type_counts, int k);

// Seeded weighted sampling without replacement over the ranked type list.
// The rank-k entry keeps weight geometric_pmf(k, p) for the whole draw.
std::set<int> select_seen_random(const std::vector<int>& ranked_types, double p, uint64_t seed,
                                 int target_count);

enum class DifficultyMode { Hardest, Easiest };

std::set<int> select_seen_difficulty(const std::map<int, double>& scores, int k, DifficultyMode mode);

// Ranks all 17 types by descending training count (index tie-break).
std::vector<int> rank_types_by_count(const std::map<int, int>& type_counts);

// JSON map type -> accuracy, as referenced by a spec's "difficulty_file".
std::map<int, double> load_difficulty_scores(const std::string& path);

// Builds a complete spec from a labeled training set and a strategy, for
// constructing new splits beyond the shipped v1-v6 definitions.
struct SpecRequest {
    std::string version;
    SplitStrategy strategy = SplitStrategy::Amount;
    int k = 5;                     // amount / difficulty
    int target_count = 5;          // randomness
    double p = 0.1;                // randomness
    uint64_t seed = 0;             // randomness
    DifficultyMode mode = DifficultyMode::Hardest;
    std::map<int, double> difficulty_scores;
};

SplitSpec derive_spec(const Dataset& labeled_train, const SpecRequest& request);

MaterializedSplit materialize(const Dataset& d_train, const Dataset& d_test, const SplitSpec& spec,
                              const Dataset* d_dev = nullptr);

// Seeded uniform sample of n examples over all types, output in source order.
std::vector<Example> build_pilot_group(const Dataset& d_train, size_t n, uint64_t seed);

// Table-1 report targets for the shipped splits (sample counts depend on the
// keyword base, so these are printed as deviations, never asserted).
struct SplitReportTarget {
    int train_seen = 0;
    int test_seen = 0;
    int test_unseen = 0;
};
std::optional<SplitReportTarget> table1_target(const std::string& version);

}  // namespace taco
