#include "taco/split.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "taco/common.hpp"
#include "taco/rng.hpp"

namespace taco {

using nlohmann::json;

SplitStrategy parse_strategy(const std::string& name) {
    if (name == "amount") return SplitStrategy::Amount;
    if (name == "randomness") return SplitStrategy::Randomness;
    if (name == "difficulty") return SplitStrategy::Difficulty;
    throw Error("unknown split strategy: " + name);
}

std::string strategy_name(SplitStrategy s) {
    switch (s) {
        case SplitStrategy::Amount: return "amount";
        case SplitStrategy::Randomness: return "randomness";
        case SplitStrategy::Difficulty: return "difficulty";
    }
    return "?";
}

std::set<int> SplitSpec::unseen_types() const {
    std::set<int> out;
    for (int t = 0; t < kNumTypes; ++t)
        if (!seen_types.count(t)) out.insert(t);
    return out;
}

void SplitSpec::validate() const {
    if (seen_types.empty()) throw Error("split " + version + ": seen_types is empty");
    if (static_cast<int>(seen_types.size()) >= kNumTypes)
        throw Error("split " + version + ": seen_types must not cover all 17 types");
    for (int t : seen_types)
        if (t < 0 || t >= kNumTypes)
            throw Error("split " + version + ": type " + std::to_string(t) + " out of range [0,16]");
    if (p <= 0.0 || p >= 1.0) throw Error("split " + version + ": p must be in (0,1)");
}

std::map<int, double> load_difficulty_scores(const std::string& path) {
    json root;
    try {
        root = json::parse(read_file(path));
    } catch (const json::exception& ex) {
        throw Error("difficulty scores " + path + ": invalid JSON: " + ex.what());
    }
    std::map<int, double> scores;
    for (const auto& [key, v] : root.items()) scores[std::stoi(key)] = v.get<double>();
    return scores;
}

SplitSpec SplitSpec::load(const std::string& path) {
    json root;
    try {
        root = json::parse(read_file(path));
    } catch (const json::exception& ex) {
        throw Error("split spec " + path + ": invalid JSON: " + ex.what());
    }
    SplitSpec s;
    s.version = root.at("version").get<std::string>();
    s.strategy = parse_strategy(root.at("strategy").get<std::string>());
    for (const auto& t : root.at("seen_types")) s.seen_types.insert(t.get<int>());
    s.rng_seed = root.value("seed", 0ull);
    s.p = root.value("p", 0.1);
    if (root.contains("difficulty_scores"))
        for (const auto& [key, v] : root.at("difficulty_scores").items())
            s.difficulty_scores[std::stoi(key)] = v.get<double>();
    else if (root.contains("difficulty_file"))
        s.difficulty_scores = load_difficulty_scores(root.at("difficulty_file").get<std::string>());
    s.validate();
    return s;
}

std::string SplitSpec::serialize() const {
    json root;
    root["version"] = version;
    root["strategy"] = strategy_name(strategy);
    root["seen_types"] = seen_types;
    root["seed"] = rng_seed;
    root["p"] = p;
    if (!difficulty_scores.empty()) {
        json scores = json::object();
        for (const auto& [t, v] : difficulty_scores) scores[std::to_string(t)] = v;
        root["difficulty_scores"] = scores;
    }
    return root.dump(2) + "\n";
}

void SplitSpec::save(const std::string& path) const {
    write_file(path, serialize());
}

double geometric_pmf(int k, double p) {
    if (k < 1) throw Error("geometric_pmf: k must be >= 1, got " + std::to_string(k));
    if (p <= 0.0 || p >= 1.0) throw Error("geometric_pmf: p must be in (0,1)");
    return std::pow(1.0 - p, k - 1) * p;
}

std::vector<int> rank_types_by_count(const std::map<int, int>& type_counts) {
    std::vector<int> types;
    for (int t = 0; t < kNumTypes; ++t) types.push_back(t);
    std::stable_sort(types.begin(), types.end(), [&](int a, int b) {
        int ca = type_counts.count(a) ? type_counts.at(a) : 0;
        int cb = type_counts.count(b) ? type_counts.at(b) : 0;
        if (ca != cb) return ca > cb;
        return a < b;
    });
    return types;
}

std::set<int> select_seen_amount(const std::map<int, int>& type_counts, int k) {
    if (k < 1 || k >= kNumTypes)
        throw Error("select_seen_amount: k must be in [1,16], got " + std::to_string(k));
    auto ranked = rank_types_by_count(type_counts);
    return std::set<int>(ranked.begin(), ranked.begin() + k);
}

std::set<int> select_seen_random(const std::vector<int>& ranked_types, double p, uint64_t seed,
                                 int target_count) {
    if (ranked_types.size() != kNumTypes)
        throw Error("select_seen_random: ranked list must cover all 17 types");
    if (target_count < 1 || target_count >= kNumTypes)
        throw Error("select_seen_random: target_count must be in [1,16], got " +
                    std::to_string(target_count));
    std::vector<double> weights(ranked_types.size());
    for (size_t i = 0; i < ranked_types.size(); ++i)
        weights[i] = geometric_pmf(static_cast<int>(i) + 1, p);

    Rng rng(seed);
    std::set<int> seen;
    std::vector<bool> taken(ranked_types.size(), false);
    while (static_cast<int>(seen.size()) < target_count) {
        double total = 0.0;
        for (size_t i = 0; i < weights.size(); ++i)
            if (!taken[i]) total += weights[i];
        double u = rng.uniform01() * total;
        size_t pick = 0;
        double acc = 0.0;
        bool found = false;
        for (size_t i = 0; i < weights.size(); ++i) {
            if (taken[i]) continue;
            acc += weights[i];
            pick = i;
            if (u < acc) { found = true; break; }
        }
        (void)found;  // falls through to the last untaken entry on fp round-off
        taken[pick] = true;
        seen.insert(ranked_types[pick]);
    }
    return seen;
}

std::set<int> select_seen_difficulty(const std::map<int, double>& scores, int k, DifficultyMode mode) {
    if (k < 1 || k >= kNumTypes)
        throw Error("select_seen_difficulty: k must be in [1,16], got " + std::to_string(k));
    for (int t = 0; t < kNumTypes; ++t)
        if (!scores.count(t))
            throw Error("select_seen_difficulty: missing score for type " + std::to_string(t));
    std::vector<int> types;
    for (int t = 0; t < kNumTypes; ++t) types.push_back(t);
    std::stable_sort(types.begin(), types.end(), [&](int a, int b) {
        double sa = scores.at(a), sb = scores.at(b);
        if (sa != sb) return mode == DifficultyMode::Hardest ? sa < sb : sa > sb;
        return a < b;
    });
    return std::set<int>(types.begin(), types.begin() + k);
}

namespace {

std::map<int, int> count_by_type(const std::vector<Example>& examples) {
    std::map<int, int> counts;
    for (const auto& e : examples)
        if (e.rtype) counts[*e.rtype] += 1;
    return counts;
}

void require_labeled(const Dataset& d) {
    for (const auto& e : d.examples)
        if (!e.rtype) throw Error("dataset " + d.name + ": example " + e.id + " has no rtype; run extract-types first");
}

}  // namespace

std::map<int, int> MaterializedSplit::train_counts() const { return count_by_type(train); }
std::map<int, int> MaterializedSplit::test_counts() const { return count_by_type(test_all); }

MaterializedSplit materialize(const Dataset& d_train, const Dataset& d_test, const SplitSpec& spec,
                              const Dataset* d_dev) {
    spec.validate();
    require_labeled(d_train);
    require_labeled(d_test);
    if (d_dev) require_labeled(*d_dev);

    MaterializedSplit out;
    out.spec = spec;
    for (const auto& e : d_train.examples)
        if (spec.seen_types.count(*e.rtype)) out.train.push_back(e);
    out.test_all = d_test.examples;
    for (const auto& e : d_test.examples)
        if (!spec.seen_types.count(*e.rtype)) out.test_unseen.push_back(e);
    if (d_dev)
        for (const auto& e : d_dev->examples)
            if (spec.seen_types.count(*e.rtype)) out.dev_seen.push_back(e);
    return out;
}

SplitSpec derive_spec(const Dataset& labeled_train, const SpecRequest& request) {
    require_labeled(labeled_train);
    std::map<int, int> counts;
    for (const auto& e : labeled_train.examples) counts[*e.rtype] += 1;

    SplitSpec spec;
    spec.version = request.version;
    spec.strategy = request.strategy;
    spec.p = request.p;
    spec.rng_seed = request.seed;
    switch (request.strategy) {
        case SplitStrategy::Amount:
            spec.seen_types = select_seen_amount(counts, request.k);
            break;
        case SplitStrategy::Randomness:
            spec.seen_types = select_seen_random(rank_types_by_count(counts), request.p,
                                                 request.seed, request.target_count);
            break;
        case SplitStrategy::Difficulty:
            spec.difficulty_scores = request.difficulty_scores;
            spec.seen_types = select_seen_difficulty(request.difficulty_scores, request.k,
                                                     request.mode);
            break;
    }
    spec.validate();
    return spec;
}

std::vector<Example> build_pilot_group(const Dataset& d_train, size_t n, uint64_t seed) {
    if (n > d_train.examples.size())
        throw Error("build_pilot_group: n=" + std::to_string(n) + " exceeds dataset size " +
                    std::to_string(d_train.examples.size()));
    std::vector<size_t> indices(d_train.examples.size());
    for (size_t i = 0; i < indices.size(); ++i) indices[i] = i;
    Rng rng(seed);
    rng.shuffle(indices);
    indices.resize(n);
    std::sort(indices.begin(), indices.end());
    std::vector<Example> out;
    out.reserve(n);
    for (size_t i : indices) out.push_back(d_train.examples[i]);
    return out;
}

std::optional<SplitReportTarget> table1_target(const std::string& version) {
    if (version == "v1") return SplitReportTarget{2190, 475, 525};
    if (version == "v2") return SplitReportTarget{2700, 595, 405};
    if (version == "v3") return SplitReportTarget{1928, 435, 565};
    if (version == "v4") return SplitReportTarget{2896, 645, 355};
    if (version == "v5") return SplitReportTarget{2175, 473, 527};
    if (version == "v6") return SplitReportTarget{2463, 527, 473};
    return std::nullopt;
}

}  // namespace taco
