#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace taco {

constexpr int kNumTypes = 17;
constexpr int kNumOptions = 4;
constexpr int kOthersType = 16;

// One multiple-choice instance: context, question, four options, gold label,
// and the extracted reasoning type (unset until labeled).
struct Example {
    std::string id;
    std::string context;
    std::string question;
    std::array<std::string, kNumOptions> options;
    int label = 0;
    std::optional<int> rtype;

    bool operator==(const Example&) const = default;
};

struct Dataset {
    std::string name;
    std::vector<Example> examples;

    bool operator==(const Dataset&) const = default;
};

struct Prediction {
    std::string id;
    int pred = 0;

    bool operator==(const Prediction&) const = default;
};

struct PredictionFile {
    std::vector<Prediction> entries;
};

enum class DatasetFormat { Canonical, ReclorJson, LogiqaText };

DatasetFormat parse_dataset_format(const std::string& name);

// Throws taco::Error naming the first offending record.
void validate(const Dataset& d);

Dataset load_dataset(const std::string& path, DatasetFormat format);
Dataset parse_dataset(const std::string& content, DatasetFormat format, const std::string& name);

// Canonical line-stable JSON: sorted keys, one example per line, rtype null
// when unset. Two saves of the same dataset are byte-identical.
std::string serialize_dataset(const Dataset& d);
void save_dataset(const Dataset& d, const std::string& path);

PredictionFile load_predictions(const std::string& path);
std::string serialize_predictions(const PredictionFile& p);
void save_predictions(const PredictionFile& p, const std::string& path);

}  // namespace taco
