#include "taco/catalog.hpp"

#include <json.hpp>

#include "taco/common.hpp"
#include "taco/dataset.hpp"

namespace taco {

using nlohmann::json;

const TypeEntry& TypeCatalog::at(int index) const {
    if (index < 0 || index >= static_cast<int>(entries.size()))
        throw Error("type index " + std::to_string(index) + " out of range");
    return entries[static_cast<size_t>(index)];
}

void TypeCatalog::validate() const {
    if (entries.size() != kNumTypes)
        throw Error("type catalog must have exactly 17 entries, got " + std::to_string(entries.size()));
    for (int i = 0; i < kNumTypes; ++i) {
        if (entries[static_cast<size_t>(i)].index != i)
            throw Error("type catalog entry " + std::to_string(i) + " has index " +
                        std::to_string(entries[static_cast<size_t>(i)].index));
        if (entries[static_cast<size_t>(i)].description.empty())
            throw Error("type " + std::to_string(i) + " has an empty description");
    }
    if (entries[kOthersType].name != "Others")
        throw Error("type 16 must be named \"Others\", got \"" + entries[kOthersType].name + "\"");
}

TypeCatalog TypeCatalog::builtin() {
    TypeCatalog c;
    c.entries = {
        {0, "Necessary Assumptions",
         "identify the claim that must be true or is required in order for the argument to work."},
        {1, "Sufficient Assumptions",
         "identify a sufficient assumption, that is, an assumption that, if added to the argument, "
         "would make it logically valid."},
        {2, "Strengthen", "identify information that would strengthen an argument."},
        {3, "Weaken", "identify information that would weaken an argument."},
        {4, "Evaluation", "identify information that would be useful to know to evaluate an argument."},
        {5, "Implication", "identify something that follows logically from a set of premises."},
        {6, "Conclusion and Main Point", "identify the conclusion/main point of a line of reasoning."},
        {7, "Most Strongly Supported",
         "find the choice that is most strongly supported by a stimulus."},
        {8, "Explain or Resolve", "identify information that would explain or resolve a situation."},
        {9, "Principle",
         "identify the principle, or find a situation that conforms to a principle, or match the "
         "principles."},
        {10, "Dispute", "identify or infer an issue in dispute."},
        {11, "Technique", "identify the technique used in the reasoning of an argument."},
        {12, "Role",
         "describe the individual role that a statement is playing in a larger argument."},
        {13, "Identify a Flaw", "identify a flaw in an arguments reasoning."},
        {14, "Match Flaws",
         "find a choice containing an argument that exhibits the same flaws as the passages "
         "argument."},
        {15, "Match the Structure",
         "match the structure of an argument in a choice to the structure of the argument in the "
         "passage."},
        {16, "Others", "other types of questions which are not included by the above."},
    };
    c.validate();
    return c;
}

TypeCatalog TypeCatalog::load(const std::string& path) {
    json root;
    try {
        root = json::parse(read_file(path));
    } catch (const json::exception& ex) {
        throw Error("type catalog " + path + ": invalid JSON: " + ex.what());
    }
    TypeCatalog c;
    for (const auto& j : root.at("types")) {
        TypeEntry e;
        e.index = j.at("index").get<int>();
        e.name = j.at("name").get<std::string>();
        e.description = j.at("description").get<std::string>();
        c.entries.push_back(std::move(e));
    }
    c.validate();
    return c;
}

std::string TypeCatalog::serialize() const {
    std::string out = "{\"types\":[";
    for (size_t i = 0; i < entries.size(); ++i) {
        json j;
        j["description"] = entries[i].description;
        j["index"] = entries[i].index;
        j["name"] = entries[i].name;
        out += i == 0 ? "\n" : ",\n";
        out += j.dump();
    }
    out += "\n]}\n";
    return out;
}

void TypeCatalog::save(const std::string& path) const {
    write_file(path, serialize());
}

}  // namespace taco
