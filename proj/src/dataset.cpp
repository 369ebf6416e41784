#include "taco/dataset.hpp"

#include <set>
#include <sstream>

#include <json.hpp>

#include "taco/common.hpp"

namespace taco {

using nlohmann::json;

DatasetFormat parse_dataset_format(const std::string& name) {
    if (name == "canonical" || name == "auto") return DatasetFormat::Canonical;
    if (name == "reclor-json") return DatasetFormat::ReclorJson;
    if (name == "logiqa-text") return DatasetFormat::LogiqaText;
    throw Error("unknown dataset format: " + name);
}

void validate(const Dataset& d) {
    std::set<std::string> ids;
    for (const auto& e : d.examples) {
        if (e.id.empty()) throw Error("dataset " + d.name + ": example with empty id");
        if (!ids.insert(e.id).second) throw Error("duplicate example id: " + e.id);
        if (e.label < 0 || e.label >= kNumOptions)
            throw Error("example " + e.id + ": label " + std::to_string(e.label) + " out of range [0,3]");
        if (e.rtype && (*e.rtype < 0 || *e.rtype >= kNumTypes))
            throw Error("example " + e.id + ": rtype " + std::to_string(*e.rtype) + " out of range [0,16]");
    }
}

namespace {

Example example_from_json(const json& j, const std::string& where) {
    Example e;
    const bool canonical = j.contains("options");
    try {
        e.id = canonical ? j.at("id").get<std::string>() : j.at("id_string").get<std::string>();
        e.context = j.at("context").get<std::string>();
        e.question = j.at("question").get<std::string>();
        const json& opts = canonical ? j.at("options") : j.at("answers");
        if (!opts.is_array() || opts.size() != kNumOptions)
            throw Error("option count " + std::to_string(opts.is_array() ? opts.size() : 0) +
                        " \xE2\x89\xA0 4 in record " + (e.id.empty() ? where : e.id));
        for (int i = 0; i < kNumOptions; ++i) e.options[i] = opts[i].get<std::string>();
        e.label = j.at("label").get<int>();
        if (canonical && j.contains("rtype") && !j.at("rtype").is_null())
            e.rtype = j.at("rtype").get<int>();
    } catch (const json::exception& ex) {
        throw Error("malformed record " + (e.id.empty() ? where : e.id) + ": " + ex.what());
    }
    return e;
}

Dataset parse_reclor(const std::string& content, const std::string& name) {
    json root;
    try {
        root = json::parse(content);
    } catch (const json::exception& ex) {
        throw Error("dataset " + name + ": invalid JSON: " + ex.what());
    }
    if (!root.is_array()) throw Error("dataset " + name + ": expected a JSON array of records");
    Dataset d;
    d.name = name;
    for (size_t i = 0; i < root.size(); ++i)
        d.examples.push_back(example_from_json(root[i], "#" + std::to_string(i)));
    validate(d);
    return d;
}

Dataset parse_canonical(const std::string& content, const std::string& name) {
    json root;
    try {
        root = json::parse(content);
    } catch (const json::exception& ex) {
        throw Error("dataset " + name + ": invalid JSON: " + ex.what());
    }
    if (root.is_array()) return parse_reclor(content, name);
    Dataset d;
    d.name = root.value("name", name);
    const json& exs = root.at("examples");
    for (size_t i = 0; i < exs.size(); ++i)
        d.examples.push_back(example_from_json(exs[i], "#" + std::to_string(i)));
    validate(d);
    return d;
}

std::string strip_option_prefix(const std::string& line) {
    // LogiQA option lines usually start "A." / "B:" etc.
    if (line.size() >= 2 && std::isalpha(static_cast<unsigned char>(line[0])) &&
        (line[1] == '.' || line[1] == ':' || line[1] == ')')) {
        size_t start = 2;
        while (start < line.size() && line[start] == ' ') ++start;
        return line.substr(start);
    }
    return line;
}

Dataset parse_logiqa(const std::string& content, const std::string& name) {
    std::vector<std::string> lines;
    std::istringstream in(content);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        bool blank = true;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c))) { blank = false; break; }
        if (!blank) lines.push_back(line);
    }
    if (lines.size() % 7 != 0)
        throw Error("dataset " + name + ": logiqa-text expects records of 7 non-blank lines "
                    "(answer, context, question, 4 options); got " + std::to_string(lines.size()) + " lines");
    Dataset d;
    d.name = name;
    for (size_t r = 0; r < lines.size(); r += 7) {
        Example e;
        e.id = "logiqa-" + std::to_string(r / 7);
        std::string ans = to_lower(lines[r]);
        if (ans.size() != 1 || ans[0] < 'a' || ans[0] > 'd')
            throw Error("record " + e.id + " (line " + std::to_string(r + 1) +
                        "): answer letter must be a-d, got \"" + lines[r] + "\"");
        e.label = ans[0] - 'a';
        e.context = lines[r + 1];
        e.question = lines[r + 2];
        for (int i = 0; i < kNumOptions; ++i) e.options[i] = strip_option_prefix(lines[r + 3 + i]);
        d.examples.push_back(std::move(e));
    }
    validate(d);
    return d;
}

}  // namespace

Dataset parse_dataset(const std::string& content, DatasetFormat format, const std::string& name) {
    switch (format) {
        case DatasetFormat::Canonical: return parse_canonical(content, name);
        case DatasetFormat::ReclorJson: return parse_reclor(content, name);
        case DatasetFormat::LogiqaText: return parse_logiqa(content, name);
    }
    throw Error("unreachable dataset format");
}

Dataset load_dataset(const std::string& path, DatasetFormat format) {
    return parse_dataset(read_file(path), format, path);
}

std::string serialize_dataset(const Dataset& d) {
    std::string out = "{\"examples\":[";
    for (size_t i = 0; i < d.examples.size(); ++i) {
        const Example& e = d.examples[i];
        json j;
        j["context"] = e.context;
        j["id"] = e.id;
        j["label"] = e.label;
        j["options"] = e.options;
        j["question"] = e.question;
        j["rtype"] = e.rtype ? json(*e.rtype) : json(nullptr);
        out += i == 0 ? "\n" : ",\n";
        out += j.dump();
    }
    out += d.examples.empty() ? "],\"name\":" : "\n],\"name\":";
    out += json(d.name).dump();
    out += "}\n";
    return out;
}

void save_dataset(const Dataset& d, const std::string& path) {
    validate(d);
    write_file(path, serialize_dataset(d));
}

PredictionFile load_predictions(const std::string& path) {
    json root;
    try {
        root = json::parse(read_file(path));
    } catch (const json::exception& ex) {
        throw Error("predictions " + path + ": invalid JSON: " + ex.what());
    }
    if (!root.is_array()) throw Error("predictions " + path + ": expected a JSON array");
    PredictionFile p;
    for (const auto& j : root) {
        Prediction pr;
        pr.id = j.at("id").get<std::string>();
        pr.pred = j.at("pred").get<int>();
        if (pr.pred < 0 || pr.pred >= kNumOptions)
            throw Error("prediction for " + pr.id + ": pred " + std::to_string(pr.pred) + " out of range [0,3]");
        p.entries.push_back(std::move(pr));
    }
    return p;
}

std::string serialize_predictions(const PredictionFile& p) {
    std::string out = "[";
    for (size_t i = 0; i < p.entries.size(); ++i) {
        json j;
        j["id"] = p.entries[i].id;
        j["pred"] = p.entries[i].pred;
        out += i == 0 ? "\n" : ",\n";
        out += j.dump();
    }
    out += p.entries.empty() ? "]\n" : "\n]\n";
    return out;
}

void save_predictions(const PredictionFile& p, const std::string& path) {
    write_file(path, serialize_predictions(p));
}

}  // namespace taco
