#include "taco/type_extractor.hpp"

#include <json.hpp>

#include "taco/common.hpp"

namespace taco {

using nlohmann::json;

void KeywordBase::add(int type, const std::string& phrase) {
    if (type < 0 || type >= kNumTypes)
        throw Error("keyword base: type index " + std::to_string(type) + " out of range");
    auto toks = match_tokens(phrase);
    if (toks.empty()) throw Error("keyword base: empty phrase for type " + std::to_string(type));
    phrases[static_cast<size_t>(type)].push_back(std::move(toks));
}

void KeywordBase::validate() const {
    if (window < 1) throw Error("keyword base: window must be >= 1");
    for (int t = 0; t < kNumTypes; ++t)
        for (const auto& p : phrases[static_cast<size_t>(t)])
            if (static_cast<int>(p.size()) > window)
                throw Error("keyword base: phrase of length " + std::to_string(p.size()) +
                            " for type " + std::to_string(t) + " exceeds window " +
                            std::to_string(window));
}

KeywordBase KeywordBase::builtin() {
    KeywordBase b;
    b.window = 5;
    auto add_all = [&b](int type, std::initializer_list<const char*> list) {
        for (const char* p : list) b.add(type, p);
    };
    add_all(0, {"necessary assumption", "assumption required", "required by the argument",
                "depends on the assumption", "relies on the assumption", "assumption on which"});
    add_all(1, {"sufficient assumption", "conclusion follows logically if", "properly drawn if",
                "is assumed", "enables the conclusion"});
    add_all(2, {"strengthen", "strengthens", "most strengthens the argument",
                "provides the most support for"});
    add_all(3, {"weaken", "weakens", "most seriously weakens", "undermines", "casts doubt",
                "calls into question"});
    add_all(4, {"evaluate the argument", "useful to know", "most useful in evaluating",
                "evaluating the argument"});
    add_all(5, {"must be true", "must also be true", "follows logically from",
                "can be properly inferred", "properly inferred from"});
    add_all(6, {"main point", "main conclusion", "conclusion drawn in the argument",
                "overall conclusion"});
    add_all(7, {"most strongly supported", "strongly supports", "most strongly support",
                "best supported by"});
    add_all(8, {"explain", "explains", "resolve", "apparent discrepancy", "apparent paradox",
                "most helps to explain", "reconcile"});
    add_all(9, {"principle", "principles", "conforms to the principle",
                "conforms most closely to"});
    add_all(10, {"disagree", "dispute", "point at issue", "disagree about whether",
                 "in disagreement over"});
    add_all(11, {"technique", "method of reasoning", "proceeds by", "responds by",
                 "argumentative strategy"});
    add_all(12, {"role", "plays in the argument", "role played by", "figures in the argument"});
    add_all(13, {"flaw", "flawed", "vulnerable to criticism", "error in reasoning",
                 "questionable reasoning", "criticized on the grounds"});
    add_all(14, {"flawed pattern of reasoning", "most similar to the flawed",
                 "similar in its flawed", "exhibits flawed reasoning most similar"});
    add_all(15, {"pattern of reasoning", "most similar in reasoning", "parallel in reasoning",
                 "most closely parallels"});
    add_all(16, {"completes the passage", "logically completes the argument", "fill in the blank"});
    b.validate();
    return b;
}

KeywordBase KeywordBase::load(const std::string& path) {
    json root;
    try {
        root = json::parse(read_file(path));
    } catch (const json::exception& ex) {
        throw Error("keyword base " + path + ": invalid JSON: " + ex.what());
    }
    KeywordBase b;
    b.window = root.at("window").get<int>();
    for (const auto& [key, list] : root.at("phrases").items()) {
        int type = std::stoi(key);
        for (const auto& p : list) b.add(type, p.get<std::string>());
    }
    b.validate();
    return b;
}

std::string KeywordBase::serialize() const {
    json phr = json::object();
    for (int t = 0; t < kNumTypes; ++t) {
        json list = json::array();
        for (const auto& p : phrases[static_cast<size_t>(t)]) list.push_back(join(p, " "));
        phr[std::to_string(t)] = list;
    }
    json root;
    root["phrases"] = phr;
    root["window"] = window;
    return root.dump(2) + "\n";
}

void KeywordBase::save(const std::string& path) const {
    write_file(path, serialize());
}

namespace {

bool window_equals(const std::vector<std::string>& words, size_t offset,
                   const std::vector<std::string>& phrase) {
    for (size_t i = 0; i < phrase.size(); ++i)
        if (words[offset + i] != phrase[i]) return false;
    return true;
}

}  // namespace

int extract_type(const std::string& question, const KeywordBase& base, ExtractTrace* trace) {
    if (question.empty()) throw Error("extract_type: empty question");
    base.validate();
    std::vector<std::string> words = match_tokens(question);
    if (words.empty()) throw Error("extract_type: question has no words after tokenization");

    for (int size = base.window; size >= 1; --size) {
        WindowPass pass;
        pass.window = size;
        if (static_cast<size_t>(size) <= words.size()) {
            for (size_t offset = 0; offset + static_cast<size_t>(size) <= words.size(); ++offset) {
                for (int type = 0; type < kNumTypes; ++type) {
                    for (const auto& phrase : base.phrases[static_cast<size_t>(type)]) {
                        if (static_cast<int>(phrase.size()) != size) continue;
                        if (window_equals(words, offset, phrase)) pass.counts[static_cast<size_t>(type)] += 1;
                    }
                }
            }
        }
        int best = -1, best_count = 0;
        bool unique = false;
        for (int type = 0; type < kNumTypes; ++type) {
            int c = pass.counts[static_cast<size_t>(type)];
            if (c > best_count) {
                best_count = c;
                best = type;
                unique = true;
            } else if (c == best_count && c > 0) {
                unique = false;
            }
        }
        if (best_count > 0 && unique) {
            pass.decided = true;
            pass.winner = best;
            if (trace) {
                trace->passes.push_back(pass);
                trace->result = best;
                trace->fallback = false;
            }
            return best;
        }
        if (trace) trace->passes.push_back(pass);
    }
    if (trace) {
        trace->result = kOthersType;
        trace->fallback = true;
    }
    return kOthersType;
}

Dataset label_dataset(const Dataset& d, const KeywordBase& base) {
    Dataset out = d;
    for (auto& e : out.examples) {
        try {
            e.rtype = extract_type(e.question, base);
        } catch (const Error& err) {
            throw Error("example " + e.id + ": " + err.what());
        }
    }
    return out;
}

}  // namespace taco
