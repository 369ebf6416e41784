#include "taco/reconstructor.hpp"

#include <algorithm>

#include <json.hpp>

#include "taco/common.hpp"

namespace taco {

using nlohmann::json;

namespace {

void arrangements(const std::vector<std::string>& words, std::vector<std::string>& current,
                  std::vector<bool>& used, std::vector<std::vector<std::string>>& out) {
    if (current.size() >= 2) out.push_back(current);
    if (current.size() == words.size()) return;
    for (size_t i = 0; i < words.size(); ++i) {
        if (used[i]) continue;
        used[i] = true;
        current.push_back(words[i]);
        arrangements(words, current, used, out);
        current.pop_back();
        used[i] = false;
    }
}

bool trigger_less(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a < b;
}

}  // namespace

TriggerBase build_trigger_base(const std::vector<std::string>& basic_words, int tolerance,
                               const std::vector<std::string>& extra_triggers) {
    if (basic_words.empty()) throw Error("trigger base: basic word set is empty");
    if (tolerance < 0) throw Error("trigger base: tolerance must be >= 0");
    TriggerBase base;
    base.tolerance = tolerance;
    std::set<std::string> basic;
    for (const auto& w : basic_words) {
        std::string norm = normalize_token(w);
        if (norm.empty()) throw Error("trigger base: empty basic word");
        basic.insert(norm);
    }
    base.basic_words.assign(basic.begin(), basic.end());

    std::vector<std::string> current;
    std::vector<bool> used(base.basic_words.size(), false);
    arrangements(base.basic_words, current, used, base.triggers);

    for (const auto& extra : extra_triggers) {
        auto toks = match_tokens(extra);
        if (toks.empty()) throw Error("trigger base: empty extra trigger");
        bool has_basic = std::any_of(toks.begin(), toks.end(),
                                     [&](const std::string& t) { return basic.count(t) > 0; });
        if (!has_basic)
            throw Error("trigger base: extra trigger \"" + extra + "\" contains no basic word");
        base.triggers.push_back(std::move(toks));
    }

    std::sort(base.triggers.begin(), base.triggers.end(), trigger_less);
    base.triggers.erase(std::unique(base.triggers.begin(), base.triggers.end()),
                        base.triggers.end());
    return base;
}

TriggerBase TriggerBase::load(const std::string& path) {
    json root;
    try {
        root = json::parse(read_file(path));
    } catch (const json::exception& ex) {
        throw Error("trigger config " + path + ": invalid JSON: " + ex.what());
    }
    std::vector<std::string> words;
    for (const auto& w : root.at("basic_words")) words.push_back(w.get<std::string>());
    std::vector<std::string> extras;
    if (root.contains("extra_triggers"))
        for (const auto& t : root.at("extra_triggers")) extras.push_back(t.get<std::string>());
    return build_trigger_base(words, root.value("tolerance", 2), extras);
}

std::string TriggerBase::serialize() const {
    json root;
    root["basic_words"] = basic_words;
    root["tolerance"] = tolerance;
    root["extra_triggers"] = json::array();
    return root.dump(2) + "\n";
}

void TriggerBase::save(const std::string& path) const {
    write_file(path, serialize());
}

namespace {

// Greedy span match of one trigger starting at token `start`. Greedy choice
// of the nearest next word minimizes the span, so it also minimizes the
// extra-word count the tolerance has to absorb.
std::optional<size_t> match_at(const std::vector<std::string>& norm_tokens, size_t start,
                               const std::vector<std::string>& trigger, int tolerance) {
    if (norm_tokens[start] != trigger[0]) return std::nullopt;
    size_t pos = start;
    for (size_t i = 1; i < trigger.size(); ++i) {
        size_t next = pos + 1;
        while (next < norm_tokens.size() && norm_tokens[next] != trigger[i]) ++next;
        if (next >= norm_tokens.size()) return std::nullopt;
        pos = next;
    }
    size_t span_len = pos - start + 1;
    if (span_len - trigger.size() > static_cast<size_t>(tolerance)) return std::nullopt;
    return pos;
}

}  // namespace

std::optional<TokenSpan> find_trigger(const std::string& question, const TriggerBase& base) {
    std::vector<std::string> raw = split_whitespace(question);
    std::vector<std::string> norm(raw.size());
    for (size_t i = 0; i < raw.size(); ++i) norm[i] = normalize_token(raw[i]);

    for (size_t start = 0; start < norm.size(); ++start) {
        std::optional<size_t> best_end;
        for (const auto& trigger : base.triggers) {
            auto end = match_at(norm, start, trigger, base.tolerance);
            if (end && (!best_end || *end > *best_end)) best_end = end;
        }
        if (best_end) return TokenSpan{start, *best_end + 1};
    }
    return std::nullopt;
}

QAPair merge_qa(const std::string& question, const std::string& option, const TriggerBase& base) {
    QAPair out;
    out.trigger_span = find_trigger(question, base);
    if (!out.trigger_span) {
        out.fallback_used = true;
        out.text = question + " " + option;
        return out;
    }
    std::vector<std::string> raw = split_whitespace(question);
    std::vector<std::string> pieces;
    for (size_t i = 0; i < out.trigger_span->start; ++i) pieces.push_back(raw[i]);
    pieces.push_back(option);
    for (size_t i = out.trigger_span->end; i < raw.size(); ++i) pieces.push_back(raw[i]);
    std::string text = join(pieces, " ");
    // Declarative form: the trailing question mark goes.
    while (!text.empty() && (text.back() == '?' || text.back() == ' ')) text.pop_back();
    out.text = text;
    return out;
}

InputSequence build_sequence(const Example& example, const TypeCatalog& catalog,
                             const TriggerBase& base, int option_index, int max_len) {
    if (!example.rtype)
        throw Error("build_sequence: example " + example.id + " has no rtype");
    if (option_index < 0 || option_index >= kNumOptions)
        throw Error("build_sequence: option index out of range");
    if (max_len < 8) throw Error("build_sequence: max_len too small");

    InputSequence seq;
    seq.prefix = "This is the task of " + catalog.at(*example.rtype).name;
    seq.context = example.context;
    seq.qa = merge_qa(example.question, example.options[static_cast<size_t>(option_index)], base);

    std::vector<std::string> prefix_toks = model_tokens(seq.prefix);
    std::vector<std::string> context_toks = model_tokens(seq.context);
    std::vector<std::string> qa_toks = model_tokens(seq.qa.text);
    if (context_toks.empty()) context_toks.push_back("<empty>");
    if (qa_toks.empty()) qa_toks.push_back("<empty>");

    // 4 structural tokens: <s> plus three </s> separators.
    size_t total = 4 + prefix_toks.size() + context_toks.size() + qa_toks.size();
    if (total > static_cast<size_t>(max_len)) {
        size_t overflow = total - static_cast<size_t>(max_len);
        size_t cut = std::min(overflow, context_toks.size() - 1);
        context_toks.resize(context_toks.size() - cut);
        overflow -= cut;
        if (overflow > 0) {
            size_t qa_cut = std::min(overflow, qa_toks.size() - 1);
            qa_toks.resize(qa_toks.size() - qa_cut);
        }
    }

    seq.tokens.push_back("<s>");
    seq.prefix_span.start = seq.tokens.size();
    seq.tokens.insert(seq.tokens.end(), prefix_toks.begin(), prefix_toks.end());
    seq.prefix_span.end = seq.tokens.size();
    seq.tokens.push_back("</s>");
    seq.context_span.start = seq.tokens.size();
    seq.tokens.insert(seq.tokens.end(), context_toks.begin(), context_toks.end());
    seq.context_span.end = seq.tokens.size();
    seq.tokens.push_back("</s>");
    seq.qa_span.start = seq.tokens.size();
    seq.tokens.insert(seq.tokens.end(), qa_toks.begin(), qa_toks.end());
    seq.qa_span.end = seq.tokens.size();
    seq.tokens.push_back("</s>");

    seq.full = join(seq.tokens, " ");
    return seq;
}

}  // namespace taco
