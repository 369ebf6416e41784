#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "taco/catalog.hpp"
#include "taco/dataset.hpp"

namespace taco {

// Half-open token span [start, end).
struct TokenSpan {
    size_t start = 0;
    size_t end = 0;

    size_t length() const { return end - start; }
    bool operator==(const TokenSpan&) const = default;
};

// Trigger phrases built from ordered arrangements of the basic words, plus
// the tolerance budget for extra interior words absorbed into a match.
struct TriggerBase {
    std::vector<std::string> basic_words;
    std::vector<std::vector<std::string>> triggers;  // sorted: longer first, then lexicographic
    int tolerance = 2;

    static TriggerBase load(const std::string& path);
    std::string serialize() const;
    void save(const std::string& path) const;
};

// Enumerates every ordered arrangement of each subset of size >= 2 of the
// basic words. Extra triggers are appended after validation (each must
// contain at least one basic word).
TriggerBase build_trigger_base(const std::vector<std::string>& basic_words, int tolerance,
                               const std::vector<std::string>& extra_triggers = {});

// Leftmost match over whitespace tokens of the question (case-insensitive,
// punctuation-stripped compare); among matches at the leftmost start, the
// longest span after tolerance expansion wins.
std::optional<TokenSpan> find_trigger(const std::string& question, const TriggerBase& base);

struct QAPair {
    std::string text;
    std::optional<TokenSpan> trigger_span;
    bool fallback_used = false;
};

// Replaces the trigger span with the option text and drops the trailing
// question mark. Without a trigger, falls back to plain concatenation.
QAPair merge_qa(const std::string& question, const std::string& option, const TriggerBase& base);

// Prefix + context + Q-A pair, tokenized with separator markers and capped
// at max_len tokens (context truncated first).
struct InputSequence {
    std::string prefix;
    std::string context;
    QAPair qa;
    std::string full;                 // display form of the token stream
    std::vector<std::string> tokens;  // <s> prefix </s> context </s> qa </s>
    TokenSpan prefix_span;
    TokenSpan context_span;
    TokenSpan qa_span;
};

constexpr int kDefaultMaxSeqLen = 256;

InputSequence build_sequence(const Example& example, const TypeCatalog& catalog,
                             const TriggerBase& base, int option_index,
                             int max_len = kDefaultMaxSeqLen);

}  // namespace taco
