#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>

#include "taco/catalog.hpp"
#include "taco/common.hpp"
#include "taco/reconstructor.hpp"
#include "taco/rng.hpp"

using namespace taco;

namespace {

const std::vector<std::string> kBasicWords = {"which", "one", "of", "the", "following"};

TriggerBase default_base() { return build_trigger_base(kBasicWords, 2); }

bool base_contains(const TriggerBase& b, const std::string& phrase) {
    auto toks = match_tokens(phrase);
    return std::find(b.triggers.begin(), b.triggers.end(), toks) != b.triggers.end();
}

std::multiset<std::string> token_multiset(const std::string& text) {
    std::multiset<std::string> out;
    for (const auto& t : match_tokens(text)) out.insert(t);
    return out;
}

}  // namespace

TEST_CASE("trigger base contains the canonical and recombined forms") {
    TriggerBase b = default_base();
    CHECK(base_contains(b, "which of the following"));
    CHECK(base_contains(b, "of which the following"));
    CHECK(base_contains(b, "which of following"));
    CHECK(base_contains(b, "which one of the following"));
    CHECK_FALSE(base_contains(b, "which"));  // size >= 2 only
}

TEST_CASE("two basic words enumerate both orders") {
    TriggerBase b = build_trigger_base({"a", "b"}, 0);
    REQUIRE(b.triggers.size() == 2);
    CHECK(base_contains(b, "a b"));
    CHECK(base_contains(b, "b a"));
}

TEST_CASE("trigger list is sorted longest first then lexicographic") {
    TriggerBase b = default_base();
    for (size_t i = 1; i < b.triggers.size(); ++i) {
        const auto& prev = b.triggers[i - 1];
        const auto& cur = b.triggers[i];
        bool ok = prev.size() > cur.size() || (prev.size() == cur.size() && prev <= cur);
        CHECK(ok);
    }
    // 5 basic words: P(5,2)+P(5,3)+P(5,4)+P(5,5) = 20+60+120+120.
    CHECK(b.triggers.size() == 320);
}

TEST_CASE("extra triggers must contain a basic word") {
    CHECK_THROWS_WITH_AS(build_trigger_base(kBasicWords, 2, {"best answer"}),
                         doctest::Contains("no basic word"), Error);
    TriggerBase b = build_trigger_base(kBasicWords, 2, {"which statement"});
    CHECK(base_contains(b, "which statement"));
}

TEST_CASE("find_trigger locates the leading trigger span") {
    TriggerBase b = default_base();
    auto span = find_trigger("Which one of the following most weakens the arguments above?", b);
    REQUIRE(span.has_value());
    CHECK(span->start == 0);
    CHECK(span->end == 5);  // covers "Which one of the following"
}

TEST_CASE("tolerance absorbs extra interior words") {
    TriggerBase b = default_base();
    auto span = find_trigger("Of the following claims, which is best?", b);
    REQUIRE(span.has_value());
    CHECK(span->start == 0);
    CHECK(span->end == 5);  // covers "Of the following claims, which"
}

TEST_CASE("no basic words means no trigger") {
    TriggerBase b = default_base();
    CHECK_FALSE(find_trigger("Is the sky blue?", b).has_value());
}

TEST_CASE("span extras never exceed the tolerance") {
    TriggerBase b = default_base();
    const char* questions[] = {
        "Which one of the following most weakens the arguments above?",
        "Of the following claims, which is best?",
        "Each of the following, if true, helps except one: which?",
        "The author would agree with which one of the following statements?",
    };
    for (const char* q : questions) {
        auto span = find_trigger(q, b);
        if (!span) continue;
        size_t longest_trigger = 0;
        for (const auto& t : b.triggers)
            if (t.size() <= span->length()) { longest_trigger = std::max(longest_trigger, t.size()); }
        CHECK(span->length() <= longest_trigger + static_cast<size_t>(b.tolerance));
    }
}

TEST_CASE("merge_qa reproduces the worked substitution") {
    TriggerBase b = default_base();
    QAPair qa = merge_qa("Which one of the following most weakens the arguments above?", "[Option]", b);
    CHECK(qa.text == "[Option] most weakens the arguments above");
    CHECK_FALSE(qa.fallback_used);
}

TEST_CASE("merge_qa falls back to concatenation without a trigger") {
    TriggerBase b = default_base();
    QAPair qa = merge_qa("Is the sky blue?", "Yes it is.", b);
    CHECK(qa.fallback_used);
    CHECK(qa.text == "Is the sky blue? Yes it is.");
}

TEST_CASE("merge_qa keeps every non-trigger token") {
    TriggerBase b = default_base();
    const char* questions[] = {
        "Which one of the following most weakens the arguments above?",
        "The data supports which of the following conclusions about birds?",
        "Of the following claims, which is best supported here?",
        "Researchers found that which one of following applies to Mars?",
    };
    for (const char* q : questions) {
        QAPair qa = merge_qa(q, "OPT", b);
        REQUIRE(qa.trigger_span.has_value());
        auto raw = split_whitespace(q);
        std::multiset<std::string> expected;
        for (size_t i = 0; i < raw.size(); ++i) {
            if (i >= qa.trigger_span->start && i < qa.trigger_span->end) continue;
            std::string norm = normalize_token(raw[i]);
            if (!norm.empty()) expected.insert(norm);
        }
        std::multiset<std::string> actual = token_multiset(qa.text);
        actual.erase("opt");
        CHECK(actual == expected);
    }
}

TEST_CASE("replacement casing follows the option text") {
    TriggerBase b = default_base();
    QAPair qa = merge_qa("Which of the following is TRUE of cats?", "ONLY Cats purr", b);
    CHECK(qa.text.rfind("ONLY Cats purr", 0) == 0);
    CHECK(qa.text == "ONLY Cats purr is TRUE of cats");
}

TEST_CASE("build_sequence applies the type prefix") {
    TypeCatalog catalog = TypeCatalog::builtin();
    TriggerBase b = default_base();
    Example e;
    e.id = "x";
    e.context = "A cat sat.";
    e.question = "Which one of the following must be true?";
    e.options = {"opt a", "opt b", "opt c", "opt d"};
    e.label = 0;
    e.rtype = 3;
    InputSequence seq = build_sequence(e, catalog, b, 0);
    CHECK(seq.prefix == "This is the task of Weaken");
    e.rtype = 16;
    seq = build_sequence(e, catalog, b, 0);
    CHECK(seq.prefix == "This is the task of Others");

    InputSequence again = build_sequence(e, catalog, b, 0);
    CHECK(again.full == seq.full);
    CHECK(again.tokens == seq.tokens);

    e.rtype.reset();
    CHECK_THROWS_AS(build_sequence(e, catalog, b, 0), Error);
}

TEST_CASE("sequences cap at max length with context truncated first") {
    TypeCatalog catalog = TypeCatalog::builtin();
    TriggerBase b = default_base();
    Example e;
    e.id = "long";
    std::string ctx;
    for (int i = 0; i < 400; ++i) ctx += "word" + std::to_string(i) + " ";
    e.context = ctx;
    e.question = "Which one of the following must be true?";
    e.options = {"first option text", "b", "c", "d"};
    e.label = 0;
    e.rtype = 5;

    InputSequence seq = build_sequence(e, catalog, b, 0);
    CHECK(seq.tokens.size() == kDefaultMaxSeqLen);
    // The Q-A pair survives untouched; only context tokens were dropped.
    CHECK(seq.qa_span.length() == model_tokens(seq.qa.text).size());
    CHECK(seq.tokens[seq.qa_span.start] == "first");
    // Context keeps its earliest tokens.
    CHECK(seq.tokens[seq.context_span.start] == "word0");
}

TEST_CASE("spans index the expected token ranges") {
    TypeCatalog catalog = TypeCatalog::builtin();
    TriggerBase b = default_base();
    Example e;
    e.id = "x";
    e.context = "Alpha beta.";
    e.question = "Which of the following holds?";
    e.options = {"gamma", "b", "c", "d"};
    e.label = 0;
    e.rtype = 2;
    InputSequence seq = build_sequence(e, catalog, b, 0);
    CHECK(seq.tokens[0] == "<s>");
    CHECK(seq.tokens[seq.prefix_span.end] == "</s>");
    std::vector<std::string> ctx(seq.tokens.begin() + static_cast<long>(seq.context_span.start),
                                 seq.tokens.begin() + static_cast<long>(seq.context_span.end));
    CHECK(ctx == model_tokens("Alpha beta."));
    std::vector<std::string> qa(seq.tokens.begin() + static_cast<long>(seq.qa_span.start),
                                seq.tokens.begin() + static_cast<long>(seq.qa_span.end));
    CHECK(qa == model_tokens(seq.qa.text));
    CHECK(seq.tokens.back() == "</s>");
}
