#include "taco/text_graph.hpp"

#include <algorithm>

#include <json.hpp>

#include "taco/common.hpp"

namespace taco {

using nlohmann::json;

const std::set<std::string>& default_stopwords() {
    static const std::set<std::string> words = {
        "a",    "an",   "and",  "are",   "as",    "at",   "be",    "been",  "by",   "can",
        "could", "do",  "does", "for",   "from",  "had",  "has",   "have",  "he",   "her",
        "his",  "i",    "in",   "is",    "it",    "its",  "may",   "might", "most", "must",
        "not",  "of",   "on",   "one",   "or",    "our",  "she",   "should", "some", "such",
        "than", "that", "the",  "their", "them",  "there", "these", "they",  "this", "those",
        "to",   "was",  "we",   "were",  "what",  "which", "while", "who",   "will", "with",
        "would", "you",
    };
    return words;
}

std::set<std::string> load_stopwords(const std::string& path) {
    std::set<std::string> out;
    for (const auto& line : split_whitespace(read_file(path))) {
        std::string norm = normalize_token(line);
        if (!norm.empty()) out.insert(norm);
    }
    return out;
}

void save_stopwords(const std::set<std::string>& words, const std::string& path) {
    std::string out;
    for (const auto& w : words) out += w + "\n";
    write_file(path, out);
}

GraphConfig GraphConfig::defaults() {
    GraphConfig cfg;
    cfg.punctuation_delims = {".", ";", ":", ",", "?"};
    cfg.connective_delims = {"because", "therefore", "thus",    "if",    "then",
                             "but",     "although",  "however", "since", "so"};
    cfg.stopwords = default_stopwords();
    return cfg;
}

bool TextGraph::connected(int i, int j) const {
    if (i == j) return true;
    Edge probe{std::min(i, j), std::max(i, j), EdgeKind::Order};
    for (auto it = edges.lower_bound(probe); it != edges.end(); ++it) {
        if (it->a != probe.a || it->b != probe.b) break;
        return true;
    }
    return false;
}

namespace {

bool is_delimiter(const std::string& token, const GraphConfig& cfg) {
    if (cfg.connective_delims.count(token)) return true;
    for (const auto& p : cfg.punctuation_delims)
        if (token == p) return true;
    return false;
}

TextUnit make_unit(const std::vector<std::string>& tokens, size_t begin, size_t end,
                   GraphPart part, const GraphConfig& cfg, size_t token_offset) {
    TextUnit u;
    u.part = part;
    u.token_span = {token_offset + begin, token_offset + end};
    std::vector<std::string> words(tokens.begin() + static_cast<long>(begin),
                                   tokens.begin() + static_cast<long>(end));
    u.text = join(words, " ");
    for (const auto& t : words) {
        std::string norm = normalize_token(t);
        if (norm.empty()) continue;
        if (cfg.stopwords.count(norm)) continue;
        u.word_set.insert(norm);
    }
    return u;
}

}  // namespace

std::vector<TextUnit> split_units(const std::vector<std::string>& tokens, GraphPart part,
                                  const GraphConfig& cfg, size_t token_offset) {
    if (tokens.empty()) throw Error("split_units: empty token stream");
    std::vector<TextUnit> units;
    size_t begin = 0;
    bool in_unit = false;
    for (size_t i = 0; i < tokens.size(); ++i) {
        if (is_delimiter(tokens[i], cfg)) {
            if (in_unit) {
                units.push_back(make_unit(tokens, begin, i, part, cfg, token_offset));
                in_unit = false;
            }
        } else if (!in_unit) {
            begin = i;
            in_unit = true;
        }
    }
    if (in_unit) units.push_back(make_unit(tokens, begin, tokens.size(), part, cfg, token_offset));
    if (units.empty()) {
        // Degenerate input: everything was a delimiter. Keep one unit so the
        // part still contributes a node.
        units.push_back(make_unit(tokens, 0, tokens.size(), part, cfg, token_offset));
    }
    for (size_t i = 0; i < units.size(); ++i) units[i].index = static_cast<int>(i);
    return units;
}

std::vector<TextUnit> split_units(const std::string& text, GraphPart part, const GraphConfig& cfg) {
    if (text.empty()) throw Error("split_units: empty text");
    return split_units(model_tokens(text), part, cfg);
}

double overlap_ratio(const TextUnit& a, const TextUnit& b, bool jaccard) {
    if (a.word_set.empty() || b.word_set.empty()) return 0.0;
    size_t inter = 0;
    for (const auto& w : a.word_set)
        if (b.word_set.count(w)) ++inter;
    if (jaccard) {
        size_t uni = a.word_set.size() + b.word_set.size() - inter;
        return static_cast<double>(inter) / static_cast<double>(uni);
    }
    size_t denom = std::min(a.word_set.size(), b.word_set.size());
    return static_cast<double>(inter) / static_cast<double>(denom);
}

TextGraph build_graph(const std::vector<TextUnit>& context_units,
                      const std::vector<TextUnit>& qa_units, const GraphConfig& cfg) {
    if (context_units.empty() || qa_units.empty())
        throw Error("build_graph: each part needs at least one unit");

    TextGraph g;
    g.threshold = cfg.overlap_threshold;
    g.mode = cfg.bias_mode;
    g.units = context_units;
    g.units.insert(g.units.end(), qa_units.begin(), qa_units.end());
    for (size_t i = 0; i < g.units.size(); ++i) g.units[i].index = static_cast<int>(i) + 1;

    const int nc = static_cast<int>(context_units.size());
    const int nq = static_cast<int>(qa_units.size());
    const int n = nc + nq + 1;

    // Order chains within each part.
    for (int i = 1; i < nc; ++i) g.edges.insert({i, i + 1, EdgeKind::Order});
    for (int i = nc + 1; i < nc + nq; ++i) g.edges.insert({i, i + 1, EdgeKind::Order});

    // Overlap edges within and across parts, never touching the global node.
    for (int i = 0; i < nc + nq; ++i) {
        for (int j = i + 1; j < nc + nq; ++j) {
            double r = overlap_ratio(g.units[static_cast<size_t>(i)],
                                     g.units[static_cast<size_t>(j)], cfg.jaccard_overlap);
            if (r >= cfg.overlap_threshold) g.edges.insert({i + 1, j + 1, EdgeKind::Overlap});
        }
    }

    for (int i = 1; i < n; ++i) g.edges.insert({0, i, EdgeKind::Global});

    g.bias.assign(static_cast<size_t>(n), std::vector<double>(static_cast<size_t>(n)));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            bool conn = g.connected(i, j);
            double v;
            if (cfg.bias_mode == BiasMode::Mask)
                v = conn ? 0.0 : kMaskValue;
            else
                v = conn ? 1.0 : 0.0;
            g.bias[static_cast<size_t>(i)][static_cast<size_t>(j)] = v;
        }
    }
    return g;
}

TextGraph build_sequence_graph(const InputSequence& seq, const GraphConfig& cfg) {
    std::vector<std::string> ctx_tokens(seq.tokens.begin() + static_cast<long>(seq.context_span.start),
                                        seq.tokens.begin() + static_cast<long>(seq.context_span.end));
    std::vector<std::string> qa_tokens(seq.tokens.begin() + static_cast<long>(seq.qa_span.start),
                                       seq.tokens.begin() + static_cast<long>(seq.qa_span.end));
    auto ctx_units = split_units(ctx_tokens, GraphPart::Context, cfg, seq.context_span.start);
    auto qa_units = split_units(qa_tokens, GraphPart::QaPair, cfg, seq.qa_span.start);
    return build_graph(ctx_units, qa_units, cfg);
}

std::string dump_graph(const TextGraph& g) {
    std::string out = "{\"nodes\":[\n";
    out += "{\"index\":0,\"part\":\"global\",\"text\":\"\"}";
    for (const auto& u : g.units) {
        json j;
        j["index"] = u.index;
        j["part"] = u.part == GraphPart::Context ? "context" : "qa_pair";
        j["text"] = u.text;
        out += ",\n" + j.dump();
    }
    out += "\n],\"edges\":[\n";
    bool first = true;
    for (const auto& e : g.edges) {
        const char* kind = e.kind == EdgeKind::Order    ? "order"
                           : e.kind == EdgeKind::Overlap ? "overlap"
                                                         : "global";
        out += first ? "" : ",\n";
        out += "[" + std::to_string(e.a) + "," + std::to_string(e.b) + ",\"" + kind + "\"]";
        first = false;
    }
    out += "\n],\"threshold\":" + json(g.threshold).dump() + "}\n";
    return out;
}

}  // namespace taco
