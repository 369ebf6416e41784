#pragma once

#include <set>
#include <string>
#include <vector>

#include "taco/reconstructor.hpp"

namespace taco {

enum class GraphPart { Context, QaPair };

// A delimiter-free text segment acting as one graph node. token_span is the
// unit's location in the enclosing token stream (used to pool node features).
struct TextUnit {
    int index = 0;
    std::string text;
    GraphPart part = GraphPart::Context;
    std::set<std::string> word_set;  // lowercase, stopwords excluded
    TokenSpan token_span;
};

enum class EdgeKind { Order, Overlap, Global };

struct Edge {
    int a = 0;
    int b = 0;
    EdgeKind kind = EdgeKind::Order;

    bool operator<(const Edge& o) const {
        if (a != o.a) return a < o.a;
        if (b != o.b) return b < o.b;
        return kind < o.kind;
    }
    bool operator==(const Edge&) const = default;
};

enum class BiasMode { Mask, Additive };

constexpr double kMaskValue = -1e9;

// Node 0 is the global node; context units follow, then Q-A-pair units.
// The bias matrix is symmetric and treats any edge (or the diagonal) as
// connected.
struct TextGraph {
    std::vector<TextUnit> units;  // without the global node
    std::set<Edge> edges;         // a (with a < b), kind
    std::vector<std::vector<double>> bias;  // (units+1) x (units+1)
    double threshold = 0.5;
    BiasMode mode = BiasMode::Mask;

    int node_count() const { return static_cast<int>(units.size()) + 1; }
    bool connected(int i, int j) const;
};

struct GraphConfig {
    double overlap_threshold = 0.5;
    BiasMode bias_mode = BiasMode::Mask;
    bool jaccard_overlap = false;  // default denominator is the smaller set
    std::vector<std::string> punctuation_delims;
    std::set<std::string> connective_delims;
    std::set<std::string> stopwords;

    static GraphConfig defaults();
};

const std::set<std::string>& default_stopwords();
std::set<std::string> load_stopwords(const std::string& path);
void save_stopwords(const std::set<std::string>& words, const std::string& path);

// Splits a token stream into maximal delimiter-free units. All-delimiter
// input collapses to a single unit covering the whole stream.
std::vector<TextUnit> split_units(const std::vector<std::string>& tokens, GraphPart part,
                                  const GraphConfig& cfg, size_t token_offset = 0);
std::vector<TextUnit> split_units(const std::string& text, GraphPart part, const GraphConfig& cfg);

// |intersection| / min(|a|,|b|) by default, Jaccard when configured; 0 when
// either word set is empty.
double overlap_ratio(const TextUnit& a, const TextUnit& b, bool jaccard = false);

TextGraph build_graph(const std::vector<TextUnit>& context_units,
                      const std::vector<TextUnit>& qa_units, const GraphConfig& cfg);

// Builds both parts of a reconstructed sequence and joins them.
TextGraph build_sequence_graph(const InputSequence& seq, const GraphConfig& cfg);

std::string dump_graph(const TextGraph& g);

}  // namespace taco
