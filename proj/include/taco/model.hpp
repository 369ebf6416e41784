#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "taco/autodiff.hpp"
#include "taco/catalog.hpp"
#include "taco/config.hpp"
#include "taco/dataset.hpp"
#include "taco/encoder.hpp"
#include "taco/params.hpp"
#include "taco/reconstructor.hpp"
#include "taco/text_graph.hpp"
#include "taco/type_embeddings.hpp"

namespace taco {

// ---- Closed-form loss helpers (plain doubles, shared with the tests) ----

std::array<double, 4> softmax4(const std::array<double, 4>& logits);

// -log z[y]; z entries clamped at epsilon with a stderr note when hit.
double mc_loss(const std::array<double, 4>& z, int label);

// max{0, margin - pos + max(neg)}.
double contrastive_loss(double score_pos, const std::vector<double>& score_neg, double margin);

double total_loss(double loss_mc, double loss_con, double contrastive_weight);

struct OptionScores {
    std::array<double, 4> probs{};
    std::array<double, 4> logits{};
    std::array<std::vector<double>, 4> features;  // [h_g; h_C; h_P; h_S] per option, 4d each
};

// ---- Differentiable building blocks (exposed for unit tests) ----

struct PooledFeatures {
    ad::Var context;   // mean over the context span
    ad::Var qa;        // mean over the Q-A-pair span
    ad::Var sequence;  // mean over the full token sequence
};

PooledFeatures encode_and_pool(ad::Tape& tape, ad::Var token_matrix, const InputSequence& seq);

// Node states: row 0 = global node (h_S), unit rows = per-span token means.
ad::Var init_node_features(ad::Tape& tape, const TextGraph& graph, ad::Var token_matrix,
                           ad::Var sequence_feature);

struct GraphLayerWeights {
    ad::Var w_self;                // d x d
    std::vector<ad::Var> w_query;  // per head, dh x d
    std::vector<ad::Var> w_key;    // per head, dh x d
    std::vector<ad::Var> w_value;  // optional, per head, dh x d
    ad::Var w_out;                 // d x d
};

// Eq-6 attention for one head: softmax(Q K^T / sqrt(dh) + M).
ad::Var graph_attention(ad::Tape& tape, ad::Var states, const TextGraph& graph,
                        const GraphLayerWeights& w, int head);

// One graph-transformer layer: sigma(W_self e + W_out concat_h(sum_{k!=j} a_jk e_k)).
ad::Var graph_layer(ad::Tape& tape, ad::Var states, const TextGraph& graph,
                    const GraphLayerWeights& w, ad::Activation act, bool value_projection);

// ---- The full model ----

struct ExampleForward {
    OptionScores scores;
    double loss_mc = 0.0;
    double loss_con = 0.0;
    double loss_total = 0.0;
    double hinge_argument = 0.0;  // margin - score_pos + max(score_neg), pre-clamp
    int predicted = 0;
    ad::Var loss_var;  // set when a tape was provided
};

class TacoModel {
public:
    TacoModel(TrainConfig cfg, TypeCatalog catalog, TriggerBase triggers, TypeEmbeddings type_emb,
              Vocab vocab, uint64_t init_seed);

    // Forward for all 4 options of one example. With train=true the result
    // carries a loss Var on `tape` ready for backward().
    ExampleForward forward(ad::Tape& tape, const Example& example, bool train);

    int predict(const Example& example);
    double train_step(const Example& example, AdamOptimizer& opt);

    ParamStore& params() { return params_; }
    const ParamStore& params() const { return params_; }
    const TrainConfig& config() const { return cfg_; }
    const TypeCatalog& catalog() const { return catalog_; }
    const TriggerBase& triggers() const { return triggers_; }
    const TypeEmbeddings& type_embeddings() const { return type_emb_; }
    const Vocab& vocab() const { return encoder_->vocab(); }

    GraphLayerWeights layer_weights(ad::Tape& tape, int layer, bool train);

private:
    void init_params(uint64_t seed);

    TrainConfig cfg_;
    TypeCatalog catalog_;
    TriggerBase triggers_;
    TypeEmbeddings type_emb_;
    ParamStore params_;
    std::unique_ptr<DeskEncoder> encoder_;
};

}  // namespace taco
