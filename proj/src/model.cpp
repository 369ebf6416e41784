#include "taco/model.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "taco/common.hpp"

namespace taco {

std::array<double, 4> softmax4(const std::array<double, 4>& logits) {
    double mx = *std::max_element(logits.begin(), logits.end());
    std::array<double, 4> z{};
    double sum = 0.0;
    for (int i = 0; i < 4; ++i) {
        z[static_cast<size_t>(i)] = std::exp(logits[static_cast<size_t>(i)] - mx);
        sum += z[static_cast<size_t>(i)];
    }
    for (double& v : z) v /= sum;
    return z;
}

double mc_loss(const std::array<double, 4>& z, int label) {
    if (label < 0 || label >= 4) throw Error("mc_loss: label out of range");
    double p = z[static_cast<size_t>(label)];
    constexpr double kEps = 1e-12;
    if (p < kEps) {
        std::cerr << "mc_loss: probability underflow (" << p << "), clamping to " << kEps << "\n";
        p = kEps;
    }
    return -std::log(p);
}

double contrastive_loss(double score_pos, const std::vector<double>& score_neg, double margin) {
    if (margin <= 0.0) throw Error("contrastive_loss: margin must be > 0");
    if (score_neg.empty()) throw Error("contrastive_loss: no negative scores");
    double worst = *std::max_element(score_neg.begin(), score_neg.end());
    return std::max(0.0, margin - score_pos + worst);
}

double total_loss(double loss_mc, double loss_con, double contrastive_weight) {
    if (contrastive_weight < 0.0) throw Error("total_loss: weight must be >= 0");
    return loss_mc + contrastive_weight * loss_con;
}

PooledFeatures encode_and_pool(ad::Tape& tape, ad::Var token_matrix, const InputSequence& seq) {
    if (seq.context_span.length() == 0 || seq.qa_span.length() == 0)
        throw Error("encode_and_pool: empty span");
    PooledFeatures out;
    out.context = tape.mean_rows(token_matrix, seq.context_span.start, seq.context_span.end);
    out.qa = tape.mean_rows(token_matrix, seq.qa_span.start, seq.qa_span.end);
    out.sequence = tape.mean_rows(token_matrix, 0, static_cast<size_t>(token_matrix->value.rows));
    return out;
}

ad::Var init_node_features(ad::Tape& tape, const TextGraph& graph, ad::Var token_matrix,
                           ad::Var sequence_feature) {
    std::vector<ad::Var> rows;
    rows.push_back(sequence_feature);
    for (const auto& u : graph.units) {
        if (u.token_span.length() == 0) throw Error("init_node_features: unit with empty span");
        if (u.token_span.end > static_cast<size_t>(token_matrix->value.rows))
            throw Error("init_node_features: unit span exceeds token matrix");
        rows.push_back(tape.mean_rows(token_matrix, u.token_span.start, u.token_span.end));
    }
    return tape.concat_rows(rows);
}

namespace {

Mat bias_matrix(const TextGraph& graph) {
    int n = graph.node_count();
    Mat m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m.at(i, j) = graph.bias[static_cast<size_t>(i)][static_cast<size_t>(j)];
    return m;
}

}  // namespace

ad::Var graph_attention(ad::Tape& tape, ad::Var states, const TextGraph& graph,
                        const GraphLayerWeights& w, int head) {
    const auto& wq = w.w_query.at(static_cast<size_t>(head));
    const auto& wk = w.w_key.at(static_cast<size_t>(head));
    int dh = wq->value.rows;
    double scale = 1.0 / std::sqrt(static_cast<double>(dh));
    ad::Var q = tape.matmul_nt(states, wq);
    ad::Var k = tape.matmul_nt(states, wk);
    ad::Var logits = tape.affine(tape.matmul_nt(q, k), scale, 0.0);
    Mat bias = bias_matrix(graph);
    return tape.softmax_rows(logits, &bias);
}

ad::Var graph_layer(ad::Tape& tape, ad::Var states, const TextGraph& graph,
                    const GraphLayerWeights& w, ad::Activation act, bool value_projection) {
    const int heads = static_cast<int>(w.w_query.size());
    const int d = states->value.cols;
    const int dh = d / heads;
    ad::Var self_term = tape.matmul_nt(states, w.w_self);
    std::vector<ad::Var> head_updates;
    for (int h = 0; h < heads; ++h) {
        ad::Var attn = graph_attention(tape, states, graph, w, h);
        // Self attention mass is dropped from the aggregation; the node's own
        // contribution enters through W_self only.
        ad::Var attn_off = tape.zero_diag(attn);
        ad::Var values;
        if (value_projection)
            values = tape.matmul_nt(states, w.w_value.at(static_cast<size_t>(h)));
        else
            values = tape.slice_cols(states, static_cast<size_t>(h) * static_cast<size_t>(dh),
                                     static_cast<size_t>(h + 1) * static_cast<size_t>(dh));
        head_updates.push_back(tape.matmul(attn_off, values));
    }
    ad::Var update = tape.matmul_nt(tape.concat_cols(head_updates), w.w_out);
    return tape.act(tape.add(self_term, update), act);
}

TacoModel::TacoModel(TrainConfig cfg, TypeCatalog catalog, TriggerBase triggers,
                     TypeEmbeddings type_emb, Vocab vocab, uint64_t init_seed)
    : cfg_(std::move(cfg)),
      catalog_(std::move(catalog)),
      triggers_(std::move(triggers)),
      type_emb_(std::move(type_emb)) {
    cfg_.validate();
    catalog_.validate();
    type_emb_.validate();
    if (type_emb_.dim() != cfg_.type_embedding_dim)
        throw Error("model: type embedding dim " + std::to_string(type_emb_.dim()) +
                    " does not match config " + std::to_string(cfg_.type_embedding_dim));
    encoder_ = std::make_unique<DeskEncoder>(cfg_, std::move(vocab));
    init_params(init_seed);
}

void TacoModel::init_params(uint64_t seed) {
    Rng rng(seed);
    encoder_->init_params(params_, rng);
    const int d = cfg_.hidden_dim;
    const int dh = d / cfg_.gt_heads;
    double w_std = 1.0 / std::sqrt(static_cast<double>(d));
    for (int l = 0; l < cfg_.gt_layers; ++l) {
        std::string p = "gt.layer" + std::to_string(l) + ".";
        params_.create(p + "W_self", d, d);
        params_.init_normal(p + "W_self", rng, w_std);
        for (int h = 0; h < cfg_.gt_heads; ++h) {
            std::string hp = p + "head" + std::to_string(h) + ".";
            params_.create(hp + "Wq", dh, d);
            params_.init_normal(hp + "Wq", rng, w_std);
            params_.create(hp + "Wk", dh, d);
            params_.init_normal(hp + "Wk", rng, w_std);
            if (cfg_.gt_value_projection) {
                params_.create(hp + "Wv", dh, d);
                params_.init_normal(hp + "Wv", rng, w_std);
            }
        }
        params_.create(p + "Wo", d, d);
        params_.init_normal(p + "Wo", rng, w_std);
    }
    params_.create("score.W", 1, 4 * d);
    params_.init_normal("score.W", rng, 1.0 / std::sqrt(static_cast<double>(4 * d)));
    params_.create("type_proj.W", cfg_.type_embedding_dim, d);
    params_.init_normal("type_proj.W", rng, w_std);
}

GraphLayerWeights TacoModel::layer_weights(ad::Tape& tape, int layer, bool train) {
    GraphLayerWeights w;
    std::string p = "gt.layer" + std::to_string(layer) + ".";
    w.w_self = params_.use(tape, p + "W_self", train);
    for (int h = 0; h < cfg_.gt_heads; ++h) {
        std::string hp = p + "head" + std::to_string(h) + ".";
        w.w_query.push_back(params_.use(tape, hp + "Wq", train));
        w.w_key.push_back(params_.use(tape, hp + "Wk", train));
        if (cfg_.gt_value_projection) w.w_value.push_back(params_.use(tape, hp + "Wv", train));
    }
    w.w_out = params_.use(tape, p + "Wo", train);
    return w;
}

ExampleForward TacoModel::forward(ad::Tape& tape, const Example& example, bool train) {
    if (!example.rtype) throw Error("forward: example " + example.id + " has no rtype");
    GraphConfig gcfg = cfg_.graph_config();
    ad::Activation act = cfg_.activation_kind();

    std::vector<ad::Var> logits;
    std::array<std::vector<double>, 4> features;
    ad::Var gold_global;  // anchor for the contrastive term
    for (int opt = 0; opt < kNumOptions; ++opt) {
        InputSequence seq = build_sequence(example, catalog_, triggers_, opt, cfg_.max_seq_len);
        TextGraph graph = build_sequence_graph(seq, gcfg);
        ad::Var tokens = encoder_->encode(tape, params_, seq.tokens, train);
        PooledFeatures pooled = encode_and_pool(tape, tokens, seq);
        ad::Var states = init_node_features(tape, graph, tokens, pooled.sequence);
        for (int l = 0; l < cfg_.gt_layers; ++l)
            states = graph_layer(tape, states, graph, layer_weights(tape, l, train), act,
                                 cfg_.gt_value_projection);
        ad::Var global = tape.slice_rows(states, 0, 1);
        if (opt == example.label) gold_global = global;
        ad::Var feature = tape.concat_cols({global, pooled.context, pooled.qa, pooled.sequence});
        features[static_cast<size_t>(opt)] = feature->value.data;
        logits.push_back(tape.matmul_nt(feature, params_.use(tape, "score.W", train)));
    }

    ad::Var logit_row = tape.concat_cols(logits);
    ad::Var log_probs = tape.log_softmax_row(logit_row);
    ad::Var loss_mc = tape.affine(tape.pick(log_probs, 0, example.label), -1.0, 0.0);

    // Type-aware contrastive term, anchored at the gold option's global node.
    ad::Var projected = tape.matmul_nt(gold_global, params_.use(tape, "type_proj.W", train));
    int gt = *example.rtype;
    auto type_row = [&](int t) {
        Mat row(1, type_emb_.dim());
        for (int c = 0; c < type_emb_.dim(); ++c) row.at(0, c) = type_emb_.rows.at(t, c);
        return tape.constant(row);  // frozen: no gradient ever reaches the table
    };
    ad::Var score_pos = tape.matmul_nt(projected, type_row(gt));
    std::vector<ad::Var> neg_scores;
    for (int t = 0; t < kNumTypes; ++t) {
        if (t == gt) continue;
        neg_scores.push_back(tape.matmul_nt(projected, type_row(t)));
    }
    ad::Var worst_neg = tape.max_row(tape.concat_cols(neg_scores));
    ad::Var hinge_arg = tape.affine(tape.sub(worst_neg, score_pos), 1.0, cfg_.margin);
    ad::Var loss_con = tape.relu(hinge_arg);
    ad::Var total = tape.add(loss_mc, tape.affine(loss_con, cfg_.contrastive_weight, 0.0));

    ExampleForward out;
    for (int i = 0; i < kNumOptions; ++i) out.scores.logits[static_cast<size_t>(i)] = ad::scalar(logits[static_cast<size_t>(i)]);
    out.scores.probs = softmax4(out.scores.logits);
    out.scores.features = std::move(features);
    out.predicted = static_cast<int>(std::distance(
        out.scores.probs.begin(), std::max_element(out.scores.probs.begin(), out.scores.probs.end())));
    out.loss_mc = ad::scalar(loss_mc);
    out.loss_con = ad::scalar(loss_con);
    out.loss_total = ad::scalar(total);
    out.hinge_argument = ad::scalar(hinge_arg);
    out.loss_var = total;
    return out;
}

int TacoModel::predict(const Example& example) {
    ad::Tape tape;
    ExampleForward f = forward(tape, example, false);
    params_.clear_active();
    return f.predicted;
}

double TacoModel::train_step(const Example& example, AdamOptimizer& opt) {
    ad::Tape tape;
    ExampleForward f = forward(tape, example, true);
    if (!std::isfinite(f.loss_total))
        throw Error("non-finite loss on example " + example.id);
    tape.backward(f.loss_var);
    opt.step(params_);
    return f.loss_total;
}

}  // namespace taco
