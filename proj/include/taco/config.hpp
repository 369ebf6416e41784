#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "taco/autodiff.hpp"
#include "taco/text_graph.hpp"

namespace taco {

// Every knob that affects a training run, serializable so a run can be
// reproduced exactly from its config hash.
struct TrainConfig {
    int epochs = 30;
    int batch_size = 1;
    double learning_rate = 5e-6;       // external pretrained-adapter path
    double desk_learning_rate = 1e-3;  // desk-scale trainable encoder
    double margin = 12.0;              // contrastive margin
    double contrastive_weight = 0.2;   // trade-off between the two losses
    int max_seq_len = 256;
    std::vector<uint64_t> seeds = {42, 12, 23, 234, 1234};

    // Desk-scale architecture. 48 divides evenly by the 6 graph-transformer
    // heads; see the README note on the hidden-size default.
    int hidden_dim = 48;
    int encoder_layers = 2;
    int encoder_heads = 4;
    int ffn_dim = 96;
    int gt_layers = 4;
    int gt_heads = 6;
    bool gt_value_projection = false;  // attend over raw previous-layer embeddings
    std::string activation = "softplus";

    int type_embedding_dim = 32;
    std::string type_embedding_file;  // empty = deterministic fixture embeddings

    std::string bias_mode = "mask";  // or "additive"
    double overlap_threshold = 0.5;
    bool jaccard_overlap = false;
    int trigger_tolerance = 2;

    void validate() const;
    GraphConfig graph_config() const;
    ad::Activation activation_kind() const { return ad::parse_activation(activation); }
    BiasMode bias_mode_kind() const;

    std::string serialize() const;  // canonical sorted-key JSON
    std::string hash() const;       // fnv1a64 of the canonical form

    static TrainConfig from_json_text(const std::string& text);
    static TrainConfig load(const std::string& path);
    void save(const std::string& path) const;
};

}  // namespace taco
