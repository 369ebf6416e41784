#include "taco/config.hpp"

#include <json.hpp>

#include "taco/common.hpp"

namespace taco {

using nlohmann::json;

void TrainConfig::validate() const {
    if (epochs < 1) throw Error("config: epochs must be >= 1");
    if (batch_size != 1) throw Error("config: only batch_size 1 is supported");
    if (margin <= 0.0) throw Error("config: margin must be > 0");
    if (contrastive_weight < 0.0) throw Error("config: contrastive_weight must be >= 0");
    if (hidden_dim < 2) throw Error("config: hidden_dim too small");
    if (encoder_heads < 1 || hidden_dim % encoder_heads != 0)
        throw Error("config: encoder_heads must divide hidden_dim");
    if (gt_heads < 1 || hidden_dim % gt_heads != 0)
        throw Error("config: gt_heads must divide hidden_dim");
    if (gt_layers < 1) throw Error("config: gt_layers must be >= 1");
    if (max_seq_len < 8) throw Error("config: max_seq_len too small");
    if (type_embedding_dim < 1) throw Error("config: type_embedding_dim must be >= 1");
    if (seeds.empty()) throw Error("config: at least one seed required");
    ad::parse_activation(activation);
    bias_mode_kind();
}

BiasMode TrainConfig::bias_mode_kind() const {
    if (bias_mode == "mask") return BiasMode::Mask;
    if (bias_mode == "additive") return BiasMode::Additive;
    throw Error("config: unknown bias_mode: " + bias_mode);
}

GraphConfig TrainConfig::graph_config() const {
    GraphConfig g = GraphConfig::defaults();
    g.overlap_threshold = overlap_threshold;
    g.bias_mode = bias_mode_kind();
    g.jaccard_overlap = jaccard_overlap;
    return g;
}

std::string TrainConfig::serialize() const {
    json j;
    j["activation"] = activation;
    j["batch_size"] = batch_size;
    j["bias_mode"] = bias_mode;
    j["contrastive_weight"] = contrastive_weight;
    j["desk_learning_rate"] = desk_learning_rate;
    j["encoder_heads"] = encoder_heads;
    j["encoder_layers"] = encoder_layers;
    j["epochs"] = epochs;
    j["ffn_dim"] = ffn_dim;
    j["gt_heads"] = gt_heads;
    j["gt_layers"] = gt_layers;
    j["gt_value_projection"] = gt_value_projection;
    j["hidden_dim"] = hidden_dim;
    j["jaccard_overlap"] = jaccard_overlap;
    j["learning_rate"] = learning_rate;
    j["margin"] = margin;
    j["max_seq_len"] = max_seq_len;
    j["overlap_threshold"] = overlap_threshold;
    j["seeds"] = seeds;
    j["trigger_tolerance"] = trigger_tolerance;
    j["type_embedding_dim"] = type_embedding_dim;
    j["type_embedding_file"] = type_embedding_file;
    return j.dump(2) + "\n";
}

std::string TrainConfig::hash() const { return hex64(fnv1a64(serialize())); }

TrainConfig TrainConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& ex) {
        throw Error(std::string("config: invalid JSON: ") + ex.what());
    }
    TrainConfig c;
    c.epochs = j.value("epochs", c.epochs);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.desk_learning_rate = j.value("desk_learning_rate", c.desk_learning_rate);
    c.margin = j.value("margin", c.margin);
    c.contrastive_weight = j.value("contrastive_weight", c.contrastive_weight);
    c.max_seq_len = j.value("max_seq_len", c.max_seq_len);
    if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<uint64_t>>();
    c.hidden_dim = j.value("hidden_dim", c.hidden_dim);
    c.encoder_layers = j.value("encoder_layers", c.encoder_layers);
    c.encoder_heads = j.value("encoder_heads", c.encoder_heads);
    c.ffn_dim = j.value("ffn_dim", c.ffn_dim);
    c.gt_layers = j.value("gt_layers", c.gt_layers);
    c.gt_heads = j.value("gt_heads", c.gt_heads);
    c.gt_value_projection = j.value("gt_value_projection", c.gt_value_projection);
    c.activation = j.value("activation", c.activation);
    c.type_embedding_dim = j.value("type_embedding_dim", c.type_embedding_dim);
    c.type_embedding_file = j.value("type_embedding_file", c.type_embedding_file);
    c.bias_mode = j.value("bias_mode", c.bias_mode);
    c.overlap_threshold = j.value("overlap_threshold", c.overlap_threshold);
    c.jaccard_overlap = j.value("jaccard_overlap", c.jaccard_overlap);
    c.trigger_tolerance = j.value("trigger_tolerance", c.trigger_tolerance);
    c.validate();
    return c;
}

TrainConfig TrainConfig::load(const std::string& path) {
    return from_json_text(read_file(path));
}

void TrainConfig::save(const std::string& path) const { write_file(path, serialize()); }

}  // namespace taco
