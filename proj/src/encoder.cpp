#include "taco/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "taco/common.hpp"

namespace taco {

Vocab Vocab::build(const std::vector<std::vector<std::string>>& sequences) {
    std::set<std::string> seen = {"<unk>", "<s>", "</s>", "<empty>"};
    for (const auto& seq : sequences)
        for (const auto& t : seq) seen.insert(t);
    return from_words(std::vector<std::string>(seen.begin(), seen.end()));
}

Vocab Vocab::from_words(std::vector<std::string> words) {
    Vocab v;
    std::sort(words.begin(), words.end());
    words.erase(std::unique(words.begin(), words.end()), words.end());
    v.words_ = std::move(words);
    for (size_t i = 0; i < v.words_.size(); ++i) v.index_[v.words_[i]] = static_cast<int>(i);
    if (!v.index_.count("<unk>")) throw Error("vocab: missing <unk> entry");
    return v;
}

int Vocab::id(const std::string& token) const {
    auto it = index_.find(token);
    if (it != index_.end()) return it->second;
    return index_.at("<unk>");
}

DeskEncoder::DeskEncoder(const TrainConfig& cfg, Vocab vocab)
    : cfg_(cfg), vocab_(std::move(vocab)) {
    cfg_.validate();
}

void DeskEncoder::init_params(ParamStore& params, Rng& rng) const {
    const int d = cfg_.hidden_dim;
    // Trained from scratch, so embeddings start at the same scale the layer
    // norms expect; tiny inits leave near-constant rows whose normalization
    // is badly conditioned.
    double w_std = 1.0 / std::sqrt(static_cast<double>(d));
    params.create("enc.embed", vocab_.size(), d);
    params.init_normal("enc.embed", rng, w_std);
    params.create("enc.pos", cfg_.max_seq_len, d);
    params.init_normal("enc.pos", rng, 0.5 * w_std);
    for (int l = 0; l < cfg_.encoder_layers; ++l) {
        std::string p = "enc.layer" + std::to_string(l) + ".";
        for (const char* w : {"Wq", "Wk", "Wv", "Wo"}) {
            params.create(p + w, d, d);
            params.init_normal(p + w, rng, w_std);
        }
        params.create(p + "ln1.g", 1, d);
        params.fill(p + "ln1.g", 1.0);
        params.create(p + "ln1.b", 1, d);
        params.create(p + "ln2.g", 1, d);
        params.fill(p + "ln2.g", 1.0);
        params.create(p + "ln2.b", 1, d);
        params.create(p + "W1", cfg_.ffn_dim, d);
        params.init_normal(p + "W1", rng, w_std);
        params.create(p + "b1", 1, cfg_.ffn_dim);
        params.create(p + "W2", d, cfg_.ffn_dim);
        params.init_normal(p + "W2", rng, 1.0 / std::sqrt(static_cast<double>(cfg_.ffn_dim)));
        params.create(p + "b2", 1, d);
    }
}

ad::Var DeskEncoder::encode(ad::Tape& tape, ParamStore& params,
                            const std::vector<std::string>& tokens, bool train) {
    if (tokens.empty()) throw Error("encode: empty token sequence");
    if (static_cast<int>(tokens.size()) > cfg_.max_seq_len)
        throw Error("encode: sequence length " + std::to_string(tokens.size()) +
                    " exceeds max_seq_len " + std::to_string(cfg_.max_seq_len));
    const int d = cfg_.hidden_dim;
    const int heads = cfg_.encoder_heads;
    const int dh = d / heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

    std::vector<int> ids(tokens.size());
    for (size_t i = 0; i < tokens.size(); ++i) ids[i] = vocab_.id(tokens[i]);

    ad::Var x = tape.embed(params.use(tape, "enc.embed", train), ids);
    ad::Var pos = tape.slice_rows(params.use(tape, "enc.pos", train), 0, tokens.size());
    x = tape.add(x, pos);

    for (int l = 0; l < cfg_.encoder_layers; ++l) {
        std::string p = "enc.layer" + std::to_string(l) + ".";
        ad::Var h = tape.layer_norm(x, params.use(tape, p + "ln1.g", train),
                                    params.use(tape, p + "ln1.b", train));
        ad::Var q = tape.matmul_nt(h, params.use(tape, p + "Wq", train));
        ad::Var k = tape.matmul_nt(h, params.use(tape, p + "Wk", train));
        ad::Var v = tape.matmul_nt(h, params.use(tape, p + "Wv", train));
        std::vector<ad::Var> head_out;
        for (int hd = 0; hd < heads; ++hd) {
            size_t c0 = static_cast<size_t>(hd) * static_cast<size_t>(dh);
            size_t c1 = c0 + static_cast<size_t>(dh);
            ad::Var qs = tape.slice_cols(q, c0, c1);
            ad::Var ks = tape.slice_cols(k, c0, c1);
            ad::Var vs = tape.slice_cols(v, c0, c1);
            ad::Var logits = tape.affine(tape.matmul_nt(qs, ks), scale, 0.0);
            ad::Var attn = tape.softmax_rows(logits);
            head_out.push_back(tape.matmul(attn, vs));
        }
        ad::Var attn_cat = tape.concat_cols(head_out);
        ad::Var attn_proj = tape.matmul_nt(attn_cat, params.use(tape, p + "Wo", train));
        x = tape.add(x, attn_proj);

        ad::Var h2 = tape.layer_norm(x, params.use(tape, p + "ln2.g", train),
                                     params.use(tape, p + "ln2.b", train));
        ad::Var f1 = tape.add_rowvec(tape.matmul_nt(h2, params.use(tape, p + "W1", train)),
                                     params.use(tape, p + "b1", train));
        ad::Var f1a = tape.act(f1, ad::Activation::Softplus);
        ad::Var f2 = tape.add_rowvec(tape.matmul_nt(f1a, params.use(tape, p + "W2", train)),
                                     params.use(tape, p + "b2", train));
        x = tape.add(x, f2);
    }
    return x;
}

PrecomputedEncoder::PrecomputedEncoder(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("precomputed encoder: cannot open " + path);
    char magic[8] = {0};
    in.read(magic, 8);
    if (std::string(magic, 8) != "TACOENC1")
        throw Error("precomputed encoder: bad magic in " + path);
    uint32_t dim = 0, count = 0;
    in.read(reinterpret_cast<char*>(&dim), 4);
    in.read(reinterpret_cast<char*>(&count), 4);
    dim_ = static_cast<int>(dim);
    for (uint32_t i = 0; i < count; ++i) {
        uint64_t key = 0;
        uint32_t len = 0;
        in.read(reinterpret_cast<char*>(&key), 8);
        in.read(reinterpret_cast<char*>(&len), 4);
        Mat m(static_cast<int>(len), dim_);
        in.read(reinterpret_cast<char*>(m.data.data()),
                static_cast<std::streamsize>(m.data.size() * sizeof(double)));
        if (!in) throw Error("precomputed encoder: truncated file " + path);
        table_.emplace(key, std::move(m));
    }
}

ad::Var PrecomputedEncoder::encode(ad::Tape& tape, ParamStore&,
                                   const std::vector<std::string>& tokens, bool) {
    uint64_t key = fnv1a64(join(tokens, " "));
    auto it = table_.find(key);
    if (it == table_.end())
        throw Error("precomputed encoder: no entry for sequence starting \"" +
                    (tokens.empty() ? std::string() : tokens[0]) + "\" (hash " + hex64(key) + ")");
    if (it->second.rows != static_cast<int>(tokens.size()))
        throw Error("precomputed encoder: stored length mismatch for hash " + hex64(key));
    return tape.constant(it->second);
}

void PrecomputedEncoder::write_file(
    const std::string& path, const std::vector<std::pair<std::vector<std::string>, Mat>>& entries) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("precomputed encoder: cannot write " + path);
    out.write("TACOENC1", 8);
    uint32_t dim = entries.empty() ? 0 : static_cast<uint32_t>(entries[0].second.cols);
    uint32_t count = static_cast<uint32_t>(entries.size());
    out.write(reinterpret_cast<const char*>(&dim), 4);
    out.write(reinterpret_cast<const char*>(&count), 4);
    for (const auto& [tokens, m] : entries) {
        uint64_t key = fnv1a64(join(tokens, " "));
        uint32_t len = static_cast<uint32_t>(m.rows);
        out.write(reinterpret_cast<const char*>(&key), 8);
        out.write(reinterpret_cast<const char*>(&len), 4);
        out.write(reinterpret_cast<const char*>(m.data.data()),
                  static_cast<std::streamsize>(m.data.size() * sizeof(double)));
    }
}

}  // namespace taco
