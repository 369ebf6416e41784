#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "taco/autodiff.hpp"
#include "taco/config.hpp"
#include "taco/params.hpp"

namespace taco {

// Contract: a token sequence of length L comes back as an [L x d] matrix of
// token representations, one row per input token.
class TokenEncoder {
public:
    virtual ~TokenEncoder() = default;
    virtual ad::Var encode(ad::Tape& tape, ParamStore& params,
                           const std::vector<std::string>& tokens, bool train) = 0;
    virtual int dim() const = 0;
};

// Word-level vocabulary with a fixed <unk> fallback. Token ids are assigned
// by sorted order so the mapping is independent of insertion order.
class Vocab {
public:
    static Vocab build(const std::vector<std::vector<std::string>>& sequences);
    static Vocab from_words(std::vector<std::string> words);

    int id(const std::string& token) const;
    int size() const { return static_cast<int>(words_.size()); }
    const std::vector<std::string>& words() const { return words_; }

private:
    std::vector<std::string> words_;
    std::map<std::string, int> index_;
};

// Trainable desk-scale encoder: learned token + position embeddings followed
// by a small pre-norm self-attention stack.
class DeskEncoder : public TokenEncoder {
public:
    DeskEncoder(const TrainConfig& cfg, Vocab vocab);

    // Allocates and initializes all encoder parameters in `params`.
    void init_params(ParamStore& params, Rng& rng) const;

    ad::Var encode(ad::Tape& tape, ParamStore& params, const std::vector<std::string>& tokens,
                   bool train) override;
    int dim() const override { return cfg_.hidden_dim; }

    const Vocab& vocab() const { return vocab_; }

private:
    TrainConfig cfg_;
    Vocab vocab_;
};

// Adapter for representations computed by an external pretrained LM and
// dumped to a file; rows are served frozen (no gradient flows into them).
// Keyed by the fnv1a64 hash of the space-joined token sequence.
class PrecomputedEncoder : public TokenEncoder {
public:
    explicit PrecomputedEncoder(const std::string& path);

    ad::Var encode(ad::Tape& tape, ParamStore& params, const std::vector<std::string>& tokens,
                   bool train) override;
    int dim() const override { return dim_; }

    static void write_file(const std::string& path,
                           const std::vector<std::pair<std::vector<std::string>, Mat>>& entries);

private:
    int dim_ = 0;
    std::map<uint64_t, Mat> table_;
};

}  // namespace taco
