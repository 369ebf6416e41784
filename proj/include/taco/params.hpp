#pragma once

#include <map>
#include <string>

#include "taco/autodiff.hpp"
#include "taco/rng.hpp"
#include "taco/tensor.hpp"

namespace taco {

// Named persistent parameter tensors. std::map keeps iteration order stable,
// which training determinism and checkpoint layout both rely on.
class ParamStore {
public:
    Mat& create(const std::string& name, int rows, int cols);
    Mat& get(const std::string& name);
    const Mat& get(const std::string& name) const;
    bool has(const std::string& name) const { return params_.count(name) > 0; }

    // Registers the stored matrix on the tape and remembers the Var so the
    // optimizer can read gradients after backward().
    ad::Var use(ad::Tape& tape, const std::string& name, bool train);

    void init_normal(const std::string& name, Rng& rng, double stddev);
    void fill(const std::string& name, double v);

    std::map<std::string, Mat>& all() { return params_; }
    const std::map<std::string, Mat>& all() const { return params_; }
    std::map<std::string, ad::Var>& active() { return active_; }
    void clear_active() { active_.clear(); }

private:
    std::map<std::string, Mat> params_;
    std::map<std::string, ad::Var> active_;
};

// Adam with the standard bias correction; one moment pair per parameter.
class AdamOptimizer {
public:
    AdamOptimizer(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
        : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

    // Applies gradients gathered in store.active() to the stored matrices.
    void step(ParamStore& store);

    void reset();
    double learning_rate() const { return lr_; }

private:
    double lr_, beta1_, beta2_, eps_;
    long t_ = 0;
    std::map<std::string, Mat> m_, v_;
};

}  // namespace taco
