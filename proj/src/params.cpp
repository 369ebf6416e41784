#include "taco/params.hpp"

#include <cmath>

#include "taco/common.hpp"

namespace taco {

Mat& ParamStore::create(const std::string& name, int rows, int cols) {
    auto [it, inserted] = params_.emplace(name, Mat(rows, cols));
    if (!inserted) throw Error("parameter already exists: " + name);
    return it->second;
}

Mat& ParamStore::get(const std::string& name) {
    auto it = params_.find(name);
    if (it == params_.end()) throw Error("unknown parameter: " + name);
    return it->second;
}

const Mat& ParamStore::get(const std::string& name) const {
    auto it = params_.find(name);
    if (it == params_.end()) throw Error("unknown parameter: " + name);
    return it->second;
}

ad::Var ParamStore::use(ad::Tape& tape, const std::string& name, bool train) {
    auto it = active_.find(name);
    if (it != active_.end()) return it->second;
    ad::Var v = tape.leaf(get(name), train);
    active_.emplace(name, v);
    return v;
}

void ParamStore::init_normal(const std::string& name, Rng& rng, double stddev) {
    Mat& m = get(name);
    for (double& v : m.data) v = rng.normal() * stddev;
}

void ParamStore::fill(const std::string& name, double v) {
    Mat& m = get(name);
    for (double& x : m.data) x = v;
}

void AdamOptimizer::step(ParamStore& store) {
    ++t_;
    double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (auto& [name, var] : store.active()) {
        if (!var->needs_grad) continue;
        Mat& p = store.get(name);
        Mat& m = m_.emplace(name, Mat(p.rows, p.cols)).first->second;
        Mat& v = v_.emplace(name, Mat(p.rows, p.cols)).first->second;
        const Mat& g = var->grad;
        for (size_t i = 0; i < p.data.size(); ++i) {
            m.data[i] = beta1_ * m.data[i] + (1.0 - beta1_) * g.data[i];
            v.data[i] = beta2_ * v.data[i] + (1.0 - beta2_) * g.data[i] * g.data[i];
            double mh = m.data[i] / bc1;
            double vh = v.data[i] / bc2;
            p.data[i] -= lr_ * mh / (std::sqrt(vh) + eps_);
        }
    }
    store.clear_active();
}

void AdamOptimizer::reset() {
    t_ = 0;
    m_.clear();
    v_.clear();
}

}  // namespace taco
