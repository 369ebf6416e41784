#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "taco/tensor.hpp"

namespace taco::ad {

enum class Activation { Identity, Softplus, Relu };

Activation parse_activation(const std::string& name);
std::string activation_name(Activation a);

struct Node {
    Mat value;
    Mat grad;
    bool needs_grad = false;
    std::function<void()> backward;  // accumulates into parent grads
};

using Var = std::shared_ptr<Node>;

// Reverse-mode tape over Mat values. Every op records its backward closure;
// backward(loss) walks the tape in reverse creation order. Purely
// sequential, no hidden state, so identical inputs give identical gradients.
class Tape {
public:
    Var leaf(Mat value, bool needs_grad);
    Var constant(Mat value) { return leaf(std::move(value), false); }

    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    // k * a + b, elementwise constants.
    Var affine(Var a, double k, double b);
    Var mul(Var a, Var b);
    Var matmul(Var a, Var b);
    // a * b^T; the workhorse for [out x in] weight matrices.
    Var matmul_nt(Var a, Var b);
    Var act(Var a, Activation kind);
    // Row-wise softmax of (a + bias); bias is a plain matrix (graph mask).
    Var softmax_rows(Var a, const Mat* bias = nullptr);
    // Log-softmax of a single-row matrix.
    Var log_softmax_row(Var a);
    Var mean_rows(Var a, size_t r0, size_t r1);
    Var slice_rows(Var a, size_t r0, size_t r1);
    Var slice_cols(Var a, size_t c0, size_t c1);
    Var concat_cols(const std::vector<Var>& parts);
    Var concat_rows(const std::vector<Var>& parts);
    // Copy with the main diagonal zeroed.
    Var zero_diag(Var a);
    Var pick(Var a, int row, int col);  // 1x1 element view
    Var max_row(Var a);                 // max over a single-row matrix, 1x1
    Var add_rowvec(Var a, Var row);     // broadcast row vector over rows
    Var embed(Var table, const std::vector<int>& ids);
    // Per-row layer norm with learned gain/bias (1 x cols each).
    Var layer_norm(Var a, Var gain, Var bias, double eps = 1e-5);
    Var relu(Var a) { return act(a, Activation::Relu); }

    // Seeds d(loss)=1 and runs the tape backwards. loss must be 1x1.
    void backward(Var loss);

    size_t size() const { return order_.size(); }

private:
    Var record(Mat value, bool needs_grad, std::function<void()> back);
    std::vector<Var> order_;
};

inline double scalar(const Var& v) { return v->value.at(0, 0); }

}  // namespace taco::ad
