#include "taco/autodiff.hpp"

#include <algorithm>
#include <cmath>

#include "taco/common.hpp"

namespace taco {

Mat Mat::from_rows(std::initializer_list<std::initializer_list<double>> rows_init) {
    Mat m(static_cast<int>(rows_init.size()),
          rows_init.size() ? static_cast<int>(rows_init.begin()->size()) : 0);
    int r = 0;
    for (const auto& row : rows_init) {
        int c = 0;
        for (double v : row) m.at(r, c++) = v;
        ++r;
    }
    return m;
}

}  // namespace taco

namespace taco::ad {

Activation parse_activation(const std::string& name) {
    if (name == "identity") return Activation::Identity;
    if (name == "softplus") return Activation::Softplus;
    if (name == "relu") return Activation::Relu;
    throw Error("unknown activation: " + name);
}

std::string activation_name(Activation a) {
    switch (a) {
        case Activation::Identity: return "identity";
        case Activation::Softplus: return "softplus";
        case Activation::Relu: return "relu";
    }
    return "?";
}

namespace {

// out += A * B
void acc_mm_nn(const Mat& a, const Mat& b, Mat& out) {
    for (int i = 0; i < a.rows; ++i)
        for (int k = 0; k < a.cols; ++k) {
            double av = a.at(i, k);
            if (av == 0.0) continue;
            for (int j = 0; j < b.cols; ++j) out.at(i, j) += av * b.at(k, j);
        }
}

// out += A * B^T
void acc_mm_nt(const Mat& a, const Mat& b, Mat& out) {
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < b.rows; ++j) {
            double s = 0.0;
            for (int k = 0; k < a.cols; ++k) s += a.at(i, k) * b.at(j, k);
            out.at(i, j) += s;
        }
}

// out += A^T * B
void acc_mm_tn(const Mat& a, const Mat& b, Mat& out) {
    for (int k = 0; k < a.rows; ++k)
        for (int i = 0; i < a.cols; ++i) {
            double av = a.at(k, i);
            if (av == 0.0) continue;
            for (int j = 0; j < b.cols; ++j) out.at(i, j) += av * b.at(k, j);
        }
}

double softplus_val(double x) {
    return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

double sigmoid_val(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace

Var Tape::record(Mat value, bool needs_grad, std::function<void()> back) {
    auto n = std::make_shared<Node>();
    n->value = std::move(value);
    n->needs_grad = needs_grad;
    if (needs_grad) {
        n->grad = Mat(n->value.rows, n->value.cols);
        n->backward = std::move(back);
    }
    order_.push_back(n);
    return n;
}

Var Tape::leaf(Mat value, bool needs_grad) {
    return record(std::move(value), needs_grad, nullptr);
}

Var Tape::add(Var a, Var b) {
    if (!a->value.same_shape(b->value)) throw Error("add: shape mismatch");
    Mat out = a->value;
    for (size_t i = 0; i < out.size(); ++i) out.data[i] += b->value.data[i];
    bool ng = a->needs_grad || b->needs_grad;
    Var n = record(std::move(out), ng, nullptr);
    if (ng) {
        Node* self = n.get();
        n->backward = [a, b, self]() {
            if (a->needs_grad)
                for (size_t i = 0; i < a->grad.size(); ++i) a->grad.data[i] += self->grad.data[i];
            if (b->needs_grad)
                for (size_t i = 0; i < b->grad.size(); ++i) b->grad.data[i] += self->grad.data[i];
        };
    }
    return n;
}

Var Tape::sub(Var a, Var b) {
    if (!a->value.same_shape(b->value)) throw Error("sub: shape mismatch");
    Mat out = a->value;
    for (size_t i = 0; i < out.size(); ++i) out.data[i] -= b->value.data[i];
    bool ng = a->needs_grad || b->needs_grad;
    Var n = record(std::move(out), ng, nullptr);
    if (ng) {
        Node* self = n.get();
        n->backward = [a, b, self]() {
            if (a->needs_grad)
                for (size_t i = 0; i < a->grad.size(); ++i) a->grad.data[i] += self->grad.data[i];
            if (b->needs_grad)
                for (size_t i = 0; i < b->grad.size(); ++i) b->grad.data[i] -= self->grad.data[i];
        };
    }
    return n;
}

Var Tape::affine(Var a, double k, double b) {
    Mat out = a->value;
    for (double& v : out.data) v = k * v + b;
    Var n = record(std::move(out), a->needs_grad, nullptr);
    if (a->needs_grad) {
        Node* self = n.get();
        n->backward = [a, k, self]() {
            for (size_t i = 0; i < a->grad.size(); ++i) a->grad.data[i] += k * self->grad.data[i];
        };
    }
    return n;
}

Var Tape::mul(Var a, Var b) {
    if (!a->value.same_shape(b->value)) throw Error("mul: shape mismatch");
    Mat out = a->value;
    for (size_t i = 0; i < out.size(); ++i) out.data[i] *= b->value.data[i];
    bool ng = a->needs_grad || b->needs_grad;
    Var n = record(std::move(out), ng, nullptr);
    if (ng) {
        Node* self = n.get();
        n->backward = [a, b, self]() {
            if (a->needs_grad)
                for (size_t i = 0; i < a->grad.size(); ++i)
                    a->grad.data[i] += self->grad.data[i] * b->value.data[i];
            if (b->needs_grad)
                for (size_t i = 0; i < b->grad.size(); ++i)
                    b->grad.data[i] += self->grad.data[i] * a->value.data[i];
        };
    }
    return n;
}

Var Tape::matmul(Var a, Var b) {
    if (a->value.cols != b->value.rows) throw Error("matmul: inner dimension mismatch");
    Mat out(a->value.rows, b->value.cols);
    acc_mm_nn(a->value, b->value, out);
    bool ng = a->needs_grad || b->needs_grad;
    Var n = record(std::move(out), ng, nullptr);
    if (ng) {
        Node* self = n.get();
        n->backward = [a, b, self]() {
            if (a->needs_grad) acc_mm_nt(self->grad, b->value, a->grad);
            if (b->needs_grad) acc_mm_tn(a->value, self->grad, b->grad);
        };
    }
    return n;
}

Var Tape::matmul_nt(Var a, Var b) {
    if (a->value.cols != b->value.cols) throw Error("matmul_nt: inner dimension mismatch");
    Mat out(a->value.rows, b->value.rows);
    acc_mm_nt(a->value, b->value, out);
    bool ng = a->needs_grad || b->needs_grad;
    Var n = record(std::move(out), ng, nullptr);
    if (ng) {
        Node* self = n.get();
        n->backward = [a, b, self]() {
            if (a->needs_grad) acc_mm_nn(self->grad, b->value, a->grad);
            if (b->needs_grad) acc_mm_tn(self->grad, a->value, b->grad);
        };
    }
    return n;
}

Var Tape::act(Var a, Activation kind) {
    if (kind == Activation::Identity) return a;
    Mat out = a->value;
    if (kind == Activation::Softplus)
        for (double& v : out.data) v = softplus_val(v);
    else
        for (double& v : out.data) v = v > 0.0 ? v : 0.0;
    Var n = record(std::move(out), a->needs_grad, nullptr);
    if (a->needs_grad) {
        Node* self = n.get();
        n->backward = [a, kind, self]() {
            for (size_t i = 0; i < a->grad.size(); ++i) {
                double x = a->value.data[i];
                double d = kind == Activation::Softplus ? sigmoid_val(x) : (x > 0.0 ? 1.0 : 0.0);
                a->grad.data[i] += self->grad.data[i] * d;
            }
        };
    }
    return n;
}

Var Tape::softmax_rows(Var a, const Mat* bias) {
    if (bias && !a->value.same_shape(*bias)) throw Error("softmax_rows: bias shape mismatch");
    Mat out(a->value.rows, a->value.cols);
    for (int r = 0; r < a->value.rows; ++r) {
        double mx = -1e300;
        for (int c = 0; c < a->value.cols; ++c) {
            double v = a->value.at(r, c) + (bias ? bias->at(r, c) : 0.0);
            mx = std::max(mx, v);
        }
        double sum = 0.0;
        for (int c = 0; c < a->value.cols; ++c) {
            double v = std::exp(a->value.at(r, c) + (bias ? bias->at(r, c) : 0.0) - mx);
            out.at(r, c) = v;
            sum += v;
        }
        for (int c = 0; c < a->value.cols; ++c) out.at(r, c) /= sum;
    }
    Var n = record(std::move(out), a->needs_grad, nullptr);
    if (a->needs_grad) {
        Node* self = n.get();
        n->backward = [a, self]() {
            for (int r = 0; r < a->value.rows; ++r) {
                double dot = 0.0;
                for (int c = 0; c < a->value.cols; ++c)
                    dot += self->grad.at(r, c) * self->value.at(r, c);
                for (int c = 0; c < a->value.cols; ++c)
                    a->grad.at(r, c) += (self->grad.at(r, c) - dot) * self->value.at(r, c);
            }
        };
    }
    return n;
}

Var Tape::log_softmax_row(Var a) {
    if (a->value.rows != 1) throw Error("log_softmax_row: expected a single row");
    Mat out = a->value;
    double mx = *std::max_element(out.data.begin(), out.data.end());
    double sum = 0.0;
    for (double v : out.data) sum += std::exp(v - mx);
    double lse = mx + std::log(sum);
    for (double& v : out.data) v -= lse;
    Var n = record(std::move(out), a->needs_grad, nullptr);
    if (a->needs_grad) {
        Node* self = n.get();
        n->backward = [a, self]() {
            double gsum = 0.0;
            for (double g : self->grad.data) gsum += g;
            for (size_t i = 0; i < a->grad.size(); ++i)
                a->grad.data[i] += self->grad.data[i] - std::exp(self->value.data[i]) * gsum;
        };
    }
    return n;
}

Var Tape::mean_rows(Var a, size_t r0, size_t r1) {
    if (r0 >= r1 || r1 > static_cast<size_t>(a->value.rows)) throw Error("mean_rows: empty or invalid span");
    Mat out(1, a->value.cols);
    double inv = 1.0 / static_cast<double>(r1 - r0);
    for (size_t r = r0; r < r1; ++r)
        for (int c = 0; c < a->value.cols; ++c) out.at(0, c) += a->value.at(static_cast<int>(r), c) * inv;
    Var n = record(std::move(out), a->needs_grad, nullptr);
    if (a->needs_grad) {
        Node* self = n.get();
        n->backward = [a, r0, r1, inv, self]() {
            for (size_t r = r0; r < r1; ++r)
                for (int c = 0; c < a->value.cols; ++c)
                    a->grad.at(static_cast<int>(r), c) += self->grad.at(0, c) * inv;
        };
    }
    return n;
}

Var Tape::slice_rows(Var a, size_t r0, size_t r1) {
    if (r0 >= r1 || r1 > static_cast<size_t>(a->value.rows)) throw Error("slice_rows: invalid span");
    Mat out(static_cast<int>(r1 - r0), a->value.cols);
    for (size_t r = r0; r < r1; ++r)
        for (int c = 0; c < a->value.cols; ++c)
            out.at(static_cast<int>(r - r0), c) = a->value.at(static_cast<int>(r), c);
    Var n = record(std::move(out), a->needs_grad, nullptr);
    if (a->needs_grad) {
        Node* self = n.get();
        n->backward = [a, r0, self]() {
            for (int r = 0; r < self->value.rows; ++r)
                for (int c = 0; c < self->value.cols; ++c)
                    a->grad.at(static_cast<int>(r0) + r, c) += self->grad.at(r, c);
        };
    }
    return n;
}

Var Tape::slice_cols(Var a, size_t c0, size_t c1) {
    if (c0 >= c1 || c1 > static_cast<size_t>(a->value.cols)) throw Error("slice_cols: invalid span");
    Mat out(a->value.rows, static_cast<int>(c1 - c0));
    for (int r = 0; r < a->value.rows; ++r)
        for (size_t c = c0; c < c1; ++c)
            out.at(r, static_cast<int>(c - c0)) = a->value.at(r, static_cast<int>(c));
    Var n = record(std::move(out), a->needs_grad, nullptr);
    if (a->needs_grad) {
        Node* self = n.get();
        n->backward = [a, c0, self]() {
            for (int r = 0; r < self->value.rows; ++r)
                for (int c = 0; c < self->value.cols; ++c)
                    a->grad.at(r, static_cast<int>(c0) + c) += self->grad.at(r, c);
        };
    }
    return n;
}

Var Tape::concat_cols(const std::vector<Var>& parts) {
    if (parts.empty()) throw Error("concat_cols: no parts");
    int rows = parts[0]->value.rows;
    int cols = 0;
    bool ng = false;
    for (const auto& p : parts) {
        if (p->value.rows != rows) throw Error("concat_cols: row mismatch");
        cols += p->value.cols;
        ng = ng || p->needs_grad;
    }
    Mat out(rows, cols);
    int off = 0;
    for (const auto& p : parts) {
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < p->value.cols; ++c) out.at(r, off + c) = p->value.at(r, c);
        off += p->value.cols;
    }
    Var n = record(std::move(out), ng, nullptr);
    if (ng) {
        Node* self = n.get();
        std::vector<Var> ps = parts;
        n->backward = [ps, self]() {
            int off2 = 0;
            for (const auto& p : ps) {
                if (p->needs_grad)
                    for (int r = 0; r < p->value.rows; ++r)
                        for (int c = 0; c < p->value.cols; ++c)
                            p->grad.at(r, c) += self->grad.at(r, off2 + c);
                off2 += p->value.cols;
            }
        };
    }
    return n;
}

Var Tape::concat_rows(const std::vector<Var>& parts) {
    if (parts.empty()) throw Error("concat_rows: no parts");
    int cols = parts[0]->value.cols;
    int rows = 0;
    bool ng = false;
    for (const auto& p : parts) {
        if (p->value.cols != cols) throw Error("concat_rows: column mismatch");
        rows += p->value.rows;
        ng = ng || p->needs_grad;
    }
    Mat out(rows, cols);
    int off = 0;
    for (const auto& p : parts) {
        for (int r = 0; r < p->value.rows; ++r)
            for (int c = 0; c < cols; ++c) out.at(off + r, c) = p->value.at(r, c);
        off += p->value.rows;
    }
    Var n = record(std::move(out), ng, nullptr);
    if (ng) {
        Node* self = n.get();
        std::vector<Var> ps = parts;
        n->backward = [ps, self]() {
            int off2 = 0;
            for (const auto& p : ps) {
                if (p->needs_grad)
                    for (int r = 0; r < p->value.rows; ++r)
                        for (int c = 0; c < p->value.cols; ++c)
                            p->grad.at(r, c) += self->grad.at(off2 + r, c);
                off2 += p->value.rows;
            }
        };
    }
    return n;
}

Var Tape::zero_diag(Var a) {
    if (a->value.rows != a->value.cols) throw Error("zero_diag: matrix must be square");
    Mat out = a->value;
    for (int i = 0; i < out.rows; ++i) out.at(i, i) = 0.0;
    Var n = record(std::move(out), a->needs_grad, nullptr);
    if (a->needs_grad) {
        Node* self = n.get();
        n->backward = [a, self]() {
            for (int r = 0; r < a->value.rows; ++r)
                for (int c = 0; c < a->value.cols; ++c)
                    if (r != c) a->grad.at(r, c) += self->grad.at(r, c);
        };
    }
    return n;
}

Var Tape::pick(Var a, int row, int col) {
    Mat out(1, 1);
    out.at(0, 0) = a->value.at(row, col);
    Var n = record(std::move(out), a->needs_grad, nullptr);
    if (a->needs_grad) {
        Node* self = n.get();
        n->backward = [a, row, col, self]() { a->grad.at(row, col) += self->grad.at(0, 0); };
    }
    return n;
}

Var Tape::max_row(Var a) {
    if (a->value.rows != 1) throw Error("max_row: expected a single row");
    int arg = 0;
    for (int c = 1; c < a->value.cols; ++c)
        if (a->value.at(0, c) > a->value.at(0, arg)) arg = c;
    Mat out(1, 1);
    out.at(0, 0) = a->value.at(0, arg);
    Var n = record(std::move(out), a->needs_grad, nullptr);
    if (a->needs_grad) {
        Node* self = n.get();
        n->backward = [a, arg, self]() { a->grad.at(0, arg) += self->grad.at(0, 0); };
    }
    return n;
}

Var Tape::add_rowvec(Var a, Var row) {
    if (row->value.rows != 1 || row->value.cols != a->value.cols)
        throw Error("add_rowvec: shape mismatch");
    Mat out = a->value;
    for (int r = 0; r < out.rows; ++r)
        for (int c = 0; c < out.cols; ++c) out.at(r, c) += row->value.at(0, c);
    bool ng = a->needs_grad || row->needs_grad;
    Var n = record(std::move(out), ng, nullptr);
    if (ng) {
        Node* self = n.get();
        n->backward = [a, row, self]() {
            if (a->needs_grad)
                for (size_t i = 0; i < a->grad.size(); ++i) a->grad.data[i] += self->grad.data[i];
            if (row->needs_grad)
                for (int r = 0; r < self->value.rows; ++r)
                    for (int c = 0; c < self->value.cols; ++c)
                        row->grad.at(0, c) += self->grad.at(r, c);
        };
    }
    return n;
}

Var Tape::embed(Var table, const std::vector<int>& ids) {
    Mat out(static_cast<int>(ids.size()), table->value.cols);
    for (size_t r = 0; r < ids.size(); ++r) {
        if (ids[r] < 0 || ids[r] >= table->value.rows) throw Error("embed: id out of range");
        for (int c = 0; c < table->value.cols; ++c)
            out.at(static_cast<int>(r), c) = table->value.at(ids[r], c);
    }
    Var n = record(std::move(out), table->needs_grad, nullptr);
    if (table->needs_grad) {
        Node* self = n.get();
        std::vector<int> idv = ids;
        n->backward = [table, idv, self]() {
            for (size_t r = 0; r < idv.size(); ++r)
                for (int c = 0; c < table->value.cols; ++c)
                    table->grad.at(idv[r], c) += self->grad.at(static_cast<int>(r), c);
        };
    }
    return n;
}

Var Tape::layer_norm(Var a, Var gain, Var bias, double eps) {
    const int rows = a->value.rows, cols = a->value.cols;
    if (gain->value.rows != 1 || gain->value.cols != cols || !gain->value.same_shape(bias->value))
        throw Error("layer_norm: gain/bias must be 1 x cols");
    Mat xhat(rows, cols);
    std::vector<double> inv_std(static_cast<size_t>(rows));
    Mat out(rows, cols);
    for (int r = 0; r < rows; ++r) {
        double mean = 0.0;
        for (int c = 0; c < cols; ++c) mean += a->value.at(r, c);
        mean /= cols;
        double var = 0.0;
        for (int c = 0; c < cols; ++c) {
            double d = a->value.at(r, c) - mean;
            var += d * d;
        }
        var /= cols;
        double is = 1.0 / std::sqrt(var + eps);
        inv_std[static_cast<size_t>(r)] = is;
        for (int c = 0; c < cols; ++c) {
            double h = (a->value.at(r, c) - mean) * is;
            xhat.at(r, c) = h;
            out.at(r, c) = h * gain->value.at(0, c) + bias->value.at(0, c);
        }
    }
    bool ng = a->needs_grad || gain->needs_grad || bias->needs_grad;
    Var n = record(std::move(out), ng, nullptr);
    if (ng) {
        Node* self = n.get();
        n->backward = [a, gain, bias, xhat, inv_std, self]() {
            const int rows2 = a->value.rows, cols2 = a->value.cols;
            for (int r = 0; r < rows2; ++r) {
                double sum_dh = 0.0, sum_dh_x = 0.0;
                for (int c = 0; c < cols2; ++c) {
                    double dh = self->grad.at(r, c) * gain->value.at(0, c);
                    sum_dh += dh;
                    sum_dh_x += dh * xhat.at(r, c);
                }
                if (a->needs_grad) {
                    double is = inv_std[static_cast<size_t>(r)];
                    for (int c = 0; c < cols2; ++c) {
                        double dh = self->grad.at(r, c) * gain->value.at(0, c);
                        a->grad.at(r, c) +=
                            is * (dh - sum_dh / cols2 - xhat.at(r, c) * sum_dh_x / cols2);
                    }
                }
                if (gain->needs_grad)
                    for (int c = 0; c < cols2; ++c)
                        gain->grad.at(0, c) += self->grad.at(r, c) * xhat.at(r, c);
                if (bias->needs_grad)
                    for (int c = 0; c < cols2; ++c) bias->grad.at(0, c) += self->grad.at(r, c);
            }
        };
    }
    return n;
}

void Tape::backward(Var loss) {
    if (loss->value.rows != 1 || loss->value.cols != 1) throw Error("backward: loss must be 1x1");
    if (!loss->needs_grad) throw Error("backward: loss does not require gradients");
    loss->grad.at(0, 0) = 1.0;
    for (auto it = order_.rbegin(); it != order_.rend(); ++it)
        if ((*it)->needs_grad && (*it)->backward) (*it)->backward();
}

}  // namespace taco::ad
