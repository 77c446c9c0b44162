#include "temo/ad/tape.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "temo/kernels/kernels.hpp"

namespace temo::ad {
namespace {

const kernels::Ops& K() { return kernels::ops(); }

void require(bool cond, const char* msg) {
    if (!cond) raise(ErrorKind::Internal, msg);
}

Tape& same_tape(Tensor a, Tensor b) {
    require(a.tape != nullptr && a.tape == b.tape,
            "tensors belong to different tapes");
    return *a.tape;
}

bool needs(Tensor t) { return t.tape->node(t.idx).needs_grad; }

int next_index(Tape& t) { return static_cast<int>(t.node_count()); }

}  // namespace

const Mat& Tensor::value() const { return tape->node(idx).value; }

const Mat& Tensor::grad() const {
    const Tape::Node& n = tape->node(idx);
    require(n.needs_grad, "tensor has no gradient");
    return n.grad;
}

std::size_t Tensor::rows() const { return value().rows; }
std::size_t Tensor::cols() const { return value().cols; }

double Tensor::scalar_value() const {
    require(rows() == 1 && cols() == 1, "tensor is not a scalar");
    return value().data[0];
}

Tensor Tape::push(Mat value, bool needs_grad, std::function<void(Tape&)> back) {
    Node n;
    if (needs_grad) n.grad = Mat(value.rows, value.cols);
    n.value = std::move(value);
    n.needs_grad = needs_grad;
    n.back = needs_grad ? std::move(back) : nullptr;
    nodes_.push_back(std::move(n));
    return Tensor{this, static_cast<int>(nodes_.size()) - 1};
}

Tensor Tape::leaf(Mat value) { return push(std::move(value), true, nullptr); }

Tensor Tape::constant(Mat value) { return push(std::move(value), false, nullptr); }

void Tape::backward(Tensor root) {
    require(root.tape == this, "backward on a foreign tensor");
    Node& r = nodes_[root.idx];
    require(r.value.rows == 1 && r.value.cols == 1,
            "backward root must be a scalar");
    require(r.needs_grad, "backward root has no gradient path");
    r.grad.data[0] = 1.0;
    for (int i = root.idx; i >= 0; --i) {
        Node& nd = nodes_[i];
        if (nd.needs_grad && nd.back) nd.back(*this);
    }
}

// ---- elementwise ----

Tensor add(Tensor a, Tensor b) {
    Tape& t = same_tape(a, b);
    const Mat& av = a.value();
    const Mat& bv = b.value();
    require(av.same_shape(bv), "add: shape mismatch");
    Mat out(av.rows, av.cols);
    K().add(av.data.data(), bv.data.data(), out.data.data(), out.size());
    bool ng = needs(a) || needs(b);
    int self = next_index(t), ia = a.idx, ib = b.idx;
    return t.push(std::move(out), ng, [self, ia, ib](Tape& tp) {
        const Mat& g = tp.node(self).grad;
        if (tp.node(ia).needs_grad)
            K().axpy(1.0, g.data.data(), tp.node(ia).grad.data.data(), g.size());
        if (tp.node(ib).needs_grad)
            K().axpy(1.0, g.data.data(), tp.node(ib).grad.data.data(), g.size());
    });
}

Tensor sub(Tensor a, Tensor b) {
    Tape& t = same_tape(a, b);
    const Mat& av = a.value();
    const Mat& bv = b.value();
    require(av.same_shape(bv), "sub: shape mismatch");
    Mat out(av.rows, av.cols);
    K().sub(av.data.data(), bv.data.data(), out.data.data(), out.size());
    bool ng = needs(a) || needs(b);
    int self = next_index(t), ia = a.idx, ib = b.idx;
    return t.push(std::move(out), ng, [self, ia, ib](Tape& tp) {
        const Mat& g = tp.node(self).grad;
        if (tp.node(ia).needs_grad)
            K().axpy(1.0, g.data.data(), tp.node(ia).grad.data.data(), g.size());
        if (tp.node(ib).needs_grad)
            K().axpy(-1.0, g.data.data(), tp.node(ib).grad.data.data(), g.size());
    });
}

Tensor mul(Tensor a, Tensor b) {
    Tape& t = same_tape(a, b);
    const Mat& av = a.value();
    const Mat& bv = b.value();
    require(av.same_shape(bv), "mul: shape mismatch");
    Mat out(av.rows, av.cols);
    K().mul(av.data.data(), bv.data.data(), out.data.data(), out.size());
    bool ng = needs(a) || needs(b);
    int self = next_index(t), ia = a.idx, ib = b.idx;
    return t.push(std::move(out), ng, [self, ia, ib](Tape& tp) {
        const Mat& g = tp.node(self).grad;
        if (tp.node(ia).needs_grad)
            K().madd(g.data.data(), tp.node(ib).value.data.data(),
                     tp.node(ia).grad.data.data(), g.size());
        if (tp.node(ib).needs_grad)
            K().madd(g.data.data(), tp.node(ia).value.data.data(),
                     tp.node(ib).grad.data.data(), g.size());
    });
}

Tensor div(Tensor a, Tensor b) {
    Tape& t = same_tape(a, b);
    const Mat& av = a.value();
    const Mat& bv = b.value();
    require(av.same_shape(bv), "div: shape mismatch");
    Mat out(av.rows, av.cols);
    K().div(av.data.data(), bv.data.data(), out.data.data(), out.size());
    bool ng = needs(a) || needs(b);
    int self = next_index(t), ia = a.idx, ib = b.idx;
    return t.push(std::move(out), ng, [self, ia, ib](Tape& tp) {
        const Mat& g = tp.node(self).grad;
        const Mat& bv2 = tp.node(ib).value;
        const Mat& ov = tp.node(self).value;
        if (tp.node(ia).needs_grad) {
            Mat tmp(g.rows, g.cols);
            K().div(g.data.data(), bv2.data.data(), tmp.data.data(), g.size());
            K().axpy(1.0, tmp.data.data(), tp.node(ia).grad.data.data(), g.size());
        }
        if (tp.node(ib).needs_grad) {
            // d(a/b)/db = -out/b
            Mat tmp(g.rows, g.cols);
            K().mul(g.data.data(), ov.data.data(), tmp.data.data(), g.size());
            K().div(tmp.data.data(), bv2.data.data(), tmp.data.data(), g.size());
            K().axpy(-1.0, tmp.data.data(), tp.node(ib).grad.data.data(), g.size());
        }
    });
}

// ---- scalar constants ----

Tensor scale(Tensor a, double s) {
    Tape& t = *a.tape;
    const Mat& av = a.value();
    Mat out(av.rows, av.cols);
    K().scale(av.data.data(), s, out.data.data(), out.size());
    bool ng = needs(a);
    int self = next_index(t), ia = a.idx;
    return t.push(std::move(out), ng, [self, ia, s](Tape& tp) {
        const Mat& g = tp.node(self).grad;
        K().axpy(s, g.data.data(), tp.node(ia).grad.data.data(), g.size());
    });
}

Tensor add_scalar(Tensor a, double s) {
    Tape& t = *a.tape;
    Mat out = a.value();
    for (double& x : out.data) x += s;
    bool ng = needs(a);
    int self = next_index(t), ia = a.idx;
    return t.push(std::move(out), ng, [self, ia](Tape& tp) {
        const Mat& g = tp.node(self).grad;
        K().axpy(1.0, g.data.data(), tp.node(ia).grad.data.data(), g.size());
    });
}

// ---- broadcasts ----

Tensor add_rowvec(Tensor x, Tensor b) {
    Tape& t = same_tape(x, b);
    const Mat& xv = x.value();
    const Mat& bv = b.value();
    require(bv.rows == 1 && bv.cols == xv.cols, "add_rowvec: bad vector shape");
    Mat out(xv.rows, xv.cols);
    for (std::size_t r = 0; r < xv.rows; ++r)
        K().add(xv.data.data() + r * xv.cols, bv.data.data(),
                out.data.data() + r * xv.cols, xv.cols);
    bool ng = needs(x) || needs(b);
    int self = next_index(t), ix = x.idx, ib = b.idx;
    return t.push(std::move(out), ng, [self, ix, ib](Tape& tp) {
        const Mat& g = tp.node(self).grad;
        if (tp.node(ix).needs_grad)
            K().axpy(1.0, g.data.data(), tp.node(ix).grad.data.data(), g.size());
        if (tp.node(ib).needs_grad) {
            double* gb = tp.node(ib).grad.data.data();
            for (std::size_t r = 0; r < g.rows; ++r)
                K().axpy(1.0, g.data.data() + r * g.cols, gb, g.cols);
        }
    });
}

Tensor mul_colvec(Tensor x, Tensor s) {
    Tape& t = same_tape(x, s);
    const Mat& xv = x.value();
    const Mat& sv = s.value();
    require(sv.cols == 1 && sv.rows == xv.rows, "mul_colvec: bad vector shape");
    Mat out(xv.rows, xv.cols);
    for (std::size_t r = 0; r < xv.rows; ++r)
        K().scale(xv.data.data() + r * xv.cols, sv.data[r],
                  out.data.data() + r * xv.cols, xv.cols);
    bool ng = needs(x) || needs(s);
    int self = next_index(t), ix = x.idx, is = s.idx;
    return t.push(std::move(out), ng, [self, ix, is](Tape& tp) {
        const Mat& g = tp.node(self).grad;
        const Mat& xv2 = tp.node(ix).value;
        const Mat& sv2 = tp.node(is).value;
        if (tp.node(ix).needs_grad) {
            double* gx = tp.node(ix).grad.data.data();
            for (std::size_t r = 0; r < g.rows; ++r)
                K().axpy(sv2.data[r], g.data.data() + r * g.cols,
                         gx + r * g.cols, g.cols);
        }
        if (tp.node(is).needs_grad) {
            double* gs = tp.node(is).grad.data.data();
            for (std::size_t r = 0; r < g.rows; ++r)
                gs[r] += K().dot(g.data.data() + r * g.cols,
                                 xv2.data.data() + r * g.cols, g.cols);
        }
    });
}

Tensor div_colvec(Tensor x, Tensor s) {
    Tape& t = same_tape(x, s);
    const Mat& xv = x.value();
    const Mat& sv = s.value();
    require(sv.cols == 1 && sv.rows == xv.rows, "div_colvec: bad vector shape");
    Mat out(xv.rows, xv.cols);
    for (std::size_t r = 0; r < xv.rows; ++r)
        K().scale(xv.data.data() + r * xv.cols, 1.0 / sv.data[r],
                  out.data.data() + r * xv.cols, xv.cols);
    bool ng = needs(x) || needs(s);
    int self = next_index(t), ix = x.idx, is = s.idx;
    return t.push(std::move(out), ng, [self, ix, is](Tape& tp) {
        const Mat& g = tp.node(self).grad;
        const Mat& ov = tp.node(self).value;
        const Mat& sv2 = tp.node(is).value;
        if (tp.node(ix).needs_grad) {
            double* gx = tp.node(ix).grad.data.data();
            for (std::size_t r = 0; r < g.rows; ++r)
                K().axpy(1.0 / sv2.data[r], g.data.data() + r * g.cols,
                         gx + r * g.cols, g.cols);
        }
        if (tp.node(is).needs_grad) {
            // d(x/s)/ds = -out/s
            double* gs = tp.node(is).grad.data.data();
            for (std::size_t r = 0; r < g.rows; ++r)
                gs[r] -= K().dot(g.data.data() + r * g.cols,
                                 ov.data.data() + r * g.cols, g.cols) /
                         sv2.data[r];
        }
    });
}

// ---- unary ----

namespace {

// out = f(value); backward: grad_in[i] += g[i] * dfun(value[i], out[i])
template <class F, class DF>
Tensor unary_op(Tensor a, F f, DF dfun) {
    Tape& t = *a.tape;
    const Mat& av = a.value();
    Mat out(av.rows, av.cols);
    for (std::size_t i = 0; i < av.size(); ++i) out.data[i] = f(av.data[i]);
    bool ng = needs(a);
    int self = next_index(t), ia = a.idx;
    return t.push(std::move(out), ng, [self, ia, dfun](Tape& tp) {
        const Mat& g = tp.node(self).grad;
        const Mat& ov = tp.node(self).value;
        const Mat& av2 = tp.node(ia).value;
        double* ga = tp.node(ia).grad.data.data();
        for (std::size_t i = 0; i < g.size(); ++i)
            ga[i] += g.data[i] * dfun(av2.data[i], ov.data[i]);
    });
}

}  // namespace

Tensor exp(Tensor a) {
    return unary_op(
        a, [](double x) { return std::exp(x); },
        [](double, double o) { return o; });
}

Tensor log(Tensor a) {
    return unary_op(
        a, [](double x) { return std::log(x); },
        [](double x, double) { return 1.0 / x; });
}

Tensor tanh(Tensor a) {
    return unary_op(
        a, [](double x) { return std::tanh(x); },
        [](double, double o) { return 1.0 - o * o; });
}

Tensor sigmoid(Tensor a) {
    return unary_op(
        a, [](double x) { return 1.0 / (1.0 + std::exp(-x)); },
        [](double, double o) { return o * (1.0 - o); });
}

Tensor sqrt(Tensor a) {
    return unary_op(
        a, [](double x) { return std::sqrt(x); },
        [](double, double o) { return 0.5 / o; });
}

Tensor recip(Tensor a) {
    return unary_op(
        a, [](double x) { return 1.0 / x; },
        [](double, double o) { return -o * o; });
}

Tensor relu(Tensor a) {
    Tape& t = *a.tape;
    const Mat& av = a.value();
    Mat out(av.rows, av.cols);
    K().clamp_min(av.data.data(), 0.0, out.data.data(), av.size());
    bool ng = needs(a);
    int self = next_index(t), ia = a.idx;
    return t.push(std::move(out), ng, [self, ia](Tape& tp) {
        const Mat& g = tp.node(self).grad;
        const Mat& av2 = tp.node(ia).value;
        double* ga = tp.node(ia).grad.data.data();
        for (std::size_t i = 0; i < g.size(); ++i)
            if (av2.data[i] > 0.0) ga[i] += g.data[i];
    });
}

Tensor clamp(Tensor a, double lo, double hi) {
    Tape& t = *a.tape;
    const Mat& av = a.value();
    Mat out(av.rows, av.cols);
    for (std::size_t i = 0; i < av.size(); ++i)
        out.data[i] = std::min(hi, std::max(lo, av.data[i]));
    bool ng = needs(a);
    int self = next_index(t), ia = a.idx;
    return t.push(std::move(out), ng, [self, ia, lo, hi](Tape& tp) {
        const Mat& g = tp.node(self).grad;
        const Mat& av2 = tp.node(ia).value;
        double* ga = tp.node(ia).grad.data.data();
        for (std::size_t i = 0; i < g.size(); ++i)
            if (av2.data[i] >= lo && av2.data[i] <= hi) ga[i] += g.data[i];
    });
}

// ---- matrix products ----

Tensor matmul(Tensor a, Tensor b) {
    Tape& t = same_tape(a, b);
    const Mat& av = a.value();
    const Mat& bv = b.value();
    require(av.cols == bv.rows, "matmul: inner dimension mismatch");
    Mat out(av.rows, bv.cols);
    K().matmul(av.data.data(), bv.data.data(), out.data.data(), av.rows,
               av.cols, bv.cols, false);
    bool ng = needs(a) || needs(b);
    int self = next_index(t), ia = a.idx, ib = b.idx;
    return t.push(std::move(out), ng, [self, ia, ib](Tape& tp) {
        const Mat& g = tp.node(self).grad;
        const Mat& av2 = tp.node(ia).value;
        const Mat& bv2 = tp.node(ib).value;
        std::size_t m = av2.rows, k = av2.cols, n = bv2.cols;
        if (tp.node(ia).needs_grad) {
            // gA += g * B^T
            Mat bt(n, k);
            kernels::transpose(bv2.data.data(), bt.data.data(), k, n);
            K().matmul(g.data.data(), bt.data.data(),
                       tp.node(ia).grad.data.data(), m, n, k, true);
        }
        if (tp.node(ib).needs_grad) {
            // gB += A^T * g
            Mat at(k, m);
            kernels::transpose(av2.data.data(), at.data.data(), m, k);
            K().matmul(at.data.data(), g.data.data(),
                       tp.node(ib).grad.data.data(), k, m, n, true);
        }
    });
}

Tensor matmul_nt(Tensor a, Tensor b) {
    Tape& t = same_tape(a, b);
    const Mat& av = a.value();
    const Mat& bv = b.value();
    require(av.cols == bv.cols, "matmul_nt: inner dimension mismatch");
    std::size_t m = av.rows, d = av.cols, n = bv.rows;
    Mat bt(d, n);
    kernels::transpose(bv.data.data(), bt.data.data(), n, d);
    Mat out(m, n);
    K().matmul(av.data.data(), bt.data.data(), out.data.data(), m, d, n, false);
    bool ng = needs(a) || needs(b);
    int self = next_index(t), ia = a.idx, ib = b.idx;
    return t.push(std::move(out), ng, [self, ia, ib](Tape& tp) {
        const Mat& g = tp.node(self).grad;
        const Mat& av2 = tp.node(ia).value;
        const Mat& bv2 = tp.node(ib).value;
        std::size_t m2 = av2.rows, d2 = av2.cols, n2 = bv2.rows;
        if (tp.node(ia).needs_grad)
            // gA += g * B
            K().matmul(g.data.data(), bv2.data.data(),
                       tp.node(ia).grad.data.data(), m2, n2, d2, true);
        if (tp.node(ib).needs_grad) {
            // gB += g^T * A
            Mat gt(n2, m2);
            kernels::transpose(g.data.data(), gt.data.data(), m2, n2);
            K().matmul(gt.data.data(), av2.data.data(),
                       tp.node(ib).grad.data.data(), n2, m2, d2, true);
        }
    });
}

// ---- reductions / shape ----

Tensor sum(Tensor a) {
    Tape& t = *a.tape;
    const Mat& av = a.value();
    Mat out = Mat::scalar(K().sum(av.data.data(), av.size()));
    bool ng = needs(a);
    int self = next_index(t), ia = a.idx;
    return t.push(std::move(out), ng, [self, ia](Tape& tp) {
        double g = tp.node(self).grad.data[0];
        Mat& ga = tp.node(ia).grad;
        for (double& x : ga.data) x += g;
    });
}

Tensor mean(Tensor a) {
    std::size_t n = a.value().size();
    require(n > 0, "mean of empty tensor");
    return scale(sum(a), 1.0 / static_cast<double>(n));
}

Tensor row_sum(Tensor a) {
    Tape& t = *a.tape;
    const Mat& av = a.value();
    Mat out(av.rows, 1);
    for (std::size_t r = 0; r < av.rows; ++r)
        out.data[r] = K().sum(av.data.data() + r * av.cols, av.cols);
    bool ng = needs(a);
    int self = next_index(t), ia = a.idx;
    return t.push(std::move(out), ng, [self, ia](Tape& tp) {
        const Mat& g = tp.node(self).grad;
        Mat& ga = tp.node(ia).grad;
        for (std::size_t r = 0; r < ga.rows; ++r) {
            double gr = g.data[r];
            double* row = ga.data.data() + r * ga.cols;
            for (std::size_t c = 0; c < ga.cols; ++c) row[c] += gr;
        }
    });
}

Tensor row_mean(Tensor a) {
    require(a.cols() > 0, "row_mean of empty rows");
    return scale(row_sum(a), 1.0 / static_cast<double>(a.cols()));
}

Tensor col_mean(Tensor a) {
    Tape& t = *a.tape;
    const Mat& av = a.value();
    require(av.rows > 0, "col_mean of empty tensor");
    Mat out(1, av.cols);
    for (std::size_t r = 0; r < av.rows; ++r)
        K().axpy(1.0, av.data.data() + r * av.cols, out.data.data(), av.cols);
    double inv = 1.0 / static_cast<double>(av.rows);
    K().scale(out.data.data(), inv, out.data.data(), av.cols);
    bool ng = needs(a);
    int self = next_index(t), ia = a.idx;
    return t.push(std::move(out), ng, [self, ia, inv](Tape& tp) {
        const Mat& g = tp.node(self).grad;
        Mat& ga = tp.node(ia).grad;
        for (std::size_t r = 0; r < ga.rows; ++r)
            K().axpy(inv, g.data.data(), ga.data.data() + r * ga.cols, ga.cols);
    });
}

Tensor reshape(Tensor a, std::size_t r, std::size_t c) {
    Tape& t = *a.tape;
    const Mat& av = a.value();
    require(r * c == av.size(), "reshape: element count mismatch");
    Mat out;
    out.rows = r;
    out.cols = c;
    out.data = av.data;
    bool ng = needs(a);
    int self = next_index(t), ia = a.idx;
    return t.push(std::move(out), ng, [self, ia](Tape& tp) {
        const Mat& g = tp.node(self).grad;
        K().axpy(1.0, g.data.data(), tp.node(ia).grad.data.data(), g.size());
    });
}

Tensor softmax_rows(Tensor a) {
    Tape& t = *a.tape;
    const Mat& av = a.value();
    require(av.cols > 0, "softmax_rows of empty rows");
    Mat out(av.rows, av.cols);
    for (std::size_t r = 0; r < av.rows; ++r) {
        const double* x = av.data.data() + r * av.cols;
        double* o = out.data.data() + r * av.cols;
        double mx = x[0];
        for (std::size_t c = 1; c < av.cols; ++c) mx = std::max(mx, x[c]);
        double z = 0.0;
        for (std::size_t c = 0; c < av.cols; ++c) {
            o[c] = std::exp(x[c] - mx);
            z += o[c];
        }
        double inv = 1.0 / z;
        for (std::size_t c = 0; c < av.cols; ++c) o[c] *= inv;
    }
    bool ng = needs(a);
    int self = next_index(t), ia = a.idx;
    return t.push(std::move(out), ng, [self, ia](Tape& tp) {
        const Mat& g = tp.node(self).grad;
        const Mat& ov = tp.node(self).value;
        Mat& ga = tp.node(ia).grad;
        for (std::size_t r = 0; r < g.rows; ++r) {
            const double* gr = g.data.data() + r * g.cols;
            const double* orow = ov.data.data() + r * g.cols;
            double* garow = ga.data.data() + r * g.cols;
            double dot = K().dot(gr, orow, g.cols);
            for (std::size_t c = 0; c < g.cols; ++c)
                garow[c] += orow[c] * (gr[c] - dot);
        }
    });
}

// ---- gather / scatter ----

Tensor gather_rows(Tensor a, std::vector<int> idx) {
    Tape& t = *a.tape;
    const Mat& av = a.value();
    Mat out(idx.size(), av.cols);
    for (std::size_t r = 0; r < idx.size(); ++r) {
        require(idx[r] >= 0 && static_cast<std::size_t>(idx[r]) < av.rows,
                "gather_rows: index out of range");
        std::memcpy(out.data.data() + r * av.cols,
                    av.data.data() + static_cast<std::size_t>(idx[r]) * av.cols,
                    av.cols * sizeof(double));
    }
    bool ng = needs(a);
    int self = next_index(t), ia = a.idx;
    return t.push(std::move(out), ng,
                  [self, ia, ix = std::move(idx)](Tape& tp) {
                      const Mat& g = tp.node(self).grad;
                      Mat& ga = tp.node(ia).grad;
                      for (std::size_t r = 0; r < ix.size(); ++r)
                          K().axpy(1.0, g.data.data() + r * g.cols,
                                   ga.data.data() +
                                       static_cast<std::size_t>(ix[r]) * g.cols,
                                   g.cols);
                  });
}

Tensor scatter_rows(Tensor rows, std::vector<int> idx, Mat base) {
    Tape& t = *rows.tape;
    const Mat& rv = rows.value();
    require(rv.rows == idx.size(), "scatter_rows: index count mismatch");
    require(rv.cols == base.cols, "scatter_rows: column mismatch");
    Mat out = std::move(base);
    for (std::size_t r = 0; r < idx.size(); ++r) {
        require(idx[r] >= 0 && static_cast<std::size_t>(idx[r]) < out.rows,
                "scatter_rows: index out of range");
        std::memcpy(out.data.data() + static_cast<std::size_t>(idx[r]) * out.cols,
                    rv.data.data() + r * rv.cols, rv.cols * sizeof(double));
    }
    bool ng = needs(rows);
    int self = next_index(t), ir = rows.idx;
    return t.push(std::move(out), ng,
                  [self, ir, ix = std::move(idx)](Tape& tp) {
                      const Mat& g = tp.node(self).grad;
                      Mat& gr = tp.node(ir).grad;
                      for (std::size_t r = 0; r < ix.size(); ++r)
                          K().axpy(1.0,
                                   g.data.data() +
                                       static_cast<std::size_t>(ix[r]) * g.cols,
                                   gr.data.data() + r * gr.cols, gr.cols);
                  });
}

Tensor concat_cols(Tensor a, Tensor b) {
    Tape& t = same_tape(a, b);
    const Mat& av = a.value();
    const Mat& bv = b.value();
    require(av.rows == bv.rows, "concat_cols: row mismatch");
    Mat out(av.rows, av.cols + bv.cols);
    for (std::size_t r = 0; r < av.rows; ++r) {
        std::memcpy(out.data.data() + r * out.cols,
                    av.data.data() + r * av.cols, av.cols * sizeof(double));
        std::memcpy(out.data.data() + r * out.cols + av.cols,
                    bv.data.data() + r * bv.cols, bv.cols * sizeof(double));
    }
    bool ng = needs(a) || needs(b);
    int self = next_index(t), ia = a.idx, ib = b.idx;
    std::size_t ac = av.cols;
    return t.push(std::move(out), ng, [self, ia, ib, ac](Tape& tp) {
        const Mat& g = tp.node(self).grad;
        if (tp.node(ia).needs_grad) {
            Mat& ga = tp.node(ia).grad;
            for (std::size_t r = 0; r < g.rows; ++r)
                K().axpy(1.0, g.data.data() + r * g.cols,
                         ga.data.data() + r * ga.cols, ga.cols);
        }
        if (tp.node(ib).needs_grad) {
            Mat& gb = tp.node(ib).grad;
            for (std::size_t r = 0; r < g.rows; ++r)
                K().axpy(1.0, g.data.data() + r * g.cols + ac,
                         gb.data.data() + r * gb.cols, gb.cols);
        }
    });
}

Tensor concat_rows(const std::vector<Tensor>& parts) {
    require(!parts.empty(), "concat_rows: no inputs");
    Tape& t = *parts[0].tape;
    std::size_t cols = parts[0].value().cols;
    std::size_t rows = 0;
    bool ng = false;
    for (const Tensor& p : parts) {
        require(p.tape == &t, "concat_rows: tensors on different tapes");
        require(p.value().cols == cols, "concat_rows: column mismatch");
        rows += p.value().rows;
        ng = ng || needs(p);
    }
    Mat out(rows, cols);
    std::vector<int> idx(parts.size());
    std::vector<std::size_t> offsets(parts.size());
    std::size_t r0 = 0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const Mat& pv = parts[i].value();
        std::memcpy(out.data.data() + r0 * cols, pv.data.data(), pv.size() * sizeof(double));
        idx[i] = parts[i].idx;
        offsets[i] = r0;
        r0 += pv.rows;
    }
    int self = next_index(t);
    return t.push(std::move(out), ng, [self, idx, offsets](Tape& tp) {
        const Mat& g = tp.node(self).grad;
        for (std::size_t i = 0; i < idx.size(); ++i) {
            if (!tp.node(idx[i]).needs_grad) continue;
            Mat& gp = tp.node(idx[i]).grad;
            K().axpy(1.0, g.data.data() + offsets[i] * g.cols, gp.data.data(), gp.size());
        }
    });
}

Tensor slice_cols(Tensor a, std::size_t c0, std::size_t c1) {
    Tape& t = *a.tape;
    const Mat& av = a.value();
    require(c0 < c1 && c1 <= av.cols, "slice_cols: bad range");
    Mat out(av.rows, c1 - c0);
    for (std::size_t r = 0; r < av.rows; ++r)
        std::memcpy(out.data.data() + r * out.cols,
                    av.data.data() + r * av.cols + c0,
                    out.cols * sizeof(double));
    bool ng = needs(a);
    int self = next_index(t), ia = a.idx;
    return t.push(std::move(out), ng, [self, ia, c0](Tape& tp) {
        const Mat& g = tp.node(self).grad;
        Mat& ga = tp.node(ia).grad;
        for (std::size_t r = 0; r < g.rows; ++r)
            K().axpy(1.0, g.data.data() + r * g.cols,
                     ga.data.data() + r * ga.cols + c0, g.cols);
    });
}

Tensor pool_mean2d(Tensor x, std::size_t h, std::size_t w, std::size_t f) {
    Tape& t = *x.tape;
    const Mat& xv = x.value();
    require(xv.rows == h * w, "pool_mean2d: row count != h*w");
    require(f > 0 && h % f == 0 && w % f == 0, "pool_mean2d: bad factor");
    std::size_t oh = h / f, ow = w / f, c = xv.cols;
    double inv = 1.0 / static_cast<double>(f * f);
    Mat out(oh * ow, c);
    for (std::size_t by = 0; by < oh; ++by)
        for (std::size_t bx = 0; bx < ow; ++bx) {
            double* o = out.data.data() + (by * ow + bx) * c;
            for (std::size_t dy = 0; dy < f; ++dy)
                for (std::size_t dx = 0; dx < f; ++dx) {
                    const double* p =
                        xv.data.data() +
                        ((by * f + dy) * w + (bx * f + dx)) * c;
                    for (std::size_t ch = 0; ch < c; ++ch) o[ch] += p[ch];
                }
            for (std::size_t ch = 0; ch < c; ++ch) o[ch] *= inv;
        }
    bool ng = needs(x);
    int self = next_index(t), ix = x.idx;
    return t.push(std::move(out), ng, [self, ix, h, w, f, inv](Tape& tp) {
        const Mat& g = tp.node(self).grad;
        Mat& gx = tp.node(ix).grad;
        std::size_t ow = w / f, c = g.cols;
        for (std::size_t y = 0; y < h; ++y)
            for (std::size_t xcol = 0; xcol < w; ++xcol) {
                const double* gp =
                    g.data.data() + ((y / f) * ow + (xcol / f)) * c;
                double* gxp = gx.data.data() + (y * w + xcol) * c;
                for (std::size_t ch = 0; ch < c; ++ch)
                    gxp[ch] += gp[ch] * inv;
            }
    });
}

Tensor where(const Mat& mask, Tensor a, Tensor b) {
    Tape& t = same_tape(a, b);
    const Mat& av = a.value();
    const Mat& bv = b.value();
    require(av.same_shape(bv) && av.same_shape(mask), "where: shape mismatch");
    Mat out(av.rows, av.cols);
    for (std::size_t i = 0; i < av.size(); ++i)
        out.data[i] = mask.data[i] != 0.0 ? av.data[i] : bv.data[i];
    bool ng = needs(a) || needs(b);
    int self = next_index(t), ia = a.idx, ib = b.idx;
    return t.push(std::move(out), ng, [self, ia, ib, m = mask](Tape& tp) {
        const Mat& g = tp.node(self).grad;
        if (tp.node(ia).needs_grad) {
            double* ga = tp.node(ia).grad.data.data();
            for (std::size_t i = 0; i < g.size(); ++i)
                if (m.data[i] != 0.0) ga[i] += g.data[i];
        }
        if (tp.node(ib).needs_grad) {
            double* gb = tp.node(ib).grad.data.data();
            for (std::size_t i = 0; i < g.size(); ++i)
                if (m.data[i] == 0.0) gb[i] += g.data[i];
        }
    });
}

// ---- composites ----

Tensor l2_normalize_rows(Tensor x) {
    Tensor norms = sqrt(row_sum(mul(x, x)));
    for (double v : norms.value().data)
        if (v < 1e-12)
            raise(ErrorKind::Numeric, "l2_normalize_rows: near-zero row norm");
    return div_colvec(x, norms);
}

Tensor cos_rows(Tensor a, Tensor b) {
    Tensor num = row_sum(mul(a, b));
    Tensor na = sqrt(row_sum(mul(a, a)));
    Tensor nb = sqrt(row_sum(mul(b, b)));
    Tensor denom = mul(na, nb);
    for (double v : denom.value().data)
        if (v < 1e-12) raise(ErrorKind::Numeric, "cos_rows: near-zero norm");
    return div(num, denom);
}

// ---- gradient checking ----

double grad_check(
    const std::function<double(const std::vector<double>&, std::vector<double>*)>& eval,
    const std::vector<double>& x0, std::vector<std::size_t> indices, double h) {
    std::vector<double> analytic;
    eval(x0, &analytic);
    require(analytic.size() == x0.size(), "grad_check: gradient size mismatch");
    if (indices.empty()) {
        indices.resize(x0.size());
        for (std::size_t i = 0; i < x0.size(); ++i) indices[i] = i;
    }
    double worst = 0.0;
    std::vector<double> x = x0;
    for (std::size_t i : indices) {
        require(i < x0.size(), "grad_check: index out of range");
        double hi = h * std::max(1.0, std::abs(x0[i]));
        x[i] = x0[i] + hi;
        double fp = eval(x, nullptr);
        x[i] = x0[i] - hi;
        double fm = eval(x, nullptr);
        x[i] = x0[i];
        double numeric = (fp - fm) / (2.0 * hi);
        double a = analytic[i];
        double d = std::abs(a - numeric);
        double rel =
            d <= 1e-8 ? 0.0
                      : d / std::max({std::abs(a), std::abs(numeric), 1e-6});
        worst = std::max(worst, rel);
    }
    return worst;
}

}  // namespace temo::ad
