#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "temo/util/error.hpp"

namespace temo::ad {

// Dense row-major matrix of doubles. Vectors are 1xN or Nx1, scalars 1x1.
struct Mat {
    std::size_t rows = 0, cols = 0;
    std::vector<double> data;

    Mat() = default;
    Mat(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    static Mat full(std::size_t r, std::size_t c, double v) {
        Mat m(r, c);
        for (double& x : m.data) x = v;
        return m;
    }
    static Mat scalar(double v) { return full(1, 1, v); }
    static Mat from(std::vector<double> vals, std::size_t r, std::size_t c) {
        if (vals.size() != r * c)
            raise(ErrorKind::Internal, "matrix init size mismatch");
        Mat m;
        m.rows = r;
        m.cols = c;
        m.data = std::move(vals);
        return m;
    }

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    std::size_t size() const { return data.size(); }
    bool same_shape(const Mat& o) const {
        return rows == o.rows && cols == o.cols;
    }
};

class Tape;

// Handle to a tape node. Cheap to copy; valid while the tape lives.
struct Tensor {
    Tape* tape = nullptr;
    int idx = -1;

    const Mat& value() const;
    const Mat& grad() const;
    std::size_t rows() const;
    std::size_t cols() const;
    double scalar_value() const;
};

// Reverse-mode tape. One tape per training iteration: ops append nodes with
// backward closures, backward() sweeps them in reverse creation order (a
// valid topological order, since parents always precede children).
class Tape {
public:
    Tensor leaf(Mat value);      // differentiable input (parameters)
    Tensor constant(Mat value);  // data; no gradient flows

    void backward(Tensor root);  // root must be 1x1

    std::size_t node_count() const { return nodes_.size(); }

    // internal plumbing for ops
    struct Node {
        Mat value;
        Mat grad;  // allocated only when needs_grad
        std::function<void(Tape&)> back;
        bool needs_grad = false;
    };
    Node& node(int idx) { return nodes_[idx]; }
    const Node& node(int idx) const { return nodes_[idx]; }
    Tensor push(Mat value, bool needs_grad, std::function<void(Tape&)> back);

private:
    std::vector<Node> nodes_;
};

// ---- elementwise, same shape ----
Tensor add(Tensor a, Tensor b);
Tensor sub(Tensor a, Tensor b);
Tensor mul(Tensor a, Tensor b);
Tensor div(Tensor a, Tensor b);

// ---- scalar constants ----
Tensor scale(Tensor a, double s);
Tensor add_scalar(Tensor a, double s);
inline Tensor neg(Tensor a) { return scale(a, -1.0); }
// s - a
inline Tensor rsub_scalar(double s, Tensor a) {
    return add_scalar(scale(a, -1.0), s);
}

// ---- broadcasts ----
// x[m x n] + b[1 x n]
Tensor add_rowvec(Tensor x, Tensor b);
// x[m x n] * s[m x 1], row i scaled by s[i]
Tensor mul_colvec(Tensor x, Tensor s);
// x[m x n] / s[m x 1]
Tensor div_colvec(Tensor x, Tensor s);

// ---- unary ----
Tensor exp(Tensor a);
Tensor log(Tensor a);
Tensor tanh(Tensor a);
Tensor sigmoid(Tensor a);
Tensor sqrt(Tensor a);
Tensor recip(Tensor a);
Tensor relu(Tensor a);
// Gradient passes where lo <= x <= hi (x is the pre-clamp input).
Tensor clamp(Tensor a, double lo, double hi);
inline Tensor clamp_min(Tensor a, double lo) {
    return clamp(a, lo, std::numeric_limits<double>::infinity());
}

// ---- matrix products ----
Tensor matmul(Tensor a, Tensor b);     // [m x k][k x n]
Tensor matmul_nt(Tensor a, Tensor b);  // a[m x d] * b[n x d]^T -> [m x n]

// ---- reductions / shape ----
Tensor sum(Tensor a);   // -> 1x1
Tensor mean(Tensor a);  // -> 1x1
Tensor row_sum(Tensor a);   // [m x n] -> [m x 1]
Tensor row_mean(Tensor a);  // [m x n] -> [m x 1]
Tensor col_mean(Tensor a);  // [m x n] -> [1 x n]
Tensor reshape(Tensor a, std::size_t r, std::size_t c);

// Row-wise softmax. The shift by the row max is treated as a constant, which
// is exact: softmax is invariant to it.
Tensor softmax_rows(Tensor a);

// ---- gather / scatter ----
Tensor gather_rows(Tensor a, std::vector<int> idx);
// out = base; out[idx[r], :] = rows[r, :]. Indices must be distinct.
Tensor scatter_rows(Tensor rows, std::vector<int> idx, Mat base);
Tensor concat_cols(Tensor a, Tensor b);
// Stacks same-width tensors top to bottom.
Tensor concat_rows(const std::vector<Tensor>& parts);
Tensor slice_cols(Tensor a, std::size_t c0, std::size_t c1);  // [c0, c1)

// x as an H x W image with C channels per row entry ([H*W x C]); averages
// f x f blocks -> [(H/f)*(W/f) x C].
Tensor pool_mean2d(Tensor x, std::size_t h, std::size_t w, std::size_t f);

// mask is data (1 -> a, 0 -> b); gradient flows through the taken side.
Tensor where(const Mat& mask, Tensor a, Tensor b);

// ---- composites ----
// Rows scaled to unit L2 norm. Raises Numeric when a row norm is < 1e-12.
Tensor l2_normalize_rows(Tensor x);
// Row-wise cosine similarity of two [m x d] tensors -> [m x 1].
Tensor cos_rows(Tensor a, Tensor b);

// ---- gradient checking ----
// eval(x, g): computes the scalar objective at x; when g != nullptr it must
// also fill *g with the analytic gradient (same length as x).
// Compares analytic gradients against central differences at the given
// indices (all of x when empty). Returns the worst relative error, where
// rel = |a - n| / max(|a|, |n|, 1e-6), with an absolute escape below 1e-8.
double grad_check(
    const std::function<double(const std::vector<double>&, std::vector<double>*)>& eval,
    const std::vector<double>& x0, std::vector<std::size_t> indices = {},
    double h = 1e-4);

}  // namespace temo::ad
