#include "temo/field/dga.hpp"

#include <cmath>

#include "temo/util/error.hpp"

namespace temo::field {
namespace {

ad::Mat gaussian_init(std::size_t rows, std::size_t cols, double std_dev,
                      Rng& rng) {
    ad::Mat m(rows, cols);
    for (double& v : m.data) v = std_dev * rng.gaussian();
    return m;
}

}  // namespace

DgaBlock::DgaBlock(ParamSet& params, const std::string& prefix,
                   std::size_t point_dim_, std::size_t word_dim_,
                   std::size_t attn_dim_, Rng& rng)
    : point_dim(point_dim_), word_dim(word_dim_), attn_dim(attn_dim_) {
    if (point_dim == 0 || word_dim == 0 || attn_dim == 0)
        raise(ErrorKind::Config, "attention dims must be positive");
    wq = params.add(prefix + ".wq",
                    gaussian_init(point_dim, attn_dim,
                                  1.0 / std::sqrt(static_cast<double>(point_dim)), rng));
    wk = params.add(prefix + ".wk",
                    gaussian_init(word_dim, attn_dim,
                                  1.0 / std::sqrt(static_cast<double>(word_dim)), rng));
    wv = params.add(prefix + ".wv",
                    gaussian_init(word_dim, point_dim,
                                  1.0 / std::sqrt(static_cast<double>(word_dim)), rng));
}

ad::Tensor dga_attend(const DgaBlock& blk, const std::vector<ad::Tensor>& params,
                      ad::Tensor point_feats, const parse::CrossModalGraph& graph,
                      ad::Tensor word_feats) {
    ad::Tape& tape = *point_feats.tape;
    const std::size_t P = point_feats.rows();
    if (P != graph.num_points)
        raise(ErrorKind::Internal, "dga_attend: point count mismatch");
    if (point_feats.cols() != blk.point_dim)
        raise(ErrorKind::Internal, "dga_attend: point feature width mismatch");
    if (word_feats.cols() != blk.word_dim)
        raise(ErrorKind::Internal, "dga_attend: word feature width mismatch");
    for (std::size_t idx : graph.word_prompt_index)
        if (idx >= word_feats.rows())
            raise(ErrorKind::Internal, "dga_attend: word index out of range");

    ad::Tensor Wq = params[static_cast<std::size_t>(blk.wq)];
    ad::Tensor Wk = params[static_cast<std::size_t>(blk.wk)];
    ad::Tensor Wv = params[static_cast<std::size_t>(blk.wv)];

    // rows of word_feats for the graph's word nodes, in node order
    std::vector<int> node_rows(graph.num_words());
    for (std::size_t j = 0; j < graph.num_words(); ++j)
        node_rows[j] = static_cast<int>(graph.word_prompt_index[j]);
    ad::Tensor W_nodes = ad::gather_rows(word_feats, std::move(node_rows));

    double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(blk.attn_dim));
    ad::Tensor attended = tape.constant(ad::Mat(P, blk.point_dim));
    const int k = static_cast<int>(graph.points_of_cluster.size());
    for (int c = 0; c < k; ++c) {
        const std::vector<int>& pts = graph.points_of_cluster[c];
        const std::vector<int>& wds = graph.words_of_cluster[c];
        if (pts.empty()) continue;
        if (wds.empty())
            raise(ErrorKind::Internal,
                  "dga_attend: points with no words to attend to");
        ad::Tensor V_pts = ad::gather_rows(point_feats, pts);  // [Pc x pd]
        ad::Tensor W_c = ad::gather_rows(W_nodes, wds);        // [Wc x wd]
        ad::Tensor Q = ad::matmul(V_pts, Wq);                  // [Pc x ad]
        ad::Tensor K = ad::matmul(W_c, Wk);                    // [Wc x ad]
        ad::Tensor logits = ad::scale(ad::matmul_nt(Q, K), inv_sqrt_d);
        ad::Tensor alpha = ad::softmax_rows(logits);           // [Pc x Wc]
        ad::Tensor Vv = ad::matmul(W_c, Wv);                   // [Wc x pd]
        ad::Tensor out_c = ad::matmul(alpha, Vv);              // [Pc x pd]
        attended = ad::add(attended,
                           ad::scatter_rows(out_c, pts, ad::Mat(P, blk.point_dim)));
    }
    return ad::add(point_feats, attended);
}

}  // namespace temo::field
