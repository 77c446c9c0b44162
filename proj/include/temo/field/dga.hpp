#pragma once

#include <cstdint>

#include "temo/ad/tape.hpp"
#include "temo/field/params.hpp"
#include "temo/parse/graph.hpp"
#include "temo/util/rng.hpp"

namespace temo::field {

// Graph-guided cross attention: each surface point queries the words of the
// phrase matched to its cluster, and the attended word value is added back
// onto the point feature (residual). Projections are bias-free linear maps
// registered in the ParamSet. Dimensions are constructor parameters so
// tests can pin tiny hand-computable configurations.
struct DgaBlock {
    std::size_t point_dim = 0;
    std::size_t word_dim = 0;
    std::size_t attn_dim = 0;
    int wq = -1;  // [point_dim x attn_dim]
    int wk = -1;  // [word_dim x attn_dim]
    int wv = -1;  // [word_dim x point_dim]

    DgaBlock() = default;
    DgaBlock(ParamSet& params, const std::string& prefix, std::size_t point_dim,
             std::size_t word_dim, std::size_t attn_dim, Rng& rng);
};

// point_feats: [P x point_dim], word_feats: [m x word_dim] (rows indexed by
// graph.word_prompt_index). Attention is batched per cluster; weights over
// each point's neighborhood sum to 1. Returns point_feats + attended.
ad::Tensor dga_attend(const DgaBlock& blk, const std::vector<ad::Tensor>& params,
                      ad::Tensor point_feats, const parse::CrossModalGraph& graph,
                      ad::Tensor word_feats);

}  // namespace temo::field
