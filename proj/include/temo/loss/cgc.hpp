#pragma once

#include "temo/ad/tape.hpp"

namespace temo::loss {

// Cross-grained contrast: a coarse global-feature term plus a fine
// word-level term computed from a cosine correlation map between image
// rows and word rows.

// S holds the pairwise cosines; S_I / S_T are its row and column means.
struct CorrelationMap {
    ad::Tensor S;    // [n x m]
    ad::Tensor S_I;  // [n x 1]
    ad::Tensor S_T;  // [1 x m]
};

struct CgcWeights {
    double lambda_coarse = 1.0;
    double lambda_fine = 0.33;
};

// -cos(F_I, F_T) for two single-row feature vectors of equal width.
ad::Tensor coarse_loss(ad::Tensor image_feature, ad::Tensor text_feature);

// Pairwise cosine block between image rows [n x d] and word rows [m x d],
// with its axis means. Raises on zero-norm rows.
CorrelationMap correlation_map(ad::Tensor image_rows, ad::Tensor word_rows);

// -(L_I + L_T)/2 where each L is the softmax-weighted mean of one axis'
// mean vector; sharper axes weight their own strongest entries more.
ad::Tensor fine_loss(const CorrelationMap& map);

// lambda_coarse * coarse + lambda_fine * fine.
ad::Tensor cgc_loss(ad::Tensor coarse, ad::Tensor fine, const CgcWeights& w);

}  // namespace temo::loss
