#include "temo/loss/cgc.hpp"

#include <cmath>

#include "temo/util/error.hpp"

namespace temo::loss {
namespace {

// softmax-weighted mean of a single row vector
ad::Tensor weighted_mean(ad::Tensor row) {
    return ad::sum(ad::mul(ad::softmax_rows(row), row));
}

}  // namespace

ad::Tensor coarse_loss(ad::Tensor image_feature, ad::Tensor text_feature) {
    if (image_feature.rows() != 1 || text_feature.rows() != 1)
        raise(ErrorKind::Config, "coarse_loss expects single-row features");
    if (image_feature.cols() != text_feature.cols())
        raise(ErrorKind::Config, "coarse_loss feature widths differ");
    return ad::neg(ad::cos_rows(image_feature, text_feature));
}

CorrelationMap correlation_map(ad::Tensor image_rows, ad::Tensor word_rows) {
    if (image_rows.rows() < 1 || word_rows.rows() < 1)
        raise(ErrorKind::Config, "correlation_map needs at least one row per side");
    if (image_rows.cols() != word_rows.cols())
        raise(ErrorKind::Config, "correlation_map feature widths differ");
    CorrelationMap map;
    map.S = ad::matmul_nt(ad::l2_normalize_rows(image_rows),
                          ad::l2_normalize_rows(word_rows));
    map.S_I = ad::row_mean(map.S);
    map.S_T = ad::col_mean(map.S);
    return map;
}

ad::Tensor fine_loss(const CorrelationMap& map) {
    const std::size_t n = map.S_I.rows();
    const std::size_t m = map.S_T.cols();
    if (map.S_I.cols() != 1 || map.S_T.rows() != 1)
        raise(ErrorKind::Config, "fine_loss axis means have wrong orientation");
    if (map.S.rows() != n || map.S.cols() != m)
        raise(ErrorKind::Config, "fine_loss map shapes disagree");
    ad::Tensor li = weighted_mean(ad::reshape(map.S_I, 1, n));
    ad::Tensor lt = weighted_mean(map.S_T);
    return ad::scale(ad::add(li, lt), -0.5);
}

ad::Tensor cgc_loss(ad::Tensor coarse, ad::Tensor fine, const CgcWeights& w) {
    if (w.lambda_coarse < 0.0 || w.lambda_fine < 0.0)
        raise(ErrorKind::Config, "loss weights must be non-negative");
    if (coarse.rows() != 1 || coarse.cols() != 1 || fine.rows() != 1 ||
        fine.cols() != 1)
        raise(ErrorKind::Config, "cgc_loss expects scalar terms");
    if (!std::isfinite(coarse.value().data[0]) ||
        !std::isfinite(fine.value().data[0]))
        raise(ErrorKind::Numeric, "cgc_loss received a non-finite term");
    return ad::add(ad::scale(coarse, w.lambda_coarse),
                   ad::scale(fine, w.lambda_fine));
}

}  // namespace temo::loss
