#include "temo/field/style_field.hpp"

#include <cmath>

#include "temo/field/fourier.hpp"
#include "temo/util/error.hpp"
#include "temo/util/rng.hpp"

namespace temo::field {
namespace {

ad::Mat he_init(std::size_t rows, std::size_t cols, Rng& rng) {
    ad::Mat m(rows, cols);
    double s = std::sqrt(2.0 / static_cast<double>(rows));
    for (double& v : m.data) v = s * rng.gaussian();
    return m;
}

ad::Tensor linear(ad::Tensor x, const std::vector<ad::Tensor>& P, int w, int b) {
    return ad::add_rowvec(ad::matmul(x, P[static_cast<std::size_t>(w)]),
                          P[static_cast<std::size_t>(b)]);
}

}  // namespace

StyleField::StyleField(const FieldConfig& cfg, ParamSet& params) : cfg_(cfg) {
    if (cfg.fourier_bands < 1 || cfg.width == 0 || cfg.word_dim == 0)
        raise(ErrorKind::Config, "bad style field configuration");
    if (!(cfg.normal_scale > 0.0) || !(cfg.roughness_min > 0.0) ||
        cfg.roughness_min >= 1.0)
        raise(ErrorKind::Config, "bad style field bounds");
    enc_dim_ = 2 * static_cast<std::size_t>(cfg.fourier_bands) * 3;
    const std::size_t in = 2 * enc_dim_;
    const std::size_t wdt = cfg.width;
    Rng rng(substream_seed(cfg.init_seed, "style_field"));

    n1w_ = params.add("normal.l1.w", he_init(in, wdt, rng));
    n1b_ = params.add("normal.l1.b", ad::Mat(1, wdt));
    n2w_ = params.add("normal.l2.w", he_init(wdt, wdt, rng));
    n2b_ = params.add("normal.l2.b", ad::Mat(1, wdt));
    n3w_ = params.add("normal.l3.w", ad::Mat(wdt, 3));  // zero: start unstyled
    n3b_ = params.add("normal.l3.b", ad::Mat(1, 3));

    r1w_ = params.add("refl.l1.w", he_init(in, wdt, rng));
    r1b_ = params.add("refl.l1.b", ad::Mat(1, wdt));
    r2w_ = params.add("refl.l2.w", he_init(wdt, wdt, rng));
    r2b_ = params.add("refl.l2.b", ad::Mat(1, wdt));

    dw_ = params.add("refl.diffuse.w", ad::Mat(wdt, 3));  // zero: sigmoid midpoint
    db_ = params.add("refl.diffuse.b", ad::Mat(1, 3));
    rw_ = params.add("refl.roughness.w", ad::Mat(wdt, 1));
    rb_ = params.add("refl.roughness.b", ad::Mat(1, 1));
    sw_ = params.add("refl.specular.w", ad::Mat(wdt, 3));
    sb_ = params.add("refl.specular.b", ad::Mat(1, 3));

    if (cfg.dga_enabled)
        dga_.emplace(params, "dga", wdt, cfg.word_dim, wdt, rng);
}

ad::Tensor StyleField::trunk_input(ad::Tape& tape, const ad::Mat& a,
                                   const ad::Mat& b) const {
    if (a.rows != b.rows || a.cols != 3 || b.cols != 3)
        raise(ErrorKind::Internal, "style field inputs must be [P x 3]");
    ad::Mat enc(a.rows, 2 * enc_dim_);
    ad::Mat ea = fourier_encode(a, cfg_.fourier_bands);
    ad::Mat eb = fourier_encode(b, cfg_.fourier_bands);
    for (std::size_t r = 0; r < a.rows; ++r) {
        for (std::size_t c = 0; c < enc_dim_; ++c) {
            enc.at(r, c) = ea.at(r, c);
            enc.at(r, enc_dim_ + c) = eb.at(r, c);
        }
    }
    return tape.constant(std::move(enc));
}

ad::Tensor StyleField::normal_offset(ad::Tape& tape,
                                     const std::vector<ad::Tensor>& P,
                                     const ad::Mat& positions,
                                     const ad::Mat& normals,
                                     const DgaContext* dga) const {
    ad::Tensor h = trunk_input(tape, positions, normals);
    h = ad::relu(linear(h, P, n1w_, n1b_));
    h = ad::relu(linear(h, P, n2w_, n2b_));
    if (cfg_.dga_enabled) {
        if (!dga || !dga->graph)
            raise(ErrorKind::Config,
                  "style field has attention enabled but no graph context");
        h = dga_attend(*dga_, P, h, *dga->graph, dga->word_feats);
    }
    return ad::scale(ad::tanh(linear(h, P, n3w_, n3b_)), cfg_.normal_scale);
}

StyleField::Reflectance StyleField::reflectance(ad::Tape& tape,
                                                const std::vector<ad::Tensor>& P,
                                                const ad::Mat& positions,
                                                const ad::Mat& view_dirs,
                                                const DgaContext* dga) const {
    ad::Tensor h = trunk_input(tape, positions, view_dirs);
    h = ad::relu(linear(h, P, r1w_, r1b_));
    h = ad::relu(linear(h, P, r2w_, r2b_));
    if (cfg_.dga_enabled) {
        if (!dga || !dga->graph)
            raise(ErrorKind::Config,
                  "style field has attention enabled but no graph context");
        h = dga_attend(*dga_, P, h, *dga->graph, dga->word_feats);
    }
    Reflectance out;
    out.diffuse = ad::sigmoid(linear(h, P, dw_, db_));
    ad::Tensor rr = ad::sigmoid(linear(h, P, rw_, rb_));
    out.roughness = ad::add_scalar(ad::scale(rr, 1.0 - cfg_.roughness_min),
                                   cfg_.roughness_min);
    out.specular = ad::sigmoid(linear(h, P, sw_, sb_));
    return out;
}

}  // namespace temo::field
