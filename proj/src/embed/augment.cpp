#include "temo/embed/augment.hpp"

#include <algorithm>
#include <cmath>

#include "temo/util/error.hpp"
#include "temo/util/rng.hpp"

namespace temo::embed {
namespace {

// One bilinear crop-resize: output pixel (y, x) samples the crop window
// [oy, oy + s*h) x [ox, ox + s*w) at its own relative position.
ad::Tensor crop_resize(ad::Tape& tape, ad::Tensor img, std::size_t h,
                       std::size_t w, double s, double oy, double ox) {
    const std::size_t n = h * w;
    std::vector<int> i00(n), i01(n), i10(n), i11(n);
    ad::Mat w00(n, 1), w01(n, 1), w10(n, 1), w11(n, 1);
    for (std::size_t y = 0; y < h; ++y) {
        double sy = oy + (static_cast<double>(y) + 0.5) * s - 0.5;
        sy = std::clamp(sy, 0.0, static_cast<double>(h - 1));
        std::size_t y0 = static_cast<std::size_t>(sy);
        std::size_t y1 = std::min(y0 + 1, h - 1);
        double fy = sy - static_cast<double>(y0);
        for (std::size_t x = 0; x < w; ++x) {
            double sx = ox + (static_cast<double>(x) + 0.5) * s - 0.5;
            sx = std::clamp(sx, 0.0, static_cast<double>(w - 1));
            std::size_t x0 = static_cast<std::size_t>(sx);
            std::size_t x1 = std::min(x0 + 1, w - 1);
            double fx = sx - static_cast<double>(x0);
            std::size_t p = y * w + x;
            i00[p] = static_cast<int>(y0 * w + x0);
            i01[p] = static_cast<int>(y0 * w + x1);
            i10[p] = static_cast<int>(y1 * w + x0);
            i11[p] = static_cast<int>(y1 * w + x1);
            w00.at(p, 0) = (1.0 - fy) * (1.0 - fx);
            w01.at(p, 0) = (1.0 - fy) * fx;
            w10.at(p, 0) = fy * (1.0 - fx);
            w11.at(p, 0) = fy * fx;
        }
    }
    ad::Tensor out = ad::mul_colvec(ad::gather_rows(img, std::move(i00)),
                                    tape.constant(std::move(w00)));
    out = ad::add(out, ad::mul_colvec(ad::gather_rows(img, std::move(i01)),
                                      tape.constant(std::move(w01))));
    out = ad::add(out, ad::mul_colvec(ad::gather_rows(img, std::move(i10)),
                                      tape.constant(std::move(w10))));
    out = ad::add(out, ad::mul_colvec(ad::gather_rows(img, std::move(i11)),
                                      tape.constant(std::move(w11))));
    return out;
}

}  // namespace

std::vector<ad::Tensor> augment_views(ad::Tape& tape,
                                      const std::vector<ad::Tensor>& images,
                                      std::size_t h, std::size_t w,
                                      const AugmentationPolicy& policy) {
    if (policy.crops_per_view < 1)
        raise(ErrorKind::Config, "crops_per_view must be at least 1");
    if (!(policy.scale_min > 0.0) || policy.scale_min > policy.scale_max ||
        policy.scale_max > 1.0)
        raise(ErrorKind::Config, "crop scale range must satisfy 0 < min <= max <= 1");
    Rng rng(substream_seed(policy.rng_seed, "augment"));
    std::vector<ad::Tensor> out;
    out.reserve(images.size() * static_cast<std::size_t>(policy.crops_per_view));
    for (const ad::Tensor& img : images) {
        const ad::Mat& v = img.value();
        if (v.rows != h * w || v.cols != 3)
            raise(ErrorKind::Config, "augment_views: bad image shape");
        for (int a = 0; a < policy.crops_per_view; ++a) {
            double s = rng.uniform(policy.scale_min, policy.scale_max);
            double oy = rng.uniform(0.0, (1.0 - s) * static_cast<double>(h));
            double ox = rng.uniform(0.0, (1.0 - s) * static_cast<double>(w));
            out.push_back(crop_resize(tape, img, h, w, s, oy, ox));
        }
    }
    return out;
}

}  // namespace temo::embed
