#pragma once

#include <cstdint>
#include <vector>

#include "temo/ad/tape.hpp"

namespace temo::embed {

struct AugmentationPolicy {
    int crops_per_view = 1;
    double scale_min = 0.6;
    double scale_max = 1.0;
    std::uint64_t rng_seed = 0;
};

// Random crop-and-resize of each [h*w x 3] view, differentiable wrt the
// pixels: crops gather source rows, the resize is bilinear with constant
// weights. Returns n * crops_per_view images of the original size, in view
// order. A full-frame crop (scale 1) reproduces the input exactly.
std::vector<ad::Tensor> augment_views(ad::Tape& tape,
                                      const std::vector<ad::Tensor>& images,
                                      std::size_t h, std::size_t w,
                                      const AugmentationPolicy& policy);

}  // namespace temo::embed
