#pragma once

#include <memory>
#include <string>
#include <vector>

#include "temo/ad/tape.hpp"

namespace temo::embed {

// Stand-in contract for a frozen vision-language encoder pair. Text-side
// features are plain data; image-side features are tape ops so gradients
// reach the pixels. Feature width is fixed at 512.
//
// Images are row-major [h*w x 3] matrices of linear RGB in [0, 1]. The
// image encoder requires square images whose side is a multiple of 8.
class EmbeddingProvider {
public:
    static constexpr std::size_t kDim = 512;

    virtual ~EmbeddingProvider() = default;

    // [512], unit length
    virtual std::vector<double> global_text(const std::string& prompt) const = 0;

    // [m x 512], one row per prompt token under parse::tokenize
    virtual ad::Mat word_features(const std::string& prompt) const = 0;

    // [n x 512], differentiable wrt the image tensors
    virtual ad::Tensor image_features(ad::Tape& tape,
                                      const std::vector<ad::Tensor>& images,
                                      std::size_t h, std::size_t w) const = 0;

    // [1 x 512]: exactly the row mean of image_features
    ad::Tensor global_image(ad::Tape& tape, const std::vector<ad::Tensor>& images,
                            std::size_t h, std::size_t w) const {
        return ad::col_mean(image_features(tape, images, h, w));
    }
};

// Data-side convenience: embeds images that need no gradient.
// Returns the [n x 512] feature matrix values.
ad::Mat image_features_data(const EmbeddingProvider& provider,
                            const std::vector<ad::Mat>& images, std::size_t h,
                            std::size_t w);

}  // namespace temo::embed
