#include "temo/embed/provider.hpp"

namespace temo::embed {

ad::Mat image_features_data(const EmbeddingProvider& provider,
                            const std::vector<ad::Mat>& images, std::size_t h,
                            std::size_t w) {
    ad::Tape tape;
    std::vector<ad::Tensor> tensors;
    tensors.reserve(images.size());
    for (const ad::Mat& img : images) tensors.push_back(tape.constant(img));
    return provider.image_features(tape, tensors, h, w).value();
}

}  // namespace temo::embed
