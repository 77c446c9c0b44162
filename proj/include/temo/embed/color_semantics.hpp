#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "temo/embed/provider.hpp"
#include "temo/util/vec3.hpp"

namespace temo::embed {

// RGB meaning of a color adjective, if the word is one.
std::optional<Vec3> color_of_word(const std::string& word);

// Toy encoder pair with shared color semantics. Images are downsampled to
// an 8x8x3 patch, flattened, passed through a fixed seeded linear map to
// 512 features, and squashed with tanh. A color word embeds as the encoding
// of a uniform patch of that color, so text and image features of the same
// color coincide; any other word gets a seeded random unit vector.
// Deterministic given the seed; immutable after construction.
class ColorSemanticsProvider : public EmbeddingProvider {
public:
    static constexpr std::uint64_t kDefaultSeed = 20240611ull;

    explicit ColorSemanticsProvider(std::uint64_t seed = kDefaultSeed,
                                    double gain = 3.0);

    std::vector<double> global_text(const std::string& prompt) const override;
    ad::Mat word_features(const std::string& prompt) const override;
    ad::Tensor image_features(ad::Tape& tape,
                              const std::vector<ad::Tensor>& images,
                              std::size_t h, std::size_t w) const override;

    // Single word embedding (row of word_features for that word).
    std::vector<double> word_vector(const std::string& word) const;

    // Data-side encoding of a flattened 8x8x3 patch.
    std::vector<double> encode_patch(const std::vector<double>& patch) const;

private:
    ad::Mat w_enc_;  // [192 x 512]
    std::uint64_t seed_;
};

}  // namespace temo::embed
