#pragma once

#include <memory>
#include <string>

#include "temo/embed/color_semantics.hpp"
#include "temo/embed/provider.hpp"

namespace temo::embed {

// Provider whose text-side features come from a file, so real pretrained
// embeddings can be dropped in offline. The image side stays the in-process
// differentiable encoder (gradients must reach the pixels).
//
// Format: a JSON manifest naming flat little-endian float32 blobs:
//   { "global_text":   {"path": "global_text.f32",   "shape": [512]},
//     "word_features": {"path": "word_features.f32", "shape": [m, 512]} }
// Paths are relative to the manifest's directory.
class FileProvider : public EmbeddingProvider {
public:
    FileProvider(std::vector<double> global_text, ad::Mat word_features,
                 std::uint64_t image_seed = ColorSemanticsProvider::kDefaultSeed);

    std::vector<double> global_text(const std::string& prompt) const override;
    // Serves the stored rows; the prompt's word count must equal m.
    ad::Mat word_features(const std::string& prompt) const override;
    ad::Tensor image_features(ad::Tape& tape,
                              const std::vector<ad::Tensor>& images,
                              std::size_t h, std::size_t w) const override;

private:
    std::vector<double> global_text_;
    ad::Mat word_features_;
    ColorSemanticsProvider image_encoder_;
};

std::unique_ptr<FileProvider> file_provider_load(const std::string& manifest_path);

// Writes the manifest plus blobs (float32) into dir; returns the manifest path.
std::string write_embedding_file(const std::string& dir,
                                 const std::vector<double>& global_text,
                                 const ad::Mat& word_features);

}  // namespace temo::embed
