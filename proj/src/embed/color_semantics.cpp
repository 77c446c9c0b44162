#include "temo/embed/color_semantics.hpp"

#include <cmath>

#include "temo/kernels/kernels.hpp"
#include "temo/parse/chunker.hpp"
#include "temo/util/error.hpp"
#include "temo/util/rng.hpp"

namespace temo::embed {
namespace {

constexpr std::size_t kPatch = 8;                      // pooled side
constexpr std::size_t kIn = kPatch * kPatch * 3;       // 192
constexpr std::size_t kOut = EmbeddingProvider::kDim;  // 512

std::vector<double> unit_normalize(std::vector<double> v) {
    double n2 = 0.0;
    for (double x : v) n2 += x * x;
    double n = std::sqrt(n2);
    if (n < 1e-12) raise(ErrorKind::Numeric, "zero-norm embedding");
    for (double& x : v) x /= n;
    return v;
}

}  // namespace

std::optional<Vec3> color_of_word(const std::string& word) {
    if (word == "red") return Vec3{1.0, 0.0, 0.0};
    if (word == "green") return Vec3{0.0, 1.0, 0.0};
    if (word == "blue") return Vec3{0.0, 0.0, 1.0};
    if (word == "yellow") return Vec3{1.0, 1.0, 0.0};
    if (word == "cyan") return Vec3{0.0, 1.0, 1.0};
    if (word == "magenta") return Vec3{1.0, 0.0, 1.0};
    if (word == "white") return Vec3{1.0, 1.0, 1.0};
    if (word == "black") return Vec3{0.02, 0.02, 0.02};
    if (word == "orange") return Vec3{1.0, 0.5, 0.0};
    if (word == "purple") return Vec3{0.5, 0.0, 1.0};
    if (word == "pink") return Vec3{1.0, 0.6, 0.8};
    if (word == "brown") return Vec3{0.45, 0.3, 0.15};
    if (word == "gray" || word == "grey") return Vec3{0.5, 0.5, 0.5};
    if (word == "gold") return Vec3{1.0, 0.84, 0.2};
    if (word == "silver") return Vec3{0.75, 0.75, 0.78};
    return std::nullopt;
}

ColorSemanticsProvider::ColorSemanticsProvider(std::uint64_t seed, double gain)
    : w_enc_(kIn, kOut), seed_(seed) {
    if (gain <= 0.0) raise(ErrorKind::Config, "encoder gain must be positive");
    Rng rng(substream_seed(seed, "encoder"));
    double scale = gain / std::sqrt(static_cast<double>(kIn));
    for (double& w : w_enc_.data) w = scale * rng.gaussian();
}

std::vector<double> ColorSemanticsProvider::encode_patch(
    const std::vector<double>& patch) const {
    if (patch.size() != kIn)
        raise(ErrorKind::Config, "encoder patch must be 8x8x3");
    std::vector<double> out(kOut);
    const kernels::Ops& K = kernels::ops();
    K.matmul(patch.data(), w_enc_.data.data(), out.data(), 1, kIn, kOut, false);
    for (double& x : out) x = std::tanh(x);
    return out;
}

std::vector<double> ColorSemanticsProvider::word_vector(
    const std::string& word) const {
    if (auto rgb = color_of_word(word)) {
        std::vector<double> patch(kIn);
        for (std::size_t cell = 0; cell < kPatch * kPatch; ++cell) {
            patch[cell * 3 + 0] = rgb->x;
            patch[cell * 3 + 1] = rgb->y;
            patch[cell * 3 + 2] = rgb->z;
        }
        return encode_patch(patch);
    }
    Rng rng(substream_seed(seed_, "word:" + word));
    std::vector<double> v(kOut);
    for (double& x : v) x = rng.gaussian();
    return unit_normalize(std::move(v));
}

ad::Mat ColorSemanticsProvider::word_features(const std::string& prompt) const {
    std::vector<std::string> toks = parse::words(prompt);
    if (toks.empty()) raise(ErrorKind::Parse, "empty prompt");
    ad::Mat rows(toks.size(), kOut);
    for (std::size_t r = 0; r < toks.size(); ++r) {
        std::vector<double> v = word_vector(toks[r]);
        for (std::size_t c = 0; c < kOut; ++c) rows.at(r, c) = v[c];
    }
    return rows;
}

std::vector<double> ColorSemanticsProvider::global_text(
    const std::string& prompt) const {
    std::vector<std::string> toks = parse::words(prompt);
    if (toks.empty()) raise(ErrorKind::Parse, "empty prompt");
    std::vector<double> mean_all(kOut, 0.0), mean_color(kOut, 0.0);
    std::size_t n_color = 0;
    for (const std::string& w : toks) {
        std::vector<double> v = word_vector(w);
        for (std::size_t c = 0; c < kOut; ++c) mean_all[c] += v[c];
        if (color_of_word(w)) {
            ++n_color;
            for (std::size_t c = 0; c < kOut; ++c) mean_color[c] += v[c];
        }
    }
    for (double& x : mean_all) x /= static_cast<double>(toks.size());
    if (n_color == 0) return unit_normalize(std::move(mean_all));
    for (double& x : mean_color) x /= static_cast<double>(n_color);
    // weight color semantics over filler words
    const double alpha = 0.75;
    std::vector<double> g(kOut);
    for (std::size_t c = 0; c < kOut; ++c)
        g[c] = (1.0 - alpha) * mean_all[c] + alpha * mean_color[c];
    return unit_normalize(std::move(g));
}

ad::Tensor ColorSemanticsProvider::image_features(
    ad::Tape& tape, const std::vector<ad::Tensor>& images, std::size_t h,
    std::size_t w) const {
    if (images.empty()) raise(ErrorKind::Config, "image_features: no images");
    if (h != w || h % kPatch != 0)
        raise(ErrorKind::Config,
              "image encoder needs square images with side a multiple of 8");
    std::size_t f = h / kPatch;
    std::vector<ad::Tensor> pooled;
    pooled.reserve(images.size());
    for (const ad::Tensor& img : images) {
        const ad::Mat& v = img.value();
        if (v.rows != h * w || v.cols != 3)
            raise(ErrorKind::Config, "image_features: bad image shape");
        pooled.push_back(ad::reshape(ad::pool_mean2d(img, h, w, f), 1, kIn));
    }
    ad::Tensor stacked = ad::concat_rows(pooled);  // [n x 192]
    ad::Tensor weights = tape.constant(w_enc_);
    return ad::tanh(ad::matmul(stacked, weights));
}

}  // namespace temo::embed
