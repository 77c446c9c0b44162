#pragma once

#include <cstdint>
#include <optional>

#include "temo/field/dga.hpp"
#include "temo/field/params.hpp"
#include "temo/parse/graph.hpp"

namespace temo::field {

struct FieldConfig {
    int fourier_bands = 6;
    std::size_t width = 256;
    std::size_t word_dim = 512;
    double normal_scale = 0.3;     // tanh bound on the normal offset
    double roughness_min = 0.05;   // keeps the specular lobe finite
    bool dga_enabled = false;
    std::uint64_t init_seed = 1;
};

// Graph inputs for the attention block; required iff dga_enabled.
struct DgaContext {
    const parse::CrossModalGraph* graph = nullptr;
    ad::Tensor word_feats;  // [m x word_dim]
};

// The style field: a view-independent normal-offset branch and a
// view-dependent reflectance branch, both MLP trunks of width `width` with
// one shared cross-attention block after their second layers.
//
// Branch shapes (enc = Fourier encoding of each 3-vector input):
//   normal:      enc(x) ++ enc(n)  -> width -> width -> [dga] -> 3, tanh*scale
//   reflectance: enc(x) ++ enc(v)  -> width -> width -> [dga] -> heads
//   heads: diffuse 3 (sigmoid), roughness 1 (min + (1-min)*sigmoid),
//          specular 3 (sigmoid)
// The final normal layer is zero-initialized (offsets start at zero); head
// layers are zero-initialized (all materials start at the sigmoid midpoint).
class StyleField {
public:
    StyleField(const FieldConfig& cfg, ParamSet& params);

    // [P x 3] offsets; the caller renormalizes n + offset.
    ad::Tensor normal_offset(ad::Tape& tape, const std::vector<ad::Tensor>& P,
                             const ad::Mat& positions, const ad::Mat& normals,
                             const DgaContext* dga) const;

    struct Reflectance {
        ad::Tensor diffuse;    // [P x 3] in (0,1)
        ad::Tensor roughness;  // [P x 1] in (r_min, 1)
        ad::Tensor specular;   // [P x 3] in (0,1)
    };
    Reflectance reflectance(ad::Tape& tape, const std::vector<ad::Tensor>& P,
                            const ad::Mat& positions, const ad::Mat& view_dirs,
                            const DgaContext* dga) const;

    const FieldConfig& config() const { return cfg_; }

private:
    ad::Tensor trunk_input(ad::Tape& tape, const ad::Mat& a, const ad::Mat& b) const;

    FieldConfig cfg_;
    std::size_t enc_dim_ = 0;
    // parameter indices
    int n1w_, n1b_, n2w_, n2b_, n3w_, n3b_;
    int r1w_, r1b_, r2w_, r2b_;
    int dw_, db_, rw_, rb_, sw_, sb_;
    std::optional<DgaBlock> dga_;
};

}  // namespace temo::field
