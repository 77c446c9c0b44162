#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "temo/embed/augment.hpp"
#include "temo/embed/provider.hpp"
#include "temo/field/style_field.hpp"
#include "temo/geo/geometry_pass.hpp"
#include "temo/loss/cgc.hpp"
#include "temo/parse/chunker.hpp"
#include "temo/parse/gmm.hpp"
#include "temo/render/shade.hpp"
#include "temo/train/checkpoint.hpp"
#include "temo/train/optimizer.hpp"

namespace temo::train {

struct TrainConfig {
    int iterations = 1500;
    double lr0 = 5e-4;
    double lr_decay = 0.7;
    int lr_interval = 500;
    AdamWConfig adamw;
    int views_per_iter = 5;
    int crops_per_view = 2;
    double crop_scale_min = 0.6;
    double crop_scale_max = 1.0;
    int setup_views = 8;
    std::size_t render_size = 64;  // square, multiple of 8 (encoder contract)
    double camera_mean_radius = 2.2;
    double camera_sigma = 0.25;
    int checkpoint_interval = 500;
    loss::CgcWeights weights;
    Vec3 background{0, 0, 0};
    std::uint64_t seed = 0;
};

struct IterationMetrics {
    int iter = 0;
    double lr = 0, coarse = 0, fine = 0, total = 0;
};

// One view of the setup pass, kept for reporting (masks, statistics).
struct SetupView {
    geo::CameraPose pose;
    geo::IntersectionBuffer buffer;
    geo::HitMap hitmap;
    std::vector<int> labels;  // cluster id per hit pixel, scan order
};

// Prompt-to-geometry binding computed once per run: extracted phrases, the
// cluster model fitted on points pooled across the setup views, and the
// phrase assigned to each cluster by masked neutral-render matching.
struct SceneBinding {
    std::vector<parse::NounPhrase> phrases;
    parse::GmmModel gmm;
    std::vector<int> phrase_of_cluster;
    std::vector<SetupView> setup_views;
};

SceneBinding bind_scene(const geo::Mesh& mesh, const geo::Bvh& bvh,
                        const TrainConfig& cfg, const std::string& prompt,
                        const embed::EmbeddingProvider& provider,
                        const std::vector<render::SGLight>& lights);

// Flat mid-gray diffuse shading of a view under the given lights, used for
// style-independent cluster/phrase matching. Plain data, no gradients.
ad::Mat neutral_render(const geo::IntersectionBuffer& buffer,
                       const geo::HitMap& hitmap,
                       const std::vector<render::SGLight>& lights);

// Renders one view of the field. When the field has attention enabled, the
// per-point attention context is wired from the scene binding: hit points
// are labeled under the fitted cluster model and connected to the words of
// their cluster's phrase.
render::RenderResult render_field_view(ad::Tape& tape,
                                       const field::StyleField& sf,
                                       const std::vector<ad::Tensor>& leaves,
                                       const geo::IntersectionBuffer& buffer,
                                       const geo::HitMap& hitmap,
                                       const SceneBinding& scene,
                                       const ad::Mat& word_feats,
                                       const std::vector<render::SGLight>& lights,
                                       Vec3 background);

struct TrainResult {
    field::ParamSet params;
    SceneBinding scene;
    std::vector<IterationMetrics> log;
};

// Full optimization: scene binding, then per iteration camera sampling,
// geometry, field render, augmentation, embedding, the contrast loss, and
// an AdamW update under the step-decayed schedule. Deterministic given
// cfg.seed (the field init seed is derived from it; any init_seed in
// field_cfg is replaced). With a non-empty checkpoint_dir, state is written
// every checkpoint_interval iterations and at the end. Passing resume
// restores parameter values and optimizer state by name and continues the
// step counter toward cfg.iterations.
TrainResult train(const geo::Mesh& mesh, const std::string& prompt,
                  const field::FieldConfig& field_cfg, const TrainConfig& cfg,
                  const embed::EmbeddingProvider& provider,
                  const std::vector<render::SGLight>& lights,
                  const std::string& checkpoint_dir = "",
                  const Checkpoint* resume = nullptr);

// "iter,lr,coarse,fine,total" with %.17g values: re-running a seed must
// reproduce the file byte for byte.
void write_metrics_csv(const std::string& path,
                       const std::vector<IterationMetrics>& log);

}  // namespace temo::train
