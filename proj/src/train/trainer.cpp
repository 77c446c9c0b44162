#include "temo/train/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "temo/parse/graph.hpp"
#include "temo/parse/matching.hpp"
#include "temo/util/error.hpp"
#include "temo/util/rng.hpp"

namespace temo::train {
namespace {

void validate(const TrainConfig& cfg) {
    if (cfg.iterations < 0)
        raise(ErrorKind::Config, "iterations must be non-negative");
    if (cfg.lr0 <= 0.0) raise(ErrorKind::Config, "lr0 must be positive");
    if (cfg.lr_decay <= 0.0 || cfg.lr_decay > 1.0)
        raise(ErrorKind::Config, "lr decay must lie in (0, 1]");
    if (cfg.lr_interval < 1)
        raise(ErrorKind::Config, "lr interval must be >= 1");
    if (cfg.views_per_iter < 1)
        raise(ErrorKind::Config, "views_per_iter must be >= 1");
    if (cfg.crops_per_view < 1)
        raise(ErrorKind::Config, "crops_per_view must be >= 1");
    if (cfg.setup_views < 1)
        raise(ErrorKind::Config, "setup_views must be >= 1");
    if (cfg.render_size < 8 || cfg.render_size % 8 != 0)
        raise(ErrorKind::Config,
              "render_size must be a positive multiple of 8 (encoder contract)");
    if (cfg.camera_mean_radius <= 1.0)
        raise(ErrorKind::Config, "camera_mean_radius must exceed 1");
    if (cfg.camera_sigma < 0.0)
        raise(ErrorKind::Config, "camera_sigma must be non-negative");
    if (cfg.checkpoint_interval < 1)
        raise(ErrorKind::Config, "checkpoint_interval must be >= 1");
    if (cfg.weights.lambda_coarse < 0.0 || cfg.weights.lambda_fine < 0.0)
        raise(ErrorKind::Config, "loss weights must be non-negative");
}

std::vector<Vec3> hit_points(const geo::IntersectionBuffer& buffer,
                             const geo::HitMap& hitmap) {
    std::vector<Vec3> pts;
    for (std::size_t i = 0; i < hitmap.data.size(); ++i)
        if (hitmap.data[i]) pts.push_back(buffer.px[i].point);
    return pts;
}

}  // namespace

ad::Mat neutral_render(const geo::IntersectionBuffer& buffer,
                       const geo::HitMap& hitmap,
                       const std::vector<render::SGLight>& lights) {
    if (buffer.h != hitmap.h || buffer.w != hitmap.w)
        raise(ErrorKind::Config, "neutral_render: buffer/hitmap shape mismatch");
    const Vec3 gray{0.5, 0.5, 0.5};
    const Vec3 black{0, 0, 0};
    ad::Mat img(buffer.h * buffer.w, 3);
    for (std::size_t i = 0; i < hitmap.data.size(); ++i) {
        if (!hitmap.data[i]) continue;
        const geo::Intersection& px = buffer.px[i];
        Vec3 n = px.normal;
        Vec3 to_eye = -px.view_dir;
        if (dot(n, to_eye) < 0.0) n = -n;  // shade the visible side
        Vec3 c = render::shade_pixel(n, to_eye, gray, 0.5, black, lights);
        img.at(i, 0) = c.x;
        img.at(i, 1) = c.y;
        img.at(i, 2) = c.z;
    }
    return img;
}

SceneBinding bind_scene(const geo::Mesh& mesh, const geo::Bvh& bvh,
                        const TrainConfig& cfg, const std::string& prompt,
                        const embed::EmbeddingProvider& provider,
                        const std::vector<render::SGLight>& lights) {
    validate(cfg);
    SceneBinding scene;
    scene.phrases = parse::extract_noun_phrases(prompt);
    if (scene.phrases.empty())
        raise(ErrorKind::Parse, "prompt contains no noun phrases: " + prompt);
    const int k = static_cast<int>(scene.phrases.size());

    std::vector<geo::CameraPose> poses = geo::sample_camera_poses(
        substream_seed(cfg.seed, "setup_cameras"),
        static_cast<std::size_t>(cfg.setup_views), cfg.camera_mean_radius,
        cfg.camera_sigma);

    std::vector<Vec3> pooled;
    for (const geo::CameraPose& pose : poses) {
        auto [buffer, hitmap] = geo::render_geometry_pass(
            mesh, bvh, pose, cfg.render_size, cfg.render_size);
        std::vector<Vec3> pts = hit_points(buffer, hitmap);
        pooled.insert(pooled.end(), pts.begin(), pts.end());
        scene.setup_views.push_back(
            {pose, std::move(buffer), std::move(hitmap), {}});
    }
    if (static_cast<int>(pooled.size()) < k)
        raise(ErrorKind::Config,
              "setup pass found " + std::to_string(pooled.size()) +
                  " surface points for " + std::to_string(k) + " phrases");

    scene.gmm = parse::gmm_fit(pooled, k, substream_seed(cfg.seed, "clustering"));

    std::vector<std::vector<geo::HitMap>> masks;
    std::vector<ad::Mat> neutral_views;
    for (SetupView& view : scene.setup_views) {
        view.labels =
            parse::assign_clusters(scene.gmm, hit_points(view.buffer, view.hitmap));
        masks.push_back(parse::decouple_hitmap(view.hitmap, view.labels, k));
        neutral_views.push_back(neutral_render(view.buffer, view.hitmap, lights));
    }
    scene.phrase_of_cluster = parse::match_phrases_to_clusters(
        prompt, scene.phrases, masks, neutral_views, provider, cfg.render_size,
        cfg.render_size);
    return scene;
}

render::RenderResult render_field_view(ad::Tape& tape,
                                       const field::StyleField& sf,
                                       const std::vector<ad::Tensor>& leaves,
                                       const geo::IntersectionBuffer& buffer,
                                       const geo::HitMap& hitmap,
                                       const SceneBinding& scene,
                                       const ad::Mat& word_feats,
                                       const std::vector<render::SGLight>& lights,
                                       Vec3 background) {
    std::vector<Vec3> pts = hit_points(buffer, hitmap);
    if (!sf.config().dga_enabled || pts.empty())
        return render::render_image(tape, buffer, hitmap, sf, leaves, nullptr,
                                    lights, background);
    std::vector<int> labels = parse::assign_clusters(scene.gmm, pts);
    parse::CrossModalGraph graph = parse::build_graph(
        labels, scene.phrase_of_cluster, scene.phrases);
    field::DgaContext dga{&graph, tape.constant(word_feats)};
    return render::render_image(tape, buffer, hitmap, sf, leaves, &dga, lights,
                                background);
}

TrainResult train(const geo::Mesh& mesh, const std::string& prompt,
                  const field::FieldConfig& field_cfg, const TrainConfig& cfg,
                  const embed::EmbeddingProvider& provider,
                  const std::vector<render::SGLight>& lights,
                  const std::string& checkpoint_dir, const Checkpoint* resume) {
    validate(cfg);
    geo::Bvh bvh(mesh);

    TrainResult result;
    result.scene = bind_scene(mesh, bvh, cfg, prompt, provider, lights);

    field::FieldConfig fc = field_cfg;
    fc.init_seed = substream_seed(cfg.seed, "field_init");
    field::StyleField sf(fc, result.params);
    field::ParamSet& params = result.params;

    ad::Mat word_feats = provider.word_features(prompt);
    if (fc.dga_enabled && word_feats.cols != fc.word_dim)
        raise(ErrorKind::Config,
              "provider word feature width " + std::to_string(word_feats.cols) +
                  " does not match the field's word_dim " +
                  std::to_string(fc.word_dim));

    AdamW opt(params, cfg.adamw);
    if (resume) {
        if (resume->params.count() != params.count())
            raise(ErrorKind::Config, "resume checkpoint parameter count mismatch");
        for (int i = 0; i < static_cast<int>(params.count()); ++i) {
            field::ParamSet::Entry& e = params.entry(i);
            int j = resume->params.find(e.name);
            if (j < 0)
                raise(ErrorKind::Config,
                      "resume checkpoint is missing parameter " + e.name);
            const ad::Mat& val = resume->params.entry(j).value;
            if (val.rows != e.value.rows || val.cols != e.value.cols)
                raise(ErrorKind::Config,
                      "resume checkpoint shape mismatch for " + e.name);
            e.value = val;
        }
        opt.restore(resume->first_moments, resume->second_moments, resume->step);
    }

    std::vector<double> gtext = provider.global_text(prompt);
    ad::Mat ft_row(1, gtext.size());
    ft_row.data = gtext;

    namespace fs = std::filesystem;
    auto checkpoint_now = [&](const std::string& stem) {
        if (checkpoint_dir.empty()) return;
        fs::create_directories(checkpoint_dir);
        save_checkpoint((fs::path(checkpoint_dir) / (stem + ".ckpt")).string(),
                        params, opt);
    };

    const int start = static_cast<int>(opt.step_count());
    for (int it = start; it < cfg.iterations; ++it) {
        std::vector<geo::CameraPose> poses = geo::sample_camera_poses(
            substream_seed(cfg.seed, "cameras:" + std::to_string(it)),
            static_cast<std::size_t>(cfg.views_per_iter), cfg.camera_mean_radius,
            cfg.camera_sigma);

        ad::Tape tape;
        std::vector<ad::Tensor> leaves = params.leaves(tape);
        std::vector<ad::Tensor> images;
        for (const geo::CameraPose& pose : poses) {
            auto [buffer, hitmap] = geo::render_geometry_pass(
                mesh, bvh, pose, cfg.render_size, cfg.render_size);
            images.push_back(render_field_view(tape, sf, leaves, buffer, hitmap,
                                               result.scene, word_feats, lights,
                                               cfg.background)
                                 .image);
        }

        embed::AugmentationPolicy policy;
        policy.crops_per_view = cfg.crops_per_view;
        policy.scale_min = cfg.crop_scale_min;
        policy.scale_max = cfg.crop_scale_max;
        policy.rng_seed = substream_seed(cfg.seed, "augment:" + std::to_string(it));
        std::vector<ad::Tensor> crops = embed::augment_views(
            tape, images, cfg.render_size, cfg.render_size, policy);

        ad::Tensor feats =
            provider.image_features(tape, crops, cfg.render_size, cfg.render_size);
        ad::Tensor coarse =
            loss::coarse_loss(ad::col_mean(feats), tape.constant(ft_row));
        ad::Tensor fine = loss::fine_loss(
            loss::correlation_map(feats, tape.constant(word_feats)));
        ad::Tensor total = loss::cgc_loss(coarse, fine, cfg.weights);
        if (!std::isfinite(total.value().at(0, 0)))
            raise(ErrorKind::Numeric,
                  "non-finite loss at iteration " + std::to_string(it));

        tape.backward(total);
        std::vector<ad::Mat> grads;
        grads.reserve(leaves.size());
        for (const ad::Tensor& leaf : leaves) grads.push_back(leaf.grad());

        double lr = lr_at(it, cfg.lr0, cfg.lr_decay, cfg.lr_interval);
        opt.step(params, grads, lr);

        result.log.push_back({it, lr, coarse.value().at(0, 0),
                              fine.value().at(0, 0), total.value().at(0, 0)});
        if ((it + 1) % cfg.checkpoint_interval == 0 && it + 1 < cfg.iterations)
            checkpoint_now("step_" + std::to_string(it + 1));
    }
    checkpoint_now("final");
    return result;
}

void write_metrics_csv(const std::string& path,
                       const std::vector<IterationMetrics>& log) {
    std::ofstream out(path);
    if (!out) raise(ErrorKind::Io, "cannot write metrics: " + path);
    out << "iter,lr,coarse,fine,total\n";
    char line[256];
    for (const IterationMetrics& m : log) {
        std::snprintf(line, sizeof(line), "%d,%.17g,%.17g,%.17g,%.17g\n", m.iter,
                      m.lr, m.coarse, m.fine, m.total);
        out << line;
    }
    if (!out) raise(ErrorKind::Io, "short write on metrics: " + path);
}

}  // namespace temo::train
