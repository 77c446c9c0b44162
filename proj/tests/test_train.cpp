#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "temo/embed/color_semantics.hpp"
#include "temo/geo/shapes.hpp"
#include "temo/train/trainer.hpp"
#include "temo/util/error.hpp"

using namespace temo;
namespace fs = std::filesystem;

namespace {

geo::Mesh two_sphere_scene() {
    geo::Mesh ball = geo::make_uv_sphere(0.5, 8, 12);
    geo::Mesh scene;
    geo::append_translated(scene, ball, Vec3{-0.55, 0, 0});
    geo::append_translated(scene, ball, Vec3{0.55, 0, 0});
    geo::normalize_unit_sphere(scene);
    return scene;
}

train::TrainConfig tiny_config() {
    train::TrainConfig cfg;
    cfg.iterations = 3;
    cfg.views_per_iter = 2;
    cfg.crops_per_view = 1;
    cfg.setup_views = 4;
    cfg.render_size = 16;
    cfg.checkpoint_interval = 2;
    cfg.seed = 7;
    return cfg;
}

field::FieldConfig tiny_field() {
    field::FieldConfig fc;
    fc.width = 16;
    fc.fourier_bands = 2;
    fc.dga_enabled = true;
    return fc;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("learning rate steps down by the decay factor") {
    CHECK(train::lr_at(0, 5e-4, 0.7, 500) == 5e-4);
    CHECK(train::lr_at(499, 5e-4, 0.7, 500) == 5e-4);
    CHECK(train::lr_at(500, 5e-4, 0.7, 500) == doctest::Approx(3.5e-4).epsilon(1e-12));
    CHECK(train::lr_at(999, 5e-4, 0.7, 500) == doctest::Approx(3.5e-4).epsilon(1e-12));
    CHECK(train::lr_at(1000, 5e-4, 0.7, 500) == doctest::Approx(2.45e-4).epsilon(1e-12));
    CHECK_THROWS_AS(train::lr_at(-1, 5e-4, 0.7, 500), Error);
    CHECK_THROWS_AS(train::lr_at(0, 0.0, 0.7, 500), Error);
    CHECK_THROWS_AS(train::lr_at(0, 5e-4, 0.7, 0), Error);
}

TEST_CASE("optimizer first step matches the hand-evaluated update") {
    field::ParamSet ps;
    ps.add("theta", ad::Mat::full(1, 1, 1.0));
    train::AdamWConfig acfg;
    acfg.weight_decay = 0.0;
    train::AdamW opt(ps, acfg);
    opt.step(ps, {ad::Mat::full(1, 1, 2.0)}, 0.1);

    const double g = 2.0;
    const double m = (1.0 - 0.9) * g;
    const double v = (1.0 - 0.999) * g * g;
    const double mhat = m / (1.0 - 0.9);
    const double vhat = v / (1.0 - 0.999);
    const double want = 1.0 - 0.1 * mhat / (std::sqrt(vhat) + 1e-8);
    CHECK(ps.entry(0).value.at(0, 0) == doctest::Approx(want).epsilon(1e-14));
    CHECK(opt.step_count() == 1);
}

TEST_CASE("optimizer leaves parameters alone on zero gradients without decay") {
    field::ParamSet ps;
    ps.add("w", ad::Mat::full(2, 3, 0.37));
    train::AdamWConfig acfg;
    acfg.weight_decay = 0.0;
    train::AdamW opt(ps, acfg);
    opt.step(ps, {ad::Mat(2, 3)}, 0.1);
    for (double p : ps.entry(0).value.data) CHECK(p == 0.37);
}

TEST_CASE("decoupled decay shrinks weights even with zero gradients") {
    field::ParamSet ps;
    ps.add("w", ad::Mat::full(1, 2, 3.0));
    train::AdamWConfig acfg;  // wd = 0.01
    train::AdamW opt(ps, acfg);
    opt.step(ps, {ad::Mat(1, 2)}, 0.1);
    for (double p : ps.entry(0).value.data)
        CHECK(p == doctest::Approx(3.0 * (1.0 - 0.001)).epsilon(1e-15));
}

TEST_CASE("optimizer rejects bad gradients by parameter name") {
    field::ParamSet ps;
    ps.add("trunk.w", ad::Mat::full(2, 2, 1.0));
    train::AdamW opt(ps);
    try {
        opt.step(ps, {ad::Mat::full(2, 2, std::nan(""))}, 0.1);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("trunk.w") != std::string::npos);
    }
    CHECK_THROWS_AS(opt.step(ps, {ad::Mat(3, 2)}, 0.1), Error);
    CHECK_THROWS_AS(opt.step(ps, {}, 0.1), Error);
}

TEST_CASE("checkpoints restore state bitwise") {
    field::ParamSet ps;
    ps.add("a.w", ad::Mat::full(2, 3, 0.123456789123456789));
    ps.add("a.b", ad::Mat::full(1, 3, -7.25));
    train::AdamW opt(ps);
    opt.step(ps, {ad::Mat::full(2, 3, 0.31), ad::Mat::full(1, 3, -0.07)}, 1e-3);
    opt.step(ps, {ad::Mat::full(2, 3, -0.11), ad::Mat::full(1, 3, 0.2)}, 1e-3);

    fs::path path = fs::path(TESTS_DATA_DIR) / "tmp_state.ckpt";
    train::save_checkpoint(path.string(), ps, opt);
    train::Checkpoint ckpt = train::load_checkpoint(path.string());

    REQUIRE(ckpt.params.count() == 2);
    CHECK(ckpt.step == 2);
    CHECK(ckpt.params.entry(0).name == "a.w");
    CHECK(ckpt.params.entry(1).name == "a.b");
    for (int i = 0; i < 2; ++i) {
        CHECK(ckpt.params.entry(i).value.data == ps.entry(i).value.data);
        CHECK(ckpt.first_moments[static_cast<std::size_t>(i)].data ==
              opt.first_moments()[static_cast<std::size_t>(i)].data);
        CHECK(ckpt.second_moments[static_cast<std::size_t>(i)].data ==
              opt.second_moments()[static_cast<std::size_t>(i)].data);
    }
    fs::remove(path);
}

TEST_CASE("checkpoint loader rejects corrupt files") {
    fs::path dir(TESTS_DATA_DIR);
    fs::path bad = dir / "tmp_bad.ckpt";
    {
        std::ofstream out(bad, std::ios::binary);
        out << "NOTACKPTxxxxxxxxxxxx";
    }
    CHECK_THROWS_AS(train::load_checkpoint(bad.string()), Error);
    {
        std::ofstream out(bad, std::ios::binary);
        out << "TEMOCKPT";  // magic only, then truncated
    }
    CHECK_THROWS_AS(train::load_checkpoint(bad.string()), Error);
    CHECK_THROWS_AS(train::load_checkpoint((dir / "absent.ckpt").string()), Error);
    fs::remove(bad);
}

TEST_CASE("metrics files are byte-stable") {
    std::vector<train::IterationMetrics> log = {
        {0, 5e-4, -0.123456789012345678, -0.5, -0.288456789012345678},
        {1, 5e-4, -0.2, 1.0 / 3.0, -0.0899999999999999},
    };
    fs::path a = fs::path(TESTS_DATA_DIR) / "tmp_metrics_a.csv";
    fs::path b = fs::path(TESTS_DATA_DIR) / "tmp_metrics_b.csv";
    train::write_metrics_csv(a.string(), log);
    train::write_metrics_csv(b.string(), log);
    std::string text = slurp(a);
    CHECK(text == slurp(b));
    CHECK(text.rfind("iter,lr,coarse,fine,total\n", 0) == 0);
    CHECK(text.find("\n0,") != std::string::npos);
    // %.17g survives a double round trip
    std::size_t line1 = text.find("\n0,") + 3;
    std::size_t comma = text.find(',', line1);
    CHECK(std::stod(text.substr(line1, comma - line1)) == 5e-4);
    fs::remove(a);
    fs::remove(b);
}

TEST_CASE("fine term with zero weight contributes nothing to gradients") {
    // coarse path through x, fine path through y; with the fine weight at
    // zero, y's gradient must be exactly zero, not merely small
    ad::Tape tape;
    ad::Mat xm(1, 4), ym(2, 4);
    for (std::size_t i = 0; i < 4; ++i) xm.at(0, i) = 0.3 + 0.1 * static_cast<double>(i);
    for (std::size_t i = 0; i < 8; ++i) ym.data[i] = -0.2 + 0.11 * static_cast<double>(i);
    ad::Tensor x = tape.leaf(xm);
    ad::Tensor y = tape.leaf(ym);
    ad::Mat tm(1, 4);
    tm.at(0, 1) = 1.0;
    ad::Tensor coarse = loss::coarse_loss(x, tape.constant(tm));
    ad::Mat wm(3, 4);
    for (std::size_t i = 0; i < 12; ++i) wm.data[i] = 0.05 * static_cast<double>(i + 1);
    ad::Tensor fine = loss::fine_loss(
        loss::correlation_map(y, tape.constant(wm)));
    loss::CgcWeights w;
    w.lambda_fine = 0.0;
    ad::Tensor total = loss::cgc_loss(coarse, fine, w);
    tape.backward(total);
    for (double gy : y.grad().data) CHECK(gy == 0.0);
    bool any = false;
    for (double gx : x.grad().data) any = any || gx != 0.0;
    CHECK(any);
}

TEST_CASE("scene binding pairs each phrase with one cluster") {
    geo::Mesh scene = two_sphere_scene();
    geo::Bvh bvh(scene);
    embed::ColorSemanticsProvider provider;
    train::TrainConfig cfg = tiny_config();
    train::SceneBinding binding =
        train::bind_scene(scene, bvh, cfg, "a red sphere and a blue sphere",
                          provider, render::default_lights());

    REQUIRE(binding.phrases.size() == 2);
    CHECK(binding.phrases[0].head_noun == "sphere");
    CHECK(binding.gmm.k == 2);
    REQUIRE(binding.phrase_of_cluster.size() == 2);
    // a bijection onto {0, 1}
    CHECK(binding.phrase_of_cluster[0] + binding.phrase_of_cluster[1] == 1);
    REQUIRE(binding.setup_views.size() == 4);
    for (const train::SetupView& view : binding.setup_views) {
        std::size_t hits = 0;
        for (std::uint8_t h : view.hitmap.data) hits += h;
        CHECK(view.labels.size() == hits);
        for (int l : view.labels) {
            CHECK(l >= 0);
            CHECK(l < 2);
        }
    }

    // the two cluster means sit on opposite sides of the x axis
    CHECK(binding.gmm.means[0].x * binding.gmm.means[1].x < 0.0);
}

TEST_CASE("scene binding validates the prompt") {
    geo::Mesh scene = two_sphere_scene();
    geo::Bvh bvh(scene);
    embed::ColorSemanticsProvider provider;
    train::TrainConfig cfg = tiny_config();
    CHECK_THROWS_AS(train::bind_scene(scene, bvh, cfg, "", provider,
                                      render::default_lights()),
                    Error);
    train::TrainConfig bad = cfg;
    bad.render_size = 12;  // not a multiple of 8
    CHECK_THROWS_AS(train::bind_scene(scene, bvh, bad, "a red sphere", provider,
                                      render::default_lights()),
                    Error);
}

TEST_CASE("neutral renders are flat gray with black background") {
    geo::Mesh ball = geo::make_uv_sphere(1.0, 8, 12);
    geo::normalize_unit_sphere(ball);
    geo::CameraPose pose;
    pose.position = Vec3{0, 0, 2.5};
    auto [buffer, hitmap] = geo::render_geometry_pass(ball, pose, 16, 16);
    std::vector<render::SGLight> lights = {render::frontal_light(pose.position)};
    ad::Mat img = train::neutral_render(buffer, hitmap, lights);
    REQUIRE(img.rows == 16 * 16);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < hitmap.data.size(); ++i) {
        if (hitmap.data[i]) {
            ++hits;
            CHECK(img.at(i, 0) > 0.0);
            // gray material under a white light stays achromatic
            CHECK(img.at(i, 0) == doctest::Approx(img.at(i, 1)).epsilon(1e-12));
            CHECK(img.at(i, 1) == doctest::Approx(img.at(i, 2)).epsilon(1e-12));
        } else {
            CHECK(img.at(i, 0) == 0.0);
        }
    }
    CHECK(hits > 20);
}

TEST_CASE("zero-iteration training returns an initialized field and empty log") {
    geo::Mesh scene = two_sphere_scene();
    embed::ColorSemanticsProvider provider;
    train::TrainConfig cfg = tiny_config();
    cfg.iterations = 0;
    train::TrainResult out =
        train::train(scene, "a red sphere and a blue sphere", tiny_field(), cfg,
                     provider, render::default_lights());
    CHECK(out.log.empty());
    CHECK(out.params.count() > 0);
}

TEST_CASE("training is deterministic and moves the parameters") {
    geo::Mesh scene = two_sphere_scene();
    embed::ColorSemanticsProvider provider;
    train::TrainConfig cfg = tiny_config();
    field::FieldConfig fc = tiny_field();
    const std::string prompt = "a red sphere and a blue sphere";

    train::TrainResult a =
        train::train(scene, prompt, fc, cfg, provider, render::default_lights());
    train::TrainResult b =
        train::train(scene, prompt, fc, cfg, provider, render::default_lights());

    REQUIRE(a.log.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(a.log[i].iter == static_cast<int>(i));
        CHECK(std::isfinite(a.log[i].total));
        CHECK(a.log[i].lr == 5e-4);
        CHECK(a.log[i].total == b.log[i].total);
        CHECK(a.log[i].total ==
              doctest::Approx(1.0 * a.log[i].coarse + 0.33 * a.log[i].fine)
                  .epsilon(1e-12));
    }
    REQUIRE(a.params.count() == b.params.count());
    bool moved = false;
    for (int i = 0; i < static_cast<int>(a.params.count()); ++i) {
        CHECK(a.params.entry(i).value.data == b.params.entry(i).value.data);
        // initialized-at-zero heads must have moved off their start
        if (a.params.entry(i).name == "refl.diffuse.w") {
            for (double p : a.params.entry(i).value.data) moved = moved || p != 0.0;
        }
    }
    CHECK(moved);

    // a different seed changes the trajectory
    train::TrainConfig other = cfg;
    other.seed = 8;
    train::TrainResult c =
        train::train(scene, prompt, fc, other, provider, render::default_lights());
    CHECK(c.log[2].total != a.log[2].total);
}

TEST_CASE("resuming from a checkpoint reproduces the uninterrupted run") {
    geo::Mesh scene = two_sphere_scene();
    embed::ColorSemanticsProvider provider;
    train::TrainConfig cfg = tiny_config();  // 3 iters, checkpoint every 2
    field::FieldConfig fc = tiny_field();
    const std::string prompt = "a red sphere and a blue sphere";
    fs::path dir = fs::path(TESTS_DATA_DIR) / "tmp_ckpt_run";
    fs::remove_all(dir);

    train::TrainResult full =
        train::train(scene, prompt, fc, cfg, provider, render::default_lights(),
                     dir.string());
    REQUIRE(fs::exists(dir / "step_2.ckpt"));
    REQUIRE(fs::exists(dir / "final.ckpt"));

    train::Checkpoint mid = train::load_checkpoint((dir / "step_2.ckpt").string());
    CHECK(mid.step == 2);
    train::TrainResult resumed =
        train::train(scene, prompt, fc, cfg, provider, render::default_lights(),
                     "", &mid);
    REQUIRE(resumed.log.size() == 1);
    CHECK(resumed.log[0].iter == 2);
    CHECK(resumed.log[0].total == full.log[2].total);
    for (int i = 0; i < static_cast<int>(full.params.count()); ++i)
        CHECK(resumed.params.entry(i).value.data == full.params.entry(i).value.data);
    fs::remove_all(dir);
}
