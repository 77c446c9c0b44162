#include "temo/cli/run_config.hpp"

#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

#include "temo/embed/color_semantics.hpp"
#include "temo/embed/file_provider.hpp"
#include "temo/util/error.hpp"

namespace temo::cli {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& key, const std::string& why) {
    raise(ErrorKind::Config, "config: " + key + " " + why);
}

void reject_unknown(const json& obj, const std::string& where,
                    const std::set<std::string>& known) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!known.count(it.key()))
            bad(where.empty() ? it.key() : where + "." + it.key(),
                "is not a recognized key");
}

double get_num(const json& obj, const std::string& where, const char* key,
               double fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) bad(where + "." + key, "must be a number");
    return v.get<double>();
}

int get_int(const json& obj, const std::string& where, const char* key,
            int fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) bad(where + "." + key, "must be an integer");
    return v.get<int>();
}

std::string get_str(const json& obj, const std::string& where, const char* key,
                    const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_string()) bad(where + "." + key, "must be a string");
    return v.get<std::string>();
}

bool get_bool(const json& obj, const std::string& where, const char* key,
              bool fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_boolean()) bad(where + "." + key, "must be true or false");
    return v.get<bool>();
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorKind::Io, "cannot open config file: " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        raise(ErrorKind::Parse, "config is not valid JSON: " + std::string(e.what()));
    }
    if (!doc.is_object()) raise(ErrorKind::Parse, "config root must be an object");
    reject_unknown(doc, "",
                   {"mesh", "prompt", "output_dir", "provider", "field", "train",
                    "render"});

    RunConfig cfg;
    cfg.mesh_path = get_str(doc, "", "mesh", "");
    cfg.prompt = get_str(doc, "", "prompt", "");
    cfg.output_dir = get_str(doc, "", "output_dir", "");

    if (doc.contains("provider")) {
        const json& p = doc.at("provider");
        if (!p.is_object()) bad("provider", "must be an object");
        reject_unknown(p, "provider", {"kind", "seed", "gain", "path"});
        cfg.provider.kind = get_str(p, "provider", "kind", "toy");
        cfg.provider.seed = static_cast<std::uint64_t>(
            get_num(p, "provider", "seed",
                    static_cast<double>(cfg.provider.seed)));
        cfg.provider.gain = get_num(p, "provider", "gain", cfg.provider.gain);
        cfg.provider.path = get_str(p, "provider", "path", "");
    }

    if (doc.contains("field")) {
        const json& f = doc.at("field");
        if (!f.is_object()) bad("field", "must be an object");
        reject_unknown(f, "field",
                       {"fourier_bands", "width", "normal_scale",
                        "roughness_min", "dga"});
        cfg.field.fourier_bands =
            get_int(f, "field", "fourier_bands", cfg.field.fourier_bands);
        cfg.field.width = static_cast<std::size_t>(
            get_int(f, "field", "width", static_cast<int>(cfg.field.width)));
        cfg.field.normal_scale =
            get_num(f, "field", "normal_scale", cfg.field.normal_scale);
        cfg.field.roughness_min =
            get_num(f, "field", "roughness_min", cfg.field.roughness_min);
        cfg.field.dga_enabled = get_bool(f, "field", "dga", true);
    } else {
        cfg.field.dga_enabled = true;  // the method's default
    }

    if (doc.contains("train")) {
        const json& t = doc.at("train");
        if (!t.is_object()) bad("train", "must be an object");
        reject_unknown(
            t, "train",
            {"iterations", "lr0", "lr_decay", "lr_interval", "weight_decay",
             "views_per_iter", "crops_per_view", "crop_scale_min",
             "crop_scale_max", "setup_views", "render_size", "camera_radius",
             "camera_sigma", "checkpoint_interval", "lambda_coarse",
             "lambda_fine", "background", "seed"});
        train::TrainConfig& tc = cfg.train;
        tc.iterations = get_int(t, "train", "iterations", tc.iterations);
        tc.lr0 = get_num(t, "train", "lr0", tc.lr0);
        tc.lr_decay = get_num(t, "train", "lr_decay", tc.lr_decay);
        tc.lr_interval = get_int(t, "train", "lr_interval", tc.lr_interval);
        tc.adamw.weight_decay =
            get_num(t, "train", "weight_decay", tc.adamw.weight_decay);
        tc.views_per_iter = get_int(t, "train", "views_per_iter", tc.views_per_iter);
        tc.crops_per_view = get_int(t, "train", "crops_per_view", tc.crops_per_view);
        tc.crop_scale_min = get_num(t, "train", "crop_scale_min", tc.crop_scale_min);
        tc.crop_scale_max = get_num(t, "train", "crop_scale_max", tc.crop_scale_max);
        tc.setup_views = get_int(t, "train", "setup_views", tc.setup_views);
        tc.render_size = static_cast<std::size_t>(get_int(
            t, "train", "render_size", static_cast<int>(tc.render_size)));
        tc.camera_mean_radius =
            get_num(t, "train", "camera_radius", tc.camera_mean_radius);
        tc.camera_sigma = get_num(t, "train", "camera_sigma", tc.camera_sigma);
        tc.checkpoint_interval =
            get_int(t, "train", "checkpoint_interval", tc.checkpoint_interval);
        tc.weights.lambda_coarse =
            get_num(t, "train", "lambda_coarse", tc.weights.lambda_coarse);
        tc.weights.lambda_fine =
            get_num(t, "train", "lambda_fine", tc.weights.lambda_fine);
        if (t.contains("background")) {
            const json& b = t.at("background");
            if (!b.is_array() || b.size() != 3 || !b[0].is_number() ||
                !b[1].is_number() || !b[2].is_number())
                bad("train.background", "must be an array of three numbers");
            tc.background = {b[0].get<double>(), b[1].get<double>(),
                             b[2].get<double>()};
        }
        tc.seed = static_cast<std::uint64_t>(
            get_num(t, "train", "seed", static_cast<double>(tc.seed)));
    }

    if (doc.contains("render")) {
        const json& r = doc.at("render");
        if (!r.is_object()) bad("render", "must be an object");
        reject_unknown(r, "render", {"resolution", "eval_views"});
        cfg.render.resolution = static_cast<std::size_t>(get_int(
            r, "render", "resolution", static_cast<int>(cfg.render.resolution)));
        cfg.render.eval_views =
            get_int(r, "render", "eval_views", cfg.render.eval_views);
    }

    validate_run_config(cfg);
    return cfg;
}

void validate_run_config(const RunConfig& cfg) {
    namespace fs = std::filesystem;
    if (cfg.mesh_path.empty()) bad("mesh", "is required");
    if (!fs::exists(cfg.mesh_path))
        raise(ErrorKind::Io, "config: mesh path does not exist: " + cfg.mesh_path);
    if (cfg.prompt.empty()) bad("prompt", "is required");
    if (cfg.output_dir.empty()) bad("output_dir", "is required");

    if (cfg.provider.kind != "toy" && cfg.provider.kind != "file")
        bad("provider.kind", "must be \"toy\" or \"file\"");
    if (cfg.provider.kind == "file") {
        if (cfg.provider.path.empty())
            bad("provider.path", "is required for the file provider");
        if (!fs::exists(cfg.provider.path))
            raise(ErrorKind::Io, "config: provider.path does not exist: " +
                                     cfg.provider.path);
    }

    if (cfg.field.fourier_bands < 1) bad("field.fourier_bands", "must be >= 1");
    if (cfg.field.width < 1) bad("field.width", "must be >= 1");
    if (cfg.field.normal_scale < 0.0) bad("field.normal_scale", "must be >= 0");
    if (cfg.field.roughness_min <= 0.0 || cfg.field.roughness_min >= 1.0)
        bad("field.roughness_min", "must lie in (0, 1)");

    const train::TrainConfig& tc = cfg.train;
    if (tc.iterations < 0) bad("train.iterations", "must be >= 0");
    if (tc.lr0 <= 0.0) bad("train.lr0", "must be > 0");
    if (tc.lr_decay <= 0.0 || tc.lr_decay > 1.0)
        bad("train.lr_decay", "must lie in (0, 1]");
    if (tc.lr_interval < 1) bad("train.lr_interval", "must be >= 1");
    if (tc.adamw.weight_decay < 0.0) bad("train.weight_decay", "must be >= 0");
    if (tc.views_per_iter < 1) bad("train.views_per_iter", "must be >= 1");
    if (tc.crops_per_view < 1) bad("train.crops_per_view", "must be >= 1");
    if (tc.setup_views < 1) bad("train.setup_views", "must be >= 1");
    if (tc.render_size < 8 || tc.render_size % 8 != 0)
        bad("train.render_size", "must be a positive multiple of 8");
    if (tc.camera_mean_radius <= 1.0) bad("train.camera_radius", "must exceed 1");
    if (tc.camera_sigma < 0.0) bad("train.camera_sigma", "must be >= 0");
    if (tc.checkpoint_interval < 1)
        bad("train.checkpoint_interval", "must be >= 1");
    if (tc.weights.lambda_coarse < 0.0) bad("train.lambda_coarse", "must be >= 0");
    if (tc.weights.lambda_fine < 0.0) bad("train.lambda_fine", "must be >= 0");

    if (cfg.render.resolution < 16 || cfg.render.resolution % 8 != 0)
        bad("render.resolution", "must be >= 16 and a multiple of 8");
    if (cfg.render.eval_views < 1 || cfg.render.eval_views > 360)
        bad("render.eval_views", "must lie in [1, 360]");
}

std::string run_config_json(const RunConfig& cfg) {
    json doc;
    doc["mesh"] = cfg.mesh_path;
    doc["prompt"] = cfg.prompt;
    doc["output_dir"] = cfg.output_dir;
    json p;
    p["kind"] = cfg.provider.kind;
    if (cfg.provider.kind == "toy") {
        p["seed"] = cfg.provider.seed;
        p["gain"] = cfg.provider.gain;
    } else {
        p["path"] = cfg.provider.path;
    }
    doc["provider"] = p;
    doc["field"] = {{"fourier_bands", cfg.field.fourier_bands},
                    {"width", cfg.field.width},
                    {"normal_scale", cfg.field.normal_scale},
                    {"roughness_min", cfg.field.roughness_min},
                    {"dga", cfg.field.dga_enabled}};
    const train::TrainConfig& tc = cfg.train;
    doc["train"] = {{"iterations", tc.iterations},
                    {"lr0", tc.lr0},
                    {"lr_decay", tc.lr_decay},
                    {"lr_interval", tc.lr_interval},
                    {"weight_decay", tc.adamw.weight_decay},
                    {"views_per_iter", tc.views_per_iter},
                    {"crops_per_view", tc.crops_per_view},
                    {"crop_scale_min", tc.crop_scale_min},
                    {"crop_scale_max", tc.crop_scale_max},
                    {"setup_views", tc.setup_views},
                    {"render_size", tc.render_size},
                    {"camera_radius", tc.camera_mean_radius},
                    {"camera_sigma", tc.camera_sigma},
                    {"checkpoint_interval", tc.checkpoint_interval},
                    {"lambda_coarse", tc.weights.lambda_coarse},
                    {"lambda_fine", tc.weights.lambda_fine},
                    {"background",
                     {tc.background.x, tc.background.y, tc.background.z}},
                    {"seed", tc.seed}};
    doc["render"] = {{"resolution", cfg.render.resolution},
                     {"eval_views", cfg.render.eval_views}};
    return doc.dump(2) + "\n";
}

std::unique_ptr<embed::EmbeddingProvider> make_provider(const ProviderSpec& spec) {
    if (spec.kind == "toy")
        return std::make_unique<embed::ColorSemanticsProvider>(spec.seed,
                                                               spec.gain);
    if (spec.kind == "file") return embed::file_provider_load(spec.path);
    raise(ErrorKind::Config, "unknown provider kind: " + spec.kind);
}

}  // namespace temo::cli
