#pragma once

#include <string>
#include <vector>

#include "temo/cli/run_config.hpp"
#include "temo/util/vec3.hpp"

namespace temo::cli {

// Counts connected components of the face graph (faces joined by shared
// vertex indices). Multi-object scenes built from per-object meshes keep
// disjoint vertex ranges, so each object is one component.
int component_count(const geo::Mesh& mesh);

// Scene analysis without optimization: extracts phrases, clusters surface
// points, matches phrases to clusters, and writes the report, the graph,
// and per-object mask PNGs into the output directory. Raises Parse when
// the phrase count does not match the mesh's object count.
void cmd_parse(const RunConfig& cfg);

// Full optimization. Writes checkpoints, metrics.csv, final renders, and
// the resolved config. A non-empty resume_path restores that checkpoint
// and continues its step counter.
train::TrainResult cmd_stylize(const RunConfig& cfg,
                               const std::string& resume_path = "");

// Renders the evaluation ring of views. With a checkpoint the trained
// field is used; without one the freshly initialized field is rendered.
void cmd_render(const RunConfig& cfg, const std::string& checkpoint_path = "");

// One stylized object in the evaluation report.
struct ObjectReport {
    int cluster = -1;
    int phrase = -1;
    std::string phrase_text;
    std::string color_word;  // empty when no adjective names a color
    Vec3 target{0, 0, 0};    // meaningful iff color_word is set
    Vec3 mean_diffuse{0, 0, 0};
    std::size_t pixels = 0;
    double distance_to_target = -1.0;  // -1 when no target
};

struct EvalReport {
    // Similarity lives in the active embedding provider's space. It plays
    // the role the paper's encoder score plays but is not comparable to
    // scores from pretrained encoders.
    double global_similarity = 0.0;  // mean cos(view feature, prompt feature)
    double word_similarity = 0.0;    // mean cos(view feature, word feature)
    std::vector<ObjectReport> objects;
    std::vector<std::string> view_files;
};

// Renders the evaluation views from a checkpoint, embeds them, and writes
// view PNGs plus eval_report.json into the output directory.
EvalReport cmd_eval(const RunConfig& cfg, const std::string& checkpoint_path);

}  // namespace temo::cli
