#pragma once

#include <memory>
#include <string>

#include "temo/embed/provider.hpp"
#include "temo/field/style_field.hpp"
#include "temo/train/trainer.hpp"

namespace temo::cli {

// Which embedding provider a run uses: the built-in color-semantics toy
// pair, or text features loaded from an embedding file (image side stays
// the in-process differentiable encoder).
struct ProviderSpec {
    std::string kind = "toy";  // "toy" | "file"
    std::uint64_t seed = 20240611ull;
    double gain = 3.0;
    std::string path;  // manifest path, kind == "file" only
};

struct RenderSpec {
    std::size_t resolution = 256;  // square; >= 16 and a multiple of 8
    int eval_views = 8;            // azimuthal ring, 360/eval_views apart
};

// Complete declarative description of a run. Every command is reproducible
// from this plus the seed; each run directory gets a copy of the resolved
// form.
struct RunConfig {
    std::string mesh_path;
    std::string prompt;
    std::string output_dir;
    ProviderSpec provider;
    field::FieldConfig field;
    train::TrainConfig train;
    RenderSpec render;
};

// Parses and schema-validates a JSON run config. Unknown keys and
// out-of-range values are Config errors naming the offending key; paths
// must resolve at validation time.
RunConfig load_run_config(const std::string& path);

// Re-checks the invariants (after command-line overrides).
void validate_run_config(const RunConfig& cfg);

// Serializes the resolved config back to JSON text (stable key order).
std::string run_config_json(const RunConfig& cfg);

std::unique_ptr<embed::EmbeddingProvider> make_provider(const ProviderSpec& spec);

}  // namespace temo::cli
