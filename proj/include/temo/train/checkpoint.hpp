#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "temo/field/params.hpp"
#include "temo/train/optimizer.hpp"

namespace temo::train {

// On-disk training state: parameter values plus optimizer moments and the
// step counter. The file is a "TEMOCKPT" magic, a format version, a JSON
// manifest (names, shapes, step), then one little-endian float64 blob per
// parameter in manifest order: value, first moment, second moment.
struct Checkpoint {
    field::ParamSet params;
    std::vector<ad::Mat> first_moments;
    std::vector<ad::Mat> second_moments;
    std::int64_t step = 0;
};

void save_checkpoint(const std::string& path, const field::ParamSet& params,
                     const AdamW& optimizer);

Checkpoint load_checkpoint(const std::string& path);

}  // namespace temo::train
