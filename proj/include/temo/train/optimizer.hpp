#pragma once

#include <cstdint>
#include <vector>

#include "temo/field/params.hpp"

namespace temo::train {

struct AdamWConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.01;
};

// Step-decayed learning rate: lr0 * decay^(iter / interval).
double lr_at(int iter, double lr0, double decay, int interval);

// AdamW with decoupled weight decay applied before the bias-corrected
// moment update. Moments are kept per parameter in registration order.
class AdamW {
public:
    AdamW(const field::ParamSet& params, AdamWConfig cfg = {});

    // One update from externally computed gradients (same order and shapes
    // as the parameter set). Raises on shape mismatch or non-finite
    // gradients, naming the offending parameter.
    void step(field::ParamSet& params, const std::vector<ad::Mat>& grads,
              double lr);

    std::int64_t step_count() const { return step_; }
    const AdamWConfig& config() const { return cfg_; }

    // checkpoint access
    const std::vector<ad::Mat>& first_moments() const { return m_; }
    const std::vector<ad::Mat>& second_moments() const { return v_; }
    void restore(std::vector<ad::Mat> m, std::vector<ad::Mat> v,
                 std::int64_t step);

private:
    AdamWConfig cfg_;
    std::vector<ad::Mat> m_, v_;
    std::int64_t step_ = 0;
};

}  // namespace temo::train
