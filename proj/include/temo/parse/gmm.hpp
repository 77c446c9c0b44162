#pragma once

#include <cstdint>
#include <vector>

#include "temo/util/mat3.hpp"
#include "temo/util/vec3.hpp"

namespace temo::parse {

struct GmmModel {
    int k = 0;
    std::vector<Vec3> means;
    std::vector<Mat3> covariances;  // symmetric, eigenvalues >= 1e-6
    std::vector<double> weights;    // nonnegative, sums to 1

    // Per-EM-iteration total log-likelihood; non-decreasing by construction.
    std::vector<double> log_likelihood_trace;
};

// EM fit with a k-means++-style seeded init. Converges when the
// log-likelihood improves by less than 1e-6, or after 200 iterations.
GmmModel gmm_fit(const std::vector<Vec3>& points, int k, std::uint64_t seed);

// Argmax-responsibility labels; equal scores go to the lowest index.
std::vector<int> assign_clusters(const GmmModel& model,
                                 const std::vector<Vec3>& points);

}  // namespace temo::parse
