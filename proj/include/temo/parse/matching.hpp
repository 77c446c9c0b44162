#pragma once

#include <vector>

#include "temo/ad/tape.hpp"
#include "temo/embed/provider.hpp"
#include "temo/geo/raycast.hpp"
#include "temo/parse/chunker.hpp"

namespace temo::parse {

// Splits a view's hit map into per-cluster masks. labels holds one cluster
// id per hit pixel in row-major scan order; masks are disjoint and their
// union reproduces the input.
std::vector<geo::HitMap> decouple_hitmap(const geo::HitMap& hitmap,
                                         const std::vector<int>& labels,
                                         int k);

// Bijection maximizing the total of sim(phrase, cluster): exhaustive for
// k <= 6, greedy beyond. Returns phrase_of_cluster.
std::vector<int> best_bijection(const ad::Mat& sim);

// Embeds each phrase (mean of the prompt's word-feature rows at the
// phrase's content words) and each cluster (mean feature of its masked
// neutral renders across views), forms the k x k cosine matrix, and
// returns the best bijection. neutral_views[v] is an [h*w x 3] image;
// masks[v][c] the cluster's hit map in that view.
std::vector<int> match_phrases_to_clusters(
    const std::string& prompt, const std::vector<NounPhrase>& phrases,
    const std::vector<std::vector<geo::HitMap>>& masks,
    const std::vector<ad::Mat>& neutral_views,
    const embed::EmbeddingProvider& provider, std::size_t h, std::size_t w);

}  // namespace temo::parse
