#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "temo/parse/chunker.hpp"

namespace temo::parse {

// Bipartite point-word graph. Word nodes are the content words (adjectives
// plus head noun) of every phrase, concatenated in phrase order; each word
// node keeps its prompt word position so callers can pick the matching row
// of the provider's word-feature matrix. A point connects to exactly the
// words of the phrase matched to its cluster.
struct CrossModalGraph {
    std::size_t num_points = 0;

    std::vector<std::size_t> word_prompt_index;  // word node -> prompt word
    std::vector<int> phrase_of_word;            // word node -> phrase

    std::vector<int> cluster_of_point;
    std::vector<int> phrase_of_cluster;

    std::vector<std::vector<int>> points_of_cluster;
    std::vector<std::vector<int>> words_of_cluster;  // word node ids

    std::vector<std::pair<int, int>> edges;  // (point, word node)

    std::size_t num_words() const { return word_prompt_index.size(); }
};

// phrase_of_cluster must be a bijection onto the phrase ids.
CrossModalGraph build_graph(const std::vector<int>& cluster_of_point,
                            const std::vector<int>& phrase_of_cluster,
                            const std::vector<NounPhrase>& phrases);

}  // namespace temo::parse
