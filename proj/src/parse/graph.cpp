#include "temo/parse/graph.hpp"

#include <algorithm>

#include "temo/util/error.hpp"

namespace temo::parse {

CrossModalGraph build_graph(const std::vector<int>& cluster_of_point,
                            const std::vector<int>& phrase_of_cluster,
                            const std::vector<NounPhrase>& phrases) {
    const int k = static_cast<int>(phrase_of_cluster.size());
    if (phrases.size() != phrase_of_cluster.size())
        raise(ErrorKind::Config, "graph: phrase and cluster counts differ");
    std::vector<bool> seen(k, false);
    for (int p : phrase_of_cluster) {
        if (p < 0 || p >= k || seen[p])
            raise(ErrorKind::Config,
                  "graph: phrase_of_cluster is not a bijection");
        seen[p] = true;
    }

    CrossModalGraph g;
    g.num_points = cluster_of_point.size();
    g.cluster_of_point = cluster_of_point;
    g.phrase_of_cluster = phrase_of_cluster;

    // word nodes in phrase order
    std::vector<std::vector<int>> words_of_phrase(k);
    for (const NounPhrase& np : phrases) {
        for (std::size_t tok : np.content_word_indices) {
            words_of_phrase[np.phrase_id].push_back(
                static_cast<int>(g.word_prompt_index.size()));
            g.word_prompt_index.push_back(tok);
            g.phrase_of_word.push_back(np.phrase_id);
        }
    }

    g.points_of_cluster.resize(k);
    g.words_of_cluster.resize(k);
    for (int c = 0; c < k; ++c)
        g.words_of_cluster[c] = words_of_phrase[phrase_of_cluster[c]];
    for (std::size_t i = 0; i < cluster_of_point.size(); ++i) {
        int c = cluster_of_point[i];
        if (c < 0 || c >= k)
            raise(ErrorKind::Internal, "graph: point label out of range");
        g.points_of_cluster[c].push_back(static_cast<int>(i));
    }

    std::size_t edge_count = 0;
    for (int c = 0; c < k; ++c)
        edge_count += g.points_of_cluster[c].size() * g.words_of_cluster[c].size();
    g.edges.reserve(edge_count);
    for (int c = 0; c < k; ++c)
        for (int point : g.points_of_cluster[c])
            for (int word : g.words_of_cluster[c])
                g.edges.emplace_back(point, word);
    return g;
}

}  // namespace temo::parse
