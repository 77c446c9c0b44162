#include "temo/parse/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "temo/util/error.hpp"

namespace temo::parse {
namespace {

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double num = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    double denom = std::sqrt(na) * std::sqrt(nb);
    if (denom < 1e-12)
        raise(ErrorKind::Numeric, "cosine of a zero-norm embedding");
    return num / denom;
}

}  // namespace

std::vector<geo::HitMap> decouple_hitmap(const geo::HitMap& hitmap,
                                         const std::vector<int>& labels,
                                         int k) {
    std::size_t hit_count = 0;
    for (std::uint8_t b : hitmap.data) hit_count += b;
    if (labels.size() != hit_count)
        raise(ErrorKind::Internal,
              "decouple_hitmap: label count does not match hit count");
    std::vector<geo::HitMap> masks(k);
    for (auto& m : masks) {
        m.h = hitmap.h;
        m.w = hitmap.w;
        m.data.assign(hitmap.data.size(), 0);
    }
    std::size_t next = 0;
    for (std::size_t i = 0; i < hitmap.data.size(); ++i) {
        if (!hitmap.data[i]) continue;
        int c = labels[next++];
        if (c < 0 || c >= k)
            raise(ErrorKind::Internal, "decouple_hitmap: label out of range");
        masks[c].data[i] = 1;
    }
    return masks;
}

std::vector<int> best_bijection(const ad::Mat& sim) {
    if (sim.rows != sim.cols || sim.rows == 0)
        raise(ErrorKind::Internal, "best_bijection: matrix must be square");
    int k = static_cast<int>(sim.rows);
    std::vector<int> phrase_of_cluster(k, -1);
    if (k <= 6) {
        // sim(p, c): phrase p against cluster c
        std::vector<int> perm(k);
        std::iota(perm.begin(), perm.end(), 0);
        std::vector<int> best = perm;
        double best_total = -std::numeric_limits<double>::infinity();
        do {
            double total = 0.0;
            for (int c = 0; c < k; ++c) total += sim.at(perm[c], c);
            if (total > best_total) {
                best_total = total;
                best = perm;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
        for (int c = 0; c < k; ++c) phrase_of_cluster[c] = best[c];
        return phrase_of_cluster;
    }
    // greedy: repeatedly take the globally best remaining (phrase, cluster)
    std::vector<bool> p_used(k, false), c_used(k, false);
    for (int step = 0; step < k; ++step) {
        int bp = -1, bc = -1;
        double best = -std::numeric_limits<double>::infinity();
        for (int p = 0; p < k; ++p) {
            if (p_used[p]) continue;
            for (int c = 0; c < k; ++c) {
                if (c_used[c]) continue;
                if (sim.at(p, c) > best) {
                    best = sim.at(p, c);
                    bp = p;
                    bc = c;
                }
            }
        }
        p_used[bp] = true;
        c_used[bc] = true;
        phrase_of_cluster[bc] = bp;
    }
    return phrase_of_cluster;
}

std::vector<int> match_phrases_to_clusters(
    const std::string& prompt, const std::vector<NounPhrase>& phrases,
    const std::vector<std::vector<geo::HitMap>>& masks,
    const std::vector<ad::Mat>& neutral_views,
    const embed::EmbeddingProvider& provider, std::size_t h, std::size_t w) {
    const std::size_t k = phrases.size();
    if (k == 0) raise(ErrorKind::Config, "matching needs at least one phrase");
    if (masks.empty() || neutral_views.size() != masks.size())
        raise(ErrorKind::Internal, "matching: views and masks disagree");
    for (const auto& per_view : masks)
        if (per_view.size() != k)
            raise(ErrorKind::Config,
                  "matching: phrase count and cluster count differ");

    // phrase embeddings: mean of the prompt word-feature rows at each
    // phrase's content words
    ad::Mat rows = provider.word_features(prompt);
    std::vector<std::vector<double>> phrase_emb(k);
    for (std::size_t p = 0; p < k; ++p) {
        const auto& content = phrases[p].content_word_indices;
        std::vector<double> mean(embed::EmbeddingProvider::kDim, 0.0);
        for (std::size_t tok : content) {
            if (tok >= rows.rows)
                raise(ErrorKind::Internal, "matching: word index out of range");
            for (std::size_t c = 0; c < rows.cols; ++c)
                mean[c] += rows.at(tok, c) / static_cast<double>(content.size());
        }
        phrase_emb[p] = std::move(mean);
    }

    // cluster embeddings: masked neutral renders, averaged across views
    std::vector<ad::Mat> masked;
    masked.reserve(masks.size() * k);
    for (std::size_t v = 0; v < masks.size(); ++v) {
        const ad::Mat& view = neutral_views[v];
        if (view.rows != h * w || view.cols != 3)
            raise(ErrorKind::Internal, "matching: bad neutral view shape");
        for (std::size_t c = 0; c < k; ++c) {
            ad::Mat img(view.rows, 3);
            const auto& bits = masks[v][c].data;
            for (std::size_t px = 0; px < view.rows; ++px)
                if (bits[px])
                    for (int ch = 0; ch < 3; ++ch)
                        img.at(px, ch) = view.at(px, ch);
            masked.push_back(std::move(img));
        }
    }
    ad::Mat feats = embed::image_features_data(provider, masked, h, w);
    std::vector<std::vector<double>> cluster_emb(
        k, std::vector<double>(embed::EmbeddingProvider::kDim, 0.0));
    for (std::size_t v = 0; v < masks.size(); ++v)
        for (std::size_t c = 0; c < k; ++c) {
            std::size_t row = v * k + c;
            for (std::size_t d = 0; d < feats.cols; ++d)
                cluster_emb[c][d] +=
                    feats.at(row, d) / static_cast<double>(masks.size());
        }

    ad::Mat sim(k, k);
    for (std::size_t p = 0; p < k; ++p)
        for (std::size_t c = 0; c < k; ++c)
            sim.at(p, c) = cosine(phrase_emb[p], cluster_emb[c]);
    return best_bijection(sim);
}

}  // namespace temo::parse
