#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "temo/parse/chunker.hpp"
#include "temo/parse/gmm.hpp"
#include "temo/parse/graph.hpp"
#include "temo/parse/matching.hpp"
#include "temo/util/error.hpp"
#include "temo/util/rng.hpp"

using namespace temo;

TEST_CASE("tokenize lowercases, splits on whitespace, strips punctuation") {
    auto toks = parse::tokenize("A Red Sphere, and a BLUE sphere.");
    REQUIRE(toks.size() == 7);
    CHECK(toks[0].text == "a");
    CHECK(toks[1].text == "red");
    CHECK(toks[2].text == "sphere");
    CHECK(toks[2].ends_chunk);
    CHECK(toks[3].text == "and");
    CHECK_FALSE(toks[3].ends_chunk);
    CHECK(toks[6].text == "sphere");
    CHECK(toks[6].ends_chunk);

    // free-standing punctuation folds into the previous word
    auto toks2 = parse::tokenize("vase , candle");
    REQUIRE(toks2.size() == 2);
    CHECK(toks2[0].text == "vase");
    CHECK(toks2[0].ends_chunk);
    CHECK(toks2[1].text == "candle");
}

TEST_CASE("words gives one entry per prompt word") {
    auto w = parse::words("a red sphere and a blue sphere");
    REQUIRE(w.size() == 7);
    CHECK(w[0] == "a");
    CHECK(w[3] == "and");
    CHECK(w[6] == "sphere");
    CHECK(parse::words("").empty());
}

TEST_CASE("chunker handles two adjective-noun phrases joined by and") {
    auto phrases = parse::extract_noun_phrases("a fire dragon and an ice dragon");
    REQUIRE(phrases.size() == 2);
    CHECK(phrases[0].adjectives == std::vector<std::string>{"fire"});
    CHECK(phrases[0].head_noun == "dragon");
    CHECK(phrases[0].span_begin == 0);
    CHECK(phrases[0].span_end == 3);
    CHECK(phrases[0].phrase_id == 0);
    CHECK(phrases[0].content_word_indices == std::vector<std::size_t>{1, 2});
    CHECK(phrases[1].adjectives == std::vector<std::string>{"ice"});
    CHECK(phrases[1].head_noun == "dragon");
    CHECK(phrases[1].span_begin == 4);
    CHECK(phrases[1].span_end == 7);
    CHECK(phrases[1].content_word_indices == std::vector<std::size_t>{5, 6});

    auto p2 = parse::extract_noun_phrases("a wood vase and a brick candle");
    REQUIRE(p2.size() == 2);
    CHECK(p2[0].adjectives == std::vector<std::string>{"wood"});
    CHECK(p2[0].head_noun == "vase");
    CHECK(p2[1].adjectives == std::vector<std::string>{"brick"});
    CHECK(p2[1].head_noun == "candle");
}

TEST_CASE("chunker accepts a bare noun and multi-adjective phrases") {
    auto p = parse::extract_noun_phrases("a dragon");
    REQUIRE(p.size() == 1);
    CHECK(p[0].adjectives.empty());
    CHECK(p[0].head_noun == "dragon");
    CHECK(p[0].content_words() == std::vector<std::string>{"dragon"});

    auto p2 = parse::extract_noun_phrases("the old stone golem");
    REQUIRE(p2.size() == 1);
    CHECK(p2[0].adjectives == std::vector<std::string>{"old", "stone"});
    CHECK(p2[0].head_noun == "golem");
}

TEST_CASE("chunker splits on punctuation and skips empty chunks") {
    auto p = parse::extract_noun_phrases("A RED sphere, a blue sphere.");
    REQUIRE(p.size() == 2);
    CHECK(p[0].head_noun == "sphere");
    CHECK(p[0].adjectives == std::vector<std::string>{"red"});
    CHECK(p[0].span_begin == 0);
    CHECK(p[0].span_end == 3);
    CHECK(p[1].span_begin == 3);
    CHECK(p[1].span_end == 6);
    CHECK(p[1].content_word_indices == std::vector<std::size_t>{4, 5});

    // "sphere, and a cube": the comma and the conjunction leave no
    // phantom phrase between them
    auto p2 = parse::extract_noun_phrases("a red sphere, and a blue cube");
    REQUIRE(p2.size() == 2);
    CHECK(p2[1].head_noun == "cube");
}

TEST_CASE("chunker round-trips DET ADJ NOUN pairs") {
    for (auto [x, n, y, m] :
         {std::array<const char*, 4>{"shiny", "orb", "dull", "slab"},
          std::array<const char*, 4>{"golden", "crown", "rusty", "sword"}}) {
        std::string prompt = std::string("a ") + x + " " + n + " and a " + y + " " + m;
        auto p = parse::extract_noun_phrases(prompt);
        REQUIRE(p.size() == 2);
        CHECK(p[0].adjectives == std::vector<std::string>{x});
        CHECK(p[0].head_noun == n);
        CHECK(p[1].adjectives == std::vector<std::string>{y});
        CHECK(p[1].head_noun == m);
    }
}

TEST_CASE("chunker raises when no phrase exists") {
    CHECK_THROWS_AS(parse::extract_noun_phrases(""), Error);
    CHECK_THROWS_AS(parse::extract_noun_phrases("and and and"), Error);
    CHECK_THROWS_AS(parse::extract_noun_phrases("the a an"), Error);
    CHECK_THROWS_AS(parse::extract_noun_phrases(", . ;"), Error);
}

// ---- clustering ----

namespace {

std::vector<Vec3> two_blobs(std::uint64_t seed, std::size_t per_blob,
                            double sep, double sigma) {
    Rng rng(seed);
    std::vector<Vec3> pts;
    for (std::size_t i = 0; i < per_blob; ++i)
        pts.push_back(Vec3{-sep, 0, 0} + sigma * rng.gaussian3());
    for (std::size_t i = 0; i < per_blob; ++i)
        pts.push_back(Vec3{sep, 0, 0} + sigma * rng.gaussian3());
    return pts;
}

}  // namespace

TEST_CASE("gmm on identical points pins the mean and floors the covariance") {
    std::vector<Vec3> pts(12, Vec3{0.3, -0.7, 2.0});
    auto model = parse::gmm_fit(pts, 1, 5);
    REQUIRE(model.k == 1);
    CHECK(model.means[0].x == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(model.means[0].y == doctest::Approx(-0.7).epsilon(1e-12));
    CHECK(model.means[0].z == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(model.weights[0] == doctest::Approx(1.0));
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
            double want = r == c ? 1e-6 : 0.0;
            CHECK(model.covariances[0](r, c) == doctest::Approx(want).epsilon(1e-9));
        }
}

TEST_CASE("gmm separates two blobs exactly like the nearest-centroid oracle") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        auto pts = two_blobs(seed, 100, 5.0, 0.1);
        auto model = parse::gmm_fit(pts, 2, seed * 31 + 7);
        auto labels = parse::assign_clusters(model, pts);

        for (std::size_t i = 0; i < pts.size(); ++i) {
            double d0 = norm2(pts[i] - model.means[0]);
            double d1 = norm2(pts[i] - model.means[1]);
            int oracle = d1 < d0 ? 1 : 0;
            CHECK(labels[i] == oracle);
        }
        // the two recovered means sit near the true centers
        double lo = std::min(model.means[0].x, model.means[1].x);
        double hi = std::max(model.means[0].x, model.means[1].x);
        CHECK(lo == doctest::Approx(-5.0).epsilon(0.02));
        CHECK(hi == doctest::Approx(5.0).epsilon(0.02));
        // and the partition is balanced
        int ones = 0;
        for (int l : labels) ones += l;
        CHECK(ones == 100);
    }
}

TEST_CASE("gmm log-likelihood never decreases") {
    auto pts = two_blobs(11, 60, 2.0, 0.5);
    auto model = parse::gmm_fit(pts, 2, 99);
    REQUIRE(model.log_likelihood_trace.size() >= 2);
    for (std::size_t i = 1; i < model.log_likelihood_trace.size(); ++i)
        CHECK(model.log_likelihood_trace[i] >=
              model.log_likelihood_trace[i - 1] - 1e-9);
}

TEST_CASE("gmm rejects k larger than the point count") {
    std::vector<Vec3> pts = {Vec3{0, 0, 0}, Vec3{1, 0, 0}};
    CHECK_THROWS_AS(parse::gmm_fit(pts, 3, 1), Error);
    CHECK_THROWS_AS(parse::gmm_fit(pts, 0, 1), Error);
}

TEST_CASE("gmm is deterministic for a fixed seed") {
    auto pts = two_blobs(4, 50, 3.0, 0.3);
    auto a = parse::gmm_fit(pts, 2, 123);
    auto b = parse::gmm_fit(pts, 2, 123);
    REQUIRE(a.log_likelihood_trace.size() == b.log_likelihood_trace.size());
    for (std::size_t i = 0; i < a.log_likelihood_trace.size(); ++i)
        CHECK(a.log_likelihood_trace[i] == b.log_likelihood_trace[i]);
    for (int c = 0; c < 2; ++c) {
        CHECK(a.means[c].x == b.means[c].x);
        CHECK(a.means[c].y == b.means[c].y);
        CHECK(a.means[c].z == b.means[c].z);
    }
}

TEST_CASE("assign_clusters matches a direct density oracle") {
    auto pts = two_blobs(21, 40, 1.5, 0.4);
    auto model = parse::gmm_fit(pts, 2, 77);

    // fresh query points near the data; evaluate the weighted densities
    // directly via the explicit 3x3 inverse
    Rng rng(5150);
    std::vector<Vec3> queries;
    for (int i = 0; i < 200; ++i) {
        Vec3 center = (i % 2 == 0) ? Vec3{-1.5, 0, 0} : Vec3{1.5, 0, 0};
        queries.push_back(center + 0.8 * rng.gaussian3());
    }
    auto labels = parse::assign_clusters(model, queries);

    for (std::size_t i = 0; i < queries.size(); ++i) {
        int best = 0;
        double best_score = -1.0;
        for (int c = 0; c < model.k; ++c) {
            const Mat3& S = model.covariances[c];
            double det = S(0, 0) * (S(1, 1) * S(2, 2) - S(1, 2) * S(2, 1)) -
                         S(0, 1) * (S(1, 0) * S(2, 2) - S(1, 2) * S(2, 0)) +
                         S(0, 2) * (S(1, 0) * S(2, 1) - S(1, 1) * S(2, 0));
            Mat3 inv{};
            inv(0, 0) = (S(1, 1) * S(2, 2) - S(1, 2) * S(2, 1)) / det;
            inv(0, 1) = (S(0, 2) * S(2, 1) - S(0, 1) * S(2, 2)) / det;
            inv(0, 2) = (S(0, 1) * S(1, 2) - S(0, 2) * S(1, 1)) / det;
            inv(1, 0) = (S(1, 2) * S(2, 0) - S(1, 0) * S(2, 2)) / det;
            inv(1, 1) = (S(0, 0) * S(2, 2) - S(0, 2) * S(2, 0)) / det;
            inv(1, 2) = (S(0, 2) * S(1, 0) - S(0, 0) * S(1, 2)) / det;
            inv(2, 0) = (S(1, 0) * S(2, 1) - S(1, 1) * S(2, 0)) / det;
            inv(2, 1) = (S(0, 1) * S(2, 0) - S(0, 0) * S(2, 1)) / det;
            inv(2, 2) = (S(0, 0) * S(1, 1) - S(0, 1) * S(1, 0)) / det;
            Vec3 d = queries[i] - model.means[c];
            double maha = dot(d, inv * d);
            double dens = model.weights[c] *
                          std::exp(-0.5 * maha) /
                          std::sqrt(std::pow(2.0 * M_PI, 3) * det);
            if (dens > best_score) {
                best_score = dens;
                best = c;
            }
        }
        CHECK(labels[i] == best);
    }
}

TEST_CASE("assign_clusters breaks exact ties toward the lower index") {
    parse::GmmModel model;
    model.k = 2;
    model.means = {Vec3{-1, 0, 0}, Vec3{1, 0, 0}};
    Mat3 iso{};
    iso(0, 0) = iso(1, 1) = iso(2, 2) = 0.5;
    model.covariances = {iso, iso};
    model.weights = {0.5, 0.5};
    auto labels = parse::assign_clusters(model, {Vec3{0, 0, 0}, Vec3{0, 3, -2}});
    CHECK(labels[0] == 0);
    CHECK(labels[1] == 0);

    // off-center points still go to the nearer component
    auto l2 = parse::assign_clusters(model, {Vec3{0.9, 0, 0}, Vec3{-0.2, 0, 0}});
    CHECK(l2[0] == 1);
    CHECK(l2[1] == 0);
}

// ---- hit-map decoupling ----

namespace {

geo::HitMap make_map(std::size_t h, std::size_t w,
                     const std::set<std::size_t>& on) {
    geo::HitMap m;
    m.h = h;
    m.w = w;
    m.data.assign(h * w, 0);
    for (std::size_t p : on) m.data[p] = 1;
    return m;
}

}  // namespace

TEST_CASE("decouple_hitmap with one cluster returns the hit map itself") {
    auto hm = make_map(4, 4, {1, 5, 6, 10});
    std::vector<int> labels(4, 0);
    auto masks = parse::decouple_hitmap(hm, labels, 1);
    REQUIRE(masks.size() == 1);
    CHECK(masks[0].data == hm.data);
}

TEST_CASE("decouple_hitmap partitions left and right pixels by column") {
    // hits everywhere; left half labeled 0, right half labeled 1
    std::size_t h = 6, w = 8;
    geo::HitMap hm;
    hm.h = h;
    hm.w = w;
    hm.data.assign(h * w, 1);
    std::vector<int> labels;
    for (std::size_t y = 0; y < h; ++y)
        for (std::size_t x = 0; x < w; ++x)
            labels.push_back(x < w / 2 ? 0 : 1);
    auto masks = parse::decouple_hitmap(hm, labels, 2);
    REQUIRE(masks.size() == 2);
    for (std::size_t y = 0; y < h; ++y)
        for (std::size_t x = 0; x < w; ++x) {
            CHECK(masks[0].at(y, x) == (x < w / 2 ? 1 : 0));
            CHECK(masks[1].at(y, x) == (x < w / 2 ? 0 : 1));
            // disjoint and covering
            CHECK(masks[0].at(y, x) + masks[1].at(y, x) == hm.at(y, x));
        }
}

TEST_CASE("decouple_hitmap validates the label count and handles empty maps") {
    auto hm = make_map(3, 3, {0, 4});
    CHECK_THROWS_AS(parse::decouple_hitmap(hm, {0}, 1), Error);

    auto empty = make_map(3, 3, {});
    auto masks = parse::decouple_hitmap(empty, {}, 2);
    REQUIRE(masks.size() == 2);
    for (const auto& m : masks)
        CHECK(std::count(m.data.begin(), m.data.end(), 1) == 0);
}

// ---- phrase-cluster assignment ----

TEST_CASE("best_bijection maximizes the total similarity") {
    ad::Mat sim(2, 2);
    sim.at(0, 0) = 0.9;
    sim.at(0, 1) = 0.1;
    sim.at(1, 0) = 0.2;
    sim.at(1, 1) = 0.8;
    auto assign = parse::best_bijection(sim);
    CHECK(assign == std::vector<int>{0, 1});
    CHECK(sim.at(assign[0], 0) + sim.at(assign[1], 1) == doctest::Approx(1.7));

    ad::Mat anti(2, 2);
    anti.at(0, 0) = 0.1;
    anti.at(0, 1) = 0.9;
    anti.at(1, 0) = 0.8;
    anti.at(1, 1) = 0.2;
    CHECK(parse::best_bijection(anti) == std::vector<int>{1, 0});

    ad::Mat one(1, 1);
    one.at(0, 0) = -0.3;
    CHECK(parse::best_bijection(one) == std::vector<int>{0});
}

TEST_CASE("best_bijection is exhaustive where greedy would lose") {
    // greedy grabs (0,0)=0.9 and ends at total 1.6; the optimum is 2.15
    ad::Mat sim(3, 3);
    sim.at(0, 0) = 0.9;
    sim.at(0, 1) = 0.8;
    sim.at(0, 2) = 0.0;
    sim.at(1, 0) = 0.85;
    sim.at(1, 1) = 0.2;
    sim.at(1, 2) = 0.0;
    sim.at(2, 0) = 0.0;
    sim.at(2, 1) = 0.0;
    sim.at(2, 2) = 0.5;
    auto assign = parse::best_bijection(sim);
    CHECK(assign == std::vector<int>{1, 0, 2});

    ad::Mat bad(2, 3);
    CHECK_THROWS_AS(parse::best_bijection(bad), Error);
}

// ---- cross-modal graph ----

TEST_CASE("graph over one cluster is complete bipartite") {
    auto phrases = parse::extract_noun_phrases("a red sphere");
    auto g = parse::build_graph({0, 0, 0}, {0}, phrases);
    CHECK(g.num_points == 3);
    CHECK(g.num_words() == 2);  // red, sphere
    CHECK(g.edges.size() == 6);
    CHECK(g.word_prompt_index == std::vector<std::size_t>{1, 2});
    std::set<std::pair<int, int>> seen(g.edges.begin(), g.edges.end());
    CHECK(seen.size() == 6);
    for (int p = 0; p < 3; ++p)
        for (int wd = 0; wd < 2; ++wd)
            CHECK(seen.count({p, wd}) == 1);
}

TEST_CASE("graph edge count follows cluster sizes and phrase lengths") {
    // phrase 0 has 2 content words, phrase 1 has 3
    auto phrases =
        parse::extract_noun_phrases("a wood vase and a tall brick candle");
    REQUIRE(phrases[0].content_words().size() == 2);
    REQUIRE(phrases[1].content_words().size() == 3);
    // cluster 0: 3 points, cluster 1: 4 points, identity matching
    std::vector<int> cluster_of_point = {0, 0, 0, 1, 1, 1, 1};
    auto g = parse::build_graph(cluster_of_point, {0, 1}, phrases);
    CHECK(g.edges.size() == 3 * 2 + 4 * 3);

    // bipartite edge rule holds exactly: an edge exists iff the point's
    // cluster maps to the word's phrase
    std::set<std::pair<int, int>> seen(g.edges.begin(), g.edges.end());
    std::size_t expected = 0;
    for (std::size_t i = 0; i < cluster_of_point.size(); ++i)
        for (std::size_t wd = 0; wd < g.num_words(); ++wd) {
            bool rule = g.phrase_of_cluster[cluster_of_point[i]] ==
                        g.phrase_of_word[wd];
            CHECK(seen.count({static_cast<int>(i), static_cast<int>(wd)}) ==
                  (rule ? 1u : 0u));
            expected += rule ? 1 : 0;
        }
    CHECK(g.edges.size() == expected);

    // crossed matching flips the word sets
    auto g2 = parse::build_graph(cluster_of_point, {1, 0}, phrases);
    CHECK(g2.edges.size() == 3 * 3 + 4 * 2);
    CHECK(g2.words_of_cluster[0].size() == 3);
}

TEST_CASE("graph rejects a non-bijective matching") {
    auto phrases = parse::extract_noun_phrases("a red ball and a blue ball");
    CHECK_THROWS_AS(parse::build_graph({0, 1}, {0, 0}, phrases), Error);
    CHECK_THROWS_AS(parse::build_graph({0, 1}, {0, 2}, phrases), Error);
    CHECK_THROWS_AS(parse::build_graph({0, 2}, {0, 1}, phrases), Error);
}
