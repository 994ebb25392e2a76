#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "deeplink/struct_embed.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace deeplink;

namespace {

double cosine(std::span<const double> a, std::span<const double> b) {
    const double na = std::sqrt(dot(a, a)), nb = std::sqrt(dot(b, b));
    return dot(a, b) / (na * nb);
}

std::vector<double> random_vector(Rng& rng, std::size_t d, double scale) {
    std::vector<double> v(d);
    for (double& x : v) x = (uniform01(rng) - 0.5) * scale;
    return v;
}

}  // namespace

TEST_CASE("edge_context_weight looks up stored weights and defaults to 1") {
    const Graph g = gen::make_weighted(true, {{"a", "b", 2.0}, {"b", "c", 3.0}});
    CHECK(edge_context_weight(g, g.id_of("a"), g.id_of("b")) == 2.0);
    CHECK(edge_context_weight(g, g.id_of("b"), g.id_of("a")) == 1.0);  // arc direction matters
    CHECK(edge_context_weight(g, g.id_of("a"), g.id_of("c")) == 1.0);
    CHECK(edge_context_weight(g, g.id_of("a"), g.id_of("a")) == 1.0);
    CHECK_THROWS_AS(edge_context_weight(g, 0, 99), std::out_of_range);
}

TEST_CASE("pair_probability is a weighted sigmoid of the dot product") {
    const std::vector<double> zero(4, 0.0);
    CHECK(pair_probability(zero, zero, 5.0) == 0.5);

    const std::vector<double> u = {std::log(3.0), 0.0};
    const std::vector<double> v = {1.0, 0.0};
    CHECK(pair_probability(u, v, 1.0) == doctest::Approx(0.75).epsilon(1e-12));

    CHECK(pair_probability(u, v, 2.0) > pair_probability(u, v, 1.0));
    CHECK_THROWS_AS(pair_probability(u, zero, 1.0), std::invalid_argument);
}

TEST_CASE("pair_probability survives extreme scores without overflow") {
    const std::vector<double> big = {1000.0};
    const std::vector<double> one = {1.0};
    CHECK(pair_probability(big, one, 1.0) == doctest::Approx(1.0));
    CHECK(pair_probability(big, one, -1.0) == doctest::Approx(0.0));
    const std::vector<double> negated = {-1000.0};
    CHECK(pair_probability(big, one, 2.0) + pair_probability(negated, one, 2.0) ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("sigmoid symmetry holds for random inputs") {
    Rng rng = make_rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const auto u = random_vector(rng, 6, 2.0);
        auto neg = u;
        for (double& x : neg) x = -x;
        const auto v = random_vector(rng, 6, 2.0);
        const double w = 0.5 + uniform01(rng) * 2.0;
        CHECK(pair_probability(u, v, w) + pair_probability(neg, v, w) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("pair loss gradient matches central finite differences") {
    Rng rng = make_rng(7);
    for (const bool positive : {true, false}) {
        for (int trial = 0; trial < 20; ++trial) {
            auto u = random_vector(rng, 5, 1.0);
            auto v = random_vector(rng, 5, 1.0);
            const double w = 0.5 + uniform01(rng) * 2.5;
            std::vector<double> gu(5), gv(5);
            pair_loss_grad(u, v, w, positive, gu, gv);
            for (std::size_t k = 0; k < 5; ++k) {
                const double fd_u =
                    oracle::fd_central(u[k], 1e-5, [&] { return pair_loss(u, v, w, positive); });
                const double fd_v =
                    oracle::fd_central(v[k], 1e-5, [&] { return pair_loss(u, v, w, positive); });
                CHECK(oracle::rel_err(gu[k], fd_u) < 1e-4);
                CHECK(oracle::rel_err(gv[k], fd_v) < 1e-4);
            }
        }
    }
}

TEST_CASE("pair_loss_grad validates output spans") {
    const std::vector<double> u = {1.0, 2.0};
    std::vector<double> small(1);
    std::vector<double> ok(2);
    CHECK_THROWS_AS(pair_loss_grad(u, u, 1.0, true, small, ok), std::invalid_argument);
}

namespace {

WalkCorpus triangle_corpus(const Graph& g, int walks, int length, std::uint64_t seed) {
    const CommunityAssignment a = louvain(g, 1);
    WalkParams p;
    p.alpha = 0.0;
    p.max_length = static_cast<std::uint32_t>(length);
    p.walks_per_node = static_cast<std::uint32_t>(walks);
    p.seed = seed;
    return generate_corpus(g, a, p);
}

}  // namespace

TEST_CASE("epochs=0 returns the untrained initialization") {
    const Graph g = gen::disjoint_cliques(2, 3);
    const WalkCorpus corpus = triangle_corpus(g, 2, 10, 3);
    TrainConfig cfg;
    cfg.dimension = 8;
    cfg.epochs = 0;
    cfg.seed = 42;
    const EmbeddingMatrix m = train_structural(corpus, g, cfg);
    REQUIRE(m.rows() == g.node_count());
    REQUIRE(m.dimension() == 8);
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (const double x : m.row(i)) {
            CHECK(std::abs(x) <= 0.5 / 8);
            CHECK(x != 0.0);  // untrained but initialized
        }
    // the initialization depends only on (node count, dimension, seed)
    const WalkCorpus other = triangle_corpus(g, 4, 6, 9);
    CHECK(train_structural(other, g, cfg) == m);
}

TEST_CASE("training separates the two triangles") {
    const Graph g = gen::disjoint_cliques(2, 3);
    const WalkCorpus corpus = triangle_corpus(g, 20, 20, 5);
    TrainConfig cfg;
    cfg.dimension = 16;
    cfg.window = 4;
    cfg.epochs = 5;
    cfg.seed = 1;
    const EmbeddingMatrix m = train_structural(corpus, g, cfg);
    double within = 0.0, across = 0.0;
    int nw = 0, na = 0;
    for (NodeId u = 0; u < 6; ++u)
        for (NodeId v = u + 1; v < 6; ++v) {
            const double c = cosine(m.row(u), m.row(v));
            if ((u < 3) == (v < 3)) {
                within += c;
                ++nw;
            } else {
                across += c;
                ++na;
            }
        }
    CHECK(within / nw > across / na);
}

TEST_CASE("training keeps every entry finite on random corpora") {
    Rng rng = make_rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        const Graph g = gen::random_connected_graph(3 + uniform_below(rng, 6), 0.3, rng);
        const CommunityAssignment a = louvain(g, trial);
        WalkParams p;
        p.alpha = uniform01(rng);
        p.max_length = 4 + static_cast<std::uint32_t>(uniform_below(rng, 8));
        p.walks_per_node = 2;
        p.seed = trial;
        const WalkCorpus corpus = generate_corpus(g, a, p);
        TrainConfig cfg;
        cfg.dimension = 6;
        cfg.window = 3;
        cfg.epochs = 2;
        cfg.seed = trial;
        const EmbeddingMatrix m = train_structural(corpus, g, cfg);
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (const double x : m.row(i)) REQUIRE(std::isfinite(x));
    }
}

TEST_CASE("single-threaded training is bit-reproducible") {
    const Graph g = gen::two_block_sbm(16, 0.5, 0.1, 12);
    const CommunityAssignment a = louvain(g, 0);
    WalkParams p;
    p.max_length = 12;
    p.walks_per_node = 3;
    const WalkCorpus corpus = generate_corpus(g, a, p);
    TrainConfig cfg;
    cfg.dimension = 12;
    cfg.window = 5;
    cfg.epochs = 3;
    cfg.seed = 8;
    CHECK(train_structural(corpus, g, cfg) == train_structural(corpus, g, cfg));
}

TEST_CASE("training rejects bad inputs") {
    const Graph g = gen::disjoint_cliques(1, 3);
    const WalkCorpus corpus = triangle_corpus(g, 1, 5, 0);
    TrainConfig cfg;
    cfg.dimension = 0;
    CHECK_THROWS_AS(train_structural(corpus, g, cfg), std::invalid_argument);
    cfg.dimension = 4;
    cfg.window = 0;
    CHECK_THROWS_AS(train_structural(corpus, g, cfg), std::invalid_argument);
    cfg.window = 2;
    cfg.lr_initial = 0.0001;
    cfg.lr_final = 0.025;
    CHECK_THROWS_AS(train_structural(corpus, g, cfg), std::invalid_argument);

    TrainConfig good;
    good.dimension = 4;
    CHECK_THROWS_AS(train_structural(WalkCorpus{}, g, good), std::invalid_argument);
    WalkCorpus bogus;
    bogus.walks.push_back({0, 99});
    CHECK_THROWS_AS(train_structural(bogus, g, good), std::out_of_range);
}
