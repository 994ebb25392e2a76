#include "deeplink/struct_embed.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

#include "deeplink/random.hpp"

namespace deeplink {

namespace {

constexpr double kScoreClip = 6.0;

double stable_sigmoid(double s) {
    if (s >= 0.0) return 1.0 / (1.0 + std::exp(-s));
    const double e = std::exp(s);
    return e / (1.0 + e);
}

}  // namespace

double edge_context_weight(const Graph& g, NodeId u, NodeId v) {
    if (u >= g.node_count() || v >= g.node_count())
        throw std::out_of_range("node id out of range");
    if (u == v) return 1.0;
    if (const auto w = g.edge_weight(u, v)) return *w;
    return 1.0;
}

double pair_probability(std::span<const double> f_u, std::span<const double> f_v, double weight) {
    return stable_sigmoid(weight * dot(f_u, f_v));
}

double pair_loss(std::span<const double> f_u, std::span<const double> f_v, double weight,
                 bool positive) {
    const double s = std::clamp(weight * dot(f_u, f_v), -kScoreClip, kScoreClip);
    return -std::log(stable_sigmoid(positive ? s : -s));
}

double pair_loss_grad(std::span<const double> f_u, std::span<const double> f_v, double weight,
                      bool positive, std::span<double> grad_u, std::span<double> grad_v) {
    if (grad_u.size() != f_u.size() || grad_v.size() != f_v.size())
        throw std::invalid_argument("gradient dimension mismatch");
    const double s = std::clamp(weight * dot(f_u, f_v), -kScoreClip, kScoreClip);
    const double p = stable_sigmoid(s);
    const double coef = (p - (positive ? 1.0 : 0.0)) * weight;
    for (std::size_t k = 0; k < f_u.size(); ++k) {
        grad_u[k] = coef * f_v[k];
        grad_v[k] = coef * f_u[k];
    }
    return -std::log(stable_sigmoid(positive ? s : -s));
}

EmbeddingMatrix train_structural(const WalkCorpus& corpus, const Graph& g,
                                 const TrainConfig& cfg) {
    if (cfg.dimension < 1) throw std::invalid_argument("embedding dimension must be positive");
    if (cfg.window < 1) throw std::invalid_argument("context window must be positive");
    if (!(cfg.lr_initial > cfg.lr_final && cfg.lr_final >= 0.0))
        throw std::invalid_argument("learning rate must decay toward a non-negative floor");

    const std::size_t n = g.node_count();
    std::vector<double> frequency(n, 0.0);
    std::size_t total_positions = 0;
    for (const auto& walk : corpus.walks)
        for (const NodeId u : walk) {
            if (u >= n) throw std::out_of_range("walk corpus references unknown node");
            frequency[u] += 1.0;
            ++total_positions;
        }
    if (total_positions == 0) throw std::invalid_argument("walk corpus is empty");

    const std::size_t d = cfg.dimension;
    EmbeddingMatrix input(n, d), context(n, d);
    {
        Rng rng = make_rng(mix_seed(cfg.seed, 0x1417ull, 0));
        for (std::size_t i = 0; i < n; ++i)
            for (double& x : input.row(i)) x = (uniform01(rng) - 0.5) / static_cast<double>(d);
    }
    if (cfg.epochs == 0) return input;

    for (double& f : frequency) f = std::pow(f, 0.75);
    const AliasTable negative_table(frequency);

    const double total_updates = static_cast<double>(cfg.epochs) * total_positions;
    std::atomic<std::uint64_t> progress{0};

    const auto train_walks = [&](std::size_t walk_begin, std::size_t walk_end, unsigned worker) {
        Rng rng = make_rng(mix_seed(cfg.seed, 0x7261ull, worker));
        std::vector<double> accum(d);
        for (std::uint32_t epoch = 0; epoch < cfg.epochs; ++epoch) {
            for (std::size_t wi = walk_begin; wi < walk_end; ++wi) {
                const Walk& walk = corpus.walks[wi];
                for (std::size_t i = 0; i < walk.size(); ++i) {
                    const auto t = progress.fetch_add(1, std::memory_order_relaxed);
                    double lr = cfg.lr_initial -
                                (cfg.lr_initial - cfg.lr_final) *
                                    (static_cast<double>(t) / total_updates);
                    if (lr < cfg.lr_final) lr = cfg.lr_final;

                    const NodeId center = walk[i];
                    auto f_u = input.row(center);
                    const std::size_t lo = i > cfg.window ? i - cfg.window : 0;
                    const std::size_t hi = std::min(walk.size() - 1, i + cfg.window);
                    for (std::size_t j = lo; j <= hi; ++j) {
                        if (j == i) continue;
                        const NodeId pos = walk[j];
                        std::fill(accum.begin(), accum.end(), 0.0);
                        for (std::uint32_t m = 0; m <= cfg.negatives; ++m) {
                            NodeId target;
                            double weight, label;
                            if (m == 0) {
                                target = pos;
                                weight = edge_context_weight(g, center, pos);
                                label = 1.0;
                            } else {
                                target = static_cast<NodeId>(negative_table.sample(rng));
                                if (target == pos) continue;
                                weight = 1.0;
                                label = 0.0;
                            }
                            auto f_c = context.row(target);
                            const double s =
                                std::clamp(weight * dot(f_u, f_c), -kScoreClip, kScoreClip);
                            const double gscale = (label - stable_sigmoid(s)) * weight * lr;
                            for (std::size_t k = 0; k < d; ++k) accum[k] += gscale * f_c[k];
                            for (std::size_t k = 0; k < d; ++k) f_c[k] += gscale * f_u[k];
                        }
                        for (std::size_t k = 0; k < d; ++k) f_u[k] += accum[k];
                    }
                }
            }
        }
    };

    const std::size_t walks = corpus.walks.size();
    if (cfg.threads <= 1 || walks < 2) {
        train_walks(0, walks, 0);
        return input;
    }

    const unsigned workers = std::min<unsigned>(cfg.threads, static_cast<unsigned>(walks));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (walks + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t begin = std::min(walks, w * chunk);
        const std::size_t end = std::min(walks, (w + 1) * chunk);
        if (begin < end) pool.emplace_back(train_walks, begin, end, w);
    }
    for (auto& t : pool) t.join();
    return input;
}

}  // namespace deeplink
