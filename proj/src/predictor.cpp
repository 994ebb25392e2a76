#include "deeplink/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "deeplink/embedding.hpp"
#include "deeplink/random.hpp"

namespace deeplink {

namespace {

double stable_sigmoid(double s) {
    if (s >= 0.0) return 1.0 / (1.0 + std::exp(-s));
    const double e = std::exp(s);
    return e / (1.0 + e);
}

// Each logical edge once: directed arcs as stored, undirected as (u < v).
std::vector<NodePair> unique_edges(const Graph& g) {
    std::vector<NodePair> out;
    for (NodeId u = 0; u < g.node_count(); ++u)
        for (const auto& e : g.out_neighbors(u)) {
            if (!g.directed() && e.target < u) continue;
            out.push_back({u, e.target});
        }
    return out;
}

std::uint64_t pair_key(NodeId u, NodeId v) {
    return (static_cast<std::uint64_t>(u) << 32) | v;
}

template <class Forbidden>
std::vector<NodePair> sample_negatives(const Graph& g, std::size_t count, Rng& rng,
                                       Forbidden&& forbidden,
                                       std::unordered_set<std::uint64_t>& used) {
    std::vector<NodePair> out;
    out.reserve(count);
    if (count == 0) return out;
    const std::uint64_t n = g.node_count();
    if (n < 2) throw std::runtime_error("cannot sample negative pairs: fewer than two nodes");
    const std::size_t max_attempts = 100 * count;
    std::size_t attempts = 0;
    while (out.size() < count) {
        if (attempts++ >= max_attempts)
            throw std::runtime_error("could not sample " + std::to_string(count) +
                                     " negative pairs in " + std::to_string(max_attempts) +
                                     " attempts; too few non-edges");
        auto u = static_cast<NodeId>(uniform_below(rng, n));
        auto v = static_cast<NodeId>(uniform_below(rng, n));
        if (u == v) continue;
        if (!g.directed() && u > v) std::swap(u, v);
        const std::uint64_t key = pair_key(u, v);
        if (used.contains(key)) continue;
        if (g.edge_weight(u, v)) continue;
        if (forbidden(u, v)) continue;
        used.insert(key);
        out.push_back({u, v});
    }
    return out;
}

}  // namespace

DatasetSplit temporal_split(const Graph& g_t1, const Graph& g_t2, std::uint64_t seed) {
    if (g_t1.directed() != g_t2.directed())
        throw std::invalid_argument("snapshots must agree on directedness");
    if (g_t1.node_count() < 2) throw std::invalid_argument("first snapshot is too small");

    DatasetSplit s;
    s.positive_train = unique_edges(g_t1);

    for (const auto& [a, b] : unique_edges(g_t2)) {
        const auto& ta = g_t2.token_of(a);
        const auto& tb = g_t2.token_of(b);
        if (!g_t1.has_token(ta) || !g_t1.has_token(tb)) {
            ++s.dropped_unseen;
            continue;
        }
        NodeId u = g_t1.id_of(ta);
        NodeId v = g_t1.id_of(tb);
        if (g_t1.edge_weight(u, v)) continue;
        if (!g_t1.directed() && u > v) std::swap(u, v);
        s.positive_test.push_back({u, v});
    }
    if (s.positive_test.empty())
        throw std::invalid_argument("second snapshot adds no new edges over known nodes");

    const auto edge_in_second = [&](NodeId u, NodeId v) {
        const auto& tu = g_t1.token_of(u);
        const auto& tv = g_t1.token_of(v);
        if (!g_t2.has_token(tu) || !g_t2.has_token(tv)) return false;
        return g_t2.edge_weight(g_t2.id_of(tu), g_t2.id_of(tv)).has_value();
    };
    Rng rng = make_rng(mix_seed(seed, 0x4e65ull, 0));
    std::unordered_set<std::uint64_t> used;
    s.negative_train = sample_negatives(g_t1, s.positive_train.size(), rng, edge_in_second, used);
    s.negative_test = sample_negatives(g_t1, s.positive_test.size(), rng, edge_in_second, used);
    return s;
}

DatasetSplit random_removal_split(const Graph& g, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw std::invalid_argument("test fraction must lie strictly between 0 and 1");
    auto edges = unique_edges(g);
    if (edges.empty()) throw std::invalid_argument("graph has no edges to split");

    const std::size_t m = edges.size();
    // nextafter guards against 0.1 * 100 landing a hair above the integer
    auto k = static_cast<std::size_t>(
        std::ceil(std::nextafter(test_fraction * static_cast<double>(m), 0.0)));
    if (k == 0) k = 1;
    if (k >= m) throw std::invalid_argument("test fraction leaves no training edges");

    Rng rng = make_rng(mix_seed(seed, 0x5b17ull, 0));
    for (std::size_t i = m - 1; i > 0; --i)
        std::swap(edges[i], edges[uniform_below(rng, i + 1)]);

    DatasetSplit s;
    s.positive_test.assign(edges.begin(), edges.begin() + static_cast<std::ptrdiff_t>(k));
    s.positive_train.assign(edges.begin() + static_cast<std::ptrdiff_t>(k), edges.end());

    std::unordered_set<std::uint64_t> used;
    const auto nothing_extra = [](NodeId, NodeId) { return false; };
    s.negative_train = sample_negatives(g, s.positive_train.size(), rng, nothing_extra, used);
    s.negative_test = sample_negatives(g, s.positive_test.size(), rng, nothing_extra, used);
    return s;
}

Graph training_graph(const Graph& g, const DatasetSplit& split) {
    GraphBuilder b(g.directed());
    for (NodeId u = 0; u < g.node_count(); ++u) b.add_node(g.token_of(u));
    for (const auto& [u, v] : split.positive_train) {
        const auto w = g.edge_weight(u, v);
        b.add_edge(g.token_of(u), g.token_of(v), w.value_or(1.0));
    }
    return b.build();
}

namespace {
constexpr std::string_view kSectionNames[4] = {"positive-train", "negative-train",
                                               "positive-test", "negative-test"};
}

void write_split(std::ostream& out, const Graph& g, const DatasetSplit& split) {
    const std::vector<NodePair>* sets[4] = {&split.positive_train, &split.negative_train,
                                            &split.positive_test, &split.negative_test};
    for (int i = 0; i < 4; ++i) {
        out << "# " << kSectionNames[i] << '\n';
        for (const auto& [u, v] : *sets[i]) out << g.token_of(u) << '\t' << g.token_of(v) << '\n';
    }
}

void write_split(const std::filesystem::path& path, const Graph& g, const DatasetSplit& split) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_split(out, g, split);
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

DatasetSplit read_split(std::istream& in, const Graph& g) {
    DatasetSplit s;
    std::vector<NodePair>* sets[4] = {&s.positive_train, &s.negative_train, &s.positive_test,
                                      &s.negative_test};
    int current = -1;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string name = line.substr(1);
            const auto first = name.find_first_not_of(" \t");
            const auto last = name.find_last_not_of(" \t");
            name = first == std::string::npos ? "" : name.substr(first, last - first + 1);
            current = -1;
            for (int i = 0; i < 4; ++i)
                if (name == kSectionNames[i]) current = i;
            if (current < 0)
                throw std::runtime_error("split file line " + std::to_string(lineno) +
                                         ": unknown section '" + name + "'");
            continue;
        }
        if (current < 0)
            throw std::runtime_error("split file line " + std::to_string(lineno) +
                                     ": pair before any section header");
        const auto tab = line.find('\t');
        if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos)
            throw std::runtime_error("split file line " + std::to_string(lineno) +
                                     ": expected exactly two tab-separated tokens");
        const std::string tu = line.substr(0, tab);
        const std::string tv = line.substr(tab + 1);
        if (!g.has_token(tu) || !g.has_token(tv))
            throw std::runtime_error("split file line " + std::to_string(lineno) +
                                     ": unknown node in pair '" + line + "'");
        sets[current]->push_back({g.id_of(tu), g.id_of(tv)});
    }
    return s;
}

DatasetSplit read_split(const std::filesystem::path& path, const Graph& g) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return read_split(in, g);
}

double logistic_loss(std::span<const double> weights, double bias,
                     const std::vector<std::vector<double>>& features,
                     std::span<const double> labels, double l2) {
    if (features.empty() || features.size() != labels.size())
        throw std::invalid_argument("features and labels must be non-empty and equal length");
    double total = 0.0;
    for (std::size_t i = 0; i < features.size(); ++i) {
        const double s = dot(weights, features[i]) + bias;
        total += std::max(s, 0.0) - s * labels[i] + std::log1p(std::exp(-std::abs(s)));
    }
    total /= static_cast<double>(features.size());
    double sq = 0.0;
    for (const double w : weights) sq += w * w;
    return total + 0.5 * l2 * sq;
}

double logistic_loss_grad(std::span<const double> weights, double bias,
                          const std::vector<std::vector<double>>& features,
                          std::span<const double> labels, double l2,
                          std::span<double> grad_weights, double& grad_bias) {
    if (grad_weights.size() != weights.size())
        throw std::invalid_argument("gradient dimension mismatch");
    const double loss = logistic_loss(weights, bias, features, labels, l2);
    std::fill(grad_weights.begin(), grad_weights.end(), 0.0);
    grad_bias = 0.0;
    for (std::size_t i = 0; i < features.size(); ++i) {
        const double e = stable_sigmoid(dot(weights, features[i]) + bias) - labels[i];
        for (std::size_t k = 0; k < weights.size(); ++k) grad_weights[k] += e * features[i][k];
        grad_bias += e;
    }
    const double scale = 1.0 / static_cast<double>(features.size());
    for (std::size_t k = 0; k < weights.size(); ++k)
        grad_weights[k] = grad_weights[k] * scale + l2 * weights[k];
    grad_bias *= scale;
    return loss;
}

LogisticModel train_classifier(const std::vector<std::vector<double>>& features,
                               std::span<const double> labels, const ClassifierConfig& cfg,
                               std::vector<double>* loss_history) {
    if (features.empty() || features.size() != labels.size())
        throw std::invalid_argument("features and labels must be non-empty and equal length");
    const std::size_t dim = features[0].size();
    for (const auto& x : features)
        if (x.size() != dim) throw std::invalid_argument("feature dimension mismatch");
    bool has_zero = false, has_one = false;
    for (const double y : labels) {
        if (y == 0.0)
            has_zero = true;
        else if (y == 1.0)
            has_one = true;
        else
            throw std::invalid_argument("labels must be 0 or 1");
    }
    if (!has_zero || !has_one)
        throw std::invalid_argument("training labels must include both classes");
    if (cfg.batch_size < 1 || cfg.lr <= 0.0 || cfg.l2 < 0.0)
        throw std::invalid_argument("bad classifier configuration");

    LogisticModel m{std::vector<double>(dim, 0.0), 0.0};
    Rng rng = make_rng(mix_seed(cfg.seed, 0xc1a5ull, 0));

    double prev = logistic_loss(m.weights, m.bias, features, labels, cfg.l2);
    if (loss_history) {
        loss_history->clear();
        loss_history->push_back(prev);
    }

    std::vector<std::size_t> order(features.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> batch_grad(dim);
    double multiplier = 1.0;

    const auto run_epoch = [&](double lr) {
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
            std::fill(batch_grad.begin(), batch_grad.end(), 0.0);
            double grad_bias = 0.0;
            for (std::size_t i = start; i < stop; ++i) {
                const auto& x = features[order[i]];
                const double e = stable_sigmoid(dot(m.weights, x) + m.bias) - labels[order[i]];
                for (std::size_t k = 0; k < dim; ++k) batch_grad[k] += e * x[k];
                grad_bias += e;
            }
            const double scale = 1.0 / static_cast<double>(stop - start);
            for (std::size_t k = 0; k < dim; ++k)
                m.weights[k] -= lr * (batch_grad[k] * scale + cfg.l2 * m.weights[k]);
            m.bias -= lr * grad_bias * scale;
        }
    };

    for (std::uint32_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        for (std::size_t i = order.size() - 1; i > 0; --i)
            std::swap(order[i], order[uniform_below(rng, i + 1)]);
        const auto saved_weights = m.weights;
        const double saved_bias = m.bias;
        double epoch_loss;
        // Retry with a halved rate whenever the epoch raised the loss; give
        // up (no-op epoch) once the multiplier underflows.
        while (true) {
            run_epoch(cfg.lr * multiplier / std::sqrt(static_cast<double>(epoch)));
            epoch_loss = logistic_loss(m.weights, m.bias, features, labels, cfg.l2);
            if (epoch_loss <= prev + 1e-6) break;
            m.weights = saved_weights;
            m.bias = saved_bias;
            multiplier *= 0.5;
            if (multiplier < 1e-12) {
                epoch_loss = prev;
                break;
            }
        }
        prev = epoch_loss;
        if (loss_history) loss_history->push_back(epoch_loss);
    }
    return m;
}

double predict(const LogisticModel& m, std::span<const double> x) {
    return stable_sigmoid(dot(m.weights, x) + m.bias);
}

double auc_exact(std::span<const double> positive_scores,
                 std::span<const double> negative_scores) {
    if (positive_scores.empty() || negative_scores.empty())
        throw std::invalid_argument("AUC needs non-empty score lists");
    struct Item {
        double score;
        bool positive;
    };
    std::vector<Item> all;
    all.reserve(positive_scores.size() + negative_scores.size());
    for (const double s : positive_scores) {
        if (std::isnan(s)) throw std::invalid_argument("AUC scores must not be NaN");
        all.push_back({s, true});
    }
    for (const double s : negative_scores) {
        if (std::isnan(s)) throw std::invalid_argument("AUC scores must not be NaN");
        all.push_back({s, false});
    }
    std::sort(all.begin(), all.end(),
              [](const Item& a, const Item& b) { return a.score < b.score; });

    // Mann-Whitney rank sum with ties averaged.
    double positive_rank_sum = 0.0;
    for (std::size_t i = 0; i < all.size();) {
        std::size_t j = i;
        while (j < all.size() && all[j].score == all[i].score) ++j;
        const double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
        for (std::size_t k = i; k < j; ++k)
            if (all[k].positive) positive_rank_sum += avg_rank;
        i = j;
    }
    const auto p = static_cast<double>(positive_scores.size());
    const auto n = static_cast<double>(negative_scores.size());
    return (positive_rank_sum - 0.5 * p * (p + 1.0)) / (p * n);
}

double auc_sampled(std::span<const double> positive_scores,
                   std::span<const double> negative_scores, std::size_t draws,
                   std::uint64_t seed) {
    if (positive_scores.empty() || negative_scores.empty())
        throw std::invalid_argument("AUC needs non-empty score lists");
    if (draws == 0) throw std::invalid_argument("sampled AUC needs at least one draw");
    Rng rng = make_rng(mix_seed(seed, 0xa0c5ull, 0));
    double higher = 0.0, equal = 0.0;
    for (std::size_t i = 0; i < draws; ++i) {
        const double p = positive_scores[uniform_below(rng, positive_scores.size())];
        const double n = negative_scores[uniform_below(rng, negative_scores.size())];
        if (p > n)
            higher += 1.0;
        else if (p == n)
            equal += 1.0;
    }
    return (higher + 0.5 * equal) / static_cast<double>(draws);
}

}  // namespace deeplink
