#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "deeplink/graph.hpp"

namespace deeplink {

using NodePair = std::pair<NodeId, NodeId>;

struct DatasetSplit {
    std::vector<NodePair> positive_train;
    std::vector<NodePair> negative_train;
    std::vector<NodePair> positive_test;
    std::vector<NodePair> negative_test;
    std::size_t dropped_unseen = 0;  // second-snapshot edges with endpoints missing from the first
};

// positive_test = edges of g_t2 absent from g_t1 (both endpoints known to
// g_t1, pairs in g_t1's id space); positive_train = edges of g_t1. Negatives
// are uniform pairs over g_t1's nodes that are edges in neither snapshot,
// matched in size to the positive sets.
DatasetSplit temporal_split(const Graph& g_t1, const Graph& g_t2, std::uint64_t seed);

// Moves ceil(test_fraction * |E|) uniformly chosen edges to positive_test and
// keeps the rest as positive_train; negatives are uniform non-edges of g.
DatasetSplit random_removal_split(const Graph& g, double test_fraction, std::uint64_t seed);

// Training graph containing exactly the positive_train edges (node set and
// ids preserved from g).
Graph training_graph(const Graph& g, const DatasetSplit& split);

// Four `# section-name` sections (positive-train, negative-train,
// positive-test, negative-test) of u<TAB>v token lines.
void write_split(std::ostream& out, const Graph& g, const DatasetSplit& split);
void write_split(const std::filesystem::path& path, const Graph& g, const DatasetSplit& split);
DatasetSplit read_split(std::istream& in, const Graph& g);
DatasetSplit read_split(const std::filesystem::path& path, const Graph& g);

struct LogisticModel {
    std::vector<double> weights;
    double bias = 0.0;
};

struct ClassifierConfig {
    double lr = 0.1;  // per-epoch rate is lr / sqrt(epoch)
    std::uint32_t epochs = 300;
    double l2 = 1e-4;
    std::uint32_t batch_size = 32;
    std::uint64_t seed = 0;
};

// Mean cross-entropy plus (l2/2)*|w|^2.
double logistic_loss(std::span<const double> weights, double bias,
                     const std::vector<std::vector<double>>& features,
                     std::span<const double> labels, double l2);
double logistic_loss_grad(std::span<const double> weights, double bias,
                          const std::vector<std::vector<double>>& features,
                          std::span<const double> labels, double l2,
                          std::span<double> grad_weights, double& grad_bias);

// Mini-batch SGD; an epoch that would raise the full-data loss is retried
// with a halved rate (and dropped if the rate underflows), so the recorded
// loss sequence never increases by more than 1e-6. loss_history, when given,
// receives the initial loss followed by one entry per epoch.
LogisticModel train_classifier(const std::vector<std::vector<double>>& features,
                               std::span<const double> labels, const ClassifierConfig& cfg = {},
                               std::vector<double>* loss_history = nullptr);

double predict(const LogisticModel& m, std::span<const double> x);

// Probability that a positive outscores a negative, ties counted half.
double auc_exact(std::span<const double> positive_scores, std::span<const double> negative_scores);
double auc_sampled(std::span<const double> positive_scores,
                   std::span<const double> negative_scores, std::size_t draws, std::uint64_t seed);

}  // namespace deeplink
