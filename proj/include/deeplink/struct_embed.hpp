#pragma once

#include <span>

#include "deeplink/embedding.hpp"
#include "deeplink/graph.hpp"
#include "deeplink/walker.hpp"

namespace deeplink {

// Stored weight of (u,v) when the edge exists, 1 otherwise (including u == v).
double edge_context_weight(const Graph& g, NodeId u, NodeId v);

// sigma(weight * (f_u . f_v)), computed overflow-free. Throws on dimension
// mismatch.
double pair_probability(std::span<const double> f_u, std::span<const double> f_v, double weight);

// Negative log likelihood of one training pair: -log sigma(s) for a positive
// pair, -log sigma(-s) for a sampled negative, where s = weight * (f_u . f_v)
// clipped to [-6, 6].
double pair_loss(std::span<const double> f_u, std::span<const double> f_v, double weight,
                 bool positive);

// Same loss; also writes its gradient with respect to f_u and f_v.
double pair_loss_grad(std::span<const double> f_u, std::span<const double> f_v, double weight,
                      bool positive, std::span<double> grad_u, std::span<double> grad_v);

// Skip-gram with negative sampling over walk windows; positive pairs are
// scored with the stored edge weight (1 for non-adjacent co-occurrences),
// negatives are drawn from the unigram^0.75 corpus distribution with weight 1.
// Returns the input vectors, one row per graph node.
EmbeddingMatrix train_structural(const WalkCorpus& corpus, const Graph& g, const TrainConfig& cfg);

}  // namespace deeplink
