#pragma once

#include <vector>

#include "deeplink/graph.hpp"

namespace deeplink {

enum class ScoreKind { CommonNeighbors, Jaccard, AdamicAdar, PreferentialAttachment, Sorensen };

// Parses the names used by the CLI: cn, jaccard, aa, pa, sorensen.
ScoreKind parse_score_kind(std::string_view name);
std::string_view score_kind_name(ScoreKind kind);

// Classical unweighted neighborhood score of a node pair. The graph must be
// undirected (take undirected_view first); degenerate denominators score 0.
double local_score(const Graph& g, NodeId u, NodeId v, ScoreKind kind);

struct ScoredPair {
    NodeId u;
    NodeId v;
    double score;
};

// Descending by score, ties by (u,v); NaN scores are rejected.
std::vector<ScoredPair> rank_pairs(std::vector<ScoredPair> pairs);

}  // namespace deeplink
