#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "deeplink/community.hpp"
#include "deeplink/graph.hpp"
#include "deeplink/random.hpp"

namespace deeplink {

struct WalkParams {
    double alpha = 0.2;             // probability of a weighted neighbor step
    std::uint32_t max_length = 80;  // nodes per walk, including the start
    std::uint32_t walks_per_node = 10;
    std::uint64_t seed = 0;
};

using Walk = std::vector<NodeId>;

struct WalkCorpus {
    std::vector<Walk> walks;

    std::size_t size() const { return walks.size(); }
    bool empty() const { return walks.empty(); }
};

// One transition: with probability alpha follow an out-edge (chosen
// proportionally to edge weight), otherwise jump to a uniformly random
// member of the current node's community other than the node itself.
// An empty branch falls back to the other; nullopt means both were empty
// and the walk truncates.
std::optional<NodeId> step(const Graph& g, const CommunityAssignment& a, NodeId current,
                           double alpha, Rng& rng);

// Walk of up to p.max_length nodes starting at start. Throws
// std::out_of_range for an unknown start node.
Walk generate_walk(const Graph& g, const CommunityAssignment& a, NodeId start,
                   const WalkParams& p, Rng& rng);

// walks_per_node walks from every node, ordered by start node then walk
// index. Each walk gets its own RNG stream derived from (seed, start,
// walk index), so the corpus is identical no matter how many threads run.
WalkCorpus generate_corpus(const Graph& g, const CommunityAssignment& a, const WalkParams& p,
                           unsigned threads = 1);

// One walk per line, space-separated node tokens.
void write_corpus(std::ostream& out, const Graph& g, const WalkCorpus& corpus);
void write_corpus(const std::filesystem::path& path, const Graph& g, const WalkCorpus& corpus);
WalkCorpus read_corpus(std::istream& in, const Graph& g);
WalkCorpus read_corpus(const std::filesystem::path& path, const Graph& g);

}  // namespace deeplink
