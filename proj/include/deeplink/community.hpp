#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "deeplink/graph.hpp"

namespace deeplink {

/// Partition of the node set: every node carries exactly one community id,
/// ids dense in [0, community_count()).
class CommunityAssignment {
public:
    CommunityAssignment() = default;
    /// Builds from per-node labels (indexed by NodeId). Labels are
    /// renumbered densely by first occurrence in node-index order.
    explicit CommunityAssignment(std::span<const std::uint32_t> labels);

    std::size_t node_count() const { return community_of_.size(); }
    std::size_t community_count() const { return members_.size(); }
    std::uint32_t community_of(NodeId u) const;
    /// Members of community c, ascending node index.
    std::span<const NodeId> members(std::uint32_t c) const;

private:
    std::vector<std::uint32_t> community_of_;
    std::vector<std::vector<NodeId>> members_;
};

/// Louvain modularity maximization (greedy node moves + community
/// aggregation until no further improvement). Directed input is
/// symmetrized first. Node visitation order is shuffled by seed.
/// Throws on an empty graph.
CommunityAssignment louvain(const Graph& g, std::uint64_t seed = 0);

/// Weighted modularity Q of the partition, computed on the undirected
/// view. Q == 0 for edgeless graphs. Throws if the assignment does not
/// cover every node of g.
double modularity(const Graph& g, const CommunityAssignment& a);

/// `node<TAB>community_id` lines, one per node in index order.
void write_assignment(const CommunityAssignment& a, const Graph& g, std::ostream& out);
/// Reads a dump; every node of g must be assigned exactly once.
CommunityAssignment read_assignment(std::istream& in, const Graph& g);

}  // namespace deeplink
