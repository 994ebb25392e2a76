#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace deeplink {

/// Dense internal node index. External string tokens are mapped to a
/// contiguous [0, |V|) range at load time.
using NodeId = std::uint32_t;

struct OutEdge {
    NodeId target;
    double weight;
};

/// Counters collected while building a graph from an edge stream.
struct LoadReport {
    std::size_t nodes = 0;
    std::size_t edges = 0;  // stored arcs after merging
    std::size_t dropped_self_loops = 0;
    std::size_t merged_duplicates = 0;

    std::string summary() const;
};

namespace detail {
struct StringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
        return std::hash<std::string_view>{}(s);
    }
};
}  // namespace detail

/// Weighted graph over string-token nodes, stored as CSR out-adjacency.
///
/// Directed graphs store each arc once. Undirected graphs store both
/// directions of every edge, so out_neighbors() is the full neighborhood
/// either way. Immutable after construction; safe to share across threads.
class Graph {
public:
    Graph() = default;

    bool directed() const { return directed_; }
    std::size_t node_count() const { return tokens_.size(); }
    /// Number of stored arcs == sum of out-adjacency list lengths.
    std::size_t edge_count() const { return edges_.size(); }
    /// Sum of all stored arc weights.
    double total_weight() const { return total_weight_; }

    bool has_token(std::string_view token) const {
        return index_.find(token) != index_.end();
    }
    /// Internal index for a token. Throws if the token is unknown.
    NodeId id_of(std::string_view token) const;
    const std::string& token_of(NodeId u) const;

    /// Out-edges of u in ascending target-index order.
    std::span<const OutEdge> out_neighbors(NodeId u) const;
    /// Stored weight of arc (u,v), or nullopt if absent.
    std::optional<double> edge_weight(NodeId u, NodeId v) const;
    /// Sum of out-edge weights of u.
    double out_strength(NodeId u) const;

private:
    friend class GraphBuilder;

    bool directed_ = true;
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, NodeId, detail::StringHash, std::equal_to<>> index_;
    std::vector<std::size_t> offsets_;  // size node_count()+1
    std::vector<OutEdge> edges_;
    double total_weight_ = 0.0;

    void check_node(NodeId u) const;
};

/// Accumulates edges, then produces a Graph: self-loops dropped,
/// duplicate edges merged by weight summation, adjacency sorted.
/// In undirected mode (u,v) and (v,u) are the same edge and both arcs
/// are emitted.
class GraphBuilder {
public:
    explicit GraphBuilder(bool directed = true) : directed_(directed) {}

    NodeId add_node(std::string_view token);
    /// Records one edge. Throws on non-positive weight.
    void add_edge(std::string_view src, std::string_view dst, double weight = 1.0);

    Graph build(LoadReport* report = nullptr);

private:
    bool directed_;
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, NodeId, detail::StringHash, std::equal_to<>> index_;
    std::unordered_map<std::uint64_t, double> weights_;  // packed (u,v) key
    std::size_t dropped_self_loops_ = 0;
    std::size_t merged_duplicates_ = 0;
};

/// Parses `src<TAB>dst[<TAB>weight]` lines. `#`-prefixed and blank lines
/// are skipped. Edges without a weight column get default_weight.
/// Throws with the 1-based line number on malformed input.
Graph parse_edge_list(std::istream& in, bool directed = true,
                      double default_weight = 1.0, LoadReport* report = nullptr);
Graph load_edge_list(const std::string& path, bool directed = true,
                     double default_weight = 1.0, LoadReport* report = nullptr);

/// Writes the stored arcs back out as `src<TAB>dst<TAB>weight` lines.
/// For undirected graphs each edge is written once (lower index first).
void write_edge_list(const Graph& g, std::ostream& out);

/// Symmetric view: weight(u,v) = weight(v,u) = sum of both directed
/// weights. Node indices are preserved. Undirected input is returned
/// unchanged.
Graph undirected_view(const Graph& g);

}  // namespace deeplink
