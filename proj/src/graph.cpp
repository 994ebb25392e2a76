#include "deeplink/graph.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <tuple>

namespace deeplink {

std::string LoadReport::summary() const {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "nodes=%zu edges=%zu dropped_self_loops=%zu merged_duplicates=%zu",
                  nodes, edges, dropped_self_loops, merged_duplicates);
    return buf;
}

void Graph::check_node(NodeId u) const {
    if (u >= tokens_.size())
        throw std::out_of_range("graph: unknown node index " + std::to_string(u));
}

NodeId Graph::id_of(std::string_view token) const {
    auto it = index_.find(token);
    if (it == index_.end())
        throw std::out_of_range("graph: unknown node token '" + std::string(token) + "'");
    return it->second;
}

const std::string& Graph::token_of(NodeId u) const {
    check_node(u);
    return tokens_[u];
}

std::span<const OutEdge> Graph::out_neighbors(NodeId u) const {
    check_node(u);
    return {edges_.data() + offsets_[u], offsets_[u + 1] - offsets_[u]};
}

std::optional<double> Graph::edge_weight(NodeId u, NodeId v) const {
    check_node(u);
    check_node(v);
    auto adj = out_neighbors(u);
    auto it = std::lower_bound(adj.begin(), adj.end(), v,
                               [](const OutEdge& e, NodeId t) { return e.target < t; });
    if (it != adj.end() && it->target == v) return it->weight;
    return std::nullopt;
}

double Graph::out_strength(NodeId u) const {
    double s = 0.0;
    for (const auto& e : out_neighbors(u)) s += e.weight;
    return s;
}

namespace {

inline std::uint64_t pack_pair(NodeId u, NodeId v) {
    return (std::uint64_t(u) << 32) | v;
}

}  // namespace

NodeId GraphBuilder::add_node(std::string_view token) {
    auto it = index_.find(token);
    if (it != index_.end()) return it->second;
    NodeId id = static_cast<NodeId>(tokens_.size());
    tokens_.emplace_back(token);
    index_.emplace(tokens_.back(), id);
    return id;
}

void GraphBuilder::add_edge(std::string_view src, std::string_view dst, double weight) {
    if (!(weight > 0.0))
        throw std::invalid_argument("graph: non-positive edge weight");
    NodeId u = add_node(src);
    NodeId v = add_node(dst);
    if (u == v) {
        ++dropped_self_loops_;
        return;
    }
    if (!directed_ && u > v) std::swap(u, v);  // canonical unordered key
    auto [it, inserted] = weights_.try_emplace(pack_pair(u, v), weight);
    if (!inserted) {
        it->second += weight;
        ++merged_duplicates_;
    }
}

Graph GraphBuilder::build(LoadReport* report) {
    Graph g;
    g.directed_ = directed_;
    g.tokens_ = std::move(tokens_);
    g.index_ = std::move(index_);

    std::vector<std::tuple<NodeId, NodeId, double>> arcs;
    arcs.reserve(directed_ ? weights_.size() : 2 * weights_.size());
    for (const auto& [key, w] : weights_) {
        NodeId u = static_cast<NodeId>(key >> 32);
        NodeId v = static_cast<NodeId>(key & 0xffffffffu);
        arcs.emplace_back(u, v, w);
        if (!directed_) arcs.emplace_back(v, u, w);
    }
    std::sort(arcs.begin(), arcs.end());

    const std::size_t n = g.tokens_.size();
    g.offsets_.assign(n + 1, 0);
    for (const auto& [u, v, w] : arcs) ++g.offsets_[u + 1];
    for (std::size_t i = 1; i <= n; ++i) g.offsets_[i] += g.offsets_[i - 1];
    g.edges_.reserve(arcs.size());
    for (const auto& [u, v, w] : arcs) {
        g.edges_.push_back({v, w});
        g.total_weight_ += w;
    }

    if (report) {
        report->nodes = n;
        report->edges = g.edges_.size();
        report->dropped_self_loops = dropped_self_loops_;
        report->merged_duplicates = merged_duplicates_;
    }
    return g;
}

Graph parse_edge_list(std::istream& in, bool directed, double default_weight,
                      LoadReport* report) {
    GraphBuilder builder(directed);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;

        std::string_view rest(line);
        std::string_view fields[3];
        int nfields = 0;
        while (true) {
            auto tab = rest.find('\t');
            if (nfields < 3) fields[nfields] = rest.substr(0, tab);
            ++nfields;
            if (tab == std::string_view::npos) break;
            rest.remove_prefix(tab + 1);
        }
        auto malformed = [&](const char* why) {
            throw std::runtime_error("edge list line " + std::to_string(line_no) +
                                     ": " + why);
        };
        if (nfields < 2 || nfields > 3 || fields[0].empty() || fields[1].empty())
            malformed("expected src<TAB>dst[<TAB>weight]");

        double w = default_weight;
        if (nfields == 3) {
            if (fields[2].empty()) malformed("empty weight field");
            std::string wstr(fields[2]);
            char* end = nullptr;
            w = std::strtod(wstr.c_str(), &end);
            if (end != wstr.c_str() + wstr.size()) malformed("unparseable weight");
            if (!(w > 0.0)) malformed("non-positive weight");
        }
        builder.add_edge(fields[0], fields[1], w);
    }
    return builder.build(report);
}

Graph load_edge_list(const std::string& path, bool directed, double default_weight,
                     LoadReport* report) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open edge list file: " + path);
    return parse_edge_list(in, directed, default_weight, report);
}

void write_edge_list(const Graph& g, std::ostream& out) {
    char buf[64];
    for (NodeId u = 0; u < g.node_count(); ++u) {
        for (const auto& e : g.out_neighbors(u)) {
            if (!g.directed() && e.target < u) continue;  // one line per edge
            std::snprintf(buf, sizeof(buf), "%.17g", e.weight);
            out << g.token_of(u) << '\t' << g.token_of(e.target) << '\t' << buf << '\n';
        }
    }
}

Graph undirected_view(const Graph& g) {
    if (!g.directed()) return g;
    GraphBuilder builder(false);
    for (NodeId u = 0; u < g.node_count(); ++u) builder.add_node(g.token_of(u));
    for (NodeId u = 0; u < g.node_count(); ++u)
        for (const auto& e : g.out_neighbors(u))
            builder.add_edge(g.token_of(u), g.token_of(e.target), e.weight);
    return builder.build();
}

}  // namespace deeplink
