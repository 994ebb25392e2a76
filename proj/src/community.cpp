#include "deeplink/community.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include "deeplink/random.hpp"

namespace deeplink {

CommunityAssignment::CommunityAssignment(std::span<const std::uint32_t> labels) {
    community_of_.resize(labels.size());
    std::unordered_map<std::uint32_t, std::uint32_t> renumber;
    for (std::size_t u = 0; u < labels.size(); ++u) {
        auto [it, inserted] =
            renumber.try_emplace(labels[u], static_cast<std::uint32_t>(renumber.size()));
        community_of_[u] = it->second;
        if (inserted) members_.emplace_back();
        members_[it->second].push_back(static_cast<NodeId>(u));
    }
}

std::uint32_t CommunityAssignment::community_of(NodeId u) const {
    if (u >= community_of_.size())
        throw std::out_of_range("community assignment: unknown node index " + std::to_string(u));
    return community_of_[u];
}

std::span<const NodeId> CommunityAssignment::members(std::uint32_t c) const {
    if (c >= members_.size())
        throw std::out_of_range("community assignment: unknown community id " + std::to_string(c));
    return members_[c];
}

namespace {

// Working graph for the aggregation levels. Symmetric arcs; self-loops
// (accumulated intra-community weight) kept separately and counted once
// in the node strength.
struct LevelGraph {
    std::size_t n = 0;
    std::vector<std::size_t> offsets;
    std::vector<std::pair<std::uint32_t, double>> arcs;
    std::vector<double> self_loop;
    std::vector<double> strength;
    double total = 0.0;  // 2m

    std::span<const std::pair<std::uint32_t, double>> neighbors(std::uint32_t u) const {
        return {arcs.data() + offsets[u], offsets[u + 1] - offsets[u]};
    }
};

LevelGraph level_from_graph(const Graph& g) {
    LevelGraph lg;
    lg.n = g.node_count();
    lg.offsets.assign(lg.n + 1, 0);
    lg.self_loop.assign(lg.n, 0.0);
    lg.strength.assign(lg.n, 0.0);
    for (NodeId u = 0; u < lg.n; ++u) lg.offsets[u + 1] = lg.offsets[u] + g.out_neighbors(u).size();
    lg.arcs.reserve(g.edge_count());
    for (NodeId u = 0; u < lg.n; ++u) {
        double s = 0.0;
        for (const auto& e : g.out_neighbors(u)) {
            lg.arcs.emplace_back(e.target, e.weight);
            s += e.weight;
        }
        lg.strength[u] = s;
        lg.total += s;
    }
    return lg;
}

// One round of greedy node moves. Returns true if any node changed
// community. node_comm is updated in place.
bool move_nodes(const LevelGraph& lg, std::vector<std::uint32_t>& node_comm,
                Rng& rng) {
    std::vector<double> comm_tot(lg.n, 0.0);
    for (std::uint32_t u = 0; u < lg.n; ++u) comm_tot[node_comm[u]] += lg.strength[u];

    std::vector<std::uint32_t> order(lg.n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    const double m2 = lg.total;
    std::vector<std::pair<std::uint32_t, double>> links;  // (community, weight to it)
    bool any_move = false;
    bool moved = true;
    while (moved) {
        moved = false;
        for (std::uint32_t u : order) {
            const std::uint32_t old_comm = node_comm[u];

            links.clear();
            for (const auto& [v, w] : lg.neighbors(u)) {
                if (v == u) continue;
                links.emplace_back(node_comm[v], w);
            }
            std::sort(links.begin(), links.end());
            // collapse duplicates, make sure the old community is a candidate
            std::vector<std::pair<std::uint32_t, double>> cand;
            for (const auto& [c, w] : links) {
                if (!cand.empty() && cand.back().first == c)
                    cand.back().second += w;
                else
                    cand.emplace_back(c, w);
            }
            auto it = std::lower_bound(cand.begin(), cand.end(),
                                       std::make_pair(old_comm, -1.0));
            if (it == cand.end() || it->first != old_comm)
                cand.insert(it, {old_comm, 0.0});

            // remove u from its community, then pick the best insertion
            comm_tot[old_comm] -= lg.strength[u];

            double best_gain = -std::numeric_limits<double>::infinity();
            std::uint32_t best_comm = old_comm;
            for (const auto& [c, w_uc] : cand) {  // ascending id: ties keep lowest
                const double gain = w_uc - lg.strength[u] * comm_tot[c] / m2;
                if (gain > best_gain) {
                    best_gain = gain;
                    best_comm = c;
                }
            }

            comm_tot[best_comm] += lg.strength[u];
            if (best_comm != old_comm) {
                node_comm[u] = best_comm;
                moved = true;
                any_move = true;
            }
        }
    }
    return any_move;
}

// Renumbers communities densely (ascending old id) and builds the
// aggregated graph whose nodes are the communities.
LevelGraph aggregate(const LevelGraph& lg, std::vector<std::uint32_t>& node_comm) {
    std::vector<std::uint32_t> renumber(lg.n, std::numeric_limits<std::uint32_t>::max());
    std::vector<std::uint32_t> used(node_comm);
    std::sort(used.begin(), used.end());
    used.erase(std::unique(used.begin(), used.end()), used.end());
    for (std::uint32_t i = 0; i < used.size(); ++i) renumber[used[i]] = i;
    for (auto& c : node_comm) c = renumber[c];

    const std::size_t nc = used.size();
    LevelGraph out;
    out.n = nc;
    out.self_loop.assign(nc, 0.0);
    out.strength.assign(nc, 0.0);
    out.total = lg.total;

    std::vector<std::unordered_map<std::uint32_t, double>> between(nc);
    for (std::uint32_t u = 0; u < lg.n; ++u) {
        const std::uint32_t cu = node_comm[u];
        out.self_loop[cu] += lg.self_loop[u];
        for (const auto& [v, w] : lg.neighbors(u)) {
            const std::uint32_t cv = node_comm[v];
            if (cu == cv)
                out.self_loop[cu] += w;  // both directions land here: stays 2x internal
            else
                between[cu][cv] += w;
        }
    }
    out.offsets.assign(nc + 1, 0);
    for (std::uint32_t c = 0; c < nc; ++c) out.offsets[c + 1] = out.offsets[c] + between[c].size();
    out.arcs.resize(out.offsets[nc]);
    for (std::uint32_t c = 0; c < nc; ++c) {
        std::size_t pos = out.offsets[c];
        for (const auto& [d, w] : between[c]) out.arcs[pos++] = {d, w};
        std::sort(out.arcs.begin() + out.offsets[c], out.arcs.begin() + out.offsets[c + 1]);
        double s = out.self_loop[c];
        for (std::size_t i = out.offsets[c]; i < out.offsets[c + 1]; ++i) s += out.arcs[i].second;
        out.strength[c] = s;
    }
    return out;
}

}  // namespace

CommunityAssignment louvain(const Graph& g, std::uint64_t seed) {
    if (g.node_count() == 0) throw std::invalid_argument("louvain: empty graph");
    const Graph sym = undirected_view(g);
    const std::size_t n = sym.node_count();

    // final community of each original node, refined level by level
    std::vector<std::uint32_t> node_to_final(n);
    std::iota(node_to_final.begin(), node_to_final.end(), 0);

    if (sym.total_weight() <= 0.0)  // edgeless: singleton partition
        return CommunityAssignment(node_to_final);

    LevelGraph lg = level_from_graph(sym);

    int level = 0;
    while (true) {
        Rng rng = make_rng(mix_seed(seed, 0x10a1ull, level));
        std::vector<std::uint32_t> level_comm(lg.n);
        std::iota(level_comm.begin(), level_comm.end(), 0);
        const bool improved = move_nodes(lg, level_comm, rng);
        if (!improved) break;
        lg = aggregate(lg, level_comm);
        for (auto& c : node_to_final) c = level_comm[c];
        ++level;
    }
    return CommunityAssignment(node_to_final);
}

double modularity(const Graph& g, const CommunityAssignment& a) {
    if (a.node_count() != g.node_count())
        throw std::invalid_argument("modularity: assignment does not cover all nodes");
    const Graph sym = undirected_view(g);
    const double m2 = sym.total_weight();
    if (m2 <= 0.0) return 0.0;

    const std::size_t nc = a.community_count();
    std::vector<double> in(nc, 0.0), tot(nc, 0.0);
    for (NodeId u = 0; u < sym.node_count(); ++u) {
        const std::uint32_t cu = a.community_of(u);
        for (const auto& e : sym.out_neighbors(u)) {
            tot[cu] += e.weight;
            if (a.community_of(e.target) == cu) in[cu] += e.weight;
        }
    }
    double q = 0.0;
    for (std::size_t c = 0; c < nc; ++c) q += in[c] / m2 - (tot[c] / m2) * (tot[c] / m2);
    return q;
}

void write_assignment(const CommunityAssignment& a, const Graph& g, std::ostream& out) {
    for (NodeId u = 0; u < g.node_count(); ++u)
        out << g.token_of(u) << '\t' << a.community_of(u) << '\n';
}

CommunityAssignment read_assignment(std::istream& in, const Graph& g) {
    std::vector<std::uint32_t> labels(g.node_count(), std::numeric_limits<std::uint32_t>::max());
    std::vector<bool> seen(g.node_count(), false);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw std::runtime_error("assignment line " + std::to_string(line_no) +
                                     ": expected node<TAB>community_id");
        const NodeId u = g.id_of(line.substr(0, tab));
        if (seen[u])
            throw std::runtime_error("assignment line " + std::to_string(line_no) +
                                     ": node assigned twice");
        seen[u] = true;
        labels[u] = static_cast<std::uint32_t>(std::stoul(line.substr(tab + 1)));
    }
    for (NodeId u = 0; u < g.node_count(); ++u)
        if (!seen[u])
            throw std::runtime_error("assignment: node '" + g.token_of(u) + "' missing");
    return CommunityAssignment(labels);
}

}  // namespace deeplink
