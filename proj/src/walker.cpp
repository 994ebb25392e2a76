#include "deeplink/walker.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>

namespace deeplink {

namespace {

std::optional<NodeId> weighted_neighbor(const Graph& g, NodeId u, Rng& rng) {
    const auto nbrs = g.out_neighbors(u);
    if (nbrs.empty()) return std::nullopt;
    double total = 0.0;
    for (const auto& e : nbrs) total += e.weight;
    const double x = uniform01(rng) * total;
    double acc = 0.0;
    for (const auto& e : nbrs) {
        acc += e.weight;
        if (x < acc) return e.target;
    }
    return nbrs.back().target;  // guard against rounding in the partial sums
}

std::optional<NodeId> community_member(const CommunityAssignment& a, NodeId u, Rng& rng) {
    const auto members = a.members(a.community_of(u));
    if (members.size() <= 1) return std::nullopt;
    // Draw from all slots but the last; if the draw lands on u, substitute
    // the last member. Uniform over members \ {u}.
    const NodeId pick = members[uniform_below(rng, members.size() - 1)];
    return pick == u ? members.back() : pick;
}

void check_params(const WalkParams& p) {
    if (!(p.alpha >= 0.0 && p.alpha <= 1.0))
        throw std::invalid_argument("walk alpha must lie in [0, 1]");
    if (p.max_length < 1) throw std::invalid_argument("walk length must be at least 1");
    if (p.walks_per_node < 1) throw std::invalid_argument("walks per node must be at least 1");
}

}  // namespace

std::optional<NodeId> step(const Graph& g, const CommunityAssignment& a, NodeId current,
                           double alpha, Rng& rng) {
    if (uniform01(rng) <= alpha) {
        if (auto v = weighted_neighbor(g, current, rng)) return v;
        return community_member(a, current, rng);
    }
    if (auto v = community_member(a, current, rng)) return v;
    return weighted_neighbor(g, current, rng);
}

Walk generate_walk(const Graph& g, const CommunityAssignment& a, NodeId start,
                   const WalkParams& p, Rng& rng) {
    if (start >= g.node_count()) throw std::out_of_range("walk start node out of range");
    check_params(p);
    Walk walk;
    walk.reserve(p.max_length);
    walk.push_back(start);
    NodeId current = start;
    while (walk.size() < p.max_length) {
        const auto next = step(g, a, current, p.alpha, rng);
        if (!next) break;
        current = *next;
        walk.push_back(current);
    }
    return walk;
}

WalkCorpus generate_corpus(const Graph& g, const CommunityAssignment& a, const WalkParams& p,
                           unsigned threads) {
    check_params(p);
    if (a.node_count() != g.node_count())
        throw std::invalid_argument("community assignment does not cover the graph");

    const std::size_t n = g.node_count();
    WalkCorpus corpus;
    corpus.walks.resize(n * p.walks_per_node);

    const auto run_range = [&](NodeId begin, NodeId end) {
        for (NodeId u = begin; u < end; ++u) {
            for (std::uint32_t k = 0; k < p.walks_per_node; ++k) {
                Rng rng = make_rng(mix_seed(p.seed, u, k));
                corpus.walks[static_cast<std::size_t>(u) * p.walks_per_node + k] =
                    generate_walk(g, a, u, p, rng);
            }
        }
    };

    if (threads <= 1 || n < 2) {
        run_range(0, static_cast<NodeId>(n));
        return corpus;
    }

    const unsigned workers = std::min<unsigned>(threads, static_cast<unsigned>(n));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const auto begin = static_cast<NodeId>(std::min(n, w * chunk));
        const auto end = static_cast<NodeId>(std::min(n, (w + 1) * chunk));
        if (begin < end) pool.emplace_back(run_range, begin, end);
    }
    for (auto& t : pool) t.join();
    return corpus;
}

void write_corpus(std::ostream& out, const Graph& g, const WalkCorpus& corpus) {
    for (const auto& walk : corpus.walks) {
        for (std::size_t i = 0; i < walk.size(); ++i) {
            if (i) out << ' ';
            out << g.token_of(walk[i]);
        }
        out << '\n';
    }
}

void write_corpus(const std::filesystem::path& path, const Graph& g, const WalkCorpus& corpus) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_corpus(out, g, corpus);
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

WalkCorpus read_corpus(std::istream& in, const Graph& g) {
    WalkCorpus corpus;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream fields(line);
        Walk walk;
        std::string token;
        while (fields >> token) {
            if (!g.has_token(token))
                throw std::runtime_error("walk corpus line " + std::to_string(lineno) +
                                         ": unknown node '" + token + "'");
            walk.push_back(g.id_of(token));
        }
        corpus.walks.push_back(std::move(walk));
    }
    return corpus;
}

WalkCorpus read_corpus(const std::filesystem::path& path, const Graph& g) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return read_corpus(in, g);
}

}  // namespace deeplink
