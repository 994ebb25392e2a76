#include "deeplink/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <tuple>

namespace deeplink {

ScoreKind parse_score_kind(std::string_view name) {
    if (name == "cn") return ScoreKind::CommonNeighbors;
    if (name == "jaccard") return ScoreKind::Jaccard;
    if (name == "aa") return ScoreKind::AdamicAdar;
    if (name == "pa") return ScoreKind::PreferentialAttachment;
    if (name == "sorensen") return ScoreKind::Sorensen;
    throw std::invalid_argument("unknown score kind '" + std::string(name) +
                                "' (expected cn, jaccard, aa, pa, or sorensen)");
}

std::string_view score_kind_name(ScoreKind kind) {
    switch (kind) {
        case ScoreKind::CommonNeighbors: return "cn";
        case ScoreKind::Jaccard: return "jaccard";
        case ScoreKind::AdamicAdar: return "aa";
        case ScoreKind::PreferentialAttachment: return "pa";
        case ScoreKind::Sorensen: return "sorensen";
    }
    throw std::invalid_argument("unknown score kind");
}

double local_score(const Graph& g, NodeId u, NodeId v, ScoreKind kind) {
    if (g.directed())
        throw std::invalid_argument("neighborhood scores are defined on the undirected view");
    if (u >= g.node_count() || v >= g.node_count())
        throw std::out_of_range("node id out of range");
    if (u == v) throw std::invalid_argument("neighborhood scores need two distinct nodes");

    const auto nu = g.out_neighbors(u);
    const auto nv = g.out_neighbors(v);
    const double deg_u = static_cast<double>(nu.size());
    const double deg_v = static_cast<double>(nv.size());

    if (kind == ScoreKind::PreferentialAttachment) return deg_u * deg_v;

    // Adjacency lists are sorted by target; merge for the intersection.
    double common = 0.0, adamic = 0.0;
    for (std::size_t i = 0, j = 0; i < nu.size() && j < nv.size();) {
        if (nu[i].target < nv[j].target) {
            ++i;
        } else if (nu[i].target > nv[j].target) {
            ++j;
        } else {
            common += 1.0;
            const auto z_deg = g.out_neighbors(nu[i].target).size();
            if (z_deg >= 2) adamic += 1.0 / std::log(static_cast<double>(z_deg));
            ++i;
            ++j;
        }
    }

    switch (kind) {
        case ScoreKind::CommonNeighbors:
            return common;
        case ScoreKind::Jaccard: {
            const double uni = deg_u + deg_v - common;
            return uni > 0.0 ? common / uni : 0.0;
        }
        case ScoreKind::AdamicAdar:
            return adamic;
        case ScoreKind::Sorensen: {
            const double denom = deg_u + deg_v;
            return denom > 0.0 ? 2.0 * common / denom : 0.0;
        }
        default:
            throw std::invalid_argument("unknown score kind");
    }
}

std::vector<ScoredPair> rank_pairs(std::vector<ScoredPair> pairs) {
    for (const auto& p : pairs)
        if (std::isnan(p.score)) throw std::invalid_argument("cannot rank a NaN score");
    std::sort(pairs.begin(), pairs.end(), [](const ScoredPair& a, const ScoredPair& b) {
        if (a.score != b.score) return a.score > b.score;
        return std::tie(a.u, a.v) < std::tie(b.u, b.v);
    });
    return pairs;
}

}  // namespace deeplink
