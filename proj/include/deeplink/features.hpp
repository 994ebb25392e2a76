#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "deeplink/embedding.hpp"
#include "deeplink/graph.hpp"

namespace deeplink {

enum class AblationMode { Both, StructuralOnly, ContentOnly };

// Structural vector followed by the content vector. Nodes beyond the content
// matrix contribute zeros for the content block.
inline std::vector<double> concat_features(const EmbeddingMatrix& structural,
                                           const EmbeddingMatrix& content, NodeId node) {
    if (node >= structural.rows())
        throw std::out_of_range("node missing from structural embedding");
    const auto s = structural.row(node);
    std::vector<double> out(s.begin(), s.end());
    if (node < content.rows()) {
        const auto c = content.row(node);
        out.insert(out.end(), c.begin(), c.end());
    } else {
        out.resize(structural.dimension() + content.dimension(), 0.0);
    }
    return out;
}

inline std::vector<double> node_features(const EmbeddingMatrix& structural,
                                         const EmbeddingMatrix& content, NodeId node,
                                         AblationMode mode) {
    switch (mode) {
        case AblationMode::StructuralOnly: {
            if (node >= structural.rows())
                throw std::out_of_range("node missing from structural embedding");
            const auto s = structural.row(node);
            return {s.begin(), s.end()};
        }
        case AblationMode::ContentOnly: {
            if (node < content.rows()) {
                const auto c = content.row(node);
                return {c.begin(), c.end()};
            }
            return std::vector<double>(content.dimension(), 0.0);
        }
        default:
            return concat_features(structural, content, node);
    }
}

inline std::vector<double> hadamard_edge(std::span<const double> f_u,
                                         std::span<const double> f_v) {
    if (f_u.size() != f_v.size()) throw std::invalid_argument("edge feature dimension mismatch");
    std::vector<double> out(f_u.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = f_u[i] * f_v[i];
    return out;
}

}  // namespace deeplink
