#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "deeplink/embedding.hpp"
#include "deeplink/graph.hpp"

namespace deeplink {

struct NodeDocument {
    NodeId node;
    std::vector<std::vector<std::string>> paragraphs;  // one per post, in stream order
};

// Lowercases ASCII letters and splits on Unicode whitespace and punctuation.
std::vector<std::string> tokenize(std::string_view text);

// JSON-lines content: {"node": "<token>", "text": "<post>"} per line, multiple
// lines per node allowed. One document per node, in order of first appearance.
std::vector<NodeDocument> assemble_documents(std::istream& in, const Graph& g);
std::vector<NodeDocument> assemble_documents(const std::filesystem::path& path, const Graph& g);

class Vocabulary {
public:
    static Vocabulary build(std::span<const NodeDocument> documents, std::uint32_t min_count = 2);

    std::size_t size() const { return tokens_.size(); }
    std::optional<std::uint32_t> index_of(std::string_view token) const;
    const std::string& token_at(std::uint32_t index) const { return tokens_.at(index); }
    std::uint64_t count_at(std::uint32_t index) const { return counts_.at(index); }
    std::uint32_t min_count() const { return min_count_; }

private:
    struct Hash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const noexcept {
            return std::hash<std::string_view>{}(s);
        }
    };
    std::vector<std::string> tokens_;
    std::vector<std::uint64_t> counts_;
    std::unordered_map<std::string, std::uint32_t, Hash, std::equal_to<>> index_;
    std::uint32_t min_count_ = 2;
};

// Softmax probability of `target` given the concatenated context: logits are
// bias[i] + output.row(i) . [context words..., paragraph vector]. Context
// slots may be empty spans, standing for the frozen-zero padding vector.
double context_score(const std::vector<std::span<const double>>& context_words,
                     std::span<const double> paragraph, const EmbeddingMatrix& output,
                     std::span<const double> bias, const Vocabulary& vocab,
                     std::string_view target);

// Loss -log context_score plus its gradient with respect to every parameter
// block. grad_words[i] is left zero-sized for empty (padding) slots.
double context_loss_grad(const std::vector<std::span<const double>>& context_words,
                         std::span<const double> paragraph, const EmbeddingMatrix& output,
                         std::span<const double> bias, std::uint32_t target,
                         std::vector<std::vector<double>>& grad_words,
                         std::vector<double>& grad_paragraph, EmbeddingMatrix& grad_output,
                         std::vector<double>& grad_bias);

// Distributed-memory paragraph vectors: each center word is predicted from
// the 2*window surrounding word vectors (null-padded at paragraph edges)
// concatenated with the node's paragraph vector, trained with negative
// sampling. Returns one row per node id in [0, node_count); nodes without a
// document keep the zero vector.
EmbeddingMatrix train_content(std::span<const NodeDocument> documents, std::size_t node_count,
                              const TrainConfig& cfg);

}  // namespace deeplink
