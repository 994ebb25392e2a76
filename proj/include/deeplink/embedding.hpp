#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace deeplink {

// Row-major dense matrix of per-token vectors.
class EmbeddingMatrix {
public:
    EmbeddingMatrix() = default;
    EmbeddingMatrix(std::size_t rows, std::size_t dimension, double fill = 0.0)
        : rows_(rows), dim_(dimension), values_(rows * dimension, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t dimension() const { return dim_; }

    std::span<double> row(std::size_t i) { return {values_.data() + i * dim_, dim_}; }
    std::span<const double> row(std::size_t i) const { return {values_.data() + i * dim_, dim_}; }

    bool operator==(const EmbeddingMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t dim_ = 0;
    std::vector<double> values_;
};

struct TrainConfig {
    std::uint32_t dimension = 100;
    std::uint32_t window = 10;
    std::uint32_t epochs = 5;
    std::uint32_t negatives = 5;
    double lr_initial = 0.025;
    double lr_final = 0.0001;
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

double dot(std::span<const double> a, std::span<const double> b);

// word2vec text format: header `rows dimension`, then `token v1 ... vd`.
void write_embeddings(std::ostream& out, std::span<const std::string> tokens,
                      const EmbeddingMatrix& m);
void write_embeddings(const std::filesystem::path& path, std::span<const std::string> tokens,
                      const EmbeddingMatrix& m);
std::pair<std::vector<std::string>, EmbeddingMatrix> read_embeddings(std::istream& in);
std::pair<std::vector<std::string>, EmbeddingMatrix> read_embeddings(
    const std::filesystem::path& path);

}  // namespace deeplink
