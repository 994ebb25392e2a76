#include <doctest.h>

#include "deeplink/features.hpp"

using namespace deeplink;

namespace {

EmbeddingMatrix matrix_of(std::vector<std::vector<double>> rows) {
    EmbeddingMatrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
    return m;
}

}  // namespace

TEST_CASE("concat_features appends content after structural") {
    const EmbeddingMatrix s = matrix_of({{1.0, 2.0}});
    const EmbeddingMatrix c = matrix_of({{3.0}});
    CHECK(concat_features(s, c, 0) == std::vector<double>{1.0, 2.0, 3.0});
}

TEST_CASE("content-less nodes contribute zeros") {
    const EmbeddingMatrix s = matrix_of({{9.0}, {1.0}});
    const EmbeddingMatrix c(1, 2, 4.0);  // only node 0 has content
    CHECK(concat_features(s, c, 1) == std::vector<double>{1.0, 0.0, 0.0});
    CHECK(concat_features(s, c, 0) == std::vector<double>{9.0, 4.0, 4.0});
}

TEST_CASE("concatenated dimension is the sum of both dimensions") {
    const EmbeddingMatrix s(3, 100, 0.5), c(3, 100, 0.25);
    CHECK(concat_features(s, c, 2).size() == 200);
    CHECK_THROWS_AS(concat_features(s, c, 3), std::out_of_range);
}

TEST_CASE("node_features honors the ablation mode") {
    const EmbeddingMatrix s = matrix_of({{1.0, 2.0}});
    const EmbeddingMatrix c = matrix_of({{5.0}});
    CHECK(node_features(s, c, 0, AblationMode::Both) == std::vector<double>{1.0, 2.0, 5.0});
    CHECK(node_features(s, c, 0, AblationMode::StructuralOnly) == std::vector<double>{1.0, 2.0});
    CHECK(node_features(s, c, 0, AblationMode::ContentOnly) == std::vector<double>{5.0});
    const EmbeddingMatrix no_content(0, 3);
    CHECK(node_features(s, no_content, 0, AblationMode::ContentOnly) ==
          std::vector<double>{0.0, 0.0, 0.0});
}

TEST_CASE("hadamard_edge multiplies componentwise") {
    CHECK(hadamard_edge(std::vector<double>{1.0, 2.0}, std::vector<double>{3.0, 4.0}) ==
          std::vector<double>{3.0, 8.0});
}

TEST_CASE("hadamard_edge algebraic identities") {
    const std::vector<double> f = {0.5, -2.0, 3.0};
    const std::vector<double> zero(3, 0.0);
    const std::vector<double> ones(3, 1.0);
    CHECK(hadamard_edge(f, zero) == zero);
    CHECK(hadamard_edge(f, ones) == f);
    const std::vector<double> g = {2.0, 0.25, -1.0};
    CHECK(hadamard_edge(f, g) == hadamard_edge(g, f));
    CHECK_THROWS_AS(hadamard_edge(f, std::vector<double>{1.0}), std::invalid_argument);
}
