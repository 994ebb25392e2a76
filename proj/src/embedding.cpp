#include "deeplink/embedding.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace deeplink {

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("vector dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void write_embeddings(std::ostream& out, std::span<const std::string> tokens,
                      const EmbeddingMatrix& m) {
    if (tokens.size() != m.rows())
        throw std::invalid_argument("token count does not match embedding rows");
    out << m.rows() << ' ' << m.dimension() << '\n';
    char buf[64];
    for (std::size_t i = 0; i < m.rows(); ++i) {
        out << tokens[i];
        for (double v : m.row(i)) {
            std::snprintf(buf, sizeof buf, " %.17g", v);
            out << buf;
        }
        out << '\n';
    }
}

void write_embeddings(const std::filesystem::path& path, std::span<const std::string> tokens,
                      const EmbeddingMatrix& m) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_embeddings(out, tokens, m);
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::pair<std::vector<std::string>, EmbeddingMatrix> read_embeddings(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("embedding file: missing header");
    std::istringstream header(line);
    std::size_t rows = 0, dim = 0;
    if (!(header >> rows >> dim)) throw std::runtime_error("embedding file: malformed header");

    std::vector<std::string> tokens;
    tokens.reserve(rows);
    EmbeddingMatrix m(rows, dim);
    std::size_t lineno = 1;
    for (std::size_t i = 0; i < rows; ++i) {
        if (!std::getline(in, line)) throw std::runtime_error("embedding file: truncated");
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream fields(line);
        std::string token;
        if (!(fields >> token))
            throw std::runtime_error("embedding file line " + std::to_string(lineno) +
                                     ": missing token");
        auto dst = m.row(i);
        for (std::size_t k = 0; k < dim; ++k) {
            std::string value;
            if (!(fields >> value))
                throw std::runtime_error("embedding file line " + std::to_string(lineno) +
                                         ": expected " + std::to_string(dim) + " values");
            char* end = nullptr;
            dst[k] = std::strtod(value.c_str(), &end);
            if (end == value.c_str() || *end != '\0')
                throw std::runtime_error("embedding file line " + std::to_string(lineno) +
                                         ": bad number '" + value + "'");
        }
        std::string extra;
        if (fields >> extra)
            throw std::runtime_error("embedding file line " + std::to_string(lineno) +
                                     ": trailing fields");
        tokens.push_back(std::move(token));
    }
    return {std::move(tokens), std::move(m)};
}

std::pair<std::vector<std::string>, EmbeddingMatrix> read_embeddings(
    const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return read_embeddings(in);
}

}  // namespace deeplink
