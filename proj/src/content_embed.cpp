#include "deeplink/content_embed.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <thread>
#include <unordered_set>

#include <json.hpp>

#include "deeplink/random.hpp"

namespace deeplink {

namespace {

constexpr double kScoreClip = 6.0;

double stable_sigmoid(double s) {
    if (s >= 0.0) return 1.0 / (1.0 + std::exp(-s));
    const double e = std::exp(s);
    return e / (1.0 + e);
}

// Decodes one code point starting at i, advancing i; malformed sequences
// yield U+FFFD and advance one byte.
char32_t decode_utf8(std::string_view s, std::size_t& i) {
    const auto b0 = static_cast<unsigned char>(s[i++]);
    if (b0 < 0x80) return b0;
    int extra;
    char32_t cp;
    if ((b0 & 0xE0) == 0xC0) {
        extra = 1;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        extra = 2;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        extra = 3;
        cp = b0 & 0x07;
    } else {
        return 0xFFFD;
    }
    for (int k = 0; k < extra; ++k) {
        if (i >= s.size() || (static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) return 0xFFFD;
        cp = (cp << 6) | (static_cast<unsigned char>(s[i++]) & 0x3F);
    }
    return cp;
}

bool is_separator(char32_t cp) {
    if (cp < 0x80) return !std::isalnum(static_cast<int>(cp));
    switch (cp) {
        case 0x0085:  // next line
        case 0x00A0:  // no-break space
        case 0x00A1:  // inverted exclamation
        case 0x00AB:  // left guillemet
        case 0x00B7:  // middle dot
        case 0x00BB:  // right guillemet
        case 0x00BF:  // inverted question
        case 0x060C:  // arabic comma
        case 0x061B:  // arabic semicolon
        case 0x061F:  // arabic question mark
        case 0x06D4:  // arabic full stop
        case 0x1680:  // ogham space
        case 0x205F:  // medium mathematical space
        case 0x2060:  // word joiner
        case 0x3000:  // ideographic space
        case 0xFEFF:  // zero-width no-break space
        case 0xFFFD:  // replacement (malformed input)
            return true;
        default:
            return (cp >= 0x2000 && cp <= 0x200D)     // spaces, zero-widths
                   || (cp >= 0x2010 && cp <= 0x2027)  // dashes, quotes, bullets
                   || (cp >= 0x2028 && cp <= 0x202F)  // separators, directional marks
                   || (cp >= 0x066A && cp <= 0x066D);  // arabic percent, star
    }
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string current;
    std::size_t i = 0;
    while (i < text.size()) {
        const std::size_t start = i;
        const char32_t cp = decode_utf8(text, i);
        if (is_separator(cp)) {
            if (!current.empty()) out.push_back(std::exchange(current, {}));
        } else if (cp < 0x80) {
            current += static_cast<char>(std::tolower(static_cast<int>(cp)));
        } else {
            current.append(text.substr(start, i - start));
        }
    }
    if (!current.empty()) out.push_back(std::move(current));
    return out;
}

std::vector<NodeDocument> assemble_documents(std::istream& in, const Graph& g) {
    std::vector<NodeDocument> docs;
    std::unordered_map<NodeId, std::size_t> doc_index;
    std::string line;
    std::size_t recno = 0;
    while (std::getline(in, line)) {
        ++recno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        nlohmann::json record = nlohmann::json::parse(line, nullptr, false);
        if (record.is_discarded())
            throw std::runtime_error("content record " + std::to_string(recno) +
                                     ": invalid JSON");
        if (!record.is_object() || !record.contains("node") || !record.contains("text") ||
            !record["node"].is_string() || !record["text"].is_string())
            throw std::runtime_error("content record " + std::to_string(recno) +
                                     ": expected {\"node\": string, \"text\": string}");
        const auto& token = record["node"].get_ref<const std::string&>();
        if (!g.has_token(token))
            throw std::runtime_error("content record " + std::to_string(recno) +
                                     ": unknown node '" + token + "'");
        const NodeId u = g.id_of(token);
        const auto [it, inserted] = doc_index.try_emplace(u, docs.size());
        if (inserted) docs.push_back(NodeDocument{u, {}});
        docs[it->second].paragraphs.push_back(tokenize(record["text"].get_ref<const std::string&>()));
    }
    return docs;
}

std::vector<NodeDocument> assemble_documents(const std::filesystem::path& path, const Graph& g) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return assemble_documents(in, g);
}

Vocabulary Vocabulary::build(std::span<const NodeDocument> documents, std::uint32_t min_count) {
    std::unordered_map<std::string, std::uint64_t, Hash, std::equal_to<>> counts;
    for (const auto& doc : documents)
        for (const auto& para : doc.paragraphs)
            for (const auto& token : para) ++counts[token];

    Vocabulary v;
    v.min_count_ = min_count;
    for (const auto& doc : documents)
        for (const auto& para : doc.paragraphs)
            for (const auto& token : para) {
                if (v.index_.contains(token)) continue;
                const auto c = counts.at(token);
                if (c < min_count) continue;
                v.index_.emplace(token, static_cast<std::uint32_t>(v.tokens_.size()));
                v.tokens_.push_back(token);
                v.counts_.push_back(c);
            }
    return v;
}

std::optional<std::uint32_t> Vocabulary::index_of(std::string_view token) const {
    const auto it = index_.find(token);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

namespace {

// Concatenates context slots and the paragraph vector; empty slots stand for
// the frozen-zero padding vector, one slot width each.
std::vector<double> concat_input(const std::vector<std::span<const double>>& context_words,
                                 std::span<const double> paragraph,
                                 const EmbeddingMatrix& output) {
    const std::size_t d = paragraph.size();
    if (d == 0) throw std::invalid_argument("paragraph vector is empty");
    const std::size_t hdim = (context_words.size() + 1) * d;
    if (output.dimension() != hdim)
        throw std::invalid_argument("output weight width does not match concatenated input");
    std::vector<double> h(hdim, 0.0);
    for (std::size_t s = 0; s < context_words.size(); ++s) {
        const auto& w = context_words[s];
        if (w.empty()) continue;
        if (w.size() != d) throw std::invalid_argument("context vector dimension mismatch");
        std::copy(w.begin(), w.end(), h.begin() + s * d);
    }
    std::copy(paragraph.begin(), paragraph.end(), h.end() - d);
    return h;
}

std::vector<double> softmax_logits(const std::vector<double>& h, const EmbeddingMatrix& output,
                                   std::span<const double> bias) {
    if (bias.size() != output.rows()) throw std::invalid_argument("bias size mismatch");
    if (output.rows() == 0) throw std::invalid_argument("empty vocabulary");
    std::vector<double> y(output.rows());
    for (std::size_t i = 0; i < output.rows(); ++i) y[i] = bias[i] + dot(output.row(i), h);
    const double m = *std::max_element(y.begin(), y.end());
    double z = 0.0;
    for (double& v : y) {
        v = std::exp(v - m);
        z += v;
    }
    for (double& v : y) v /= z;  // now probabilities
    return y;
}

}  // namespace

double context_score(const std::vector<std::span<const double>>& context_words,
                     std::span<const double> paragraph, const EmbeddingMatrix& output,
                     std::span<const double> bias, const Vocabulary& vocab,
                     std::string_view target) {
    if (vocab.size() != output.rows())
        throw std::invalid_argument("output rows do not match vocabulary");
    const auto idx = vocab.index_of(target);
    if (!idx) throw std::invalid_argument("unknown token '" + std::string(target) + "'");
    const auto h = concat_input(context_words, paragraph, output);
    return softmax_logits(h, output, bias)[*idx];
}

double context_loss_grad(const std::vector<std::span<const double>>& context_words,
                         std::span<const double> paragraph, const EmbeddingMatrix& output,
                         std::span<const double> bias, std::uint32_t target,
                         std::vector<std::vector<double>>& grad_words,
                         std::vector<double>& grad_paragraph, EmbeddingMatrix& grad_output,
                         std::vector<double>& grad_bias) {
    if (target >= output.rows()) throw std::invalid_argument("target index out of range");
    const std::size_t d = paragraph.size();
    const auto h = concat_input(context_words, paragraph, output);
    const auto p = softmax_logits(h, output, bias);

    grad_output = EmbeddingMatrix(output.rows(), output.dimension());
    grad_bias.assign(output.rows(), 0.0);
    std::vector<double> grad_h(h.size(), 0.0);
    for (std::size_t i = 0; i < output.rows(); ++i) {
        const double e = p[i] - (i == target ? 1.0 : 0.0);
        grad_bias[i] = e;
        auto go = grad_output.row(i);
        const auto row = output.row(i);
        for (std::size_t x = 0; x < h.size(); ++x) {
            go[x] = e * h[x];
            grad_h[x] += e * row[x];
        }
    }
    grad_words.assign(context_words.size(), {});
    for (std::size_t s = 0; s < context_words.size(); ++s) {
        if (context_words[s].empty()) continue;
        grad_words[s].assign(grad_h.begin() + s * d, grad_h.begin() + (s + 1) * d);
    }
    grad_paragraph.assign(grad_h.end() - d, grad_h.end());
    return -std::log(p[target]);
}

EmbeddingMatrix train_content(std::span<const NodeDocument> documents, std::size_t node_count,
                              const TrainConfig& cfg) {
    if (cfg.dimension < 1) throw std::invalid_argument("embedding dimension must be positive");
    if (cfg.window < 1) throw std::invalid_argument("context window must be positive");
    if (!(cfg.lr_initial > cfg.lr_final && cfg.lr_final >= 0.0))
        throw std::invalid_argument("learning rate must decay toward a non-negative floor");

    bool any_tokens = false;
    std::unordered_set<NodeId> documented;
    for (const auto& doc : documents) {
        if (doc.node >= node_count) throw std::out_of_range("document node id out of range");
        documented.insert(doc.node);
        for (const auto& para : doc.paragraphs)
            if (!para.empty()) any_tokens = true;
    }
    if (!any_tokens) throw std::invalid_argument("no content tokens to train on");

    const Vocabulary vocab = Vocabulary::build(documents, 2);

    const std::size_t d = cfg.dimension;
    const std::size_t slots = 2 * static_cast<std::size_t>(cfg.window);
    const std::size_t hdim = (slots + 1) * d;

    EmbeddingMatrix paragraphs(node_count, d);
    EmbeddingMatrix words(vocab.size(), d);
    {
        Rng rng = make_rng(mix_seed(cfg.seed, 0xd0c5ull, 0));
        for (std::size_t i = 0; i < node_count; ++i)
            for (double& x : paragraphs.row(i)) x = (uniform01(rng) - 0.5) / static_cast<double>(d);
        for (std::size_t i = 0; i < node_count; ++i)
            if (!documented.contains(static_cast<NodeId>(i)))
                std::fill(paragraphs.row(i).begin(), paragraphs.row(i).end(), 0.0);
        for (std::size_t i = 0; i < vocab.size(); ++i)
            for (double& x : words.row(i)) x = (uniform01(rng) - 0.5) / static_cast<double>(d);
    }
    if (cfg.epochs == 0 || vocab.size() == 0) return paragraphs;

    // In-vocabulary index sequences, one per non-empty paragraph.
    std::vector<std::pair<NodeId, std::vector<std::uint32_t>>> sequences;
    std::size_t positions_per_epoch = 0;
    for (const auto& doc : documents)
        for (const auto& para : doc.paragraphs) {
            std::vector<std::uint32_t> seq;
            seq.reserve(para.size());
            for (const auto& token : para)
                if (const auto idx = vocab.index_of(token)) seq.push_back(*idx);
            if (seq.empty()) continue;
            positions_per_epoch += seq.size();
            sequences.emplace_back(doc.node, std::move(seq));
        }
    if (positions_per_epoch == 0) return paragraphs;

    std::vector<double> frequency(vocab.size());
    for (std::size_t i = 0; i < vocab.size(); ++i)
        frequency[i] = std::pow(static_cast<double>(vocab.count_at(static_cast<std::uint32_t>(i))),
                                0.75);
    const AliasTable negative_table(frequency);

    EmbeddingMatrix output(vocab.size(), hdim);
    std::vector<double> bias(vocab.size(), 0.0);

    const double total_updates = static_cast<double>(cfg.epochs) * positions_per_epoch;
    std::atomic<std::uint64_t> progress{0};

    const auto train_sequences = [&](std::size_t begin, std::size_t end, unsigned worker) {
        Rng rng = make_rng(mix_seed(cfg.seed, 0xc0deull, worker));
        std::vector<double> h(hdim), accum_h(hdim);
        for (std::uint32_t epoch = 0; epoch < cfg.epochs; ++epoch) {
            for (std::size_t si = begin; si < end; ++si) {
                const NodeId node = sequences[si].first;
                const auto& seq = sequences[si].second;
                auto para_vec = paragraphs.row(node);
                for (std::size_t t = 0; t < seq.size(); ++t) {
                    const auto tick = progress.fetch_add(1, std::memory_order_relaxed);
                    double lr = cfg.lr_initial -
                                (cfg.lr_initial - cfg.lr_final) *
                                    (static_cast<double>(tick) / total_updates);
                    if (lr < cfg.lr_final) lr = cfg.lr_final;

                    std::fill(h.begin(), h.end(), 0.0);
                    for (std::size_t s = 0; s < slots; ++s) {
                        const std::ptrdiff_t offset =
                            s < cfg.window
                                ? static_cast<std::ptrdiff_t>(s) - cfg.window
                                : static_cast<std::ptrdiff_t>(s) - cfg.window + 1;
                        const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(t) + offset;
                        if (src < 0 || src >= static_cast<std::ptrdiff_t>(seq.size())) continue;
                        const auto wv = words.row(seq[static_cast<std::size_t>(src)]);
                        std::copy(wv.begin(), wv.end(), h.begin() + s * d);
                    }
                    std::copy(para_vec.begin(), para_vec.end(), h.end() - d);

                    std::fill(accum_h.begin(), accum_h.end(), 0.0);
                    const std::uint32_t target = seq[t];
                    for (std::uint32_t m = 0; m <= cfg.negatives; ++m) {
                        std::uint32_t sample_idx;
                        double label;
                        if (m == 0) {
                            sample_idx = target;
                            label = 1.0;
                        } else {
                            sample_idx = static_cast<std::uint32_t>(negative_table.sample(rng));
                            if (sample_idx == target) continue;
                            label = 0.0;
                        }
                        auto out_row = output.row(sample_idx);
                        const double s_val =
                            std::clamp(bias[sample_idx] + dot(out_row, h), -kScoreClip, kScoreClip);
                        const double gscale = (label - stable_sigmoid(s_val)) * lr;
                        for (std::size_t x = 0; x < hdim; ++x) accum_h[x] += gscale * out_row[x];
                        for (std::size_t x = 0; x < hdim; ++x) out_row[x] += gscale * h[x];
                        bias[sample_idx] += gscale;
                    }

                    for (std::size_t s = 0; s < slots; ++s) {
                        const std::ptrdiff_t offset =
                            s < cfg.window
                                ? static_cast<std::ptrdiff_t>(s) - cfg.window
                                : static_cast<std::ptrdiff_t>(s) - cfg.window + 1;
                        const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(t) + offset;
                        if (src < 0 || src >= static_cast<std::ptrdiff_t>(seq.size())) continue;
                        auto wv = words.row(seq[static_cast<std::size_t>(src)]);
                        for (std::size_t x = 0; x < d; ++x) wv[x] += accum_h[s * d + x];
                    }
                    for (std::size_t x = 0; x < d; ++x) para_vec[x] += accum_h[hdim - d + x];
                }
            }
        }
    };

    if (cfg.threads <= 1 || sequences.size() < 2) {
        train_sequences(0, sequences.size(), 0);
        return paragraphs;
    }

    const unsigned workers =
        std::min<unsigned>(cfg.threads, static_cast<unsigned>(sequences.size()));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (sequences.size() + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t begin = std::min(sequences.size(), w * chunk);
        const std::size_t end = std::min(sequences.size(), (w + 1) * chunk);
        if (begin < end) pool.emplace_back(train_sequences, begin, end, w);
    }
    for (auto& t : pool) t.join();
    return paragraphs;
}

}  // namespace deeplink
