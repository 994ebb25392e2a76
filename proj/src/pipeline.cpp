#include "deeplink/pipeline.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "deeplink/baselines.hpp"
#include "deeplink/community.hpp"
#include "deeplink/content_embed.hpp"
#include "deeplink/random.hpp"
#include "deeplink/struct_embed.hpp"
#include "deeplink/walker.hpp"

namespace deeplink {

namespace {

namespace fs = std::filesystem;

template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string(name) + ": " + e.what());
    }
}

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string fmtg(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::vector<std::string> graph_tokens(const Graph& g) {
    std::vector<std::string> tokens;
    tokens.reserve(g.node_count());
    for (NodeId u = 0; u < g.node_count(); ++u) tokens.push_back(g.token_of(u));
    return tokens;
}

constexpr ScoreKind kBaselineKinds[5] = {ScoreKind::CommonNeighbors, ScoreKind::Jaccard,
                                         ScoreKind::AdamicAdar,
                                         ScoreKind::PreferentialAttachment, ScoreKind::Sorensen};

}  // namespace

std::string_view ablation_name(AblationMode mode) {
    switch (mode) {
        case AblationMode::Both: return "both";
        case AblationMode::StructuralOnly: return "structural-only";
        case AblationMode::ContentOnly: return "content-only";
    }
    throw std::invalid_argument("unknown ablation mode");
}

AblationMode parse_ablation(std::string_view name) {
    if (name == "both") return AblationMode::Both;
    if (name == "structural-only") return AblationMode::StructuralOnly;
    if (name == "content-only") return AblationMode::ContentOnly;
    throw std::invalid_argument("unknown ablation mode '" + std::string(name) +
                                "' (expected both, structural-only, or content-only)");
}

std::vector<std::vector<double>> edge_features(const EmbeddingMatrix& structural,
                                               const EmbeddingMatrix& content,
                                               std::span<const NodePair> pairs,
                                               AblationMode mode) {
    std::vector<std::vector<double>> out;
    out.reserve(pairs.size());
    for (const auto& [u, v] : pairs)
        out.push_back(hadamard_edge(node_features(structural, content, u, mode),
                                    node_features(structural, content, v, mode)));
    return out;
}

void write_model(const std::filesystem::path& path, const LogisticModel& m) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    char buf[64];
    out << "dim " << m.weights.size() << '\n';
    std::snprintf(buf, sizeof buf, "%.17g", m.bias);
    out << "bias " << buf << '\n';
    for (const double w : m.weights) {
        std::snprintf(buf, sizeof buf, "%.17g", w);
        out << "w " << buf << '\n';
    }
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

LogisticModel read_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string tag;
    std::size_t dim = 0;
    LogisticModel m;
    if (!(in >> tag >> dim) || tag != "dim")
        throw std::runtime_error(path.string() + ": expected 'dim <n>' header");
    if (!(in >> tag >> m.bias) || tag != "bias")
        throw std::runtime_error(path.string() + ": expected 'bias <value>'");
    m.weights.resize(dim);
    for (std::size_t i = 0; i < dim; ++i)
        if (!(in >> tag >> m.weights[i]) || tag != "w")
            throw std::runtime_error(path.string() + ": expected " + std::to_string(dim) +
                                     " 'w <value>' lines");
    return m;
}

std::string EvaluationReport::to_text() const {
    std::string t;
    t += "deeplink link prediction report\n";
    t += "===============================\n\n";
    t += "graph\n";
    t += "  nodes              " + std::to_string(nodes) + "\n";
    t += "  training edges     " + std::to_string(training_edges) + "\n";
    t += "  communities        " + std::to_string(communities) + "\n";
    t += "  modularity         " + fmt6(modularity_q) + "\n\n";
    t += "split\n";
    t += "  positive train     " + std::to_string(positive_train) + "\n";
    t += "  positive test      " + std::to_string(positive_test) + "\n";
    t += "  dropped unseen     " + std::to_string(dropped_unseen) + "\n\n";
    t += "auc\n";
    t += "  deeplink           " + fmt6(auc_deeplink) + "\n";
    for (const auto& [name, value] : auc_baselines) {
        t += "  " + name;
        t.append(name.size() < 19 ? 19 - name.size() : 1, ' ');
        t += fmt6(value) + "\n";
    }
    t += "\nclassifier\n";
    t += "  final train loss   " + fmt6(final_train_loss) + "\n\n";

    t += "[config]\n";
    t += "edges = " + config.edges_path + "\n";
    t += "snapshot2 = " + config.snapshot2_path + "\n";
    t += "content = " + config.content_path + "\n";
    t += "output-dir = " + config.output_dir + "\n";
    t += std::string("directed = ") + (config.directed ? "true" : "false") + "\n";
    t += "default-weight = " + fmtg(config.default_weight) + "\n";
    t += "alpha = " + fmtg(config.alpha) + "\n";
    t += "walk-length = " + std::to_string(config.walk_length) + "\n";
    t += "walks-per-node = " + std::to_string(config.walks_per_node) + "\n";
    t += "struct-dim = " + std::to_string(config.struct_dim) + "\n";
    t += "struct-window = " + std::to_string(config.struct_window) + "\n";
    t += "struct-epochs = " + std::to_string(config.struct_epochs) + "\n";
    t += "content-dim = " + std::to_string(config.content_dim) + "\n";
    t += "content-window = " + std::to_string(config.content_window) + "\n";
    t += "content-epochs = " + std::to_string(config.content_epochs) + "\n";
    t += "negatives = " + std::to_string(config.negatives) + "\n";
    t += "lr-initial = " + fmtg(config.lr_initial) + "\n";
    t += "lr-final = " + fmtg(config.lr_final) + "\n";
    t += "test-fraction = " + fmtg(config.test_fraction) + "\n";
    t += "classifier-lr = " + fmtg(config.classifier_lr) + "\n";
    t += "classifier-epochs = " + std::to_string(config.classifier_epochs) + "\n";
    t += "l2 = " + fmtg(config.l2) + "\n";
    t += "batch-size = " + std::to_string(config.batch_size) + "\n";
    t += "ablation = " + std::string(ablation_name(config.ablation)) + "\n";
    t += "seed = " + std::to_string(config.seed) + "\n";
    t += "threads = " + std::to_string(config.threads) + "\n\n";

    t += "[results]\n";
    t += "auc.deeplink = " + fmt6(auc_deeplink) + "\n";
    for (const auto& [name, value] : auc_baselines)
        t += "auc." + name + " = " + fmt6(value) + "\n";
    t += "modularity = " + fmt6(modularity_q) + "\n";
    t += "final-train-loss = " + fmt6(final_train_loss) + "\n";
    t += "positive-train = " + std::to_string(positive_train) + "\n";
    t += "positive-test = " + std::to_string(positive_test) + "\n";
    t += "dropped-unseen = " + std::to_string(dropped_unseen) + "\n";
    return t;
}

EvaluationReport run_pipeline(const PipelineConfig& config) {
    stage("config", [&] {
        if (config.edges_path.empty()) throw std::invalid_argument("no edge list given");
        if (config.ablation == AblationMode::ContentOnly && config.content_path.empty())
            throw std::invalid_argument("content-only ablation needs a content file");
        if (config.output_dir.empty()) throw std::invalid_argument("no output directory given");
        return 0;
    });
    const fs::path outdir(config.output_dir);
    stage("setup", [&] {
        fs::create_directories(outdir);
        return 0;
    });

    const Graph g = stage("ingest", [&] {
        return load_edge_list(config.edges_path, config.directed, config.default_weight);
    });

    const DatasetSplit split = stage("split", [&] {
        const auto seed = mix_seed(config.seed, 0x517ull, 0);
        if (!config.snapshot2_path.empty()) {
            const Graph g2 =
                load_edge_list(config.snapshot2_path, config.directed, config.default_weight);
            return temporal_split(g, g2, seed);
        }
        return random_removal_split(g, config.test_fraction, seed);
    });
    stage("split", [&] {
        write_split(outdir / "split.tsv", g, split);
        return 0;
    });
    const Graph gtrain = stage("split", [&] { return training_graph(g, split); });

    const CommunityAssignment assignment =
        stage("communities", [&] { return louvain(gtrain, mix_seed(config.seed, 0xc001ull, 0)); });
    const double q = stage("communities", [&] { return modularity(gtrain, assignment); });
    stage("communities", [&] {
        std::ofstream out(outdir / "communities.tsv");
        if (!out) throw std::runtime_error("cannot open communities.tsv for writing");
        write_assignment(assignment, gtrain, out);
        return 0;
    });

    const WalkCorpus corpus = stage("walk", [&] {
        WalkParams wp;
        wp.alpha = config.alpha;
        wp.max_length = config.walk_length;
        wp.walks_per_node = config.walks_per_node;
        wp.seed = mix_seed(config.seed, 0xa1ull, 0);
        return generate_corpus(gtrain, assignment, wp, config.threads);
    });
    stage("walk", [&] {
        write_corpus(outdir / "walks.txt", gtrain, corpus);
        return 0;
    });

    const auto tokens = graph_tokens(g);
    const EmbeddingMatrix structural = stage("embed-struct", [&] {
        TrainConfig tc;
        tc.dimension = config.struct_dim;
        tc.window = config.struct_window;
        tc.epochs = config.struct_epochs;
        tc.negatives = config.negatives;
        tc.lr_initial = config.lr_initial;
        tc.lr_final = config.lr_final;
        tc.seed = mix_seed(config.seed, 0x57ull, 0);
        tc.threads = config.threads;
        return train_structural(corpus, gtrain, tc);
    });
    stage("embed-struct", [&] {
        write_embeddings(outdir / "structural.emb", tokens, structural);
        return 0;
    });

    EmbeddingMatrix content(g.node_count(), 0);
    const bool use_content =
        config.ablation != AblationMode::StructuralOnly && !config.content_path.empty();
    if (use_content) {
        content = stage("embed-content", [&] {
            const auto documents = assemble_documents(fs::path(config.content_path), g);
            TrainConfig tc;
            tc.dimension = config.content_dim;
            tc.window = config.content_window;
            tc.epochs = config.content_epochs;
            tc.negatives = config.negatives;
            tc.lr_initial = config.lr_initial;
            tc.lr_final = config.lr_final;
            tc.seed = mix_seed(config.seed, 0xd0cull, 0);
            tc.threads = config.threads;
            return train_content(documents, g.node_count(), tc);
        });
        stage("embed-content", [&] {
            write_embeddings(outdir / "content.emb", tokens, content);
            return 0;
        });
    }

    std::vector<double> loss_history;
    const LogisticModel model = stage("train", [&] {
        auto x = edge_features(structural, content, split.positive_train, config.ablation);
        auto x_neg = edge_features(structural, content, split.negative_train, config.ablation);
        std::vector<double> y(x.size(), 1.0);
        x.insert(x.end(), std::make_move_iterator(x_neg.begin()),
                 std::make_move_iterator(x_neg.end()));
        y.resize(x.size(), 0.0);
        ClassifierConfig cc;
        cc.lr = config.classifier_lr;
        cc.epochs = config.classifier_epochs;
        cc.l2 = config.l2;
        cc.batch_size = config.batch_size;
        cc.seed = mix_seed(config.seed, 0xc1ull, 0);
        return train_classifier(x, y, cc, &loss_history);
    });
    stage("train", [&] {
        write_model(outdir / "model.txt", model);
        return 0;
    });

    EvaluationReport report;
    report.config = config;
    report.nodes = g.node_count();
    report.training_edges = split.positive_train.size();
    report.communities = assignment.community_count();
    report.modularity_q = q;
    report.positive_train = split.positive_train.size();
    report.positive_test = split.positive_test.size();
    report.dropped_unseen = split.dropped_unseen;
    report.final_train_loss = loss_history.empty() ? 0.0 : loss_history.back();

    stage("evaluate", [&] {
        const auto score_pairs = [&](std::span<const NodePair> pairs) {
            std::vector<double> scores;
            scores.reserve(pairs.size());
            for (const auto& x : edge_features(structural, content, pairs, config.ablation))
                scores.push_back(predict(model, x));
            return scores;
        };
        report.auc_deeplink =
            auc_exact(score_pairs(split.positive_test), score_pairs(split.negative_test));

        const Graph gu = undirected_view(gtrain);
        for (const ScoreKind kind : kBaselineKinds) {
            const auto score_with = [&](std::span<const NodePair> pairs) {
                std::vector<double> scores;
                scores.reserve(pairs.size());
                for (const auto& [u, v] : pairs) scores.push_back(local_score(gu, u, v, kind));
                return scores;
            };
            report.auc_baselines.emplace_back(
                score_kind_name(kind),
                auc_exact(score_with(split.positive_test), score_with(split.negative_test)));
        }
        return 0;
    });

    stage("report", [&] {
        std::ofstream out(outdir / "report.txt");
        if (!out) throw std::runtime_error("cannot open report.txt for writing");
        out << report.to_text();
        if (!out) throw std::runtime_error("failed writing report.txt");
        return 0;
    });
    return report;
}

std::vector<SweepRow> sweep_dimension(const PipelineConfig& config,
                                      std::span<const std::uint32_t> values, SweepAxis axis) {
    if (values.empty()) throw std::invalid_argument("sweep needs at least one dimension value");
    std::vector<SweepRow> rows;
    rows.reserve(values.size());
    for (const std::uint32_t v : values) {
        PipelineConfig c = config;
        (axis == SweepAxis::Structural ? c.struct_dim : c.content_dim) = v;
        c.output_dir = config.output_dir + "/sweep-" +
                       (axis == SweepAxis::Structural ? "structural-" : "content-") +
                       std::to_string(v);
        rows.push_back({v, run_pipeline(c).auc_deeplink});
    }
    return rows;
}

std::string sweep_table(std::span<const SweepRow> rows) {
    std::string t = "dimension\tauc\n";
    for (const auto& r : rows) t += std::to_string(r.dimension) + "\t" + fmt6(r.auc) + "\n";
    return t;
}

}  // namespace deeplink
