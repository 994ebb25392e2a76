#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "deeplink/baselines.hpp"
#include "deeplink/community.hpp"
#include "deeplink/content_embed.hpp"
#include "deeplink/embedding.hpp"
#include "deeplink/features.hpp"
#include "deeplink/graph.hpp"
#include "deeplink/pipeline.hpp"
#include "deeplink/predictor.hpp"
#include "deeplink/random.hpp"
#include "deeplink/struct_embed.hpp"
#include "deeplink/walker.hpp"

namespace {

using namespace deeplink;

struct GraphOpts {
    std::string edges;
    bool undirected = false;
    double default_weight = 1.0;
};

void add_graph_opts(CLI::App* cmd, GraphOpts& o) {
    cmd->add_option("--edges", o.edges, "edge list: src<TAB>dst[<TAB>weight] lines")->required();
    cmd->add_flag("--undirected", o.undirected, "treat edges as undirected");
    cmd->add_option("--default-weight", o.default_weight, "weight for two-column lines");
}

Graph load_graph(const GraphOpts& o, LoadReport* report = nullptr) {
    return load_edge_list(o.edges, !o.undirected, o.default_weight, report);
}

std::vector<std::string> graph_tokens(const Graph& g) {
    std::vector<std::string> tokens;
    tokens.reserve(g.node_count());
    for (NodeId u = 0; u < g.node_count(); ++u) tokens.push_back(g.token_of(u));
    return tokens;
}

// Reorders an embedding file's rows into graph node-id order.
EmbeddingMatrix align_embeddings(const std::filesystem::path& path, const Graph& g,
                                 bool require_all) {
    const auto [tokens, m] = read_embeddings(path);
    EmbeddingMatrix out(g.node_count(), m.dimension());
    std::vector<bool> seen(g.node_count(), false);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (!g.has_token(tokens[i]))
            throw std::runtime_error(path.string() + ": token '" + tokens[i] +
                                     "' is not a graph node");
        const NodeId u = g.id_of(tokens[i]);
        const auto src = m.row(i);
        std::copy(src.begin(), src.end(), out.row(u).begin());
        seen[u] = true;
    }
    if (require_all)
        for (NodeId u = 0; u < g.node_count(); ++u)
            if (!seen[u])
                throw std::runtime_error(path.string() + ": node '" + g.token_of(u) +
                                         "' has no vector");
    return out;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    return out;
}

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

const std::map<std::string, AblationMode> kAblationNames{
    {"both", AblationMode::Both},
    {"structural-only", AblationMode::StructuralOnly},
    {"content-only", AblationMode::ContentOnly}};

void add_train_config_opts(CLI::App* cmd, TrainConfig& tc) {
    cmd->add_option("--dim", tc.dimension, "embedding dimension");
    cmd->add_option("--window", tc.window, "context window");
    cmd->add_option("--epochs", tc.epochs, "training epochs");
    cmd->add_option("--negatives", tc.negatives, "negative samples per positive");
    cmd->add_option("--lr-initial", tc.lr_initial, "initial learning rate");
    cmd->add_option("--lr-final", tc.lr_final, "final learning rate");
    cmd->add_option("--seed", tc.seed, "random seed");
    cmd->add_option("--threads", tc.threads, "worker threads (1 = reproducible)");
}

void setup_ingest(CLI::App& app) {
    auto opts = std::make_shared<GraphOpts>();
    auto out_path = std::make_shared<std::string>();
    auto* cmd = app.add_subcommand("ingest", "load an edge list and report its shape");
    add_graph_opts(cmd, *opts);
    cmd->add_option("--out", *out_path, "write the normalized edge list here");
    cmd->callback([opts, out_path] {
        LoadReport report;
        const Graph g = load_graph(*opts, &report);
        std::cout << report.summary() << '\n';
        if (!out_path->empty()) {
            auto out = open_out(*out_path);
            write_edge_list(g, out);
        }
    });
}

void setup_communities(CLI::App& app) {
    auto opts = std::make_shared<GraphOpts>();
    auto out_path = std::make_shared<std::string>();
    auto seed = std::make_shared<std::uint64_t>(0);
    auto* cmd = app.add_subcommand("communities", "detect communities via Louvain");
    add_graph_opts(cmd, *opts);
    cmd->add_option("--seed", *seed, "random seed");
    cmd->add_option("--out", *out_path, "assignment file (node<TAB>community); stdout if unset");
    cmd->callback([opts, out_path, seed] {
        const Graph g = load_graph(*opts);
        const auto assignment = louvain(g, *seed);
        const double q = modularity(g, assignment);
        if (out_path->empty()) {
            write_assignment(assignment, g, std::cout);
        } else {
            auto out = open_out(*out_path);
            write_assignment(assignment, g, out);
            std::cout << "communities " << assignment.community_count() << '\n'
                      << "modularity " << fmt6(q) << '\n';
        }
    });
}

void setup_walk(CLI::App& app) {
    auto opts = std::make_shared<GraphOpts>();
    auto params = std::make_shared<WalkParams>();
    auto communities_path = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    auto threads = std::make_shared<unsigned>(1);
    auto* cmd = app.add_subcommand("walk", "generate community-aware random walks");
    add_graph_opts(cmd, *opts);
    cmd->add_option("--communities", *communities_path,
                    "assignment file; computed with Louvain if unset");
    cmd->add_option("--alpha", params->alpha, "probability of a weighted neighbor step");
    cmd->add_option("--length", params->max_length, "walk length");
    cmd->add_option("--walks-per-node", params->walks_per_node, "walks per start node");
    cmd->add_option("--seed", params->seed, "random seed");
    cmd->add_option("--threads", *threads, "worker threads");
    cmd->add_option("--out", *out_path, "walk file; stdout if unset");
    cmd->callback([opts, params, communities_path, out_path, threads] {
        const Graph g = load_graph(*opts);
        CommunityAssignment assignment;
        if (communities_path->empty()) {
            assignment = louvain(g, params->seed);
        } else {
            std::ifstream in(*communities_path);
            if (!in) throw std::runtime_error("cannot open " + *communities_path);
            assignment = read_assignment(in, g);
        }
        const auto corpus = generate_corpus(g, assignment, *params, *threads);
        if (out_path->empty()) {
            write_corpus(std::cout, g, corpus);
        } else {
            write_corpus(std::filesystem::path(*out_path), g, corpus);
        }
    });
}

void setup_embed_struct(CLI::App& app) {
    auto opts = std::make_shared<GraphOpts>();
    auto tc = std::make_shared<TrainConfig>();
    auto walks_path = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    auto* cmd = app.add_subcommand("embed-struct", "train structural embeddings from walks");
    add_graph_opts(cmd, *opts);
    cmd->add_option("--walks", *walks_path, "walk corpus file")->required();
    add_train_config_opts(cmd, *tc);
    cmd->add_option("--out", *out_path, "embedding output file")->required();
    cmd->callback([opts, tc, walks_path, out_path] {
        const Graph g = load_graph(*opts);
        const auto corpus = read_corpus(std::filesystem::path(*walks_path), g);
        const auto m = train_structural(corpus, g, *tc);
        write_embeddings(std::filesystem::path(*out_path), graph_tokens(g), m);
    });
}

void setup_embed_content(CLI::App& app) {
    auto opts = std::make_shared<GraphOpts>();
    auto tc = std::make_shared<TrainConfig>();
    auto content_path = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    auto* cmd = app.add_subcommand("embed-content", "train paragraph vectors from node content");
    add_graph_opts(cmd, *opts);
    cmd->add_option("--content", *content_path, "JSON-lines content file")->required();
    add_train_config_opts(cmd, *tc);
    cmd->add_option("--out", *out_path, "embedding output file")->required();
    cmd->callback([opts, tc, content_path, out_path] {
        const Graph g = load_graph(*opts);
        const auto documents = assemble_documents(std::filesystem::path(*content_path), g);
        const auto m = train_content(documents, g.node_count(), *tc);
        write_embeddings(std::filesystem::path(*out_path), graph_tokens(g), m);
    });
}

void setup_split(CLI::App& app) {
    auto opts = std::make_shared<GraphOpts>();
    auto snapshot2 = std::make_shared<std::string>();
    auto fraction = std::make_shared<double>(0.1);
    auto seed = std::make_shared<std::uint64_t>(0);
    auto out_path = std::make_shared<std::string>();
    auto* cmd = app.add_subcommand("split", "build a train/test split");
    add_graph_opts(cmd, *opts);
    cmd->add_option("--snapshot2", *snapshot2,
                    "later snapshot edge list; switches to temporal splitting");
    cmd->add_option("--test-fraction", *fraction, "removed-edge fraction (random mode)");
    cmd->add_option("--seed", *seed, "random seed");
    cmd->add_option("--out", *out_path, "split file")->required();
    cmd->callback([opts, snapshot2, fraction, seed, out_path] {
        const Graph g = load_graph(*opts);
        DatasetSplit split;
        if (snapshot2->empty()) {
            split = random_removal_split(g, *fraction, *seed);
        } else {
            const Graph g2 = load_edge_list(*snapshot2, !opts->undirected, opts->default_weight);
            split = temporal_split(g, g2, *seed);
        }
        write_split(std::filesystem::path(*out_path), g, split);
        std::cout << "positive-train " << split.positive_train.size() << '\n'
                  << "positive-test " << split.positive_test.size() << '\n'
                  << "dropped-unseen " << split.dropped_unseen << '\n';
    });
}

struct TrainEvalOpts {
    GraphOpts graph;
    std::string split_path;
    std::string struct_path;
    std::string content_path;
    AblationMode ablation = AblationMode::Both;
};

void add_train_eval_opts(CLI::App* cmd, TrainEvalOpts& o) {
    add_graph_opts(cmd, o.graph);
    cmd->add_option("--split", o.split_path, "split file")->required();
    cmd->add_option("--struct", o.struct_path, "structural embedding file")->required();
    cmd->add_option("--content", o.content_path, "content embedding file");
    cmd->add_option("--ablation", o.ablation, "feature blocks to use")
        ->transform(CLI::CheckedTransformer(kAblationNames, CLI::ignore_case));
}

void setup_train(CLI::App& app) {
    auto opts = std::make_shared<TrainEvalOpts>();
    auto cc = std::make_shared<ClassifierConfig>();
    auto out_path = std::make_shared<std::string>();
    auto* cmd = app.add_subcommand("train", "fit the link classifier on a split");
    add_train_eval_opts(cmd, *opts);
    cmd->add_option("--lr", cc->lr, "learning rate");
    cmd->add_option("--epochs", cc->epochs, "training epochs");
    cmd->add_option("--l2", cc->l2, "L2 penalty");
    cmd->add_option("--batch-size", cc->batch_size, "mini-batch size");
    cmd->add_option("--seed", cc->seed, "random seed");
    cmd->add_option("--out", *out_path, "model file")->required();
    cmd->callback([opts, cc, out_path] {
        const Graph g = load_graph(opts->graph);
        const auto split = read_split(std::filesystem::path(opts->split_path), g);
        const auto structural = align_embeddings(opts->struct_path, g, true);
        EmbeddingMatrix content(g.node_count(), 0);
        if (!opts->content_path.empty()) content = align_embeddings(opts->content_path, g, false);

        auto x = edge_features(structural, content, split.positive_train, opts->ablation);
        auto x_neg = edge_features(structural, content, split.negative_train, opts->ablation);
        std::vector<double> y(x.size(), 1.0);
        x.insert(x.end(), std::make_move_iterator(x_neg.begin()),
                 std::make_move_iterator(x_neg.end()));
        y.resize(x.size(), 0.0);

        std::vector<double> history;
        const auto model = train_classifier(x, y, *cc, &history);
        write_model(std::filesystem::path(*out_path), model);
        std::cout << "final-train-loss " << fmt6(history.back()) << '\n';
    });
}

void setup_evaluate(CLI::App& app) {
    auto opts = std::make_shared<TrainEvalOpts>();
    auto model_path = std::make_shared<std::string>();
    auto* cmd = app.add_subcommand("evaluate", "AUC of a trained model plus baselines");
    add_train_eval_opts(cmd, *opts);
    cmd->add_option("--model", *model_path, "model file from `train`")->required();
    cmd->callback([opts, model_path] {
        const Graph g = load_graph(opts->graph);
        const auto split = read_split(std::filesystem::path(opts->split_path), g);
        const auto structural = align_embeddings(opts->struct_path, g, true);
        EmbeddingMatrix content(g.node_count(), 0);
        if (!opts->content_path.empty()) content = align_embeddings(opts->content_path, g, false);
        const auto model = read_model(std::filesystem::path(*model_path));

        const auto score_pairs = [&](std::span<const NodePair> pairs) {
            std::vector<double> scores;
            for (const auto& x : edge_features(structural, content, pairs, opts->ablation))
                scores.push_back(predict(model, x));
            return scores;
        };
        std::cout << "auc.deeplink\t"
                  << fmt6(auc_exact(score_pairs(split.positive_test),
                                    score_pairs(split.negative_test)))
                  << '\n';

        const Graph gtrain = training_graph(g, split);
        const Graph gu = undirected_view(gtrain);
        for (const char* name : {"cn", "jaccard", "aa", "pa", "sorensen"}) {
            const auto kind = parse_score_kind(name);
            const auto score_with = [&](std::span<const NodePair> pairs) {
                std::vector<double> scores;
                for (const auto& [u, v] : pairs) scores.push_back(local_score(gu, u, v, kind));
                return scores;
            };
            std::cout << "auc." << name << '\t'
                      << fmt6(auc_exact(score_with(split.positive_test),
                                        score_with(split.negative_test)))
                      << '\n';
        }
    });
}

void setup_baseline(CLI::App& app) {
    auto opts = std::make_shared<GraphOpts>();
    auto kind_name = std::make_shared<std::string>("cn");
    auto pairs_path = std::make_shared<std::string>();
    auto split_path = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    auto* cmd = app.add_subcommand("baseline", "rank node pairs by a neighborhood score");
    add_graph_opts(cmd, *opts);
    cmd->add_option("--kind", *kind_name, "cn, jaccard, aa, pa, or sorensen");
    auto* pairs_opt = cmd->add_option("--pairs", *pairs_path, "u<TAB>v lines to score");
    cmd->add_option("--split", *split_path, "score a split's test pairs instead")
        ->excludes(pairs_opt);
    cmd->add_option("--out", *out_path, "ranked output; stdout if unset");
    cmd->callback([opts, kind_name, pairs_path, split_path, out_path] {
        const Graph g = load_graph(*opts);
        const Graph gu = undirected_view(g);
        const auto kind = parse_score_kind(*kind_name);

        std::vector<NodePair> pairs;
        if (!split_path->empty()) {
            const auto split = read_split(std::filesystem::path(*split_path), g);
            pairs = split.positive_test;
            pairs.insert(pairs.end(), split.negative_test.begin(), split.negative_test.end());
        } else if (!pairs_path->empty()) {
            std::ifstream in(*pairs_path);
            if (!in) throw std::runtime_error("cannot open " + *pairs_path);
            std::string line;
            std::size_t lineno = 0;
            while (std::getline(in, line)) {
                ++lineno;
                if (!line.empty() && line.back() == '\r') line.pop_back();
                if (line.empty() || line[0] == '#') continue;
                const auto tab = line.find('\t');
                if (tab == std::string::npos)
                    throw std::runtime_error("pair file line " + std::to_string(lineno) +
                                             ": expected u<TAB>v");
                pairs.emplace_back(g.id_of(line.substr(0, tab)), g.id_of(line.substr(tab + 1)));
            }
        } else {
            throw std::runtime_error("baseline: need --pairs or --split");
        }

        std::vector<ScoredPair> scored;
        scored.reserve(pairs.size());
        for (const auto& [u, v] : pairs) scored.push_back({u, v, local_score(gu, u, v, kind)});
        scored = rank_pairs(std::move(scored));

        std::ofstream file;
        std::ostream* out = &std::cout;
        if (!out_path->empty()) {
            file = open_out(*out_path);
            out = &file;
        }
        for (const auto& p : scored)
            *out << g.token_of(p.u) << '\t' << g.token_of(p.v) << '\t' << fmt6(p.score) << '\n';
    });
}

// Applies key=value lines from `path` to options of `cmd` that the command
// line left unset.  Values go through each option's normal conversion and
// validation, so bad ones fail the same way bad flags do.
void apply_config_file(CLI::App* cmd, const std::string& path) {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    const auto trim = [](const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return std::string();
        return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
    };
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto text = trim(line);
        if (text.empty() || text.front() == '#') continue;
        const auto where = path + " line " + std::to_string(lineno);
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(where + ": expected key=value");
        const auto key = trim(text.substr(0, eq));
        const auto value = trim(text.substr(eq + 1));
        auto* opt = cmd->get_option_no_throw("--" + key);
        if (opt == nullptr) throw std::runtime_error(where + ": unknown key '" + key + "'");
        if (opt->count() > 0) continue;  // flags take precedence
        opt->add_result(opt->get_expected_min() == 0 ? opt->get_flag_value("--" + key, value)
                                                     : value);
        opt->run_callback();
    }
}

void add_pipeline_opts(CLI::App* cmd, PipelineConfig& c, bool& undirected,
                       std::string& config_path) {
    cmd->add_option("--config", config_path,
                    "flat key=value config file; flags take precedence");
    cmd->add_option("--edges", c.edges_path, "edge list; required here or in the config file");
    cmd->add_option("--snapshot2", c.snapshot2_path, "later snapshot (temporal split)");
    cmd->add_option("--content", c.content_path, "JSON-lines node content");
    cmd->add_option("--output-dir", c.output_dir, "artifact directory");
    cmd->add_flag("--undirected", undirected, "treat edges as undirected");
    cmd->add_option("--default-weight", c.default_weight, "weight for two-column lines");
    cmd->add_option("--alpha", c.alpha, "neighbor-step probability");
    cmd->add_option("--walk-length", c.walk_length, "walk length");
    cmd->add_option("--walks-per-node", c.walks_per_node, "walks per node");
    cmd->add_option("--struct-dim", c.struct_dim, "structural embedding dimension");
    cmd->add_option("--struct-window", c.struct_window, "skip-gram window");
    cmd->add_option("--struct-epochs", c.struct_epochs, "structural training epochs");
    cmd->add_option("--content-dim", c.content_dim, "content embedding dimension");
    cmd->add_option("--content-window", c.content_window, "paragraph-vector context half-width");
    cmd->add_option("--content-epochs", c.content_epochs, "content training epochs");
    cmd->add_option("--negatives", c.negatives, "negative samples per positive");
    cmd->add_option("--lr-initial", c.lr_initial, "embedding initial learning rate");
    cmd->add_option("--lr-final", c.lr_final, "embedding final learning rate");
    cmd->add_option("--test-fraction", c.test_fraction, "removed-edge fraction (random split)");
    cmd->add_option("--classifier-lr", c.classifier_lr, "classifier learning rate");
    cmd->add_option("--classifier-epochs", c.classifier_epochs, "classifier epochs");
    cmd->add_option("--l2", c.l2, "classifier L2 penalty");
    cmd->add_option("--batch-size", c.batch_size, "classifier mini-batch size");
    cmd->add_option("--ablation", c.ablation, "feature blocks to use")
        ->transform(CLI::CheckedTransformer(kAblationNames, CLI::ignore_case));
    cmd->add_option("--seed", c.seed, "global random seed");
    cmd->add_option("--threads", c.threads, "worker threads (1 = reproducible)");
}

void setup_run(CLI::App& app) {
    auto cfg = std::make_shared<PipelineConfig>();
    auto undirected = std::make_shared<bool>(false);
    auto config_path = std::make_shared<std::string>();
    auto* cmd = app.add_subcommand("run", "full pipeline: ingest through evaluation report");
    add_pipeline_opts(cmd, *cfg, *undirected, *config_path);
    cmd->callback([cmd, cfg, undirected, config_path] {
        apply_config_file(cmd, *config_path);
        cfg->directed = !*undirected;
        const auto report = run_pipeline(*cfg);
        std::cout << report.to_text();
    });
}

void setup_sweep(CLI::App& app) {
    auto cfg = std::make_shared<PipelineConfig>();
    auto undirected = std::make_shared<bool>(false);
    auto axis_name = std::make_shared<std::string>("structural");
    auto values = std::make_shared<std::vector<std::uint32_t>>();
    auto out_path = std::make_shared<std::string>();
    auto config_path = std::make_shared<std::string>();
    auto* cmd = app.add_subcommand("sweep", "AUC across embedding dimensions");
    add_pipeline_opts(cmd, *cfg, *undirected, *config_path);
    cmd->add_option("--axis", *axis_name, "structural or content")
        ->check(CLI::IsMember({"structural", "content"}));
    cmd->add_option("--values", *values, "dimensions to sweep; required here or in the config file")
        ->delimiter(',');
    cmd->add_option("--table-out", *out_path, "table file; stdout only if unset");
    cmd->callback([cmd, cfg, undirected, axis_name, values, out_path, config_path] {
        apply_config_file(cmd, *config_path);
        cfg->directed = !*undirected;
        const auto axis =
            *axis_name == "structural" ? SweepAxis::Structural : SweepAxis::Content;
        const auto rows = sweep_dimension(*cfg, *values, axis);
        const auto table = sweep_table(rows);
        std::cout << table;
        if (!out_path->empty()) open_out(*out_path) << table;
    });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"community-aware link prediction toolkit"};
    app.require_subcommand(1);

    setup_ingest(app);
    setup_communities(app);
    setup_walk(app);
    setup_embed_struct(app);
    setup_embed_content(app);
    setup_split(app);
    setup_train(app);
    setup_evaluate(app);
    setup_baseline(app);
    setup_run(app);
    setup_sweep(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
