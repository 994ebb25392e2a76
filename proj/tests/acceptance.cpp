// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Each criterion is self-contained and states its measured values
// next to the required thresholds.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "deeplink/baselines.hpp"
#include "deeplink/community.hpp"
#include "deeplink/content_embed.hpp"
#include "deeplink/embedding.hpp"
#include "deeplink/graph.hpp"
#include "deeplink/pipeline.hpp"
#include "deeplink/predictor.hpp"
#include "deeplink/random.hpp"
#include "deeplink/struct_embed.hpp"
#include "deeplink/walker.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace deeplink;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_s(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string strf(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof buf, format, args);
    va_end(args);
    return buf;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return "<missing " + p.string() + ">";
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path work_dir(const char* name) {
    const fs::path dir = fs::temp_directory_path() / "deeplink-acceptance" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// Sampled AUC tracks exact AUC within 0.01, exact AUC equals brute-force
// enumeration, all in under five seconds.
bool criterion1(std::string& detail) {
    const auto t0 = Clock::now();
    Rng rng = make_rng(101);
    double worst_gap = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> pos(1 + uniform_below(rng, 200)), neg(1 + uniform_below(rng, 200));
        const bool tie_heavy = trial % 3 == 0;
        for (auto* list : {&pos, &neg})
            for (double& s : *list)
                s = tie_heavy ? static_cast<double>(uniform_below(rng, 10)) : uniform01(rng);
        const double exact = auc_exact(pos, neg);
        const double sampled = auc_sampled(pos, neg, 100000, 1000 + trial);
        worst_gap = std::max(worst_gap, std::abs(sampled - exact));
    }

    std::size_t mismatches = 0;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> pos(1 + uniform_below(rng, 20)), neg(1 + uniform_below(rng, 20));
        for (auto* list : {&pos, &neg})
            for (double& s : *list) s = static_cast<double>(uniform_below(rng, 6)) / 2.0;
        if (auc_exact(pos, neg) != oracle::auc(pos, neg)) ++mismatches;
    }
    const double secs = elapsed_s(t0);
    detail = strf(
        "AUC oracle: sampled-vs-exact worst gap %.4f (limit 0.01), "
        "%zu enumeration mismatches on short lists, %.1f s (limit 5)",
        worst_gap, mismatches, secs);
    return worst_gap <= 0.01 && mismatches == 0 && secs < 5.0;
}

// Louvain lands within 0.05 of the enumerated optimal modularity on small
// random connected graphs and recovers two disjoint 5-cliques exactly.
bool criterion2(std::string& detail) {
    Rng rng = make_rng(202);
    double worst_gap = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + uniform_below(rng, 6);
        const Graph g = gen::random_connected_graph(n, 0.35, rng);
        const CommunityAssignment a = louvain(g, static_cast<std::uint64_t>(trial));
        worst_gap = std::max(worst_gap, oracle::best_modularity(g) - modularity(g, a));
    }

    const Graph cliques = gen::disjoint_cliques(2, 5);
    const CommunityAssignment ca = louvain(cliques, 0);
    const double cq = modularity(cliques, ca);
    detail = strf(
        "modularity oracle: worst optimality gap %.4f over 100 random graphs (limit 0.05); "
        "two 5-cliques -> %zu communities with Q %.6f (want 2 at Q 0.5)",
        worst_gap, ca.community_count(), cq);
    return worst_gap <= 0.05 && ca.community_count() == 2 && std::abs(cq - 0.5) < 1e-9;
}

// Walk transitions follow edge weights at alpha=1 and take the neighbor
// branch with frequency alpha when both branches are available.
bool criterion3(std::string& detail) {
    const int steps = 100000;
    const Graph weighted =
        gen::make_weighted(true, {{"a", "b", 2.0}, {"a", "c", 1.0}});
    const std::vector<std::uint32_t> singleton_labels = {0, 1, 2};
    const CommunityAssignment singletons{singleton_labels};
    Rng rng = make_rng(303);
    int to_b = 0;
    for (int i = 0; i < steps; ++i)
        if (*step(weighted, singletons, weighted.id_of("a"), 1.0, rng) == weighted.id_of("b"))
            ++to_b;
    const double freq_b = static_cast<double>(to_b) / steps;

    GraphBuilder builder(true);
    builder.add_node("x");
    builder.add_edge("a", "b");
    const Graph branchy = builder.build();  // x=0, a=1, b=2
    const std::vector<std::uint32_t> branch_labels = {0, 0, 1};  // a shares x's community
    const CommunityAssignment communities{branch_labels};
    double worst_branch_gap = 0.0;
    for (const double alpha : {0.2, 0.5, 0.8}) {
        int neighbor_branch = 0;
        for (int i = 0; i < steps; ++i)
            if (*step(branchy, communities, branchy.id_of("a"), alpha, rng) ==
                branchy.id_of("b"))
                ++neighbor_branch;
        worst_branch_gap = std::max(
            worst_branch_gap, std::abs(static_cast<double>(neighbor_branch) / steps - alpha));
    }
    detail = strf(
        "walk distribution: weight-(2,1) next-node frequency %.4f vs 2/3 (limit 0.03); "
        "worst branch-frequency gap %.4f across alpha {0.2,0.5,0.8} (limit 0.02)",
        freq_b, worst_branch_gap);
    return std::abs(freq_b - 2.0 / 3.0) <= 0.03 && worst_branch_gap <= 0.02;
}

// All three loss gradients match central finite differences.
bool criterion4(std::string& detail) {
    Rng rng = make_rng(404);
    double worst = 0.0;

    for (int trial = 0; trial < 10; ++trial) {  // skip-gram pair loss, d=5
        std::vector<double> fu(5), fv(5), gu(5), gv(5);
        for (auto* vec : {&fu, &fv})
            for (double& x : *vec) x = (uniform01(rng) - 0.5) * 0.6;
        const double weight = 1.0 + 2.0 * uniform01(rng);
        for (const bool positive : {true, false}) {
            pair_loss_grad(fu, fv, weight, positive, gu, gv);
            for (std::size_t k = 0; k < 5; ++k) {
                const double fd_u = oracle::fd_central(
                    fu[k], 1e-5, [&] { return pair_loss(fu, fv, weight, positive); });
                const double fd_v = oracle::fd_central(
                    fv[k], 1e-5, [&] { return pair_loss(fu, fv, weight, positive); });
                worst = std::max({worst, oracle::rel_err(gu[k], fd_u),
                                  oracle::rel_err(gv[k], fd_v)});
            }
        }
    }

    {  // paragraph-vector context loss: vocab 3, d=4, one real + one padding slot
        const std::size_t d = 4, vocab = 3, concat = 2 * d + d;
        std::vector<double> word(d), paragraph(d), bias(vocab);
        EmbeddingMatrix output(vocab, concat);
        for (double& x : word) x = (uniform01(rng) - 0.5) * 0.8;
        for (double& x : paragraph) x = (uniform01(rng) - 0.5) * 0.8;
        for (double& x : bias) x = (uniform01(rng) - 0.5) * 0.8;
        for (std::size_t i = 0; i < vocab; ++i)
            for (double& x : output.row(i)) x = (uniform01(rng) - 0.5) * 0.8;
        const std::vector<std::span<const double>> context = {word, {}};

        std::vector<std::vector<double>> grad_words;
        std::vector<double> grad_paragraph, grad_bias;
        EmbeddingMatrix grad_output(vocab, concat);
        const std::uint32_t target = 1;
        const auto loss = [&] {
            std::vector<std::vector<double>> gw;
            std::vector<double> gp, gb;
            EmbeddingMatrix go(vocab, concat);
            return context_loss_grad(context, paragraph, output, bias, target, gw, gp, go, gb);
        };
        context_loss_grad(context, paragraph, output, bias, target, grad_words, grad_paragraph,
                          grad_output, grad_bias);
        for (std::size_t k = 0; k < d; ++k) {
            worst = std::max(worst, oracle::rel_err(grad_words[0][k],
                                                    oracle::fd_central(word[k], 1e-5, loss)));
            worst = std::max(worst, oracle::rel_err(grad_paragraph[k],
                                                    oracle::fd_central(paragraph[k], 1e-5, loss)));
        }
        for (std::size_t i = 0; i < vocab; ++i) {
            worst = std::max(worst,
                             oracle::rel_err(grad_bias[i], oracle::fd_central(bias[i], 1e-5, loss)));
            const auto row = output.row(i);
            for (std::size_t j = 0; j < concat; ++j)
                worst = std::max(worst, oracle::rel_err(grad_output.row(i)[j],
                                                        oracle::fd_central(row[j], 1e-5, loss)));
        }
    }

    {  // logistic loss, d=5
        std::vector<std::vector<double>> xs;
        std::vector<double> ys;
        for (int i = 0; i < 12; ++i) {
            std::vector<double> x(5);
            for (double& v : x) v = (uniform01(rng) - 0.5) * 2.0;
            xs.push_back(x);
            ys.push_back(i % 2 ? 1.0 : 0.0);
        }
        std::vector<double> w(5), gw(5);
        for (double& v : w) v = uniform01(rng) - 0.5;
        double bias = 0.3, gb = 0.0;
        logistic_loss_grad(w, bias, xs, ys, 0.05, gw, gb);
        const auto loss = [&] { return logistic_loss(w, bias, xs, ys, 0.05); };
        for (std::size_t k = 0; k < 5; ++k)
            worst = std::max(worst, oracle::rel_err(gw[k], oracle::fd_central(w[k], 1e-5, loss)));
        worst = std::max(worst, oracle::rel_err(gb, oracle::fd_central(bias, 1e-5, loss)));
    }

    detail = strf(
        "gradient checks: worst relative error %.2e across skip-gram, "
        "paragraph-vector, and logistic losses (limit 1e-4)",
        worst);
    return worst < 1e-4;
}

// Structural-only pipeline on the pinned SBM beats every neighborhood
// baseline and clears the absolute AUC bar inside the time budget.
bool criterion5(std::string& detail) {
    const auto t0 = Clock::now();
    const fs::path dir = work_dir("sbm");
    const Graph g = gen::two_block_sbm(200, 0.10, 0.01, 42);
    {
        std::ofstream out(dir / "edges.tsv");
        write_edge_list(g, out);
    }
    PipelineConfig cfg;
    cfg.edges_path = (dir / "edges.tsv").string();
    cfg.output_dir = (dir / "out").string();
    cfg.directed = false;
    cfg.ablation = AblationMode::StructuralOnly;
    cfg.test_fraction = 0.10;
    cfg.walk_length = 40;
    cfg.walks_per_node = 10;
    cfg.struct_dim = 64;
    cfg.struct_window = 5;
    cfg.struct_epochs = 3;
    cfg.seed = 5;
    const EvaluationReport report = run_pipeline(cfg);

    double best_baseline = 0.0;
    std::string best_name = "none";
    for (const auto& [name, auc] : report.auc_baselines)
        if (auc > best_baseline) {
            best_baseline = auc;
            best_name = name;
        }
    const double secs = elapsed_s(t0);
    detail = strf(
        "SBM end-to-end: structural-only AUC %.4f (need >= 0.85) vs best baseline %s %.4f "
        "(need strictly above), %.1f s (limit 60)",
        report.auc_deeplink, best_name.c_str(), best_baseline, secs);
    return report.auc_deeplink >= 0.85 && report.auc_deeplink > best_baseline && secs < 60.0;
}

// Attributed graph whose planted links are half structural, half
// vocabulary-only: using both feature blocks must beat structural-only by
// at least 0.05 on the identical split.
bool criterion6(std::string& detail) {
    const fs::path dir = work_dir("attributed");
    Rng rng = make_rng(606);
    const std::size_t n = 200, half = 100;
    std::set<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool same_block = (i < half) == (j < half);
            if (uniform01(rng) < (same_block ? 0.03 : 0.002)) edges.insert({i, j});
        }
    // one vocabulary-only cross-block link per structural link; the shared
    // private words are each pair's only trace
    const std::size_t structural_links = edges.size();
    std::vector<std::vector<std::string>> words(n);
    for (std::size_t k = 0; k < structural_links; ++k) {
        std::size_t u = 0, v = 0;
        do {
            u = uniform_below(rng, half);
            v = half + uniform_below(rng, half);
        } while (edges.count({u, v}) != 0);
        edges.insert({u, v});
        for (int rep = 0; rep < 2; ++rep)
            for (int w = 0; w < 6; ++w)
                for (const std::size_t node : {u, v})
                    words[node].push_back("e" + std::to_string(k) + "w" + std::to_string(w));
    }
    {
        std::ofstream out(dir / "edges.tsv");
        for (const auto& [u, v] : edges)
            out << gen::node_token(u) << '\t' << gen::node_token(v) << '\n';
    }
    {
        std::ofstream out(dir / "content.jsonl");
        for (std::size_t i = 0; i < n; ++i) {
            if (words[i].empty()) continue;
            out << "{\"node\": \"" << gen::node_token(i) << "\", \"text\": \"";
            for (std::size_t t = 0; t < words[i].size(); ++t)
                out << (t ? " " : "") << words[i][t];
            out << "\"}\n";
        }
    }

    PipelineConfig cfg;
    cfg.edges_path = (dir / "edges.tsv").string();
    cfg.content_path = (dir / "content.jsonl").string();
    cfg.directed = false;
    cfg.test_fraction = 0.10;
    cfg.walk_length = 40;
    cfg.walks_per_node = 10;
    cfg.struct_dim = 64;
    cfg.struct_window = 5;
    cfg.struct_epochs = 3;
    cfg.content_dim = 32;
    cfg.content_window = 3;
    cfg.content_epochs = 50;
    cfg.seed = 6;

    PipelineConfig structural_cfg = cfg;
    structural_cfg.ablation = AblationMode::StructuralOnly;
    structural_cfg.output_dir = (dir / "structural").string();
    PipelineConfig both_cfg = cfg;
    both_cfg.ablation = AblationMode::Both;
    both_cfg.output_dir = (dir / "both").string();

    const EvaluationReport structural = run_pipeline(structural_cfg);
    const EvaluationReport both = run_pipeline(both_cfg);
    const bool same_split = slurp(dir / "structural" / "split.tsv") ==
                            slurp(dir / "both" / "split.tsv");
    const double gap = both.auc_deeplink - structural.auc_deeplink;
    detail = strf(
        "hybrid ablation: both %.4f vs structural-only %.4f on %zu+%zu planted links, "
        "gap %.4f (need >= 0.05), identical split %s",
        both.auc_deeplink, structural.auc_deeplink, structural_links, structural_links, gap,
        same_split ? "yes" : "NO");
    return gap >= 0.05 && same_split;
}

// Two identical single-threaded runs leave byte-identical artifacts.
bool criterion7(std::string& detail) {
    const fs::path dir = work_dir("determinism");
    Rng rng = make_rng(707);
    {
        std::ofstream edges(dir / "edges.tsv");
        for (int block = 0; block < 2; ++block)
            for (int i = 0; i < 20; ++i)
                for (int j = i + 1; j < 20; ++j)
                    if (uniform01(rng) < 0.3)
                        edges << "n" << (block * 20 + i) << "\tn" << (block * 20 + j) << "\n";
        edges << "n0\tn20\n";
        std::ofstream content(dir / "content.jsonl");
        for (int v = 0; v < 40; ++v) {
            content << "{\"node\": \"n" << v << "\", \"text\": \"";
            for (int t = 0; t < 6; ++t) content << "block" << (v / 20) << "word" << (t % 3) << " ";
            content << "\"}\n";
        }
    }
    PipelineConfig cfg;
    cfg.edges_path = (dir / "edges.tsv").string();
    cfg.content_path = (dir / "content.jsonl").string();
    cfg.output_dir = (dir / "out").string();
    cfg.directed = false;
    cfg.test_fraction = 0.2;
    cfg.walk_length = 10;
    cfg.walks_per_node = 4;
    cfg.struct_dim = 8;
    cfg.struct_window = 3;
    cfg.struct_epochs = 2;
    cfg.content_dim = 6;
    cfg.content_window = 2;
    cfg.content_epochs = 2;
    cfg.seed = 7;
    cfg.threads = 1;

    run_pipeline(cfg);
    const fs::path out(cfg.output_dir);
    const char* files[] = {"structural.emb", "content.emb", "split.tsv", "report.txt"};
    std::vector<std::string> first;
    for (const char* f : files) first.push_back(slurp(out / f));
    run_pipeline(cfg);
    std::string differing;
    for (std::size_t i = 0; i < 4; ++i)
        if (slurp(out / files[i]) != first[i]) differing += std::string(" ") + files[i];
    detail = strf("determinism: embeddings, split, and report %s across two identical runs%s",
                  differing.empty() ? "byte-identical" : "DIFFER", differing.c_str());
    return differing.empty();
}

// Every neighborhood score on every graph of up to six nodes equals the
// set-arithmetic oracle exactly.
bool criterion8(std::string& detail) {
    const ScoreKind kinds[] = {ScoreKind::CommonNeighbors, ScoreKind::Jaccard,
                               ScoreKind::AdamicAdar, ScoreKind::PreferentialAttachment,
                               ScoreKind::Sorensen};
    std::size_t graphs = 0, mismatches = 0;
    for (std::size_t n = 2; n <= 6; ++n) {
        const std::uint32_t masks = 1u << (n * (n - 1) / 2);
        for (std::uint32_t mask = 0; mask < masks; ++mask) {
            const Graph g = gen::graph_from_mask(n, mask);
            ++graphs;
            for (NodeId u = 0; u < n; ++u)
                for (NodeId v = u + 1; v < n; ++v)
                    for (const ScoreKind kind : kinds)
                        if (local_score(g, u, v, kind) != oracle::local_score(g, u, v, kind))
                            ++mismatches;
        }
    }
    detail = strf("baseline oracle: %zu mismatches over all %zu graphs up to six nodes, "
                  "five scores per pair",
                  mismatches, graphs);
    return mismatches == 0;
}

}  // namespace

int main() {
    struct Criterion {
        int number;
        bool (*fn)(std::string&);
    };
    const Criterion criteria[] = {{1, criterion1}, {2, criterion2}, {3, criterion3},
                                  {4, criterion4}, {5, criterion5}, {6, criterion6},
                                  {7, criterion7}, {8, criterion8}};
    int failures = 0;
    for (const auto& c : criteria) {
        std::string detail;
        bool ok = false;
        try {
            ok = c.fn(detail);
        } catch (const std::exception& e) {
            detail += strf("unexpected error: %s", e.what());
        }
        std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", c.number, detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
