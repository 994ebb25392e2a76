#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "deeplink/embedding.hpp"
#include "deeplink/features.hpp"
#include "deeplink/predictor.hpp"

namespace deeplink {

struct PipelineConfig {
    std::string edges_path;
    std::string snapshot2_path;  // temporal evaluation when set
    std::string content_path;    // content features when set
    std::string output_dir = "deeplink-out";
    bool directed = true;
    double default_weight = 1.0;

    double alpha = 0.2;
    std::uint32_t walk_length = 80;
    std::uint32_t walks_per_node = 10;

    std::uint32_t struct_dim = 100;
    std::uint32_t struct_window = 10;
    std::uint32_t struct_epochs = 5;
    std::uint32_t content_dim = 100;
    std::uint32_t content_window = 10;
    std::uint32_t content_epochs = 5;
    std::uint32_t negatives = 5;
    double lr_initial = 0.025;
    double lr_final = 0.0001;

    double test_fraction = 0.1;  // random-removal mode only

    double classifier_lr = 0.1;
    std::uint32_t classifier_epochs = 300;
    double l2 = 1e-4;
    std::uint32_t batch_size = 32;

    AblationMode ablation = AblationMode::Both;
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

std::string_view ablation_name(AblationMode mode);
AblationMode parse_ablation(std::string_view name);

struct EvaluationReport {
    PipelineConfig config;
    std::size_t nodes = 0;
    std::size_t training_edges = 0;
    std::size_t communities = 0;
    double modularity_q = 0.0;
    std::size_t positive_train = 0;
    std::size_t positive_test = 0;
    std::size_t dropped_unseen = 0;
    double final_train_loss = 0.0;
    double auc_deeplink = 0.0;
    std::vector<std::pair<std::string, double>> auc_baselines;  // cn, jaccard, aa, pa, sorensen

    // Human-readable table followed by machine-readable key=value sections.
    // Deterministic byte-for-byte for a fixed config and seed.
    std::string to_text() const;
};

// Hadamard edge features for the given pairs.
std::vector<std::vector<double>> edge_features(const EmbeddingMatrix& structural,
                                               const EmbeddingMatrix& content,
                                               std::span<const NodePair> pairs,
                                               AblationMode mode);

void write_model(const std::filesystem::path& path, const LogisticModel& m);
LogisticModel read_model(const std::filesystem::path& path);

// ingest -> split -> communities -> walks -> embeddings -> features ->
// classifier -> evaluation. Artifacts land in config.output_dir as soon as
// each stage finishes; errors carry the failing stage's name.
EvaluationReport run_pipeline(const PipelineConfig& config);

enum class SweepAxis { Structural, Content };

struct SweepRow {
    std::uint32_t dimension;
    double auc;
};

// Re-runs the pipeline once per dimension value along the chosen axis.
std::vector<SweepRow> sweep_dimension(const PipelineConfig& config,
                                      std::span<const std::uint32_t> values, SweepAxis axis);

std::string sweep_table(std::span<const SweepRow> rows);

}  // namespace deeplink
