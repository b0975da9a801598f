#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "tracellm/path_features.hpp"

namespace tracellm {

struct TrainConfig {
    double learning_rate = 0.1;
    double l2_strength = 1e-4;
    double grad_tolerance = 1e-8;
    size_t max_iterations = 10000;
    bool class_weights = false;
    size_t vocab_size = 512;

    std::string digest() const;
};

struct AnomalyModel {
    std::vector<double> weights;  // dimension 4 + |vocab|
    double bias = 0.0;
    std::vector<std::string> vocab;
    ScalerBounds scaler_bounds;  // training-corpus bounds, informational
    std::string config_digest;

    nlohmann::json to_json() const;
    static AnomalyModel from_json(const nlohmann::json& j);
    void save(const std::string& path) const;
    static AnomalyModel load(const std::string& path);
};

struct TrainSample {
    std::vector<double> x;
    int label = 0;  // 1 = attack, 0 = benign
};

// L2-regularized negative log-likelihood and its analytic gradient; the
// gradient layout is [d/dw..., d/db].
double training_loss(const std::vector<TrainSample>& data, const std::vector<double>& w,
                     double b, const TrainConfig& cfg);
std::vector<double> training_gradient(const std::vector<TrainSample>& data,
                                      const std::vector<double>& w, double b,
                                      const TrainConfig& cfg);

AnomalyModel train(const std::vector<TrainSample>& data, const TrainConfig& cfg);

double sigmoid(double score);
double predict(const AnomalyModel& model, const std::vector<double>& x);

struct LabeledPath {
    std::string incident_id;
    TxHash tx_hash;
    std::string path_key;  // tx_hash + ":" + leaf record index
    std::vector<std::string> sig;
    size_t fanout = 0;
    size_t depth = 1;
    int label = 0;

    nlohmann::json to_json() const;
    static LabeledPath from_json(const nlohmann::json& j);
};

std::vector<LabeledPath> load_jsonl_dataset(const std::string& path);
void save_jsonl_dataset(const std::string& path, const std::vector<LabeledPath>& paths);

struct ScoredPath {
    std::string path_key;
    double probability = 0.0;
    double semantic = 0.0;  // tie-break key
};

struct RankingResult {
    std::string incident_id;
    std::vector<std::pair<std::string, double>> ranked;  // descending probability
    size_t cutoff = 20;
};

// Descending probability; ties broken by higher semantic, then lower path_key.
RankingResult rank_paths(std::vector<ScoredPath> paths, size_t cutoff = 20,
                         const std::string& incident_id = "");

double recall_at_k(const RankingResult& ranking, const std::set<std::string>& ground_truth);

// Per-incident feature vectors under a fixed vocabulary; scalar features are
// min-max scaled within the incident.
std::vector<std::vector<double>> incident_feature_matrix(
    const std::vector<LabeledPath>& incident, const std::vector<std::string>& vocab,
    const SuspiciousMethodSet& m);

double incident_semantic(const LabeledPath& p, const SuspiciousMethodSet& m);

// Scores one incident's paths; higher = more anomalous.
using Scorer = std::function<std::vector<double>(const std::vector<LabeledPath>&)>;

struct LogoFold {
    std::string incident_id;
    double recall = 0.0;
    bool skipped = false;  // incident had no attack paths
};

struct LogoResult {
    std::vector<LogoFold> folds;
    double mean_recall = 0.0;
};

// Leave-one-group-out over incident groups with a model trained per fold.
LogoResult logo_evaluate(const std::map<std::string, std::vector<LabeledPath>>& incidents,
                         const TrainConfig& cfg, size_t cutoff = 20);

// LOGO with an externally supplied scorer (no training).
LogoResult logo_evaluate_scorer(const std::map<std::string, std::vector<LabeledPath>>& incidents,
                                const Scorer& scorer, size_t cutoff = 20);

// Univariate statistical baseline: score = semantic anomaly density.
Scorer baseline_semantic_scorer(const SuspiciousMethodSet& m);

}  // namespace tracellm
