#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "tracellm/call_tree.hpp"

namespace tracellm {

// Normalized bare method names considered security-critical. "any" stands
// for low-level call edges whose selector could not be resolved (rendered
// as 0x-prefixed hex).
class SuspiciousMethodSet {
public:
    static SuspiciousMethodSet defaults();
    static SuspiciousMethodSet load(const std::string& path);

    bool matches(const std::string& method) const;
    size_t size() const { return names_.size(); }

private:
    std::set<std::string> names_;
};

// All root-to-leaf paths of one incident, with document statistics.
class PathCorpus {
public:
    explicit PathCorpus(std::vector<std::vector<std::string>> sigs);

    size_t size() const { return sigs_.size(); }
    const std::vector<std::vector<std::string>>& sigs() const { return sigs_; }

    size_t sig_count(const std::vector<std::string>& sig) const;
    size_t document_frequency(const std::string& token) const;
    const std::map<std::string, size_t>& document_frequencies() const { return df_; }

    static std::string sig_key(const std::vector<std::string>& sig);

private:
    std::vector<std::vector<std::string>> sigs_;
    std::map<std::string, size_t> freq_;  // sig key -> occurrence count
    std::map<std::string, size_t> df_;    // token -> documents containing it
};

PathCorpus corpus_from_paths(const std::vector<ExecPath>& paths);

struct PathFeatures {
    size_t fanout = 0;
    size_t depth = 0;
    size_t raw_frequency = 1;
    double inv_frequency = 1.0;
    double semantic = 0.0;
    std::map<std::string, double> tfidf;
};

size_t fanout(const CallForest& forest, const ExecPath& path);
size_t depth(const ExecPath& path);
size_t frequency(const ExecPath& path, const PathCorpus& corpus);
double semantic_anomaly(const ExecPath& path, const SuspiciousMethodSet& m);
std::map<std::string, double> tfidf(const ExecPath& path, const PathCorpus& corpus);

PathFeatures compute_features(const CallForest& forest, const ExecPath& path,
                              const PathCorpus& corpus, const SuspiciousMethodSet& m);

// Per-incident feature extraction over the whole corpus. The OpenMP kernel
// and the serial reference must agree exactly; see the benchmark target.
std::vector<PathFeatures> extract_features_serial(const CallForest& forest,
                                                  const std::vector<ExecPath>& paths,
                                                  const PathCorpus& corpus,
                                                  const SuspiciousMethodSet& m);
std::vector<PathFeatures> extract_features_omp(const CallForest& forest,
                                               const std::vector<ExecPath>& paths,
                                               const PathCorpus& corpus,
                                               const SuspiciousMethodSet& m);

// Token list ordered by descending document frequency (ties lexicographic),
// truncated to max_tokens.
std::vector<std::string> build_vocab(const std::map<std::string, size_t>& document_frequencies,
                                     size_t max_tokens = 512);

// Per-incident min-max bounds for the scalar features.
struct ScalerBounds {
    double fanout_min = 0, fanout_max = 0;
    double depth_min = 0, depth_max = 0;
};

ScalerBounds scaler_bounds(const std::vector<PathFeatures>& features);

// Layout: [fanout_scaled, depth_scaled, inv_frequency, semantic, tfidf...];
// dimension 4 + |vocab|. Constant scalar columns map to 0; out-of-vocabulary
// tokens are dropped.
std::vector<double> assemble_vector(const PathFeatures& pf,
                                    const std::vector<std::string>& vocab,
                                    const ScalerBounds& bounds);

}  // namespace tracellm
