#include "tracellm/path_features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tracellm {

SuspiciousMethodSet SuspiciousMethodSet::defaults() {
    SuspiciousMethodSet m;
    m.names_ = {
        "selfdestruct",     "fallback",    "receive",   "initialize", "transfer",
        "transferFrom",     "onlyOwner",   "hasRole",   "ecrecover",  "assert",
        "require",          "call",        "any",       "tokensReceived",
        "tokensToSend",     "balanceOf",   "sweepToken", "drain",
        "isOperationReady", "beforeCall",
    };
    return m;
}

SuspiciousMethodSet SuspiciousMethodSet::load(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("suspicious method set not found: " + path);
    SuspiciousMethodSet m;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (!line.empty())
            m.names_.insert(line);
    }
    if (m.names_.empty())
        throw ValidationError("suspicious method set is empty: " + path);
    return m;
}

bool SuspiciousMethodSet::matches(const std::string& method) const {
    if (names_.count(method))
        return true;
    // Unresolved selectors are rendered as 0x-prefixed hex.
    if (method.rfind("0x", 0) == 0 && names_.count("any"))
        return true;
    return false;
}

std::string PathCorpus::sig_key(const std::vector<std::string>& sig) {
    std::string key;
    for (const auto& t : sig) {
        key += t;
        key += '\x1f';
    }
    return key;
}

PathCorpus::PathCorpus(std::vector<std::vector<std::string>> sigs) : sigs_(std::move(sigs)) {
    for (const auto& sig : sigs_) {
        ++freq_[sig_key(sig)];
        std::set<std::string> distinct(sig.begin(), sig.end());
        for (const auto& t : distinct)
            ++df_[t];
    }
}

size_t PathCorpus::sig_count(const std::vector<std::string>& sig) const {
    auto it = freq_.find(sig_key(sig));
    return it == freq_.end() ? 0 : it->second;
}

size_t PathCorpus::document_frequency(const std::string& token) const {
    auto it = df_.find(token);
    return it == df_.end() ? 0 : it->second;
}

PathCorpus corpus_from_paths(const std::vector<ExecPath>& paths) {
    std::vector<std::vector<std::string>> sigs;
    sigs.reserve(paths.size());
    for (const auto& p : paths)
        sigs.push_back(p.sig);
    return PathCorpus(std::move(sigs));
}

size_t fanout(const CallForest& forest, const ExecPath& path) {
    size_t sum = 0;
    for (size_t id : path.nodes)
        sum += out_degree(forest.node(id));
    return sum;
}

size_t depth(const ExecPath& path) { return path.nodes.size(); }

size_t frequency(const ExecPath& path, const PathCorpus& corpus) {
    size_t n = corpus.sig_count(path.sig);
    if (n == 0)
        throw ValidationError("path signature not present in corpus");
    return n;
}

double semantic_anomaly(const ExecPath& path, const SuspiciousMethodSet& m) {
    if (path.sig.empty())
        return 0.0;
    size_t hits = 0;
    for (const auto& method : path.sig)
        if (m.matches(method))
            ++hits;
    return static_cast<double>(hits) / static_cast<double>(path.sig.size());
}

std::map<std::string, double> tfidf(const ExecPath& path, const PathCorpus& corpus) {
    std::map<std::string, double> out;
    if (path.sig.empty())
        return out;
    std::map<std::string, size_t> counts;
    for (const auto& t : path.sig)
        ++counts[t];
    const double len = static_cast<double>(path.sig.size());
    const double n_docs = static_cast<double>(corpus.size());
    for (const auto& [token, count] : counts) {
        double tf = static_cast<double>(count) / len;
        double idf = std::log(n_docs / (1.0 + static_cast<double>(
                                                  corpus.document_frequency(token))));
        out[token] = tf * idf;
    }
    return out;
}

PathFeatures compute_features(const CallForest& forest, const ExecPath& path,
                              const PathCorpus& corpus, const SuspiciousMethodSet& m) {
    PathFeatures pf;
    pf.fanout = fanout(forest, path);
    pf.depth = depth(path);
    pf.raw_frequency = frequency(path, corpus);
    pf.inv_frequency = 1.0 / static_cast<double>(pf.raw_frequency);
    pf.semantic = semantic_anomaly(path, m);
    pf.tfidf = tfidf(path, corpus);
    return pf;
}

std::vector<PathFeatures> extract_features_serial(const CallForest& forest,
                                                  const std::vector<ExecPath>& paths,
                                                  const PathCorpus& corpus,
                                                  const SuspiciousMethodSet& m) {
    std::vector<PathFeatures> out(paths.size());
    for (size_t i = 0; i < paths.size(); ++i)
        out[i] = compute_features(forest, paths[i], corpus, m);
    return out;
}

std::vector<PathFeatures> extract_features_omp(const CallForest& forest,
                                               const std::vector<ExecPath>& paths,
                                               const PathCorpus& corpus,
                                               const SuspiciousMethodSet& m) {
    std::vector<PathFeatures> out(paths.size());
    const int64_t n = static_cast<int64_t>(paths.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (int64_t i = 0; i < n; ++i)
        out[i] = compute_features(forest, paths[i], corpus, m);
    return out;
}

std::vector<std::string> build_vocab(const std::map<std::string, size_t>& document_frequencies,
                                     size_t max_tokens) {
    std::vector<std::pair<std::string, size_t>> items(document_frequencies.begin(),
                                                      document_frequencies.end());
    std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second)
            return a.second > b.second;
        return a.first < b.first;
    });
    std::vector<std::string> vocab;
    vocab.reserve(std::min(max_tokens, items.size()));
    for (const auto& [token, df] : items) {
        if (vocab.size() >= max_tokens)
            break;
        vocab.push_back(token);
    }
    return vocab;
}

ScalerBounds scaler_bounds(const std::vector<PathFeatures>& features) {
    ScalerBounds b;
    if (features.empty())
        return b;
    b.fanout_min = b.fanout_max = static_cast<double>(features[0].fanout);
    b.depth_min = b.depth_max = static_cast<double>(features[0].depth);
    for (const auto& f : features) {
        b.fanout_min = std::min(b.fanout_min, static_cast<double>(f.fanout));
        b.fanout_max = std::max(b.fanout_max, static_cast<double>(f.fanout));
        b.depth_min = std::min(b.depth_min, static_cast<double>(f.depth));
        b.depth_max = std::max(b.depth_max, static_cast<double>(f.depth));
    }
    return b;
}

namespace {

double min_max(double v, double lo, double hi) {
    if (hi <= lo)
        return 0.0;  // constant column
    return (v - lo) / (hi - lo);
}

}  // namespace

std::vector<double> assemble_vector(const PathFeatures& pf,
                                    const std::vector<std::string>& vocab,
                                    const ScalerBounds& bounds) {
    std::vector<double> x;
    x.reserve(4 + vocab.size());
    x.push_back(min_max(static_cast<double>(pf.fanout), bounds.fanout_min, bounds.fanout_max));
    x.push_back(min_max(static_cast<double>(pf.depth), bounds.depth_min, bounds.depth_max));
    x.push_back(pf.inv_frequency);
    x.push_back(pf.semantic);
    for (const auto& token : vocab) {
        auto it = pf.tfidf.find(token);
        x.push_back(it == pf.tfidf.end() ? 0.0 : it->second);
    }
    return x;
}

}  // namespace tracellm
