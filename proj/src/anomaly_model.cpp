#include "tracellm/anomaly_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>

namespace tracellm {

using nlohmann::json;

std::string TrainConfig::digest() const {
    json j = {{"learning_rate", learning_rate}, {"l2_strength", l2_strength},
              {"grad_tolerance", grad_tolerance}, {"max_iterations", max_iterations},
              {"class_weights", class_weights}, {"vocab_size", vocab_size}};
    // FNV-1a over the canonical encoding
    uint64_t h = 14695981039346656037ull;
    for (unsigned char c : j.dump()) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json AnomalyModel::to_json() const {
    json j;
    j["weights"] = weights;
    j["bias"] = bias;
    j["vocab"] = vocab;
    j["scaler_bounds"] = {{"fanout_min", scaler_bounds.fanout_min},
                          {"fanout_max", scaler_bounds.fanout_max},
                          {"depth_min", scaler_bounds.depth_min},
                          {"depth_max", scaler_bounds.depth_max}};
    j["config_digest"] = config_digest;
    return j;
}

AnomalyModel AnomalyModel::from_json(const json& j) {
    AnomalyModel m;
    m.weights = j.at("weights").get<std::vector<double>>();
    m.bias = j.at("bias").get<double>();
    m.vocab = j.at("vocab").get<std::vector<std::string>>();
    const auto& sb = j.at("scaler_bounds");
    m.scaler_bounds.fanout_min = sb.at("fanout_min").get<double>();
    m.scaler_bounds.fanout_max = sb.at("fanout_max").get<double>();
    m.scaler_bounds.depth_min = sb.at("depth_min").get<double>();
    m.scaler_bounds.depth_max = sb.at("depth_max").get<double>();
    m.config_digest = j.value("config_digest", "");
    return m;
}

void AnomalyModel::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out)
        throw ValidationError("cannot write model file: " + path);
    out << to_json().dump(2) << "\n";
}

AnomalyModel AnomalyModel::load(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot read model file: " + path);
    return from_json(json::parse(in));
}

double sigmoid(double score) {
    if (score >= 0.0)
        return 1.0 / (1.0 + std::exp(-score));
    double e = std::exp(score);
    return e / (1.0 + e);
}

namespace {

// log(1 + exp(s)) without overflow
double log1p_exp(double s) {
    if (s > 0.0)
        return s + std::log1p(std::exp(-s));
    return std::log1p(std::exp(s));
}

std::vector<double> sample_weights(const std::vector<TrainSample>& data, bool enabled) {
    std::vector<double> w(data.size(), 1.0);
    if (!enabled)
        return w;
    size_t pos = 0;
    for (const auto& s : data)
        pos += static_cast<size_t>(s.label);
    size_t neg = data.size() - pos;
    double n = static_cast<double>(data.size());
    for (size_t i = 0; i < data.size(); ++i)
        w[i] = data[i].label ? n / (2.0 * static_cast<double>(pos))
                             : n / (2.0 * static_cast<double>(neg));
    return w;
}

}  // namespace

double training_loss(const std::vector<TrainSample>& data, const std::vector<double>& w,
                     double b, const TrainConfig& cfg) {
    auto sw = sample_weights(data, cfg.class_weights);
    double loss = 0.0;
    for (size_t i = 0; i < data.size(); ++i) {
        double s = b;
        for (size_t j = 0; j < w.size(); ++j)
            s += w[j] * data[i].x[j];
        // -y*log(p) - (1-y)*log(1-p) = log(1+exp(s)) - y*s
        loss += sw[i] * (log1p_exp(s) - static_cast<double>(data[i].label) * s);
    }
    loss /= static_cast<double>(data.size());
    double reg = 0.0;
    for (double wj : w)
        reg += wj * wj;
    return loss + 0.5 * cfg.l2_strength * reg;
}

std::vector<double> training_gradient(const std::vector<TrainSample>& data,
                                      const std::vector<double>& w, double b,
                                      const TrainConfig& cfg) {
    auto sw = sample_weights(data, cfg.class_weights);
    // Serial on purpose: training must be deterministic down to the bit, and
    // parallel reduction would reorder the floating-point sums.
    std::vector<double> grad(w.size() + 1, 0.0);
    for (size_t i = 0; i < data.size(); ++i) {
        double s = b;
        for (size_t j = 0; j < w.size(); ++j)
            s += w[j] * data[i].x[j];
        double residual = sw[i] * (sigmoid(s) - static_cast<double>(data[i].label));
        for (size_t j = 0; j < w.size(); ++j)
            grad[j] += residual * data[i].x[j];
        grad[w.size()] += residual;
    }
    for (auto& g : grad)
        g /= static_cast<double>(data.size());
    for (size_t j = 0; j < w.size(); ++j)
        grad[j] += cfg.l2_strength * w[j];
    return grad;
}

AnomalyModel train(const std::vector<TrainSample>& data, const TrainConfig& cfg) {
    if (data.empty())
        throw ValidationError("empty training set");
    size_t dim = data[0].x.size();
    bool has_pos = false, has_neg = false;
    for (const auto& s : data) {
        if (s.x.size() != dim)
            throw ValidationError("inconsistent feature dimensions in training set");
        for (double v : s.x)
            if (!std::isfinite(v))
                throw ValidationError("non-finite feature value in training set");
        (s.label ? has_pos : has_neg) = true;
    }
    if (!has_pos || !has_neg)
        throw ValidationError("training set must contain both classes");

    std::vector<double> w(dim, 0.0);
    double b = 0.0;
    for (size_t it = 0; it < cfg.max_iterations; ++it) {
        auto grad = training_gradient(data, w, b, cfg);
        double norm = 0.0;
        for (double g : grad)
            norm += g * g;
        if (std::sqrt(norm) < cfg.grad_tolerance)
            break;
        for (size_t j = 0; j < dim; ++j)
            w[j] -= cfg.learning_rate * grad[j];
        b -= cfg.learning_rate * grad[dim];
    }
    AnomalyModel model;
    model.weights = std::move(w);
    model.bias = b;
    model.config_digest = cfg.digest();
    return model;
}

double predict(const AnomalyModel& model, const std::vector<double>& x) {
    if (x.size() != model.weights.size())
        throw ValidationError("feature dimension mismatch: got " + std::to_string(x.size()) +
                              ", model expects " + std::to_string(model.weights.size()));
    double s = model.bias;
    for (size_t j = 0; j < x.size(); ++j)
        s += model.weights[j] * x[j];
    return sigmoid(s);
}

json LabeledPath::to_json() const {
    json j;
    j["incident_id"] = incident_id;
    j["tx_hash"] = tx_hash;
    j["path_key"] = path_key;
    j["sig"] = sig;
    j["fanout"] = fanout;
    j["depth"] = depth;
    j["label"] = label ? "attack" : "benign";
    return j;
}

LabeledPath LabeledPath::from_json(const json& j) {
    LabeledPath p;
    p.incident_id = j.at("incident_id").get<std::string>();
    p.tx_hash = j.at("tx_hash").get<std::string>();
    p.path_key = j.at("path_key").get<std::string>();
    p.sig = j.at("sig").get<std::vector<std::string>>();
    p.fanout = j.at("fanout").get<size_t>();
    p.depth = j.at("depth").get<size_t>();
    std::string label = j.at("label").get<std::string>();
    if (label != "attack" && label != "benign")
        throw ValidationError("label must be attack or benign");
    p.label = label == "attack" ? 1 : 0;
    return p;
}

std::vector<LabeledPath> load_jsonl_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("dataset not found: " + path);
    std::vector<LabeledPath> out;
    std::string line;
    size_t line_no = 0;
    std::set<std::string> seen_keys;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw ValidationError("malformed JSONL at line " + std::to_string(line_no));
        try {
            out.push_back(LabeledPath::from_json(j));
        } catch (const json::exception& e) {
            throw ValidationError("malformed record at line " + std::to_string(line_no) + ": " +
                                  e.what());
        }
        if (!seen_keys.insert(out.back().path_key).second)
            throw ValidationError("duplicate path_key at line " + std::to_string(line_no));
    }
    return out;
}

void save_jsonl_dataset(const std::string& path, const std::vector<LabeledPath>& paths) {
    std::ofstream out(path);
    if (!out)
        throw ValidationError("cannot write dataset: " + path);
    for (const auto& p : paths)
        out << p.to_json().dump() << "\n";
}

RankingResult rank_paths(std::vector<ScoredPath> paths, size_t cutoff,
                         const std::string& incident_id) {
    if (cutoff < 1)
        throw ValidationError("cutoff must be >= 1");
    std::sort(paths.begin(), paths.end(), [](const ScoredPath& a, const ScoredPath& b) {
        if (a.probability != b.probability)
            return a.probability > b.probability;
        if (a.semantic != b.semantic)
            return a.semantic > b.semantic;
        return a.path_key < b.path_key;
    });
    RankingResult r;
    r.incident_id = incident_id;
    r.cutoff = cutoff;
    for (const auto& p : paths)
        r.ranked.emplace_back(p.path_key, p.probability);
    return r;
}

double recall_at_k(const RankingResult& ranking, const std::set<std::string>& ground_truth) {
    if (ground_truth.empty())
        throw ValidationError("recall undefined for empty ground truth");
    size_t hits = 0;
    size_t k = std::min(ranking.cutoff, ranking.ranked.size());
    for (size_t i = 0; i < k; ++i)
        if (ground_truth.count(ranking.ranked[i].first))
            ++hits;
    return static_cast<double>(hits) / static_cast<double>(ground_truth.size());
}

double incident_semantic(const LabeledPath& p, const SuspiciousMethodSet& m) {
    if (p.sig.empty())
        return 0.0;
    size_t hits = 0;
    for (const auto& method : p.sig)
        if (m.matches(method))
            ++hits;
    return static_cast<double>(hits) / static_cast<double>(p.sig.size());
}

std::vector<std::vector<double>> incident_feature_matrix(
    const std::vector<LabeledPath>& incident, const std::vector<std::string>& vocab,
    const SuspiciousMethodSet& m) {
    std::vector<std::vector<std::string>> sigs;
    sigs.reserve(incident.size());
    for (const auto& p : incident)
        sigs.push_back(p.sig);
    PathCorpus corpus(std::move(sigs));

    std::vector<PathFeatures> feats(incident.size());
    for (size_t i = 0; i < incident.size(); ++i) {
        const auto& p = incident[i];
        ExecPath ep;
        ep.sig = p.sig;
        PathFeatures pf;
        pf.fanout = p.fanout;
        pf.depth = p.depth;
        pf.raw_frequency = corpus.sig_count(p.sig);
        pf.inv_frequency = 1.0 / static_cast<double>(pf.raw_frequency);
        pf.semantic = incident_semantic(p, m);
        pf.tfidf = tfidf(ep, corpus);
        feats[i] = std::move(pf);
    }
    ScalerBounds bounds = scaler_bounds(feats);
    std::vector<std::vector<double>> out;
    out.reserve(incident.size());
    for (const auto& f : feats)
        out.push_back(assemble_vector(f, vocab, bounds));
    return out;
}

namespace {

std::vector<std::string> vocab_from_incidents(
    const std::map<std::string, std::vector<LabeledPath>>& incidents,
    const std::string& exclude, size_t max_tokens) {
    std::map<std::string, size_t> df;
    for (const auto& [id, paths] : incidents) {
        if (id == exclude)
            continue;
        for (const auto& p : paths) {
            std::set<std::string> distinct(p.sig.begin(), p.sig.end());
            for (const auto& t : distinct)
                ++df[t];
        }
    }
    return build_vocab(df, max_tokens);
}

}  // namespace

LogoResult logo_evaluate_scorer(const std::map<std::string, std::vector<LabeledPath>>& incidents,
                                const Scorer& scorer, size_t cutoff) {
    if (incidents.size() < 2)
        throw ValidationError("LOGO requires at least 2 incident groups");
    LogoResult result;
    double sum = 0.0;
    size_t counted = 0;
    SuspiciousMethodSet m = SuspiciousMethodSet::defaults();
    for (const auto& [id, paths] : incidents) {
        LogoFold fold;
        fold.incident_id = id;
        std::set<std::string> gt;
        for (const auto& p : paths)
            if (p.label)
                gt.insert(p.path_key);
        if (gt.empty()) {
            fold.skipped = true;
            std::cerr << "warning: incident " << id << " has no attack paths, fold skipped\n";
            result.folds.push_back(fold);
            continue;
        }
        auto scores = scorer(paths);
        std::vector<ScoredPath> scored;
        scored.reserve(paths.size());
        for (size_t i = 0; i < paths.size(); ++i)
            scored.push_back({paths[i].path_key, scores[i], incident_semantic(paths[i], m)});
        fold.recall = recall_at_k(rank_paths(std::move(scored), cutoff, id), gt);
        sum += fold.recall;
        ++counted;
        result.folds.push_back(fold);
    }
    result.mean_recall = counted ? sum / static_cast<double>(counted) : 0.0;
    return result;
}

LogoResult logo_evaluate(const std::map<std::string, std::vector<LabeledPath>>& incidents,
                         const TrainConfig& cfg, size_t cutoff) {
    if (incidents.size() < 2)
        throw ValidationError("LOGO requires at least 2 incident groups");
    SuspiciousMethodSet m = SuspiciousMethodSet::defaults();
    LogoResult result;
    double sum = 0.0;
    size_t counted = 0;
    for (const auto& [held_out, held_paths] : incidents) {
        LogoFold fold;
        fold.incident_id = held_out;
        std::set<std::string> gt;
        for (const auto& p : held_paths)
            if (p.label)
                gt.insert(p.path_key);
        if (gt.empty()) {
            fold.skipped = true;
            std::cerr << "warning: incident " << held_out
                      << " has no attack paths, fold skipped\n";
            result.folds.push_back(fold);
            continue;
        }
        auto vocab = vocab_from_incidents(incidents, held_out, cfg.vocab_size);
        std::vector<TrainSample> samples;
        for (const auto& [id, paths] : incidents) {
            if (id == held_out)
                continue;
            auto xs = incident_feature_matrix(paths, vocab, m);
            for (size_t i = 0; i < paths.size(); ++i)
                samples.push_back({std::move(xs[i]), paths[i].label});
        }
        AnomalyModel model = train(samples, cfg);
        auto xs = incident_feature_matrix(held_paths, vocab, m);
        std::vector<ScoredPath> scored;
        for (size_t i = 0; i < held_paths.size(); ++i)
            scored.push_back({held_paths[i].path_key, predict(model, xs[i]),
                              incident_semantic(held_paths[i], m)});
        fold.recall = recall_at_k(rank_paths(std::move(scored), cutoff, held_out), gt);
        sum += fold.recall;
        ++counted;
        result.folds.push_back(fold);
    }
    result.mean_recall = counted ? sum / static_cast<double>(counted) : 0.0;
    return result;
}

Scorer baseline_semantic_scorer(const SuspiciousMethodSet& m) {
    return [m](const std::vector<LabeledPath>& paths) {
        std::vector<double> out;
        out.reserve(paths.size());
        for (const auto& p : paths)
            out.push_back(incident_semantic(p, m));
        return out;
    };
}

}  // namespace tracellm
