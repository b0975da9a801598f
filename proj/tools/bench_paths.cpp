// Compares the OpenMP feature-extraction kernel against the serial reference
// on generated workloads, checking exact agreement and reporting speedup.
#include <chrono>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "tracellm/path_features.hpp"
#include "tracellm/synth.hpp"

using namespace tracellm;

namespace {

// One big synthetic forest: many independent chains under a root.
std::vector<CallRecord> workload(std::mt19937_64& rng, size_t n_chains, size_t chain_len) {
    std::vector<std::string> tokens = {"transfer", "swap",  "approve", "sync",
                                       "deposit",  "drain", "require", "balanceOf"};
    std::vector<CallRecord> records;
    auto emit = [&](const Address& from, const std::string& method) {
        CallRecord r;
        r.index = records.size();
        char buf[64];
        snprintf(buf, sizeof(buf), "0x%040zx", records.size() + 1);
        r.from = from;
        r.to = buf;
        r.method = method;
        records.push_back(r);
        return r.index;
    };
    size_t root = emit("0x" + std::string(40, '0'), "execute");
    for (size_t c = 0; c < n_chains; ++c) {
        size_t parent = root;
        for (size_t d = 0; d < chain_len; ++d)
            parent = emit(records[parent].to, tokens[rng() % tokens.size()]);
    }
    return records;
}

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

bool features_equal(const std::vector<PathFeatures>& a, const std::vector<PathFeatures>& b) {
    if (a.size() != b.size())
        return false;
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].fanout != b[i].fanout || a[i].depth != b[i].depth ||
            a[i].raw_frequency != b[i].raw_frequency ||
            a[i].inv_frequency != b[i].inv_frequency || a[i].semantic != b[i].semantic ||
            a[i].tfidf != b[i].tfidf)
            return false;
    }
    return true;
}

}  // namespace

int main() {
    std::mt19937_64 rng(7);
    SuspiciousMethodSet susp = SuspiciousMethodSet::defaults();

    struct Case {
        size_t chains, len;
    };
    std::vector<Case> cases = {{500, 10}, {2000, 20}, {5000, 30}};

    printf("%-22s %10s %12s %12s %9s %7s\n", "workload", "paths", "serial_ms", "omp_ms",
           "speedup", "equal");
    for (const auto& c : cases) {
        auto records = workload(rng, c.chains, c.len);
        auto forest = build_forest(records);
        auto paths = enumerate_paths(forest);
        auto corpus = corpus_from_paths(paths);

        auto t0 = std::chrono::steady_clock::now();
        auto serial = extract_features_serial(forest, paths, corpus, susp);
        double serial_ms = ms_since(t0);

        t0 = std::chrono::steady_clock::now();
        auto parallel = extract_features_omp(forest, paths, corpus, susp);
        double omp_ms = ms_since(t0);

        bool equal = features_equal(serial, parallel);
        char name[64];
        snprintf(name, sizeof(name), "%zu chains x %zu", c.chains, c.len);
        printf("%-22s %10zu %12.2f %12.2f %8.2fx %7s\n", name, paths.size(), serial_ms, omp_ms,
               omp_ms > 0 ? serial_ms / omp_ms : 0.0, equal ? "yes" : "NO");
        if (!equal)
            return 1;
    }
    return 0;
}
