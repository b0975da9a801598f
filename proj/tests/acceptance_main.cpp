// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure. Pinned tolerances are stated inline next to each check.
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "tracellm/anomaly_model.hpp"
#include "tracellm/chain_access.hpp"
#include "tracellm/chain_detect.hpp"
#include "tracellm/enclosing_subgraph.hpp"
#include "tracellm/gateway.hpp"
#include "tracellm/path_features.hpp"
#include "tracellm/synth.hpp"
#include "tracellm/trace_model.hpp"

using namespace tracellm;
using testutil::addr_n;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    printf("CRITERION %d: %s — %s\n", criterion, pass ? "PASS" : "FAIL", detail.c_str());
    if (!pass)
        ++g_failures;
    fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// --- 1: call-tree round trip ------------------------------------------------
void criterion_1() {
    std::mt19937_64 rng(1);
    auto t0 = std::chrono::steady_clock::now();
    size_t ok = 0;
    const size_t trials = 1000;
    for (size_t i = 0; i < trials; ++i) {
        auto g = testutil::random_forest(rng, 200);
        auto f = build_forest(g.records);
        bool same = testutil::same_structure(g, f);
        auto flat = f.flatten_records();
        same = same && flat.size() == g.records.size();
        for (size_t j = 0; same && j < flat.size(); ++j)
            same = flat[j].to == g.records[j].to && flat[j].from == g.records[j].from &&
                   flat[j].index == j;
        if (same)
            ++ok;
    }
    double secs = seconds_since(t0);
    char buf[160];
    snprintf(buf, sizeof(buf),
             "round trip reproduced %zu/%zu random forests (<=200 nodes) in %.2fs (limit 10s)",
             ok, trials, secs);
    report(1, ok == trials && secs < 10.0, buf);
}

// --- 2: feature oracle equivalence -------------------------------------------
struct NaivePath {
    std::vector<size_t> nodes;
    std::vector<std::string> sig;
};

void naive_dfs(const CallForest& f, size_t node, std::vector<size_t>& stack,
               std::vector<NaivePath>& out) {
    stack.push_back(node);
    if (f.node(node).children.empty()) {
        NaivePath p;
        p.nodes = stack;
        for (size_t i = 1; i < stack.size(); ++i)
            p.sig.push_back(f.node(stack[i]).record.method);
        out.push_back(p);
    }
    for (size_t c : f.node(node).children)
        naive_dfs(f, c, stack, out);
    stack.pop_back();
}

void criterion_2() {
    std::mt19937_64 rng(2);
    auto susp = SuspiciousMethodSet::defaults();
    std::vector<std::string> methods = {"transfer", "swap", "drain", "approve", "0xdeadbeef"};
    size_t forests_ok = 0;
    const size_t trials = 500;
    bool all_ok = true;
    for (size_t iter = 0; iter < trials; ++iter) {
        auto g = testutil::random_forest(rng, 12, methods);
        auto forest = build_forest(g.records);
        auto paths = enumerate_paths(forest);
        auto corpus = corpus_from_paths(paths);

        std::vector<NaivePath> oracle;
        std::vector<size_t> stack;
        for (size_t r : forest.roots())
            naive_dfs(forest, r, stack, oracle);

        bool ok = paths.size() == oracle.size();
        for (size_t i = 0; ok && i < paths.size(); ++i) {
            const auto& p = paths[i];
            const auto& q = oracle[i];
            ok = p.nodes == q.nodes;
            if (!ok)
                break;
            // integer / rational equality for the four scalar descriptors
            size_t naive_fan = 0;
            for (size_t id : q.nodes)
                naive_fan += forest.node(id).children.size();
            ok = ok && fanout(forest, p) == naive_fan;
            ok = ok && depth(p) == q.nodes.size();
            size_t naive_freq = 0;
            for (const auto& o : oracle)
                if (o.sig == q.sig)
                    ++naive_freq;
            ok = ok && frequency(p, corpus) == naive_freq;
            size_t hits = 0;
            for (const auto& tok : q.sig)
                if (susp.matches(tok))
                    ++hits;
            double naive_sem =
                q.sig.empty() ? 0.0 : static_cast<double>(hits) / q.sig.size();
            ok = ok && semantic_anomaly(p, susp) == naive_sem;

            // TF-IDF within 1e-9 of a direct-formula recomputation
            auto got = tfidf(p, corpus);
            std::map<std::string, size_t> counts;
            for (const auto& tok : q.sig)
                counts[tok]++;
            ok = ok && got.size() == counts.size();
            for (const auto& [tok, count] : counts) {
                size_t df = 0;
                for (const auto& o : oracle)
                    if (std::find(o.sig.begin(), o.sig.end(), tok) != o.sig.end())
                        ++df;
                double want = (static_cast<double>(count) / q.sig.size()) *
                              std::log(static_cast<double>(oracle.size()) / (1.0 + df));
                auto it = got.find(tok);
                ok = ok && it != got.end() && std::abs(it->second - want) <= 1e-9;
            }
        }
        if (ok)
            ++forests_ok;
        else
            all_ok = false;
    }
    char buf[160];
    snprintf(buf, sizeof(buf),
             "%zu/%zu small forests match the naive oracle exactly (TF-IDF tol 1e-9)",
             forests_ok, trials);
    report(2, all_ok, buf);
}

// --- 3: classifier correctness ------------------------------------------------
void criterion_3() {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd(0.0, 1.0);
    TrainConfig cfg;

    // analytic vs central finite differences, relative error < 1e-6
    bool grad_ok = true;
    for (int iter = 0; iter < 50; ++iter) {
        size_t d = 1 + rng() % 6;
        std::vector<TrainSample> data;
        for (size_t i = 0; i < 4 + rng() % 12; ++i) {
            TrainSample s;
            for (size_t j = 0; j < d; ++j)
                s.x.push_back(nd(rng));
            s.label = static_cast<int>(rng() % 2);
            data.push_back(s);
        }
        std::vector<double> w(d);
        for (auto& v : w)
            v = nd(rng);
        double b = nd(rng);
        auto grad = training_gradient(data, w, b, cfg);
        for (size_t j = 0; j <= d; ++j) {
            const double h = 1e-6;
            auto eval = [&](double delta) {
                auto wp = w;
                double bp = b;
                if (j < d)
                    wp[j] += delta;
                else
                    bp += delta;
                return training_loss(data, wp, bp, cfg);
            };
            double numeric = (eval(h) - eval(-h)) / (2 * h);
            double denom = std::max({std::abs(grad[j]), std::abs(numeric), 1e-8});
            if (std::abs(grad[j] - numeric) / denom >= 1e-6)
                grad_ok = false;
        }
    }

    // >= 99% accuracy on separable blobs
    std::normal_distribution<double> noise(0.0, 0.3);
    std::vector<TrainSample> blobs;
    for (int i = 0; i < 100; ++i) {
        blobs.push_back({{2.0 + noise(rng), 2.0 + noise(rng)}, 1});
        blobs.push_back({{-2.0 + noise(rng), -2.0 + noise(rng)}, 0});
    }
    auto model = train(blobs, cfg);
    size_t correct = 0;
    for (const auto& s : blobs)
        if ((predict(model, s.x) >= 0.5 ? 1 : 0) == s.label)
            ++correct;
    double acc = static_cast<double>(correct) / blobs.size();

    // retraining determinism: identical file digest
    testutil::TempDir dir("accept3");
    auto p1 = (dir.path / "m1.json").string();
    auto p2 = (dir.path / "m2.json").string();
    train(blobs, cfg).save(p1);
    train(blobs, cfg).save(p2);
    auto slurp = [](const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    bool digest_ok = !slurp(p1).empty() && slurp(p1) == slurp(p2);

    char buf[200];
    snprintf(buf, sizeof(buf),
             "gradient check (rel err < 1e-6, 50 instances): %s; blob accuracy %.3f "
             "(>= 0.99); retrain digest identical: %s",
             grad_ok ? "ok" : "failed", acc, digest_ok ? "yes" : "no");
    report(3, grad_ok && acc >= 0.99 && digest_ok, buf);
}

// --- 4: synthetic LOGO benchmark ------------------------------------------------
void criterion_4() {
    auto t0 = std::chrono::steady_clock::now();
    auto bench = synth::generate_benchmark(42, 12);  // >= 10 incidents
    auto incidents = synth::group_by_incident(synth::benchmark_dataset(bench));
    auto susp = SuspiciousMethodSet::defaults();

    auto full = logo_evaluate(incidents, TrainConfig{}, 20);
    auto baseline = logo_evaluate_scorer(incidents, baseline_semantic_scorer(susp), 20);
    double secs = seconds_since(t0);

    bool pass = full.mean_recall >= 0.80 && full.mean_recall > baseline.mean_recall &&
                secs < 120.0;
    char buf[200];
    snprintf(buf, sizeof(buf),
             "LOGO on 12 synthetic incidents: full model recall@20 = %.4f (>= 0.80), "
             "semantic baseline = %.4f (must be lower), %.1fs (limit 120s)",
             full.mean_recall, baseline.mean_recall, secs);
    report(4, pass, buf);
}

// --- 5: k-hop sweep ------------------------------------------------------------
void criterion_5() {
    auto bench = synth::generate_benchmark(42, 12);
    bool monotone = true;
    std::vector<double> mean_size(4, 0.0);
    size_t n_paths = 0;
    std::vector<bool> any_growth_possible(4, false);

    for (const auto& inc : bench.incidents) {
        for (const auto& tx : inc.transactions) {
            for (const auto& path : enumerate_paths(tx.forest)) {
                ++n_paths;
                std::set<size_t> prev;
                size_t prev_size = 0;
                for (size_t k = 0; k <= 3; ++k) {
                    auto closure = k_hop_closure(tx.forest, path, k);
                    if (!std::includes(closure.begin(), closure.end(), prev.begin(),
                                       prev.end()))
                        monotone = false;
                    auto sg = extract_subgraph(tx.forest, path, k);
                    auto st = subgraph_stats(tx.forest, sg, path);
                    if (st.serialized_size < prev_size)
                        monotone = false;
                    if (k > 0 && closure.size() > prev.size())
                        any_growth_possible[k] = true;
                    mean_size[k] += static_cast<double>(st.serialized_size);
                    prev = std::move(closure);
                    prev_size = st.serialized_size;
                }
            }
        }
    }
    for (auto& m : mean_size)
        m /= static_cast<double>(n_paths);

    // Strict mean growth until fixpoint: for each k where any path still
    // grew, the mean serialized size must strictly increase.
    bool strict = true;
    for (size_t k = 1; k <= 3; ++k)
        if (any_growth_possible[k] && !(mean_size[k] > mean_size[k - 1]))
            strict = false;

    char buf[220];
    snprintf(buf, sizeof(buf),
             "closure monotone on all %zu paths: %s; mean subgraph bytes %.1f -> %.1f -> "
             "%.1f -> %.1f strictly increasing until fixpoint: %s",
             n_paths, monotone ? "yes" : "no", mean_size[0], mean_size[1], mean_size[2],
             mean_size[3], strict ? "yes" : "no");
    report(5, monotone && strict, buf);
}

// --- 6: proxy resolution ---------------------------------------------------------
void criterion_6() {
    std::mt19937_64 rng(6);
    testutil::TempDir dir("accept6");
    FixtureRecorder rec{FixtureStore(dir.path)};

    auto random_address = [&] {
        std::vector<uint8_t> b(20);
        for (auto& x : b)
            x = static_cast<uint8_t>(rng());
        if (std::all_of(b.begin(), b.end(), [](uint8_t v) { return v == 0; }))
            b[19] = 1;
        return to_hex(b);
    };

    const std::vector<uint8_t> prefix = {0x36, 0x3d, 0x3d, 0x37, 0x3d,
                                         0x3d, 0x3d, 0x36, 0x3d, 0x73};
    const std::vector<uint8_t> suffix = {0x5a, 0xf4, 0x3d, 0x82, 0x80, 0x3e, 0x90, 0x3d,
                                         0x91, 0x60, 0x2b, 0x57, 0xfd, 0x5b, 0xf3};

    std::vector<std::pair<Address, Address>> proxies;  // proxy -> implementation
    for (int i = 0; i < 20; ++i) {
        Address proxy = random_address();
        Address impl = random_address();
        std::vector<uint8_t> code = prefix;
        auto a = from_hex(impl);
        code.insert(code.end(), a.begin(), a.end());
        code.insert(code.end(), suffix.begin(), suffix.end());
        rec.put_code(proxy, code);
        proxies.push_back({proxy, impl});
    }

    std::vector<Address> decoys;  // 0xF4 only inside PUSH immediates
    for (int i = 0; i < 20; ++i) {
        Address a = random_address();
        std::vector<uint8_t> code;
        size_t pushes = 1 + rng() % 6;
        for (size_t p = 0; p < pushes; ++p) {
            uint8_t push_op = static_cast<uint8_t>(0x60 + rng() % 32);
            code.push_back(push_op);
            size_t imm = push_op - 0x60 + 1;
            for (size_t j = 0; j < imm; ++j)
                code.push_back(0xF4);  // every immediate byte is the decoy opcode
            code.push_back(0x01);      // ADD
        }
        code.push_back(0x00);  // STOP
        rec.put_code(a, code);
        decoys.push_back(a);
    }

    FixtureChainClient client{FixtureStore(dir.path)};
    size_t extracted = 0;
    for (const auto& [proxy, impl] : proxies) {
        auto r = detect_proxy(client, proxy);
        if (r.is_proxy && r.implementation == impl &&
            r.mechanism == ProxyMechanism::MINIMAL_PROXY_HARDCODED)
            ++extracted;
    }
    size_t false_positives = 0;
    for (const auto& a : decoys)
        if (detect_proxy(client, a).is_proxy)
            ++false_positives;

    char buf[160];
    snprintf(buf, sizeof(buf),
             "implementation extracted on %zu/20 EIP-1167 proxies; %zu/20 false positives "
             "on PUSH-immediate decoys",
             extracted, false_positives);
    report(6, extracted == 20 && false_positives == 0, buf);
}

// --- 7: selector parsing -----------------------------------------------------------
void criterion_7() {
    std::mt19937_64 rng(7);
    testutil::TempDir dir("accept7");
    auto dbpath = (dir.path / "sigdb.tsv").string();

    // 50-entry signature DB with deterministic selectors.
    std::vector<std::pair<std::array<uint8_t, 4>, std::string>> entries;
    {
        std::ofstream out(dbpath);
        std::set<std::string> seen;
        while (entries.size() < 50) {
            std::array<uint8_t, 4> sel{static_cast<uint8_t>(rng()), static_cast<uint8_t>(rng()),
                                       static_cast<uint8_t>(rng()), static_cast<uint8_t>(rng())};
            char hex[9];
            snprintf(hex, sizeof(hex), "%02x%02x%02x%02x", sel[0], sel[1], sel[2], sel[3]);
            if (!seen.insert(hex).second)
                continue;
            std::string name = "fn" + std::to_string(entries.size());
            out << hex << "\t" << name << "(uint256,address)\n";
            entries.push_back({sel, name});
        }
    }

    auto db = load_signature_db(dbpath);
    bool ok = db.size() == 50;
    for (const auto& [sel, name] : entries) {
        std::vector<uint8_t> input(sel.begin(), sel.end());
        for (int extra = 0; extra < 3; ++extra)
            input.push_back(static_cast<uint8_t>(rng()));
        auto [got_sel, method] = resolve_selector(input, db);
        ok = ok && got_sel && *got_sel == sel && method == name;
    }
    // unknown selector formats as hex; empty input is the fallback
    auto [unk_sel, unk] = resolve_selector({0xde, 0xad, 0xbe, 0xef}, db);
    ok = ok && unk_sel && (unk == "0xdeadbeef" || db.lookup(*unk_sel).has_value());
    auto [no_sel, fb] = resolve_selector({}, db);
    ok = ok && !no_sel && fb == "fallback";

    report(7, ok,
           "bit-exact selector extraction and name resolution on the 50-entry DB, "
           "including hex fallback and empty-input fallback");
}

// --- 8: end-to-end determinism -------------------------------------------------------
std::string slurp_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void criterion_8(const std::string& cli_path) {
    testutil::TempDir dir("accept8");
    auto fixtures = dir.path / "fixtures";
    auto sigdb = (dir.path / "sigdb.tsv").string();
    std::filesystem::create_directories(fixtures);
    auto scope_doc = synth::write_incident_fixtures(fixtures.string(), sigdb, 11);
    auto scope_file = (dir.path / "scope.json").string();
    std::ofstream(scope_file) << scope_doc.dump(2) << "\n";

    bool ran = true;
    std::vector<std::string> contexts, reports;
    for (int run = 0; run < 3; ++run) {
        auto out = dir.path / ("out" + std::to_string(run));
        std::string cmd = cli_path + " --fixtures " + fixtures.string() + " --signature-db " +
                          sigdb + " --out " + out.string() + " report --scope " + scope_file +
                          " --gateway mock > /dev/null 2>&1";
        if (std::system(cmd.c_str()) != 0) {
            ran = false;
            break;
        }
        contexts.push_back(slurp_file(out / "incident_context.json"));
        reports.push_back(slurp_file(out / "incident_report.json"));
    }
    bool identical = ran && !contexts[0].empty() && contexts[0] == contexts[1] &&
                     contexts[1] == contexts[2] && !reports[0].empty() &&
                     reports[0] == reports[1] && reports[1] == reports[2];
    report(8, identical,
           "report command over fixtures + mock gateway: context and report files "
           "byte-identical across 3 runs");
}

// --- 9: documented-as-context -----------------------------------------------------
void criterion_9() {
    // The published report-precision and decompilation-accuracy figures need
    // live commercial LLMs plus expert judges, so they are out of reach for an
    // offline run. What this artifact guarantees instead is the audit path:
    // prompts are deterministic and the replay gateway reproduces recorded
    // responses byte-for-byte, so any future live run can be re-examined.
    testutil::TempDir dir("accept9");
    ReplayGateway gw(dir.path);
    gw.record("prompt-under-audit", "recorded response");
    bool replay_ok = gw.send("prompt-under-audit", {}) == "recorded response";
    report(9, replay_ok,
           "report-quality studies require live models and expert judges (documented "
           "as context, not reproduced); replay gateway verified for future audits");
}

}  // namespace

int main(int argc, char** argv) {
    std::string cli_path = argc > 1 ? argv[1] : "trace-llm";
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8(cli_path);
    criterion_9();
    if (g_failures > 0) {
        printf("%d criterion(s) FAILED\n", g_failures);
        return 1;
    }
    printf("all 9 criteria passed\n");
    return 0;
}
