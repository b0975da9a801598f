#include <cmath>
#include <fstream>

#include "doctest.h"
#include "helpers.hpp"
#include "tracellm/path_features.hpp"

using namespace tracellm;
using testutil::addr_n;
using testutil::rec;

namespace {

ExecPath path_with_sig(std::vector<std::string> sig) {
    ExecPath p;
    p.nodes.resize(sig.size() + 1);
    p.sig = std::move(sig);
    return p;
}

PathCorpus corpus_of(std::vector<std::vector<std::string>> sigs) {
    return PathCorpus(std::move(sigs));
}

// Independent naive re-derivation of the path descriptors, enumerating every
// root-to-leaf path from scratch with no shared code paths.
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

std::vector<NaivePath> naive_paths(const CallForest& f) {
    std::vector<NaivePath> out;
    std::vector<size_t> stack;
    for (size_t r : f.roots())
        naive_dfs(f, r, stack, out);
    return out;
}

size_t naive_fanout(const CallForest& f, const NaivePath& p) {
    size_t sum = 0;
    for (size_t id : p.nodes)
        sum += f.node(id).children.size();
    return sum;
}

size_t naive_frequency(const std::vector<NaivePath>& all, const NaivePath& p) {
    size_t n = 0;
    for (const auto& q : all)
        if (q.sig == p.sig)
            ++n;
    return n;
}

double naive_semantic(const NaivePath& p, const SuspiciousMethodSet& m) {
    if (p.sig.empty())
        return 0.0;
    size_t hits = 0;
    for (const auto& tok : p.sig)
        if (m.matches(tok))
            ++hits;
    return static_cast<double>(hits) / static_cast<double>(p.sig.size());
}

std::map<std::string, double> naive_tfidf(const std::vector<NaivePath>& all,
                                          const NaivePath& p) {
    std::map<std::string, double> out;
    if (p.sig.empty())
        return out;
    std::map<std::string, size_t> counts;
    for (const auto& tok : p.sig)
        counts[tok]++;
    for (const auto& [tok, count] : counts) {
        size_t df = 0;
        for (const auto& q : all)
            if (std::find(q.sig.begin(), q.sig.end(), tok) != q.sig.end())
                ++df;
        double tf = static_cast<double>(count) / static_cast<double>(p.sig.size());
        double idf = std::log(static_cast<double>(all.size()) / (1.0 + df));
        out[tok] = tf * idf;
    }
    return out;
}

}  // namespace

TEST_SUITE("path_features") {
    TEST_CASE("default suspicious set holds exactly the twenty canonical names") {
        auto m = SuspiciousMethodSet::defaults();
        CHECK(m.size() == 20);
        for (const char* name :
             {"selfdestruct", "fallback", "receive", "initialize", "transfer", "transferFrom",
              "onlyOwner", "hasRole", "ecrecover", "assert", "require", "call", "any",
              "tokensReceived", "tokensToSend", "balanceOf", "sweepToken", "drain",
              "isOperationReady", "beforeCall"})
            CHECK_MESSAGE(m.matches(name), name);
        CHECK_FALSE(m.matches("swap"));
        CHECK_FALSE(m.matches("approve"));
    }

    TEST_CASE("'any' matches unresolved hex-selector methods") {
        auto m = SuspiciousMethodSet::defaults();
        CHECK(m.matches("0xdeadbeef"));
        SuspiciousMethodSet no_any = [] {
            testutil::TempDir dir("susp");
            std::ofstream(dir.path / "set.txt") << "transfer\n";
            return SuspiciousMethodSet::load((dir.path / "set.txt").string());
        }();
        CHECK_FALSE(no_any.matches("0xdeadbeef"));
        CHECK(no_any.matches("transfer"));
    }

    TEST_CASE("fanout: hand-worked examples") {
        // single-node leaf root
        auto lone = build_forest({rec(0, addr_n(9), addr_n(1), "m")});
        auto paths = enumerate_paths(lone);
        CHECK(fanout(lone, paths[0]) == 0);

        // strictly linear 4-node path -> 3
        auto lin = build_forest({rec(0, addr_n(9), addr_n(1), "a"), rec(1, addr_n(1), addr_n(2), "b"),
                                 rec(2, addr_n(2), addr_n(3), "c"),
                                 rec(3, addr_n(3), addr_n(4), "d")});
        CHECK(fanout(lin, enumerate_paths(lin)[0]) == 3);

        // r has 2 children, c1 has 1: path (r, c1, g1) -> 3
        auto tree = build_forest({rec(0, addr_n(9), addr_n(1), "r"), rec(1, addr_n(1), addr_n(2), "c1"),
                                  rec(2, addr_n(2), addr_n(3), "g1"),
                                  rec(3, addr_n(1), addr_n(4), "c2")});
        auto tp = enumerate_paths(tree);
        REQUIRE(tp[0].nodes == std::vector<size_t>{0, 1, 2});
        CHECK(fanout(tree, tp[0]) == 3);
    }

    TEST_CASE("depth is the node count") {
        CHECK(depth(path_with_sig({})) == 1);
        CHECK(depth(path_with_sig({"a", "b", "c"})) == 4);
    }

    TEST_CASE("frequency counts structurally equivalent paths") {
        auto corpus = corpus_of({{"transfer", "withdraw"},
                                 {"transfer", "withdraw"},
                                 {"transfer", "withdraw"},
                                 {"unique"}});
        CHECK(frequency(path_with_sig({"transfer", "withdraw"}), corpus) == 3);
        CHECK(frequency(path_with_sig({"unique"}), corpus) == 1);
        CHECK_THROWS_AS(frequency(path_with_sig({"absent"}), corpus), ValidationError);
    }

    TEST_CASE("frequency: k-leaf star of same-method edges") {
        std::vector<CallRecord> records = {rec(0, addr_n(9), addr_n(1), "root")};
        for (size_t i = 1; i <= 5; ++i)
            records.push_back(rec(i, addr_n(1), addr_n(1 + i), "same"));
        auto f = build_forest(records);
        auto paths = enumerate_paths(f);
        auto corpus = corpus_from_paths(paths);
        for (const auto& p : paths)
            CHECK(frequency(p, corpus) == 5);
    }

    TEST_CASE("semantic anomaly density") {
        auto m = SuspiciousMethodSet::defaults();
        CHECK(semantic_anomaly(path_with_sig({"approve", "transfer", "swapExactTokens"}), m) ==
              doctest::Approx(1.0 / 3.0));
        CHECK(semantic_anomaly(path_with_sig({"approve", "swap"}), m) == 0.0);
        CHECK(semantic_anomaly(path_with_sig({"transfer", "transfer"}), m) == 1.0);
        CHECK(semantic_anomaly(path_with_sig({}), m) == 0.0);  // degenerate single-node path
    }

    TEST_CASE("tfidf: direct formula examples") {
        // sig [a,a,b] in a 3-path corpus where a occurs in 1 document
        auto corpus = corpus_of({{"a", "a", "b"}, {"b"}, {"c", "b"}});
        auto w = tfidf(path_with_sig({"a", "a", "b"}), corpus);
        CHECK(w["a"] == doctest::Approx((2.0 / 3.0) * std::log(3.0 / 2.0)).epsilon(1e-12));
        // b occurs in all 3 documents: IDF = ln(3/4) < 0
        CHECK(w["b"] == doctest::Approx((1.0 / 3.0) * std::log(3.0 / 4.0)).epsilon(1e-12));
        CHECK(w["b"] < 0.0);

        // single-document corpus, single-token path: TF = 1, IDF = ln(1/2)
        auto solo = corpus_of({{"x"}});
        auto ws = tfidf(path_with_sig({"x"}), solo);
        CHECK(ws["x"] == doctest::Approx(std::log(0.5)).epsilon(1e-12));

        CHECK(tfidf(path_with_sig({}), corpus).empty());
    }

    TEST_CASE("TF values of a path sum to 1") {
        std::mt19937_64 rng(31);
        std::vector<std::string> tokens = {"a", "b", "c", "d"};
        for (int iter = 0; iter < 100; ++iter) {
            std::vector<std::vector<std::string>> sigs;
            for (int p = 0; p < 5; ++p) {
                std::vector<std::string> sig(1 + rng() % 6);
                for (auto& t : sig)
                    t = tokens[rng() % tokens.size()];
                sigs.push_back(sig);
            }
            auto corpus = corpus_of(sigs);
            for (const auto& sig : sigs) {
                auto w = tfidf(path_with_sig(sig), corpus);
                double tf_sum = 0.0;
                for (const auto& [tok, weight] : w) {
                    double idf = std::log(static_cast<double>(corpus.size()) /
                                          (1.0 + corpus.document_frequency(tok)));
                    if (idf != 0.0)
                        tf_sum += weight / idf;
                    else
                        tf_sum += static_cast<double>(std::count(sig.begin(), sig.end(), tok)) /
                                  sig.size();
                }
                CHECK(tf_sum == doctest::Approx(1.0).epsilon(1e-9));
            }
        }
    }

    TEST_CASE("naive oracle equivalence on small random forests") {
        std::mt19937_64 rng(37);
        auto m = SuspiciousMethodSet::defaults();
        std::vector<std::string> methods = {"transfer", "swap", "drain", "approve"};
        for (int iter = 0; iter < 200; ++iter) {
            auto g = testutil::random_forest(rng, 12, methods);
            auto forest = build_forest(g.records);
            auto paths = enumerate_paths(forest);
            auto corpus = corpus_from_paths(paths);
            auto oracle = naive_paths(forest);
            REQUIRE(paths.size() == oracle.size());
            for (size_t i = 0; i < paths.size(); ++i) {
                REQUIRE(paths[i].nodes == oracle[i].nodes);
                CHECK(fanout(forest, paths[i]) == naive_fanout(forest, oracle[i]));
                CHECK(depth(paths[i]) == oracle[i].nodes.size());
                CHECK(frequency(paths[i], corpus) == naive_frequency(oracle, oracle[i]));
                CHECK(semantic_anomaly(paths[i], m) ==
                      doctest::Approx(naive_semantic(oracle[i], m)).epsilon(1e-15));
                auto got = tfidf(paths[i], corpus);
                auto want = naive_tfidf(oracle, oracle[i]);
                REQUIRE(got.size() == want.size());
                for (const auto& [tok, weight] : want)
                    CHECK(got.at(tok) == doctest::Approx(weight).epsilon(1e-9));
            }
        }
    }

    TEST_CASE("serial and OpenMP feature kernels agree exactly") {
        std::mt19937_64 rng(41);
        auto m = SuspiciousMethodSet::defaults();
        auto g = testutil::random_forest(rng, 150, {"transfer", "swap", "drain", "x", "y"});
        auto forest = build_forest(g.records);
        auto paths = enumerate_paths(forest);
        auto corpus = corpus_from_paths(paths);
        auto a = extract_features_serial(forest, paths, corpus, m);
        auto b = extract_features_omp(forest, paths, corpus, m);
        REQUIRE(a.size() == b.size());
        for (size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].fanout == b[i].fanout);
            CHECK(a[i].depth == b[i].depth);
            CHECK(a[i].raw_frequency == b[i].raw_frequency);
            CHECK(a[i].inv_frequency == b[i].inv_frequency);
            CHECK(a[i].semantic == b[i].semantic);
            CHECK(a[i].tfidf == b[i].tfidf);
        }
    }

    TEST_CASE("build_vocab orders by descending df, ties lexicographic, truncates") {
        std::map<std::string, size_t> df = {{"b", 3}, {"a", 3}, {"c", 5}, {"d", 1}};
        CHECK(build_vocab(df) == std::vector<std::string>{"c", "a", "b", "d"});
        CHECK(build_vocab(df, 2) == std::vector<std::string>{"c", "a"});
    }

    TEST_CASE("assemble_vector layout and scaling") {
        PathFeatures pf;
        pf.fanout = 5;
        pf.depth = 3;
        pf.inv_frequency = 0.5;
        pf.semantic = 0.25;
        pf.tfidf = {{"t", 0.7}, {"oov", 9.9}};

        ScalerBounds bounds{0, 10, 1, 5};
        auto v = assemble_vector(pf, {"t", "u"}, bounds);
        REQUIRE(v.size() == 6);  // 4 + |vocab|
        CHECK(v[0] == doctest::Approx(0.5));   // (5-0)/(10-0)
        CHECK(v[1] == doctest::Approx(0.5));   // (3-1)/(5-1)
        CHECK(v[2] == doctest::Approx(0.5));
        CHECK(v[3] == doctest::Approx(0.25));
        CHECK(v[4] == doctest::Approx(0.7));
        CHECK(v[5] == 0.0);  // vocab token absent from path

        // constant columns map to zero
        ScalerBounds flat{2, 2, 3, 3};
        auto v2 = assemble_vector(pf, {}, flat);
        REQUIRE(v2.size() == 4);
        CHECK(v2[0] == 0.0);
        CHECK(v2[1] == 0.0);
    }

    TEST_CASE("vector dimension is 4 + |vocab| for random inputs") {
        std::mt19937_64 rng(43);
        for (int iter = 0; iter < 50; ++iter) {
            size_t vs = rng() % 20;
            std::vector<std::string> vocab;
            for (size_t i = 0; i < vs; ++i)
                vocab.push_back("tok" + std::to_string(i));
            PathFeatures pf;
            pf.fanout = rng() % 10;
            pf.depth = 1 + rng() % 10;
            CHECK(assemble_vector(pf, vocab, ScalerBounds{0, 9, 1, 10}).size() == 4 + vs);
        }
    }
}
