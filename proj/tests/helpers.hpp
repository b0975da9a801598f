#pragma once

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <unistd.h>
#include <random>
#include <string>
#include <vector>

#include "tracellm/call_tree.hpp"

namespace testutil {

using namespace tracellm;

inline Address addr_n(size_t n) {
    char buf[64];
    snprintf(buf, sizeof(buf), "0x%040zx", n);
    return buf;
}

inline CallRecord rec(size_t index, const Address& from, const Address& to,
                      const std::string& method) {
    CallRecord r;
    r.index = index;
    r.from = from;
    r.to = to;
    r.method = method;
    return r;
}

// Random forest in pre-order: parent[i] < i or absent (root). Every node has
// a unique callee address, so reconstruction is unambiguous.
struct GeneratedForest {
    std::vector<CallRecord> records;
    std::vector<std::optional<size_t>> parent;
};

inline GeneratedForest random_forest(std::mt19937_64& rng, size_t max_nodes,
                                     const std::vector<std::string>& methods = {"m"}) {
    GeneratedForest g;
    size_t n = 1 + rng() % max_nodes;
    // Pre-order generation: a stack of open ancestors; each new node either
    // attaches to the current top, pops to a shallower ancestor, or starts a
    // new root.
    std::vector<size_t> stack;
    for (size_t i = 0; i < n; ++i) {
        if (!stack.empty()) {
            size_t keep = rng() % (stack.size() + 1);  // 0 = new root
            stack.resize(keep);
        }
        std::optional<size_t> parent;
        Address from;
        if (stack.empty()) {
            from = addr_n(1000000 + i);  // fresh EOA per root
        } else {
            parent = stack.back();
            from = g.records[*parent].to;
        }
        g.parent.push_back(parent);
        g.records.push_back(rec(i, from, addr_n(i + 1), methods[rng() % methods.size()]));
        stack.push_back(i);
    }
    return g;
}

inline bool same_structure(const GeneratedForest& g, const CallForest& f) {
    if (f.size() != g.records.size())
        return false;
    for (size_t i = 0; i < f.size(); ++i) {
        if (f.node(i).parent != g.parent[i])
            return false;
        if (f.node(i).record.to != g.records[i].to)
            return false;
    }
    return true;
}

// Unique temp directory, removed on destruction.
struct TempDir {
    std::filesystem::path path;

    explicit TempDir(const std::string& tag) {
        static std::atomic<unsigned> counter{0};
        path = std::filesystem::temp_directory_path() /
               (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string str() const { return path.string(); }
};

}  // namespace testutil
