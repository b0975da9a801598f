#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tracellm/trace_model.hpp"

namespace tracellm {

// Nodes are stored flat, indexed by their trace record index (pre-order),
// with explicit parent/child links. Immutable after construction.
struct CallNode {
    CallRecord record;
    std::optional<size_t> parent;
    std::vector<size_t> children;  // ascending record index
};

class CallForest {
public:
    const std::vector<CallNode>& nodes() const { return nodes_; }
    const std::vector<size_t>& roots() const { return roots_; }
    const CallNode& node(size_t i) const { return nodes_[i]; }
    size_t size() const { return nodes_.size(); }

    static CallForest build(const std::vector<CallRecord>& trace);

    // Pre-order record sequence; inverse of build for well-formed forests.
    std::vector<CallRecord> flatten_records() const;

    nlohmann::json to_json() const;

private:
    std::vector<CallNode> nodes_;
    std::vector<size_t> roots_;
};

inline CallForest build_forest(const std::vector<CallRecord>& trace) {
    return CallForest::build(trace);
}

// A root-to-leaf path. sig holds the edge method names (one per edge, i.e.
// the method of every node after the root).
struct ExecPath {
    std::vector<size_t> nodes;
    std::vector<std::string> sig;
};

std::vector<ExecPath> enumerate_paths(const CallForest& forest);

inline size_t out_degree(const CallNode& node) { return node.children.size(); }

}  // namespace tracellm
