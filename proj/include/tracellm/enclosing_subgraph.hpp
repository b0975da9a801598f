#pragma once

#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "tracellm/call_tree.hpp"

namespace tracellm {

struct EnclosingSubgraph {
    std::string center_path_key;
    size_t k = 0;
    std::set<size_t> nodes;                         // forest node ids
    std::set<std::pair<size_t, size_t>> edges;      // parent -> child, both in nodes
};

// Parent (if any) plus children; phrased over generic in/out neighbors so
// non-tree invocation graphs keep working.
std::set<size_t> neighbors(const CallForest& forest, size_t node);

// C_0 = path nodes; C_k = C_{k-1} union all neighbors of C_{k-1}.
std::set<size_t> k_hop_closure(const CallForest& forest, const ExecPath& path, size_t k);

// Induced subgraph on the k-hop closure.
EnclosingSubgraph extract_subgraph(const CallForest& forest, const ExecPath& path, size_t k,
                                   const std::string& center_path_key = "");

nlohmann::json subgraph_to_json(const CallForest& forest, const EnclosingSubgraph& sg,
                                const ExecPath& center_path);

struct SubgraphStats {
    size_t node_count = 0;
    size_t edge_count = 0;
    size_t serialized_size = 0;  // bytes of the report-bundle JSON
};

SubgraphStats subgraph_stats(const CallForest& forest, const EnclosingSubgraph& sg,
                             const ExecPath& center_path);

}  // namespace tracellm
