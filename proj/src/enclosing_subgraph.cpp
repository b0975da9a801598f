#include "tracellm/enclosing_subgraph.hpp"

#include <map>

namespace tracellm {

using nlohmann::json;

std::set<size_t> neighbors(const CallForest& forest, size_t node) {
    std::set<size_t> out;
    const CallNode& n = forest.node(node);
    if (n.parent)
        out.insert(*n.parent);
    out.insert(n.children.begin(), n.children.end());
    return out;
}

std::set<size_t> k_hop_closure(const CallForest& forest, const ExecPath& path, size_t k) {
    std::set<size_t> closure(path.nodes.begin(), path.nodes.end());
    std::set<size_t> frontier = closure;
    for (size_t hop = 0; hop < k && !frontier.empty(); ++hop) {
        std::set<size_t> added;
        for (size_t v : frontier)
            for (size_t u : neighbors(forest, v))
                if (closure.insert(u).second)
                    added.insert(u);
        frontier = std::move(added);
    }
    return closure;
}

EnclosingSubgraph extract_subgraph(const CallForest& forest, const ExecPath& path, size_t k,
                                   const std::string& center_path_key) {
    for (size_t id : path.nodes)
        if (id >= forest.size())
            throw ValidationError("path does not belong to forest");
    EnclosingSubgraph sg;
    sg.center_path_key = center_path_key;
    sg.k = k;
    sg.nodes = k_hop_closure(forest, path, k);
    for (size_t v : sg.nodes) {
        auto parent = forest.node(v).parent;
        if (parent && sg.nodes.count(*parent))
            sg.edges.insert({*parent, v});
    }
    return sg;
}

json subgraph_to_json(const CallForest& forest, const EnclosingSubgraph& sg,
                      const ExecPath& center_path) {
    // Local indices follow ascending forest node id.
    std::map<size_t, size_t> local;
    json nodes = json::array();
    for (size_t v : sg.nodes) {
        local[v] = nodes.size();
        const CallRecord& r = forest.node(v).record;
        json jr;
        jr["index"] = r.index;
        jr["from"] = r.from;
        jr["to"] = r.to;
        jr["method"] = r.method;
        jr["value"] = r.value;
        jr["call_type"] = frame_type_name(r.call_type);
        jr["status"] = call_status_name(r.status);
        nodes.push_back(jr);
    }
    json edges = json::array();
    for (const auto& [p, c] : sg.edges)
        edges.push_back(json::array({local[p], local[c]}));
    json center = json::array();
    for (size_t v : center_path.nodes)
        center.push_back(local.at(v));
    return json{{"center_path", center}, {"k", sg.k}, {"nodes", nodes}, {"edges", edges}};
}

SubgraphStats subgraph_stats(const CallForest& forest, const EnclosingSubgraph& sg,
                             const ExecPath& center_path) {
    SubgraphStats st;
    st.node_count = sg.nodes.size();
    st.edge_count = sg.edges.size();
    st.serialized_size = subgraph_to_json(forest, sg, center_path).dump().size();
    return st;
}

}  // namespace tracellm
