#include "tracellm/call_tree.hpp"

namespace tracellm {

using nlohmann::json;

CallForest CallForest::build(const std::vector<CallRecord>& trace) {
    CallForest f;
    f.nodes_.reserve(trace.size());
    std::vector<size_t> stack;  // open call frames, innermost last
    for (const auto& rec : trace) {
        size_t id = f.nodes_.size();
        f.nodes_.push_back(CallNode{rec, std::nullopt, {}});
        // Pop closed frames until the nearest ancestor whose callee is this
        // call's caller; no match means a new top-level call.
        while (!stack.empty() && f.nodes_[stack.back()].record.to != rec.from)
            stack.pop_back();
        if (stack.empty()) {
            f.roots_.push_back(id);
        } else {
            f.nodes_[id].parent = stack.back();
            f.nodes_[stack.back()].children.push_back(id);
        }
        stack.push_back(id);
    }
    return f;
}

std::vector<CallRecord> CallForest::flatten_records() const {
    std::vector<CallRecord> out;
    out.reserve(nodes_.size());
    auto visit = [&](auto&& self, size_t id) -> void {
        out.push_back(nodes_[id].record);
        for (size_t c : nodes_[id].children)
            self(self, c);
    };
    for (size_t r : roots_)
        visit(visit, r);
    return out;
}

namespace {

json record_to_json(const CallRecord& r) {
    json j;
    j["index"] = r.index;
    j["from"] = r.from;
    j["to"] = r.to;
    j["selector"] = r.selector
                        ? json(to_hex({r.selector->begin(), r.selector->end()}))
                        : json(nullptr);
    j["method"] = r.method;
    j["value"] = r.value;
    j["call_type"] = frame_type_name(r.call_type);
    j["status"] = call_status_name(r.status);
    return j;
}

}  // namespace

json CallForest::to_json() const {
    auto dump = [&](auto&& self, size_t id) -> json {
        json j;
        j["record"] = record_to_json(nodes_[id].record);
        j["children"] = json::array();
        for (size_t c : nodes_[id].children)
            j["children"].push_back(self(self, c));
        return j;
    };
    json out = json::array();
    for (size_t r : roots_)
        out.push_back(dump(dump, r));
    return out;
}

std::vector<ExecPath> enumerate_paths(const CallForest& forest) {
    std::vector<ExecPath> out;
    std::vector<size_t> nodes;
    std::vector<std::string> sig;
    auto dfs = [&](auto&& self, size_t id, bool is_root) -> void {
        nodes.push_back(id);
        if (!is_root)
            sig.push_back(forest.node(id).record.method);
        if (forest.node(id).children.empty()) {
            out.push_back(ExecPath{nodes, sig});
        } else {
            for (size_t c : forest.node(id).children)
                self(self, c, false);
        }
        nodes.pop_back();
        if (!is_root)
            sig.pop_back();
    };
    for (size_t r : forest.roots())
        dfs(dfs, r, true);
    return out;
}

}  // namespace tracellm
