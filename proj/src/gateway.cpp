#include "tracellm/gateway.hpp"

#include <fstream>
#include <sstream>

#include "httplib.h"
#include "json.hpp"
#include "tracellm/types.hpp"

namespace tracellm {

using nlohmann::json;

namespace {

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace

std::string MockGateway::send(const std::string& prompt, const GatewayParams&) {
    // The report prompt carries one "PATH <key> <tx> <entry_from> <leaf_to>"
    // line per flagged path; the mock turns those into a well-formed report.
    json evidence = json::array();
    json attackers = json::array();
    json victims = json::array();
    std::istringstream in(prompt);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("PATH ", 0) != 0)
            continue;
        std::istringstream fields(line.substr(5));
        std::string key, tx, entry_from, leaf_to;
        fields >> key >> tx >> entry_from >> leaf_to;
        if (key.empty() || tx.empty())
            continue;
        evidence.push_back(json::array({tx, key}));
        if (attackers.empty() && !entry_from.empty())
            attackers.push_back(entry_from);
        if (victims.empty() && !leaf_to.empty())
            victims.push_back(leaf_to);
    }
    json out = {
        {"attacker_addresses", attackers},
        {"victim_addresses", victims},
        {"exploitation_mechanism",
         "Deterministic mock analysis: the flagged execution paths exhibit anomalous "
         "structural and semantic patterns consistent with an exploit."},
        {"attack_execution",
         json::array({"Entry call into the flagged contract.",
                      "Nested invocations along the highest-ranked anomalous path.",
                      "Asset movement reflected in the balance diffs."})},
        {"evidence_refs", evidence},
    };
    return out.dump(2);
}

std::string ReplayGateway::prompt_key(const std::string& prompt) {
    char buf[17];
    snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(prompt)));
    return buf;
}

std::string ReplayGateway::send(const std::string& prompt, const GatewayParams&) {
    auto path = dir_ / (prompt_key(prompt) + ".json");
    std::ifstream in(path);
    if (!in)
        throw GatewayError("no recorded response for prompt (key " + prompt_key(prompt) + ")");
    json doc = json::parse(in);
    return doc.at("response").get<std::string>();
}

void ReplayGateway::record(const std::string& prompt, const std::string& response) const {
    std::filesystem::create_directories(dir_);
    auto path = dir_ / (prompt_key(prompt) + ".json");
    std::ofstream out(path);
    out << json{{"prompt", prompt}, {"response", response}}.dump(2) << "\n";
}

std::string HttpGateway::send(const std::string& prompt, const GatewayParams& params) {
    if (config_.url.empty())
        throw GatewayError("gateway URL not configured");
    json req = {
        {"model", params.model},
        {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})},
        {"temperature", params.temperature},
        {"top_p", params.top_p},
        {"max_tokens", params.max_response_tokens},
    };
    httplib::Client cli(config_.url);
    httplib::Headers headers = {{"Authorization", "Bearer " + config_.api_key}};
    auto res = cli.Post("/v1/chat/completions", headers, req.dump(), "application/json");
    if (!res)
        throw GatewayError("gateway unreachable");
    if (res->status != 200)
        throw GatewayError("gateway returned HTTP " + std::to_string(res->status));
    json body = json::parse(res->body, nullptr, false);
    if (body.is_discarded())
        throw GatewayError("gateway returned malformed JSON");
    try {
        return body.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw GatewayError(std::string("unexpected gateway response shape: ") + e.what());
    }
}

std::unique_ptr<Gateway> make_gateway(const std::string& kind, const GatewayConfig& config,
                                      const std::string& replay_dir) {
    if (kind == "mock")
        return std::make_unique<MockGateway>();
    if (kind == "replay")
        return std::make_unique<ReplayGateway>(replay_dir);
    if (kind == "live") {
        if (config.url.empty() || config.api_key.empty())
            throw GatewayError("live gateway requires URL and API key");
        return std::make_unique<HttpGateway>(config);
    }
    throw ValidationError("unknown gateway kind: " + kind);
}

}  // namespace tracellm
