#include "tracellm/extract_refine.hpp"

#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace tracellm {

using nlohmann::json;

const char* kRefinePromptTemplate =
    "You are given pseudocode produced by an EVM decompiler. Rewrite it as clear,\n"
    "readable Solidity-style pseudocode. Preserve every function, control-flow\n"
    "construct, storage access, and external call exactly; do not invent logic\n"
    "that is not present. Output only the rewritten code.\n"
    "\n"
    "{PSEUDOCODE}\n";

std::string artifact_kind_name(ArtifactKind k) {
    switch (k) {
        case ArtifactKind::VERIFIED_SOURCE: return "verified_source";
        case ArtifactKind::DECOMPILED: return "decompiled";
        case ArtifactKind::REFINED_DECOMPILED: return "refined_decompiled";
        case ArtifactKind::BYTECODE_ONLY: return "bytecode_only";
    }
    return "bytecode_only";
}

namespace {

ArtifactKind kind_from_name(const std::string& s) {
    if (s == "verified_source") return ArtifactKind::VERIFIED_SOURCE;
    if (s == "decompiled") return ArtifactKind::DECOMPILED;
    if (s == "refined_decompiled") return ArtifactKind::REFINED_DECOMPILED;
    if (s == "bytecode_only") return ArtifactKind::BYTECODE_ONLY;
    throw DecodeError("unknown artifact kind: " + s);
}

std::string fnv_hex(const std::string& s) {
    uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void replace_all(std::string& s, const std::string& from, const std::string& to) {
    size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, from.size(), to);
        pos += to.size();
    }
}

}  // namespace

json CodeArtifact::to_json() const {
    json j;
    j["address"] = address;
    j["kind"] = artifact_kind_name(kind);
    j["text"] = text ? json(*text) : json(nullptr);
    j["abi"] = abi ? json(*abi) : json(nullptr);
    j["provenance"] = provenance;
    return j;
}

CodeArtifact CodeArtifact::from_json(const json& j) {
    CodeArtifact a;
    a.address = j.at("address").get<std::string>();
    a.kind = kind_from_name(j.at("kind").get<std::string>());
    if (!j.at("text").is_null())
        a.text = j.at("text").get<std::string>();
    if (!j.at("abi").is_null())
        a.abi = j.at("abi").get<std::string>();
    a.provenance = j.at("provenance").get<std::vector<std::string>>();
    return a;
}

Extractor::Extractor(ChainClient& chain, ExtractorConfig config, Gateway* refine_gateway)
    : chain_(chain),
      config_(std::move(config)),
      gateway_(refine_gateway),
      decompile_slots_(std::make_unique<std::counting_semaphore<64>>(
          std::max(1, config_.decompiler_workers))) {}

std::optional<CodeArtifact> Extractor::cache_lookup(const Address& address,
                                                    const std::string& code_hash) const {
    if (config_.cache_dir.empty())
        return std::nullopt;
    auto path = std::filesystem::path(config_.cache_dir) / address / (code_hash + ".json");
    std::ifstream in(path);
    if (!in)
        return std::nullopt;
    return CodeArtifact::from_json(json::parse(in));
}

void Extractor::cache_store(const CodeArtifact& artifact, const std::string& code_hash) const {
    if (config_.cache_dir.empty())
        return;
    auto dir = std::filesystem::path(config_.cache_dir) / artifact.address;
    std::filesystem::create_directories(dir);
    std::ofstream out(dir / (code_hash + ".json"));
    out << artifact.to_json().dump(2) << "\n";
}

std::string Extractor::decompile(const std::vector<uint8_t>& bytecode) {
    if (config_.decompiler_cmd.empty())
        throw DecompileError("no decompiler configured");

    // The external tool is memory-heavy; invocations go through a bounded pool.
    decompile_slots_->acquire();
    struct Release {
        std::counting_semaphore<64>& s;
        ~Release() { s.release(); }
    } release{*decompile_slots_};

    std::string hex = to_hex(bytecode);
    auto tmp = std::filesystem::temp_directory_path() /
               ("tracellm-bytecode-" + fnv_hex(hex) + ".hex");
    {
        std::ofstream out(tmp);
        out << hex << "\n";
    }
    std::string cmd = config_.decompiler_cmd;
    replace_all(cmd, "{BYTECODE_FILE}", tmp.string());
    replace_all(cmd, "{BYTECODE}", hex);
    std::string wrapped = "timeout " + std::to_string(config_.decompiler_timeout_s) +
                          "s sh -c '" + cmd + "' 2>/dev/null";

    FILE* pipe = popen(wrapped.c_str(), "r");
    if (!pipe) {
        std::filesystem::remove(tmp);
        throw DecompileError("failed to launch decompiler");
    }
    std::string output;
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0)
        output.append(buf, n);
    int status = pclose(pipe);
    std::filesystem::remove(tmp);
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
        if (WIFEXITED(status) && WEXITSTATUS(status) == 124)
            throw DecompileError("decompiler timed out after " +
                                 std::to_string(config_.decompiler_timeout_s) + "s");
        throw DecompileError("decompiler exited with nonzero status");
    }
    return output;
}

std::string Extractor::refine(const std::string& pseudocode, bool& refined) {
    refined = false;
    if (!gateway_)
        return pseudocode;
    std::string prompt = kRefinePromptTemplate;
    replace_all(prompt, "{PSEUDOCODE}", pseudocode);
    try {
        std::string out = gateway_->send(prompt, GatewayParams{});
        refined = true;
        return out;
    } catch (const GatewayError&) {
        return pseudocode;  // refinement is best-effort
    }
}

CodeArtifact Extractor::extract(const Address& address) {
    CodeArtifact artifact;
    artifact.address = address;

    std::string code_hash;
    std::vector<uint8_t> bytecode;
    try {
        bytecode = chain_.fetch_code(address);
        code_hash = fnv_hex(to_hex(bytecode));
        if (auto cached = cache_lookup(address, code_hash))
            return *cached;
    } catch (const std::exception& e) {
        artifact.provenance.push_back(std::string("fetch_code failed: ") + e.what());
    }

    try {
        auto meta = chain_.fetch_contract_metadata(address);
        artifact.abi = meta.abi;
        if (meta.verified_source) {
            artifact.kind = ArtifactKind::VERIFIED_SOURCE;
            artifact.text = *meta.verified_source;
            artifact.provenance.push_back("explorer:verified_source");
            if (!code_hash.empty())
                cache_store(artifact, code_hash);
            return artifact;
        }
        artifact.provenance.push_back("explorer:unverified");
    } catch (const std::exception& e) {
        artifact.provenance.push_back(std::string("explorer failed: ") + e.what());
    }

    if (!bytecode.empty() && !config_.decompiler_cmd.empty()) {
        try {
            std::string pseudocode = decompile(bytecode);
            artifact.kind = ArtifactKind::DECOMPILED;
            artifact.text = pseudocode;
            artifact.provenance.push_back("decompiler:" + config_.decompiler_cmd);
            bool refined = false;
            std::string refined_text = refine(pseudocode, refined);
            if (refined) {
                artifact.kind = ArtifactKind::REFINED_DECOMPILED;
                artifact.text = refined_text;
                artifact.provenance.push_back("gateway:refined:" + gateway_->name());
            } else if (gateway_) {
                artifact.provenance.push_back("gateway:refine_unavailable");
            }
            if (!code_hash.empty())
                cache_store(artifact, code_hash);
            return artifact;
        } catch (const DecompileError& e) {
            artifact.provenance.push_back(std::string("decompile failed: ") + e.what());
        }
    }

    artifact.kind = ArtifactKind::BYTECODE_ONLY;
    artifact.text = std::nullopt;
    artifact.provenance.push_back("bytecode_only");
    if (!code_hash.empty())
        cache_store(artifact, code_hash);
    return artifact;
}

}  // namespace tracellm
