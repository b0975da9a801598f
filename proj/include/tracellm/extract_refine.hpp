#pragma once

#include <memory>
#include <optional>
#include <semaphore>
#include <string>
#include <vector>

#include "json.hpp"
#include "tracellm/chain_access.hpp"
#include "tracellm/gateway.hpp"

namespace tracellm {

enum class ArtifactKind { VERIFIED_SOURCE, DECOMPILED, REFINED_DECOMPILED, BYTECODE_ONLY };

std::string artifact_kind_name(ArtifactKind k);

struct CodeArtifact {
    Address address;
    ArtifactKind kind = ArtifactKind::BYTECODE_ONLY;
    std::optional<std::string> text;
    std::optional<std::string> abi;
    std::vector<std::string> provenance;  // append-only tool/gateway trail

    nlohmann::json to_json() const;
    static CodeArtifact from_json(const nlohmann::json& j);
};

struct ExtractorConfig {
    // Command template; {BYTECODE_FILE} is replaced with a temp file holding
    // the hex bytecode, {BYTECODE} with the hex inline.
    std::string decompiler_cmd;
    int decompiler_timeout_s = 120;
    std::string cache_dir;  // empty disables the artifact cache
    int decompiler_workers = 2;
};

struct DecompileError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Best-available code artifact per contract: verified source, else
// decompiled (optionally LLM-refined), else bytecode only. extract() never
// hard-fails.
class Extractor {
public:
    Extractor(ChainClient& chain, ExtractorConfig config, Gateway* refine_gateway = nullptr);

    CodeArtifact extract(const Address& address);

    // Runs the external decompiler; throws DecompileError on nonzero exit
    // or timeout so the caller can fall back.
    std::string decompile(const std::vector<uint8_t>& bytecode);

    // Best-effort: gateway errors return the input unchanged.
    std::string refine(const std::string& pseudocode, bool& refined);

private:
    std::optional<CodeArtifact> cache_lookup(const Address& address,
                                             const std::string& code_hash) const;
    void cache_store(const CodeArtifact& artifact, const std::string& code_hash) const;

    ChainClient& chain_;
    ExtractorConfig config_;
    Gateway* gateway_;
    std::unique_ptr<std::counting_semaphore<64>> decompile_slots_;
};

extern const char* kRefinePromptTemplate;

}  // namespace tracellm
