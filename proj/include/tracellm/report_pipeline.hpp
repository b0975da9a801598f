#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tracellm/anomaly_model.hpp"
#include "tracellm/chain_detect.hpp"
#include "tracellm/enclosing_subgraph.hpp"
#include "tracellm/extract_refine.hpp"
#include "tracellm/gateway.hpp"

namespace tracellm {

struct AnalysisScope {
    std::vector<Address> contracts;
    BlockRange block_range;
    std::optional<std::string> label;

    nlohmann::json to_json() const;
};

// Strict validation of {"contracts": [...], "block_range": [start, end],
// "label": "..."} with address normalization.
AnalysisScope parse_scope(const std::string& document);

struct PipelineConfig {
    std::optional<AnomalyModel> model;  // absent: semantic-score fallback
    size_t cutoff = 20;
    size_t k = 1;
    std::string signature_db_path;
    SuspiciousMethodSet suspicious = SuspiciousMethodSet::defaults();
    ExtractorConfig extractor;
};

struct FlaggedPath {
    std::string path_key;
    TxHash tx_hash;
    double probability = 0.0;
    Address entry_from;
    Address leaf_to;
    nlohmann::json path_summary;
    nlohmann::json subgraph;
};

struct IncidentContext {
    AnalysisScope scope;
    std::vector<CreatorInfo> creation_relations;
    std::vector<CodeArtifact> code;
    std::vector<FlaggedPath> flagged;  // probability descending
    std::map<TxHash, std::vector<BalanceDiff>> balance_diffs;
    std::vector<std::string> diagnostics;  // per-transaction soft errors

    nlohmann::json to_json() const;
};

IncidentContext run_pipeline(ChainClient& chain, const AnalysisScope& scope,
                             const PipelineConfig& config);

struct IncidentReport {
    std::vector<Address> attacker_addresses;
    std::vector<Address> victim_addresses;
    std::string exploitation_mechanism;
    std::vector<std::string> attack_execution;
    std::vector<std::pair<TxHash, std::string>> evidence_refs;
    std::string raw_model_output;

    nlohmann::json to_json() const;
    std::string to_text() const;
};

std::string build_report_prompt(const IncidentContext& context);

// Gateway failure surfaces as GatewayError carrying the assembled prompt;
// an unparseable response yields a report with raw output only.
IncidentReport render_report(const IncidentContext& context, Gateway& gateway,
                             const GatewayParams& params = {});

extern const char* kReportPromptTemplate;

}  // namespace tracellm
