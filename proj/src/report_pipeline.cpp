#include "tracellm/report_pipeline.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace tracellm {

using nlohmann::json;

const char* kReportPromptTemplate =
    "You are a blockchain security analyst. Using the structured evidence below,\n"
    "write an incident report. Respond with a single JSON object with the keys:\n"
    "attacker_addresses (list), victim_addresses (list), exploitation_mechanism\n"
    "(string), attack_execution (ordered list of steps), evidence_refs (list of\n"
    "[tx_hash, path_key] pairs drawn only from the flagged paths below).\n"
    "\n"
    "== CONTRACT CREATION RELATIONS ==\n"
    "{CREATION_RELATIONS}\n"
    "\n"
    "== CONTRACT CODE ARTIFACTS ==\n"
    "{CODE_ARTIFACTS}\n"
    "\n"
    "== FLAGGED EXECUTION PATHS AND ENCLOSING SUBGRAPHS ==\n"
    "{SUBGRAPHS}\n"
    "\n"
    "== BALANCE DIFFS ==\n"
    "{BALANCE_DIFFS}\n";

json AnalysisScope::to_json() const {
    json j;
    j["contracts"] = contracts;
    j["block_range"] = json::array({block_range.start_block, block_range.end_block});
    j["label"] = label ? json(*label) : json(nullptr);
    return j;
}

AnalysisScope parse_scope(const std::string& document) {
    json j = json::parse(document, nullptr, false);
    if (j.is_discarded())
        throw ValidationError("scope document is not valid JSON");
    if (!j.is_object())
        throw ValidationError("scope document must be a JSON object");
    for (const auto& [key, value] : j.items())
        if (key != "contracts" && key != "block_range" && key != "label")
            throw ValidationError("unknown scope field: " + key);
    if (!j.contains("contracts"))
        throw ValidationError("missing field: contracts");
    if (!j.contains("block_range"))
        throw ValidationError("missing field: block_range");

    AnalysisScope scope;
    if (!j["contracts"].is_array() || j["contracts"].empty())
        throw ValidationError("contracts must be a nonempty array");
    for (const auto& a : j["contracts"])
        scope.contracts.push_back(normalize_address(a.get<std::string>()));

    const auto& br = j["block_range"];
    if (!br.is_array() || br.size() != 2 || !br[0].is_number_unsigned() ||
        !br[1].is_number_unsigned())
        throw ValidationError("block_range must be [start, end] with non-negative integers");
    scope.block_range.start_block = br[0].get<uint64_t>();
    scope.block_range.end_block = br[1].get<uint64_t>();
    if (!scope.block_range.valid())
        throw ValidationError("block_range start exceeds end");

    if (j.contains("label") && !j["label"].is_null())
        scope.label = j["label"].get<std::string>();
    return scope;
}

namespace {

json creator_to_json(const CreatorInfo& c) {
    json j;
    j["contract"] = c.contract;
    j["creator_eoa"] = c.creator_eoa;
    j["creation_tx"] = c.creation_tx;
    j["deployed_set"] = std::vector<Address>(c.deployed_set.begin(), c.deployed_set.end());
    j["factory_chain"] = c.factory_chain;
    if (c.diagnostic)
        j["diagnostic"] = *c.diagnostic;
    return j;
}

json flagged_to_json(const FlaggedPath& f) {
    json j;
    j["path_key"] = f.path_key;
    j["tx_hash"] = f.tx_hash;
    j["probability"] = f.probability;
    j["entry_from"] = f.entry_from;
    j["leaf_to"] = f.leaf_to;
    j["path"] = f.path_summary;
    j["subgraph"] = f.subgraph;
    return j;
}

}  // namespace

json IncidentContext::to_json() const {
    json j;
    j["scope"] = scope.to_json();
    j["creation_relations"] = json::array();
    for (const auto& c : creation_relations)
        j["creation_relations"].push_back(creator_to_json(c));
    j["code"] = json::array();
    for (const auto& a : code)
        j["code"].push_back(a.to_json());
    j["flagged"] = json::array();
    for (const auto& f : flagged)
        j["flagged"].push_back(flagged_to_json(f));
    j["balance_diffs"] = json::object();
    for (const auto& [tx, diffs] : balance_diffs) {
        json arr = json::array();
        for (const auto& d : diffs)
            arr.push_back({{"address", d.address}, {"before", d.before}, {"after", d.after}});
        j["balance_diffs"][tx] = arr;
    }
    j["diagnostics"] = diagnostics;
    return j;
}

IncidentContext run_pipeline(ChainClient& chain, const AnalysisScope& scope,
                             const PipelineConfig& config) {
    IncidentContext ctx;
    ctx.scope = scope;

    std::set<Address> seeds(scope.contracts.begin(), scope.contracts.end());
    ScopeResult sr = build_scope(chain, seeds, scope.block_range);
    ctx.creation_relations = sr.creators;

    SignatureDB db;
    if (!config.signature_db_path.empty())
        db = load_signature_db(config.signature_db_path);

    struct TxPaths {
        TxHash tx;
        CallForest forest;
        std::vector<ExecPath> paths;
    };
    std::vector<TxPaths> per_tx;
    for (const auto& tx : sr.transactions) {
        try {
            auto trace = chain.fetch_trace(tx.tx_hash);
            auto records = flatten(trace, db);
            per_tx.push_back({tx.tx_hash, build_forest(records), {}});
            per_tx.back().paths = enumerate_paths(per_tx.back().forest);
        } catch (const std::exception& e) {
            ctx.diagnostics.push_back("tx " + tx.tx_hash + " skipped: " + e.what());
        }
    }

    // Incident-wide corpus over every root-to-leaf path of every transaction.
    std::vector<std::vector<std::string>> all_sigs;
    for (const auto& t : per_tx)
        for (const auto& p : t.paths)
            all_sigs.push_back(p.sig);
    PathCorpus corpus(all_sigs);

    struct Candidate {
        size_t tx_idx;
        size_t path_idx;
        std::string path_key;
        PathFeatures features;
    };
    std::vector<Candidate> candidates;
    for (size_t ti = 0; ti < per_tx.size(); ++ti) {
        auto feats = extract_features_omp(per_tx[ti].forest, per_tx[ti].paths, corpus,
                                          config.suspicious);
        for (size_t pi = 0; pi < per_tx[ti].paths.size(); ++pi) {
            std::string key = per_tx[ti].tx +
                              ":" + std::to_string(per_tx[ti].paths[pi].nodes.back());
            candidates.push_back({ti, pi, key, std::move(feats[pi])});
        }
    }

    std::vector<ScoredPath> scored;
    if (config.model) {
        std::vector<PathFeatures> feats;
        feats.reserve(candidates.size());
        for (const auto& c : candidates)
            feats.push_back(c.features);
        ScalerBounds bounds = scaler_bounds(feats);
        for (const auto& c : candidates) {
            auto x = assemble_vector(c.features, config.model->vocab, bounds);
            scored.push_back({c.path_key, predict(*config.model, x), c.features.semantic});
        }
    } else {
        for (const auto& c : candidates)
            scored.push_back({c.path_key, c.features.semantic, c.features.semantic});
    }
    RankingResult ranking = rank_paths(scored, config.cutoff);

    std::map<std::string, const Candidate*> by_key;
    for (const auto& c : candidates)
        by_key[c.path_key] = &c;

    std::set<Address> flagged_addresses;
    size_t limit = std::min(config.cutoff, ranking.ranked.size());
    for (size_t i = 0; i < limit; ++i) {
        const auto& [key, prob] = ranking.ranked[i];
        const Candidate& c = *by_key.at(key);
        const auto& txp = per_tx[c.tx_idx];
        const ExecPath& path = txp.paths[c.path_idx];

        FlaggedPath f;
        f.path_key = key;
        f.tx_hash = txp.tx;
        f.probability = prob;
        f.entry_from = txp.forest.node(path.nodes.front()).record.from;
        f.leaf_to = txp.forest.node(path.nodes.back()).record.to;
        f.path_summary = json{{"sig", path.sig},
                              {"depth", c.features.depth},
                              {"fanout", c.features.fanout},
                              {"semantic", c.features.semantic}};
        auto sg = extract_subgraph(txp.forest, path, config.k, key);
        f.subgraph = subgraph_to_json(txp.forest, sg, path);
        for (size_t v : sg.nodes) {
            flagged_addresses.insert(txp.forest.node(v).record.from);
            flagged_addresses.insert(txp.forest.node(v).record.to);
        }
        ctx.flagged.push_back(std::move(f));
    }

    // Every address visible in a flagged subgraph gets a code artifact.
    std::set<Address> code_addresses = flagged_addresses;
    code_addresses.insert(scope.contracts.begin(), scope.contracts.end());
    for (const auto& p : sr.proxies)
        if (p.implementation)
            code_addresses.insert(*p.implementation);
    Extractor extractor(chain, config.extractor);
    for (const auto& addr : code_addresses)
        ctx.code.push_back(extractor.extract(addr));

    for (const auto& tx : sr.transactions)
        ctx.balance_diffs[tx.tx_hash] = chain.fetch_balance_diffs(tx.tx_hash, sr.addresses);

    return ctx;
}

std::string build_report_prompt(const IncidentContext& context) {
    std::string creation;
    for (const auto& c : context.creation_relations)
        creation += creator_to_json(c).dump() + "\n";
    std::string code;
    for (const auto& a : context.code)
        code += a.to_json().dump() + "\n";
    std::string subgraphs;
    for (const auto& f : context.flagged) {
        // Machine-readable header line per path, consumed by the mock gateway.
        subgraphs += "PATH " + f.path_key + " " + f.tx_hash + " " + f.entry_from + " " +
                     f.leaf_to + "\n";
        subgraphs += flagged_to_json(f).dump() + "\n";
    }
    std::string balances;
    for (const auto& [tx, diffs] : context.balance_diffs)
        for (const auto& d : diffs)
            balances += tx + " " + d.address + " " + d.before + " -> " + d.after + "\n";

    std::string prompt = kReportPromptTemplate;
    auto sub = [&](const std::string& key, const std::string& value) {
        auto pos = prompt.find(key);
        if (pos != std::string::npos)
            prompt.replace(pos, key.size(), value);
    };
    sub("{CREATION_RELATIONS}", creation);
    sub("{CODE_ARTIFACTS}", code);
    sub("{SUBGRAPHS}", subgraphs);
    sub("{BALANCE_DIFFS}", balances);
    return prompt;
}

json IncidentReport::to_json() const {
    json j;
    j["attacker_addresses"] = attacker_addresses;
    j["victim_addresses"] = victim_addresses;
    j["exploitation_mechanism"] = exploitation_mechanism;
    j["attack_execution"] = attack_execution;
    j["evidence_refs"] = json::array();
    for (const auto& [tx, key] : evidence_refs)
        j["evidence_refs"].push_back(json::array({tx, key}));
    j["raw_model_output"] = raw_model_output;
    return j;
}

std::string IncidentReport::to_text() const {
    std::ostringstream out;
    out << "INCIDENT REPORT\n===============\n\n";
    out << "Attacker addresses:\n";
    for (const auto& a : attacker_addresses)
        out << "  - " << a << "\n";
    out << "Victim addresses:\n";
    for (const auto& a : victim_addresses)
        out << "  - " << a << "\n";
    out << "\nExploitation mechanism:\n" << exploitation_mechanism << "\n";
    out << "\nAttack execution:\n";
    for (size_t i = 0; i < attack_execution.size(); ++i)
        out << "  " << (i + 1) << ". " << attack_execution[i] << "\n";
    out << "\nEvidence:\n";
    for (const auto& [tx, key] : evidence_refs)
        out << "  - tx " << tx << " path " << key << "\n";
    return out.str();
}

namespace {

// Models often wrap JSON in code fences; strip them before parsing.
std::string strip_fences(const std::string& text) {
    auto start = text.find('{');
    auto end = text.rfind('}');
    if (start == std::string::npos || end == std::string::npos || end < start)
        return text;
    return text.substr(start, end - start + 1);
}

}  // namespace

IncidentReport render_report(const IncidentContext& context, Gateway& gateway,
                             const GatewayParams& params) {
    std::string prompt = build_report_prompt(context);
    std::string response;
    try {
        response = gateway.send(prompt, params);
    } catch (const GatewayError& e) {
        throw GatewayError(std::string(e.what()) + "\n--- assembled prompt ---\n" + prompt);
    }

    IncidentReport report;
    report.raw_model_output = response;

    json j = json::parse(strip_fences(response), nullptr, false);
    if (j.is_discarded() || !j.is_object())
        return report;  // raw output only

    std::set<std::string> flagged_keys;
    for (const auto& f : context.flagged)
        flagged_keys.insert(f.path_key);

    try {
        if (j.contains("attacker_addresses"))
            for (const auto& a : j["attacker_addresses"])
                if (a.is_string() && is_address(a.get<std::string>()))
                    report.attacker_addresses.push_back(normalize_address(a.get<std::string>()));
        if (j.contains("victim_addresses"))
            for (const auto& a : j["victim_addresses"])
                if (a.is_string() && is_address(a.get<std::string>()))
                    report.victim_addresses.push_back(normalize_address(a.get<std::string>()));
        if (j.contains("exploitation_mechanism") && j["exploitation_mechanism"].is_string())
            report.exploitation_mechanism = j["exploitation_mechanism"].get<std::string>();
        if (j.contains("attack_execution") && j["attack_execution"].is_array())
            for (const auto& step : j["attack_execution"])
                if (step.is_string())
                    report.attack_execution.push_back(step.get<std::string>());
        if (j.contains("evidence_refs") && j["evidence_refs"].is_array())
            for (const auto& ref : j["evidence_refs"])
                if (ref.is_array() && ref.size() == 2 && ref[0].is_string() &&
                    ref[1].is_string() && flagged_keys.count(ref[1].get<std::string>()))
                    report.evidence_refs.emplace_back(ref[0].get<std::string>(),
                                                      ref[1].get<std::string>());
    } catch (const json::exception&) {
        // Partial structure is fine; whatever parsed stays.
    }
    return report;
}

}  // namespace tracellm
