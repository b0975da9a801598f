#include "tracellm/synth.hpp"

#include <fstream>

#include "tracellm/chain_access.hpp"
#include "tracellm/chain_detect.hpp"

namespace tracellm::synth {

namespace {

Address random_address(std::mt19937_64& rng) {
    std::vector<uint8_t> bytes(20);
    for (auto& b : bytes)
        b = static_cast<uint8_t>(rng());
    return to_hex(bytes);
}

TxHash random_tx_hash(std::mt19937_64& rng) {
    std::vector<uint8_t> bytes(32);
    for (auto& b : bytes)
        b = static_cast<uint8_t>(rng());
    return to_hex(bytes);
}

// Builds a pre-order record list for one call subtree. Every node gets a
// fresh callee address so reconstruction is unambiguous.
struct TraceBuilder {
    std::mt19937_64& rng;
    std::vector<CallRecord> records;

    size_t emit(const Address& from, const std::string& method) {
        CallRecord rec;
        rec.index = records.size();
        rec.from = from;
        rec.to = random_address(rng);
        rec.method = method;
        rec.value = "0";
        rec.call_type = FrameType::CALL;
        rec.status = CallStatus::SUCCESS;
        records.push_back(rec);
        return rec.index;
    }

    const Address& callee(size_t idx) const { return records[idx].to; }
};

const std::vector<std::string> kBenignTokens = {
    "swap", "getReserves", "sync", "approve", "deposit", "quote",
    "mint", "getPrice", "totalSupply", "allowance"};

const std::vector<std::string> kSuspiciousCommon = {"transfer", "transferFrom", "balanceOf",
                                                    "require"};

const std::vector<std::string> kAttackMotif = {"initialize", "drain", "sweepToken",
                                               "tokensReceived", "call"};

std::string pick(std::mt19937_64& rng, const std::vector<std::string>& pool) {
    return pool[rng() % pool.size()];
}

// Benign transaction: a few shallow, repetitive call chains.
std::vector<CallRecord> benign_trace(std::mt19937_64& rng, const Address& eoa) {
    TraceBuilder tb{rng, {}};
    size_t root = tb.emit(eoa, pick(rng, kBenignTokens));
    size_t n_chains = 1 + rng() % 3;
    for (size_t c = 0; c < n_chains; ++c) {
        size_t parent = root;
        size_t len = 1 + rng() % 3;
        for (size_t d = 0; d < len; ++d) {
            bool common_suspicious = rng() % 3 == 0;
            size_t child = tb.emit(tb.callee(parent),
                                   common_suspicious ? pick(rng, kSuspiciousCommon)
                                                     : pick(rng, kBenignTokens));
            parent = child;
        }
    }
    return tb.records;
}

// Decoy transaction: shallow paths saturated with suspicious methods. These
// defeat a purely semantic ranking but carry no structural anomaly.
std::vector<CallRecord> decoy_trace(std::mt19937_64& rng, const Address& eoa) {
    TraceBuilder tb{rng, {}};
    size_t root = tb.emit(eoa, "transfer");
    size_t n = 2 + rng() % 3;
    for (size_t c = 0; c < n; ++c)
        tb.emit(tb.callee(root), pick(rng, kSuspiciousCommon));
    return tb.records;
}

// Attack transaction: one deep chain mixing the attack motif with a rare
// incident-specific token, plus side branches that raise path fanout.
// Returns the leaf indices of attack paths via out-param.
std::vector<CallRecord> attack_trace(std::mt19937_64& rng, const Address& eoa,
                                     const std::string& rare_token,
                                     std::vector<size_t>& attack_leaves) {
    TraceBuilder tb{rng, {}};
    size_t root = tb.emit(eoa, "execute");
    size_t parent = root;
    size_t chain_len = 6 + rng() % 3;
    for (size_t d = 0; d < chain_len; ++d) {
        std::string method;
        if (d == 1)
            method = rare_token;
        else if (rng() % 2 == 0)
            method = kAttackMotif[d % kAttackMotif.size()];
        else
            method = pick(rng, kBenignTokens);
        size_t child = tb.emit(tb.callee(parent), method);
        // Side branches off the attack chain raise the path's fanout sum.
        if (rng() % 2 == 0)
            tb.emit(tb.callee(parent), pick(rng, kBenignTokens));
        parent = child;
    }
    attack_leaves.push_back(parent);
    return tb.records;
}

void append_labeled(SynthIncident& incident, const TxHash& tx, const CallForest& forest,
                    const std::set<size_t>& attack_leaves) {
    for (const auto& path : enumerate_paths(forest)) {
        LabeledPath lp;
        lp.incident_id = incident.incident_id;
        lp.tx_hash = tx;
        lp.path_key = tx + ":" + std::to_string(path.nodes.back());
        lp.sig = path.sig;
        lp.fanout = fanout(forest, path);
        lp.depth = depth(path);
        lp.label = attack_leaves.count(path.nodes.back()) ? 1 : 0;
        incident.labeled.push_back(std::move(lp));
    }
}

}  // namespace

SynthBenchmark generate_benchmark(uint64_t seed, size_t n_incidents) {
    SynthBenchmark bench;
    for (size_t i = 0; i < n_incidents; ++i) {
        std::mt19937_64 rng(seed * 1000003ull + i);
        SynthIncident incident;
        incident.incident_id = "incident_" + std::to_string(i);
        Address attacker = random_address(rng);
        std::string rare_token = "exploit_stage_" + std::to_string(rng() % 100000);

        size_t n_benign = 8 + rng() % 6;
        for (size_t t = 0; t < n_benign; ++t) {
            auto records = benign_trace(rng, random_address(rng));
            SynthTransaction tx{random_tx_hash(rng), build_forest(records)};
            append_labeled(incident, tx.tx_hash, tx.forest, {});
            incident.transactions.push_back(std::move(tx));
        }
        size_t n_decoys = 10 + rng() % 6;
        for (size_t t = 0; t < n_decoys; ++t) {
            auto records = decoy_trace(rng, random_address(rng));
            SynthTransaction tx{random_tx_hash(rng), build_forest(records)};
            append_labeled(incident, tx.tx_hash, tx.forest, {});
            incident.transactions.push_back(std::move(tx));
        }
        size_t n_attack = 2 + rng() % 3;
        for (size_t t = 0; t < n_attack; ++t) {
            std::vector<size_t> leaves;
            auto records = attack_trace(rng, attacker, rare_token, leaves);
            SynthTransaction tx{random_tx_hash(rng), build_forest(records)};
            append_labeled(incident, tx.tx_hash, tx.forest,
                           std::set<size_t>(leaves.begin(), leaves.end()));
            incident.transactions.push_back(std::move(tx));
        }
        bench.incidents.push_back(std::move(incident));
    }
    return bench;
}

std::vector<LabeledPath> benchmark_dataset(const SynthBenchmark& bench) {
    std::vector<LabeledPath> out;
    for (const auto& incident : bench.incidents)
        out.insert(out.end(), incident.labeled.begin(), incident.labeled.end());
    return out;
}

std::map<std::string, std::vector<LabeledPath>> group_by_incident(
    const std::vector<LabeledPath>& paths) {
    std::map<std::string, std::vector<LabeledPath>> groups;
    for (const auto& p : paths)
        groups[p.incident_id].push_back(p);
    return groups;
}

namespace {

// Selector assignment for fixture traces: method names get stable synthetic
// selectors recorded in the signature DB file.
class SelectorTable {
public:
    std::array<uint8_t, 4> selector_for(const std::string& method) {
        auto it = table_.find(method);
        if (it != table_.end())
            return it->second;
        uint64_t h = 14695981039346656037ull;
        for (unsigned char c : method) {
            h ^= c;
            h *= 1099511628211ull;
        }
        std::array<uint8_t, 4> sel{static_cast<uint8_t>(h >> 24), static_cast<uint8_t>(h >> 16),
                                   static_cast<uint8_t>(h >> 8), static_cast<uint8_t>(h)};
        table_[method] = sel;
        return sel;
    }

    void write_sigdb(const std::string& path) const {
        std::ofstream out(path);
        for (const auto& [method, sel] : table_) {
            std::string hex = to_hex({sel.begin(), sel.end()}).substr(2);
            out << hex << "\t" << method << "()\n";
        }
    }

private:
    std::map<std::string, std::array<uint8_t, 4>> table_;
};

RawTraceFrame frame_for(const CallForest& forest, size_t id, SelectorTable& selectors) {
    const CallRecord& r = forest.node(id).record;
    RawTraceFrame f;
    f.frame_type = r.call_type;
    f.from = r.from;
    f.to = r.to;
    f.value = r.value;
    auto sel = selectors.selector_for(r.method);
    f.input.assign(sel.begin(), sel.end());
    f.status = r.status;
    for (size_t c : forest.node(id).children)
        f.children.push_back(frame_for(forest, c, selectors));
    return f;
}

}  // namespace

nlohmann::json write_incident_fixtures(const std::string& fixture_dir,
                                       const std::string& sigdb_path, uint64_t seed) {
    std::mt19937_64 rng(seed);
    FixtureRecorder rec{FixtureStore(fixture_dir)};
    SelectorTable selectors;

    Address attacker_eoa = random_address(rng);
    Address attack_contract = random_address(rng);
    Address victim_proxy = random_address(rng);
    Address victim_impl = random_address(rng);
    Address victim_deployer = random_address(rng);

    // Victim is an EIP-1167 minimal proxy in front of a verified contract.
    std::vector<uint8_t> proxy_code = {0x36, 0x3d, 0x3d, 0x37, 0x3d,
                                       0x3d, 0x3d, 0x36, 0x3d, 0x73};
    auto impl_bytes = from_hex(victim_impl);
    proxy_code.insert(proxy_code.end(), impl_bytes.begin(), impl_bytes.end());
    const std::vector<uint8_t> suffix = {0x5a, 0xf4, 0x3d, 0x82, 0x80, 0x3e, 0x90,
                                         0x3d, 0x91, 0x60, 0x2b, 0x57, 0xfd, 0x5b, 0xf3};
    proxy_code.insert(proxy_code.end(), suffix.begin(), suffix.end());
    rec.put_code(victim_proxy, proxy_code);
    rec.put_code(victim_impl, {0x60, 0x80, 0x60, 0x40, 0x00});
    rec.put_code(attack_contract, {0x60, 0x80, 0x60, 0x40, 0x00});
    rec.put_contract_metadata(victim_impl,
                              {std::string("contract Vault { function withdraw() public {} }"),
                               std::string("[]")});
    rec.put_contract_metadata(victim_proxy, {});
    rec.put_contract_metadata(attack_contract, {});

    uint64_t block0 = 1000;

    // Block 1000: attacker deploys the attack contract.
    RawTransaction deploy;
    deploy.tx_hash = random_tx_hash(rng);
    deploy.from = attacker_eoa;
    deploy.value = "0";
    deploy.block_number = block0;
    deploy.tx_index = 0;
    deploy.receipt_contract_address = attack_contract;
    rec.put_block_transactions(block0, {deploy});
    rec.put_creator(attack_contract, attacker_eoa, deploy.tx_hash);
    rec.put_creator(victim_proxy, victim_deployer, random_tx_hash(rng));
    rec.put_creator(victim_impl, victim_deployer, random_tx_hash(rng));
    {
        RawTraceFrame f;
        f.frame_type = FrameType::CREATE;
        f.from = attacker_eoa;
        f.to = attack_contract;
        f.value = "0";
        rec.put_trace(deploy.tx_hash, f);
    }

    // Block 1001: the attack transaction through the proxy.
    std::vector<CallRecord> records;
    auto emit = [&](const Address& from, const Address& to, const std::string& method) {
        CallRecord r;
        r.index = records.size();
        r.from = from;
        r.to = to;
        r.method = method;
        records.push_back(r);
        return r.index;
    };
    emit(attacker_eoa, attack_contract, "execute");
    emit(attack_contract, victim_proxy, "initialize");
    emit(victim_proxy, victim_impl, "drain");
    emit(victim_impl, random_address(rng), "transfer");
    emit(attack_contract, random_address(rng), "balanceOf");
    CallForest attack_forest = build_forest(records);

    RawTransaction attack_tx;
    attack_tx.tx_hash = random_tx_hash(rng);
    attack_tx.from = attacker_eoa;
    attack_tx.to = attack_contract;
    attack_tx.value = "0";
    attack_tx.block_number = block0 + 1;
    attack_tx.tx_index = 0;
    auto sel = selectors.selector_for("execute");
    attack_tx.input.assign(sel.begin(), sel.end());
    rec.put_block_transactions(block0 + 1, {attack_tx});
    rec.put_trace(attack_tx.tx_hash, frame_for(attack_forest, 0, selectors));

    rec.put_balance_diff(attack_tx.tx_hash,
                         {victim_proxy, "5000000000000000000", "0"});
    rec.put_balance_diff(attack_tx.tx_hash,
                         {attacker_eoa, "100000000000000000", "5100000000000000000"});

    selectors.write_sigdb(sigdb_path);

    nlohmann::json scope;
    scope["contracts"] = nlohmann::json::array({victim_proxy, attack_contract});
    scope["block_range"] = nlohmann::json::array({block0, block0 + 1});
    scope["label"] = "synthetic incident " + std::to_string(seed);
    return scope;
}

}  // namespace tracellm::synth
