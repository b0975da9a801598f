#include "tracellm/chain_access.hpp"

#include <algorithm>
#include <chrono>
#include <mutex>
#include <thread>

namespace tracellm {

using nlohmann::json;

json tx_to_json(const RawTransaction& tx) {
    json j;
    j["tx_hash"] = tx.tx_hash;
    j["from"] = tx.from;
    j["to"] = tx.to ? json(*tx.to) : json(nullptr);
    j["value"] = tx.value;
    j["input"] = to_hex(tx.input);
    j["block_number"] = tx.block_number;
    j["tx_index"] = tx.tx_index;
    j["receipt_contract_address"] =
        tx.receipt_contract_address ? json(*tx.receipt_contract_address) : json(nullptr);
    return j;
}

RawTransaction tx_from_json(const json& j) {
    RawTransaction tx;
    tx.tx_hash = j.at("tx_hash").get<std::string>();
    tx.from = j.at("from").get<std::string>();
    if (!j.at("to").is_null())
        tx.to = j.at("to").get<std::string>();
    tx.value = j.at("value").get<std::string>();
    tx.input = from_hex(j.at("input").get<std::string>());
    tx.block_number = j.at("block_number").get<uint64_t>();
    tx.tx_index = j.value("tx_index", uint64_t{0});
    if (j.contains("receipt_contract_address") && !j.at("receipt_contract_address").is_null())
        tx.receipt_contract_address = j.at("receipt_contract_address").get<std::string>();
    return tx;
}

json frame_to_json(const RawTraceFrame& f) {
    json j;
    j["type"] = frame_type_name(f.frame_type);
    j["from"] = f.from;
    j["to"] = f.to;
    j["value"] = f.value;
    j["input"] = to_hex(f.input);
    j["status"] = call_status_name(f.status);
    j["children"] = json::array();
    for (const auto& c : f.children)
        j["children"].push_back(frame_to_json(c));
    return j;
}

RawTraceFrame frame_from_json(const json& j) {
    RawTraceFrame f;
    f.frame_type = frame_type_from_name(j.at("type").get<std::string>());
    f.from = j.at("from").get<std::string>();
    f.to = j.at("to").get<std::string>();
    f.value = j.at("value").get<std::string>();
    f.input = from_hex(j.at("input").get<std::string>());
    f.status = call_status_from_name(j.at("status").get<std::string>());
    for (const auto& c : j.at("children"))
        f.children.push_back(frame_from_json(c));
    return f;
}

namespace {

bool tx_touches_scope(const RawTransaction& tx, const std::set<Address>& scope) {
    if (scope.count(tx.from)) return true;
    if (tx.to && scope.count(*tx.to)) return true;
    if (tx.receipt_contract_address && scope.count(*tx.receipt_contract_address)) return true;
    return false;
}

}  // namespace

// ---------------------------------------------------------------- fixtures

std::vector<RawTransaction> FixtureChainClient::fetch_transactions(
    const std::set<Address>& scope_addresses, const BlockRange& range) {
    if (!range.valid())
        throw ScopeError("invalid block range");
    if (range.span() > config_.max_block_span)
        throw ScopeError("block range exceeds max span of " +
                         std::to_string(config_.max_block_span));
    std::vector<RawTransaction> out;
    if (scope_addresses.empty())
        return out;
    for (uint64_t b = range.start_block; b <= range.end_block; ++b) {
        auto doc = store_.lookup("block_txs", json{{"block", b}});
        if (!doc)
            continue;
        for (const auto& jtx : *doc) {
            RawTransaction tx = tx_from_json(jtx);
            if (tx_touches_scope(tx, scope_addresses))
                out.push_back(std::move(tx));
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return std::tie(a.block_number, a.tx_index) < std::tie(b.block_number, b.tx_index);
    });
    return out;
}

RawTraceFrame FixtureChainClient::fetch_trace(const TxHash& tx_hash) {
    auto doc = store_.lookup("debug_traceTransaction", json{{"tx_hash", tx_hash}});
    if (!doc)
        throw NotFoundError("no trace fixture for " + tx_hash);
    try {
        return frame_from_json(*doc);
    } catch (const json::exception& e) {
        throw DecodeError(std::string("malformed trace fixture: ") + e.what());
    }
}

std::vector<uint8_t> FixtureChainClient::fetch_code(const Address& address) {
    auto doc = store_.lookup("eth_getCode", json{{"address", address}});
    if (!doc)
        return {};  // unrecorded address behaves like an EOA
    return from_hex(doc->get<std::string>());
}

std::vector<BalanceDiff> FixtureChainClient::fetch_balance_diffs(
    const TxHash& tx_hash, const std::set<Address>& addresses) {
    std::vector<BalanceDiff> out;
    for (const auto& addr : addresses) {
        auto doc = store_.lookup("balance_diff", json{{"tx_hash", tx_hash}, {"address", addr}});
        BalanceDiff d;
        d.address = addr;
        if (doc) {
            d.before = doc->at("before").get<std::string>();
            d.after = doc->at("after").get<std::string>();
        }
        out.push_back(std::move(d));
    }
    return out;
}

ContractMetadata FixtureChainClient::fetch_contract_metadata(const Address& address) {
    ContractMetadata meta;
    auto doc = store_.lookup("explorer_getContractMeta", json{{"address", address}});
    if (doc) {
        if (doc->contains("verified_source") && !doc->at("verified_source").is_null())
            meta.verified_source = doc->at("verified_source").get<std::string>();
        if (doc->contains("abi") && !doc->at("abi").is_null())
            meta.abi = doc->at("abi").get<std::string>();
    }
    return meta;
}

std::optional<RawTraceFrame> FixtureChainClient::probe_trace(
    const Address& address, const std::array<uint8_t, 4>&) {
    // Any non-matching selector routes through the fallback, so the fixture
    // is keyed by address alone.
    auto doc = store_.lookup("debug_traceCall_probe", json{{"address", address}});
    if (!doc)
        return std::nullopt;
    return frame_from_json(*doc);
}

std::optional<std::pair<Address, TxHash>> FixtureChainClient::creator_of(const Address& address) {
    auto doc = store_.lookup("explorer_getContractCreator", json{{"address", address}});
    if (!doc)
        return std::nullopt;
    return std::make_pair(doc->at("creator").get<std::string>(),
                          doc->at("tx_hash").get<std::string>());
}

// ---------------------------------------------------------------- recorder

void FixtureRecorder::put_block_transactions(uint64_t block,
                                             const std::vector<RawTransaction>& txs) {
    json arr = json::array();
    for (const auto& tx : txs)
        arr.push_back(tx_to_json(tx));
    store_.record("block_txs", json{{"block", block}}, arr);
}

void FixtureRecorder::put_trace(const TxHash& tx_hash, const RawTraceFrame& root) {
    store_.record("debug_traceTransaction", json{{"tx_hash", tx_hash}}, frame_to_json(root));
}

void FixtureRecorder::put_code(const Address& address, const std::vector<uint8_t>& code) {
    store_.record("eth_getCode", json{{"address", address}}, to_hex(code));
}

void FixtureRecorder::put_balance_diff(const TxHash& tx_hash, const BalanceDiff& diff) {
    store_.record("balance_diff", json{{"tx_hash", tx_hash}, {"address", diff.address}},
                  json{{"before", diff.before}, {"after", diff.after}});
}

void FixtureRecorder::put_contract_metadata(const Address& address,
                                            const ContractMetadata& meta) {
    json j;
    j["verified_source"] = meta.verified_source ? json(*meta.verified_source) : json(nullptr);
    j["abi"] = meta.abi ? json(*meta.abi) : json(nullptr);
    store_.record("explorer_getContractMeta", json{{"address", address}}, j);
}

void FixtureRecorder::put_probe_trace(const Address& address, const RawTraceFrame& root) {
    store_.record("debug_traceCall_probe", json{{"address", address}}, frame_to_json(root));
}

void FixtureRecorder::put_creator(const Address& address, const Address& creator,
                                  const TxHash& tx) {
    store_.record("explorer_getContractCreator", json{{"address", address}},
                  json{{"creator", creator}, {"tx_hash", tx}});
}

// ---------------------------------------------------------------- factory

std::unique_ptr<ChainClient> make_chain_client(const ChainConfig& config,
                                               const std::string& fixture_dir) {
    if (!fixture_dir.empty())
        return std::make_unique<FixtureChainClient>(FixtureStore(fixture_dir), config);
    if (!config.rpc_url.empty())
        return std::make_unique<HttpChainClient>(config);
    throw ValidationError("no fixture directory and no RPC URL configured");
}

}  // namespace tracellm
