#pragma once

#include <array>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "tracellm/fixture_store.hpp"
#include "tracellm/types.hpp"

namespace tracellm {

struct ChainConfig {
    uint64_t max_block_span = 50000;
    int retries = 3;
    int backoff_ms = 200;
    int parallelism = 8;
    std::string rpc_url;
    std::string explorer_url;
    std::string explorer_key;
};

struct ContractMetadata {
    std::optional<std::string> verified_source;
    std::optional<std::string> abi;
};

class ChainClient {
public:
    virtual ~ChainClient() = default;

    virtual std::vector<RawTransaction> fetch_transactions(
        const std::set<Address>& scope_addresses, const BlockRange& range) = 0;
    virtual RawTraceFrame fetch_trace(const TxHash& tx_hash) = 0;
    virtual std::vector<uint8_t> fetch_code(const Address& address) = 0;
    virtual std::vector<BalanceDiff> fetch_balance_diffs(
        const TxHash& tx_hash, const std::set<Address>& addresses) = 0;
    virtual ContractMetadata fetch_contract_metadata(const Address& address) = 0;

    // Traced probe call into a suspected proxy's fallback; nullopt when the
    // node cannot trace it.
    virtual std::optional<RawTraceFrame> probe_trace(
        const Address& address, const std::array<uint8_t, 4>& selector) = 0;

    // Explorer creator shortcut; nullopt means the caller must block-scan.
    virtual std::optional<std::pair<Address, TxHash>> creator_of(const Address& address) = 0;
};

// JSON encodings shared by the fixture store, synth generator, and dumps.
nlohmann::json tx_to_json(const RawTransaction& tx);
RawTransaction tx_from_json(const nlohmann::json& j);
nlohmann::json frame_to_json(const RawTraceFrame& f);
RawTraceFrame frame_from_json(const nlohmann::json& j);

// Replays recorded fixtures; read-only and deterministic. Blocks with no
// recorded transaction list are treated as empty.
class FixtureChainClient : public ChainClient {
public:
    FixtureChainClient(FixtureStore store, ChainConfig config = {})
        : store_(std::move(store)), config_(std::move(config)) {}

    std::vector<RawTransaction> fetch_transactions(const std::set<Address>& scope_addresses,
                                                   const BlockRange& range) override;
    RawTraceFrame fetch_trace(const TxHash& tx_hash) override;
    std::vector<uint8_t> fetch_code(const Address& address) override;
    std::vector<BalanceDiff> fetch_balance_diffs(const TxHash& tx_hash,
                                                 const std::set<Address>& addresses) override;
    ContractMetadata fetch_contract_metadata(const Address& address) override;
    std::optional<RawTraceFrame> probe_trace(const Address& address,
                                             const std::array<uint8_t, 4>& selector) override;
    std::optional<std::pair<Address, TxHash>> creator_of(const Address& address) override;

    const FixtureStore& store() const { return store_; }

private:
    FixtureStore store_;
    ChainConfig config_;
};

// Writes fixture documents in the exact shape FixtureChainClient replays.
class FixtureRecorder {
public:
    explicit FixtureRecorder(FixtureStore store) : store_(std::move(store)) {}

    void put_block_transactions(uint64_t block, const std::vector<RawTransaction>& txs);
    void put_trace(const TxHash& tx_hash, const RawTraceFrame& root);
    void put_code(const Address& address, const std::vector<uint8_t>& code);
    void put_balance_diff(const TxHash& tx_hash, const BalanceDiff& diff);
    void put_contract_metadata(const Address& address, const ContractMetadata& meta);
    void put_probe_trace(const Address& address, const RawTraceFrame& root);
    void put_creator(const Address& address, const Address& creator, const TxHash& tx);

private:
    FixtureStore store_;
};

// Live JSON-RPC + explorer client with retry and bounded parallelism.
class HttpChainClient : public ChainClient {
public:
    explicit HttpChainClient(ChainConfig config);
    ~HttpChainClient() override;

    std::vector<RawTransaction> fetch_transactions(const std::set<Address>& scope_addresses,
                                                   const BlockRange& range) override;
    RawTraceFrame fetch_trace(const TxHash& tx_hash) override;
    std::vector<uint8_t> fetch_code(const Address& address) override;
    std::vector<BalanceDiff> fetch_balance_diffs(const TxHash& tx_hash,
                                                 const std::set<Address>& addresses) override;
    ContractMetadata fetch_contract_metadata(const Address& address) override;
    std::optional<RawTraceFrame> probe_trace(const Address& address,
                                             const std::array<uint8_t, 4>& selector) override;
    std::optional<std::pair<Address, TxHash>> creator_of(const Address& address) override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Builds the configured client: fixture dir wins over RPC URL.
std::unique_ptr<ChainClient> make_chain_client(const ChainConfig& config,
                                               const std::string& fixture_dir);

}  // namespace tracellm
