#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tracellm/chain_access.hpp"
#include "tracellm/types.hpp"

namespace tracellm {

// Single-pass disassembly honoring PUSH1-PUSH32 immediate lengths.
struct Disassembly {
    std::vector<size_t> opcode_offsets;
    bool has_delegatecall = false;  // 0xF4 at an opcode position
    std::vector<std::array<uint8_t, 4>> push4_immediates;
};

Disassembly disassemble(const std::vector<uint8_t>& code);

// EIP-1167 runtime pattern; returns the embedded implementation address.
std::optional<Address> match_minimal_proxy(const std::vector<uint8_t>& code);

enum class ProxyMechanism { MINIMAL_PROXY_HARDCODED, STORAGE_SLOT_TRACED, NONE };

std::string proxy_mechanism_name(ProxyMechanism m);

struct ProxyResolution {
    Address address;
    bool is_proxy = false;
    std::optional<Address> implementation;
    ProxyMechanism mechanism = ProxyMechanism::NONE;
    std::optional<std::string> diagnostic;
};

ProxyResolution detect_proxy(ChainClient& chain, const Address& address);

struct CreatorInfo {
    Address contract;
    Address creator_eoa;
    TxHash creation_tx;
    std::set<Address> deployed_set;
    std::vector<Address> factory_chain;  // intermediate contract creators
    std::optional<std::string> diagnostic;
};

inline constexpr int kFactoryDepthCap = 8;

CreatorInfo resolve_creator(ChainClient& chain, const Address& address, const BlockRange& range);

struct ScopeResult {
    std::set<Address> addresses;
    std::vector<RawTransaction> transactions;
    std::vector<ProxyResolution> proxies;
    std::vector<CreatorInfo> creators;
};

// One expansion round over proxy implementations and creator deployment
// sets, then all transactions touching the closure.
ScopeResult build_scope(ChainClient& chain, const std::set<Address>& seed_addresses,
                        const BlockRange& range);

}  // namespace tracellm
