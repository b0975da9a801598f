#include "tracellm/chain_detect.hpp"

#include <algorithm>
#include <random>

namespace tracellm {

namespace {

constexpr uint8_t kDelegateCall = 0xF4;
constexpr uint8_t kPush1 = 0x60;
constexpr uint8_t kPush4 = 0x63;
constexpr uint8_t kPush32 = 0x7F;

const std::vector<uint8_t> kMinimalProxyPrefix = {0x36, 0x3d, 0x3d, 0x37, 0x3d,
                                                  0x3d, 0x3d, 0x36, 0x3d, 0x73};
const std::vector<uint8_t> kMinimalProxySuffix = {0x5a, 0xf4, 0x3d, 0x82, 0x80,
                                                  0x3e, 0x90, 0x3d, 0x91, 0x60,
                                                  0x2b, 0x57, 0xfd, 0x5b, 0xf3};

const Address kZeroAddress = "0x0000000000000000000000000000000000000000";

}  // namespace

Disassembly disassemble(const std::vector<uint8_t>& code) {
    Disassembly d;
    size_t i = 0;
    while (i < code.size()) {
        uint8_t op = code[i];
        d.opcode_offsets.push_back(i);
        if (op == kDelegateCall)
            d.has_delegatecall = true;
        if (op >= kPush1 && op <= kPush32) {
            size_t imm = op - kPush1 + 1;
            if (op == kPush4 && i + 4 < code.size()) {
                std::array<uint8_t, 4> sel{code[i + 1], code[i + 2], code[i + 3], code[i + 4]};
                d.push4_immediates.push_back(sel);
            }
            i += 1 + imm;  // truncated immediates at the end just stop the scan
        } else {
            i += 1;
        }
    }
    return d;
}

std::optional<Address> match_minimal_proxy(const std::vector<uint8_t>& code) {
    auto it = std::search(code.begin(), code.end(), kMinimalProxyPrefix.begin(),
                          kMinimalProxyPrefix.end());
    if (it == code.end())
        return std::nullopt;
    size_t addr_pos = static_cast<size_t>(it - code.begin()) + kMinimalProxyPrefix.size();
    if (addr_pos + 20 + kMinimalProxySuffix.size() > code.size())
        return std::nullopt;
    if (!std::equal(kMinimalProxySuffix.begin(), kMinimalProxySuffix.end(),
                    code.begin() + addr_pos + 20))
        return std::nullopt;
    std::vector<uint8_t> addr(code.begin() + addr_pos, code.begin() + addr_pos + 20);
    return to_hex(addr);
}

std::string proxy_mechanism_name(ProxyMechanism m) {
    switch (m) {
        case ProxyMechanism::MINIMAL_PROXY_HARDCODED: return "minimal_proxy_hardcoded";
        case ProxyMechanism::STORAGE_SLOT_TRACED: return "storage_slot_traced";
        case ProxyMechanism::NONE: return "none";
    }
    return "none";
}

namespace {

// First DELEGATECALL frame in pre-order.
const RawTraceFrame* first_delegatecall(const RawTraceFrame& frame) {
    if (frame.frame_type == FrameType::DELEGATECALL)
        return &frame;
    for (const auto& c : frame.children)
        if (const auto* hit = first_delegatecall(c))
            return hit;
    return nullptr;
}

std::array<uint8_t, 4> draw_probe_selector(const Address& address,
                                           const std::vector<std::array<uint8_t, 4>>& known) {
    // Seeded by the address so runs are reproducible.
    std::seed_seq seq(address.begin(), address.end());
    std::mt19937 rng(seq);
    std::uniform_int_distribution<uint32_t> dist;
    for (int attempt = 0; attempt < 8; ++attempt) {
        uint32_t v = dist(rng);
        std::array<uint8_t, 4> sel{static_cast<uint8_t>(v >> 24), static_cast<uint8_t>(v >> 16),
                                   static_cast<uint8_t>(v >> 8), static_cast<uint8_t>(v)};
        if (std::find(known.begin(), known.end(), sel) == known.end())
            return sel;
    }
    return {0xde, 0xad, 0xbe, 0xef};  // 8 collisions in a row: give up redrawing
}

}  // namespace

ProxyResolution detect_proxy(ChainClient& chain, const Address& address) {
    ProxyResolution r;
    r.address = address;
    auto code = chain.fetch_code(address);
    auto dis = disassemble(code);
    if (!dis.has_delegatecall)
        return r;  // static pre-filter: no DELEGATECALL opcode, non-proxy
    r.is_proxy = true;

    if (auto impl = match_minimal_proxy(code)) {
        if (*impl != kZeroAddress) {
            r.implementation = *impl;
            r.mechanism = ProxyMechanism::MINIMAL_PROXY_HARDCODED;
            return r;
        }
    }

    auto selector = draw_probe_selector(address, dis.push4_immediates);
    auto trace = chain.probe_trace(address, selector);
    if (!trace) {
        r.diagnostic = "probe trace unavailable; implementation unresolved";
        return r;
    }
    const RawTraceFrame* dc = first_delegatecall(*trace);
    if (!dc || dc->to.empty() || dc->to == kZeroAddress) {
        r.diagnostic = "probe trace contained no usable DELEGATECALL target";
        return r;
    }
    r.implementation = dc->to;
    r.mechanism = ProxyMechanism::STORAGE_SLOT_TRACED;
    return r;
}

namespace {

std::optional<std::pair<Address, TxHash>> find_creation(ChainClient& chain,
                                                        const Address& address,
                                                        const BlockRange& range) {
    if (auto hit = chain.creator_of(address))
        return hit;
    // Fall back to scanning the range for the earliest creation receipt.
    auto txs = chain.fetch_transactions({address}, range);
    for (const auto& tx : txs)
        if (!tx.to && tx.receipt_contract_address && *tx.receipt_contract_address == address)
            return std::make_pair(tx.from, tx.tx_hash);
    return std::nullopt;
}

}  // namespace

CreatorInfo resolve_creator(ChainClient& chain, const Address& address,
                            const BlockRange& range) {
    CreatorInfo info;
    info.contract = address;

    auto creation = find_creation(chain, address, range);
    if (!creation)
        throw NotFoundError("creation transaction not found for " + address);
    info.creation_tx = creation->second;

    Address creator = creation->first;
    int depth = 0;
    while (!chain.fetch_code(creator).empty()) {
        if (++depth > kFactoryDepthCap) {
            info.diagnostic = "factory recursion depth cap exceeded";
            break;
        }
        info.factory_chain.push_back(creator);
        auto up = find_creation(chain, creator, range);
        if (!up) {
            info.diagnostic = "factory creator not resolvable within range";
            break;
        }
        creator = up->first;
    }
    info.creator_eoa = creator;

    auto txs = chain.fetch_transactions({creator}, range);
    for (const auto& tx : txs)
        if (tx.from == creator && !tx.to && tx.receipt_contract_address)
            info.deployed_set.insert(*tx.receipt_contract_address);
    info.deployed_set.insert(address);
    return info;
}

ScopeResult build_scope(ChainClient& chain, const std::set<Address>& seed_addresses,
                        const BlockRange& range) {
    if (seed_addresses.empty())
        throw ValidationError("scope seeds must be nonempty");
    ScopeResult scope;
    scope.addresses = seed_addresses;
    for (const auto& seed : seed_addresses) {
        auto proxy = detect_proxy(chain, seed);
        if (proxy.is_proxy) {
            if (proxy.implementation)
                scope.addresses.insert(*proxy.implementation);
            scope.proxies.push_back(std::move(proxy));
        }
        try {
            auto creator = resolve_creator(chain, seed, range);
            scope.addresses.insert(creator.creator_eoa);
            scope.addresses.insert(creator.deployed_set.begin(), creator.deployed_set.end());
            scope.creators.push_back(std::move(creator));
        } catch (const NotFoundError&) {
            // EOAs and contracts created outside the range stay un-expanded.
        }
    }
    scope.transactions = chain.fetch_transactions(scope.addresses, range);
    return scope;
}

}  // namespace tracellm
