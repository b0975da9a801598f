#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tracellm {

// Addresses are canonical lowercase hex with 0x prefix (42 chars).
using Address = std::string;
// Wei amounts are canonical decimal strings; they can exceed 64 bits.
using Wei = std::string;
// Transaction hashes are lowercase hex with 0x prefix (66 chars).
using TxHash = std::string;

Address normalize_address(const std::string& raw);
bool is_address(const std::string& s);
bool is_tx_hash(const std::string& s);

std::string to_hex(const std::vector<uint8_t>& bytes);
std::vector<uint8_t> from_hex(const std::string& hex);

struct BlockRange {
    uint64_t start_block = 0;
    uint64_t end_block = 0;

    bool valid() const { return start_block <= end_block; }
    uint64_t span() const { return end_block - start_block + 1; }
};

struct RawTransaction {
    TxHash tx_hash;
    Address from;
    std::optional<Address> to;  // absent for contract creation
    Wei value = "0";
    std::vector<uint8_t> input;
    uint64_t block_number = 0;
    uint64_t tx_index = 0;  // intra-block position
    std::optional<Address> receipt_contract_address;
};

enum class FrameType { CALL, DELEGATECALL, STATICCALL, CREATE };
enum class CallStatus { SUCCESS, REVERT };

std::string frame_type_name(FrameType t);
FrameType frame_type_from_name(const std::string& s);
std::string call_status_name(CallStatus s);
CallStatus call_status_from_name(const std::string& s);

struct RawTraceFrame {
    FrameType frame_type = FrameType::CALL;
    Address from;
    Address to;
    Wei value = "0";
    std::vector<uint8_t> input;
    CallStatus status = CallStatus::SUCCESS;
    std::vector<RawTraceFrame> children;
};

struct BalanceDiff {
    Address address;
    Wei before = "0";
    Wei after = "0";
};

// Error taxonomy shared across modules. Exit-code mapping lives in the CLI.
struct TransportError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ScopeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotFoundError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DecodeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct GatewayError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace tracellm
