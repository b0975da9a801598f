#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tracellm/types.hpp"

namespace tracellm {

// One entry of the flat call sequence a transaction trace normalizes into.
struct CallRecord {
    size_t index = 0;  // position in the pre-order flattening
    Address from;
    Address to;
    std::optional<std::array<uint8_t, 4>> selector;
    std::string method;  // resolved name, hex selector, or "fallback"
    Wei value = "0";
    FrameType call_type = FrameType::CALL;
    CallStatus status = CallStatus::SUCCESS;
};

// 4-byte selector -> canonical signature text.
class SignatureDB {
public:
    void insert(const std::array<uint8_t, 4>& selector, const std::string& signature);
    std::optional<std::string> lookup(const std::array<uint8_t, 4>& selector) const;
    size_t size() const { return entries_.size(); }

private:
    std::map<std::array<uint8_t, 4>, std::string> entries_;
};

// File format: one "<8 hex chars>\t<canonical signature>" per line.
SignatureDB load_signature_db(const std::string& path);

// Bare method name: text before '(' of a canonical signature.
std::string bare_name(const std::string& signature);

// Selector extraction + name resolution for one call's input data.
std::pair<std::optional<std::array<uint8_t, 4>>, std::string> resolve_selector(
    const std::vector<uint8_t>& input, const SignatureDB& db);

// Pre-order flattening of a nested trace; indices are consecutive from 0.
std::vector<CallRecord> flatten(const RawTraceFrame& root, const SignatureDB& db);

}  // namespace tracellm
