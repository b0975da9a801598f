#include "tracellm/types.hpp"

#include <algorithm>
#include <cctype>

namespace tracellm {

namespace {

bool is_hex_body(const std::string& s, size_t expect_len) {
    if (s.size() != expect_len + 2 || s[0] != '0' || (s[1] != 'x' && s[1] != 'X'))
        return false;
    return std::all_of(s.begin() + 2, s.end(),
                       [](unsigned char c) { return std::isxdigit(c); });
}

}  // namespace

bool is_address(const std::string& s) { return is_hex_body(s, 40); }
bool is_tx_hash(const std::string& s) { return is_hex_body(s, 64); }

Address normalize_address(const std::string& raw) {
    if (!is_address(raw))
        throw ValidationError("malformed address: " + raw);
    Address out = raw;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::string to_hex(const std::vector<uint8_t>& bytes) {
    static const char* digits = "0123456789abcdef";
    std::string out = "0x";
    out.reserve(2 + bytes.size() * 2);
    for (uint8_t b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xf]);
    }
    return out;
}

std::vector<uint8_t> from_hex(const std::string& hex) {
    std::string body = hex;
    if (body.size() >= 2 && body[0] == '0' && (body[1] == 'x' || body[1] == 'X'))
        body = body.substr(2);
    if (body.size() % 2 != 0)
        throw DecodeError("odd-length hex string");
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw DecodeError("invalid hex digit");
    };
    std::vector<uint8_t> out;
    out.reserve(body.size() / 2);
    for (size_t i = 0; i < body.size(); i += 2)
        out.push_back(static_cast<uint8_t>((nibble(body[i]) << 4) | nibble(body[i + 1])));
    return out;
}

std::string frame_type_name(FrameType t) {
    switch (t) {
        case FrameType::CALL: return "CALL";
        case FrameType::DELEGATECALL: return "DELEGATECALL";
        case FrameType::STATICCALL: return "STATICCALL";
        case FrameType::CREATE: return "CREATE";
    }
    return "CALL";
}

FrameType frame_type_from_name(const std::string& s) {
    if (s == "CALL") return FrameType::CALL;
    if (s == "DELEGATECALL") return FrameType::DELEGATECALL;
    if (s == "STATICCALL") return FrameType::STATICCALL;
    if (s == "CREATE") return FrameType::CREATE;
    throw DecodeError("unknown frame type: " + s);
}

std::string call_status_name(CallStatus s) {
    return s == CallStatus::SUCCESS ? "success" : "revert";
}

CallStatus call_status_from_name(const std::string& s) {
    if (s == "success") return CallStatus::SUCCESS;
    if (s == "revert") return CallStatus::REVERT;
    throw DecodeError("unknown call status: " + s);
}

}  // namespace tracellm
