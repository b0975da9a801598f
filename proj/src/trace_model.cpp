#include "tracellm/trace_model.hpp"

#include <fstream>

namespace tracellm {

void SignatureDB::insert(const std::array<uint8_t, 4>& selector, const std::string& signature) {
    entries_.emplace(selector, signature);  // first entry wins on duplicates
}

std::optional<std::string> SignatureDB::lookup(const std::array<uint8_t, 4>& selector) const {
    auto it = entries_.find(selector);
    if (it == entries_.end())
        return std::nullopt;
    return it->second;
}

SignatureDB load_signature_db(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("signature db not found: " + path);
    SignatureDB db;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        auto tab = line.find('\t');
        if (tab != 8)
            throw DecodeError("malformed signature db line " + std::to_string(line_no));
        std::array<uint8_t, 4> sel{};
        try {
            auto bytes = from_hex(line.substr(0, 8));
            std::copy(bytes.begin(), bytes.end(), sel.begin());
        } catch (const DecodeError&) {
            throw DecodeError("malformed signature db line " + std::to_string(line_no));
        }
        std::string sig = line.substr(tab + 1);
        if (sig.empty())
            throw DecodeError("malformed signature db line " + std::to_string(line_no));
        db.insert(sel, sig);
    }
    return db;
}

std::string bare_name(const std::string& signature) {
    auto paren = signature.find('(');
    return paren == std::string::npos ? signature : signature.substr(0, paren);
}

std::pair<std::optional<std::array<uint8_t, 4>>, std::string> resolve_selector(
    const std::vector<uint8_t>& input, const SignatureDB& db) {
    if (input.size() < 4)
        return {std::nullopt, "fallback"};
    std::array<uint8_t, 4> sel{input[0], input[1], input[2], input[3]};
    if (auto sig = db.lookup(sel))
        return {sel, bare_name(*sig)};
    return {sel, to_hex({sel.begin(), sel.end()})};
}

namespace {

void flatten_into(const RawTraceFrame& frame, const SignatureDB& db,
                  std::vector<CallRecord>& out) {
    CallRecord rec;
    rec.index = out.size();
    rec.from = frame.from;
    rec.to = frame.to;
    rec.value = frame.value;
    rec.call_type = frame.frame_type;
    rec.status = frame.status;
    if (frame.frame_type == FrameType::CREATE) {
        rec.method = "create";
    } else {
        auto [sel, method] = resolve_selector(frame.input, db);
        rec.selector = sel;
        rec.method = method;
    }
    out.push_back(std::move(rec));
    for (const auto& child : frame.children)
        flatten_into(child, db, out);
}

}  // namespace

std::vector<CallRecord> flatten(const RawTraceFrame& root, const SignatureDB& db) {
    std::vector<CallRecord> out;
    flatten_into(root, db, out);
    return out;
}

}  // namespace tracellm
