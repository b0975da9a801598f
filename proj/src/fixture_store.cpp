#include "tracellm/fixture_store.hpp"

#include <fstream>

namespace tracellm {

namespace {

// FNV-1a 64-bit over the canonical (sorted-key, compact) JSON encoding.
uint64_t fnv1a(const std::string& s) {
    uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace

std::string FixtureStore::key_for(const std::string& method, const nlohmann::json& args) {
    nlohmann::json canon = nlohmann::json::array({method, args});
    uint64_t h = fnv1a(canon.dump());
    char buf[17];
    snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return method + "-" + buf;
}

std::optional<nlohmann::json> FixtureStore::lookup(const std::string& method,
                                                   const nlohmann::json& args) const {
    auto path = dir_ / (key_for(method, args) + ".json");
    std::ifstream in(path);
    if (!in)
        return std::nullopt;
    nlohmann::json doc = nlohmann::json::parse(in);
    return doc.at("result");
}

void FixtureStore::record(const std::string& method, const nlohmann::json& args,
                          const nlohmann::json& result) const {
    std::filesystem::create_directories(dir_);
    nlohmann::json doc = {{"method", method}, {"args", args}, {"result", result}};
    auto path = dir_ / (key_for(method, args) + ".json");
    std::ofstream out(path);
    out << doc.dump(2) << "\n";
}

}  // namespace tracellm
