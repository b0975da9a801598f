#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"

namespace tracellm {

// Content-addressed directory of recorded RPC/explorer responses.
// Each document is keyed by (method, hash of canonicalized args) so replay
// is a pure function of the request.
class FixtureStore {
public:
    explicit FixtureStore(std::filesystem::path dir) : dir_(std::move(dir)) {}

    const std::filesystem::path& dir() const { return dir_; }

    std::optional<nlohmann::json> lookup(const std::string& method,
                                         const nlohmann::json& args) const;
    void record(const std::string& method, const nlohmann::json& args,
                const nlohmann::json& result) const;

    static std::string key_for(const std::string& method, const nlohmann::json& args);

private:
    std::filesystem::path dir_;
};

}  // namespace tracellm
