#pragma once

#include <filesystem>
#include <memory>
#include <string>

namespace tracellm {

struct GatewayParams {
    std::string model = "gemini-2.0-flash-001";
    double temperature = 0.7;
    double top_p = 1.0;
    int max_response_tokens = 2000;
};

class Gateway {
public:
    virtual ~Gateway() = default;
    virtual std::string send(const std::string& prompt, const GatewayParams& params) = 0;
    virtual std::string name() const = 0;
};

// Deterministic canned responses derived from machine-readable prompt lines;
// used for offline tests and dry runs.
class MockGateway : public Gateway {
public:
    std::string send(const std::string& prompt, const GatewayParams& params) override;
    std::string name() const override { return "mock"; }
};

// Replays recorded responses keyed by a hash of the prompt.
class ReplayGateway : public Gateway {
public:
    explicit ReplayGateway(std::filesystem::path dir) : dir_(std::move(dir)) {}

    std::string send(const std::string& prompt, const GatewayParams& params) override;
    std::string name() const override { return "replay"; }

    // Writes a recording in the shape send() replays.
    void record(const std::string& prompt, const std::string& response) const;

    static std::string prompt_key(const std::string& prompt);

private:
    std::filesystem::path dir_;
};

struct GatewayConfig {
    std::string url;
    std::string api_key;
    GatewayParams params;
};

// OpenAI-style chat-completion client.
class HttpGateway : public Gateway {
public:
    explicit HttpGateway(GatewayConfig config) : config_(std::move(config)) {}

    std::string send(const std::string& prompt, const GatewayParams& params) override;
    std::string name() const override { return "live"; }

private:
    GatewayConfig config_;
};

std::unique_ptr<Gateway> make_gateway(const std::string& kind, const GatewayConfig& config,
                                      const std::string& replay_dir);

}  // namespace tracellm
