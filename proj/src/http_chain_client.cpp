#include <condition_variable>
#include <mutex>
#include <thread>

#include "httplib.h"
#include "tracellm/chain_access.hpp"

namespace tracellm {

using nlohmann::json;

namespace {

// Decimal rendering of an arbitrary-width hex quantity ("0x1f4" -> "500").
std::string hex_quantity_to_decimal(const std::string& hex) {
    std::vector<uint8_t> bytes = from_hex(hex.size() % 2 ? "0" + hex.substr(2) : hex.substr(2));
    std::vector<uint32_t> digits{0};  // base-1e9 little endian
    for (uint8_t b : bytes) {
        uint64_t carry = b;
        for (auto& d : digits) {
            uint64_t v = static_cast<uint64_t>(d) * 256 + carry;
            d = static_cast<uint32_t>(v % 1000000000);
            carry = v / 1000000000;
        }
        while (carry) {
            digits.push_back(static_cast<uint32_t>(carry % 1000000000));
            carry /= 1000000000;
        }
    }
    std::string out = std::to_string(digits.back());
    for (auto it = digits.rbegin() + 1; it != digits.rend(); ++it) {
        char buf[10];
        snprintf(buf, sizeof(buf), "%09u", *it);
        out += buf;
    }
    return out;
}

std::string to_hex_quantity(uint64_t v) {
    char buf[20];
    snprintf(buf, sizeof(buf), "0x%llx", static_cast<unsigned long long>(v));
    return buf;
}

RawTraceFrame call_frame_from_node_json(const json& j) {
    RawTraceFrame f;
    std::string type = j.value("type", "CALL");
    if (type == "CREATE2") type = "CREATE";
    f.frame_type = frame_type_from_name(type);
    f.from = normalize_address(j.at("from").get<std::string>());
    f.to = j.contains("to") && !j.at("to").is_null()
               ? normalize_address(j.at("to").get<std::string>())
               : Address{};
    f.value = j.contains("value") ? hex_quantity_to_decimal(j.at("value").get<std::string>())
                                  : "0";
    f.input = j.contains("input") ? from_hex(j.at("input").get<std::string>())
                                  : std::vector<uint8_t>{};
    f.status = j.contains("error") ? CallStatus::REVERT : CallStatus::SUCCESS;
    if (j.contains("calls"))
        for (const auto& c : j.at("calls"))
            f.children.push_back(call_frame_from_node_json(c));
    return f;
}

class Semaphore {
public:
    explicit Semaphore(int n) : count_(n) {}
    void acquire() {
        std::unique_lock lk(m_);
        cv_.wait(lk, [&] { return count_ > 0; });
        --count_;
    }
    void release() {
        std::lock_guard lk(m_);
        ++count_;
        cv_.notify_one();
    }

private:
    std::mutex m_;
    std::condition_variable cv_;
    int count_;
};

}  // namespace

struct HttpChainClient::Impl {
    ChainConfig config;
    Semaphore slots;
    int next_id = 1;
    std::mutex id_mutex;

    explicit Impl(ChainConfig cfg) : config(std::move(cfg)), slots(config.parallelism) {}

    json rpc(const std::string& method, const json& params) {
        json req = {{"jsonrpc", "2.0"}, {"method", method}, {"params", params}};
        {
            std::lock_guard lk(id_mutex);
            req["id"] = next_id++;
        }
        std::string last_error;
        for (int attempt = 0; attempt < config.retries; ++attempt) {
            if (attempt > 0)
                std::this_thread::sleep_for(
                    std::chrono::milliseconds(config.backoff_ms << (attempt - 1)));
            slots.acquire();
            httplib::Client cli(config.rpc_url);
            auto res = cli.Post("/", req.dump(), "application/json");
            slots.release();
            if (!res) {
                last_error = "no response from node";
                continue;
            }
            if (res->status != 200) {
                last_error = "node returned HTTP " + std::to_string(res->status);
                continue;
            }
            json body;
            try {
                body = json::parse(res->body);
            } catch (const json::exception& e) {
                throw DecodeError(std::string("malformed node response: ") + e.what());
            }
            if (body.contains("error"))
                throw NotFoundError(method + " failed: " + body["error"].dump());
            return body.at("result");
        }
        throw TransportError("rpc " + method + " failed after retries: " + last_error);
    }

    std::optional<json> explorer(const std::string& module, const std::string& action,
                                 const std::string& address) {
        std::string last_error;
        for (int attempt = 0; attempt < config.retries; ++attempt) {
            if (attempt > 0)
                std::this_thread::sleep_for(
                    std::chrono::milliseconds(config.backoff_ms << (attempt - 1)));
            slots.acquire();
            httplib::Client cli(config.explorer_url);
            std::string path = "/api?module=" + module + "&action=" + action +
                               "&address=" + address + "&apikey=" + config.explorer_key;
            auto res = cli.Get(path);
            slots.release();
            if (!res || res->status == 429 || res->status >= 500) {
                last_error = res ? "HTTP " + std::to_string(res->status) : "no response";
                continue;
            }
            if (res->status == 404)
                return std::nullopt;
            json body = json::parse(res->body, nullptr, false);
            if (body.is_discarded() || body.value("status", "0") != "1")
                return std::nullopt;
            return body.at("result");
        }
        throw TransportError("explorer " + action + " failed after retries: " + last_error);
    }
};

HttpChainClient::HttpChainClient(ChainConfig config)
    : impl_(std::make_unique<Impl>(std::move(config))) {}

HttpChainClient::~HttpChainClient() = default;

std::vector<RawTransaction> HttpChainClient::fetch_transactions(
    const std::set<Address>& scope_addresses, const BlockRange& range) {
    if (!range.valid())
        throw ScopeError("invalid block range");
    if (range.span() > impl_->config.max_block_span)
        throw ScopeError("block range exceeds max span of " +
                         std::to_string(impl_->config.max_block_span));
    std::vector<RawTransaction> out;
    if (scope_addresses.empty())
        return out;
    for (uint64_t b = range.start_block; b <= range.end_block; ++b) {
        json block = impl_->rpc("eth_getBlockByNumber", json::array({to_hex_quantity(b), true}));
        if (block.is_null())
            continue;
        uint64_t idx = 0;
        for (const auto& jtx : block.at("transactions")) {
            RawTransaction tx;
            tx.tx_hash = jtx.at("hash").get<std::string>();
            tx.from = normalize_address(jtx.at("from").get<std::string>());
            if (!jtx.at("to").is_null())
                tx.to = normalize_address(jtx.at("to").get<std::string>());
            tx.value = hex_quantity_to_decimal(jtx.at("value").get<std::string>());
            tx.input = from_hex(jtx.at("input").get<std::string>());
            tx.block_number = b;
            tx.tx_index = idx++;
            if (!tx.to) {
                json receipt = impl_->rpc("eth_getTransactionReceipt",
                                          json::array({tx.tx_hash}));
                if (!receipt.is_null() && !receipt.at("contractAddress").is_null())
                    tx.receipt_contract_address =
                        normalize_address(receipt.at("contractAddress").get<std::string>());
            }
            if (scope_addresses.count(tx.from) || (tx.to && scope_addresses.count(*tx.to)) ||
                (tx.receipt_contract_address &&
                 scope_addresses.count(*tx.receipt_contract_address)))
                out.push_back(std::move(tx));
        }
    }
    return out;
}

RawTraceFrame HttpChainClient::fetch_trace(const TxHash& tx_hash) {
    json result = impl_->rpc(
        "debug_traceTransaction",
        json::array({tx_hash, json{{"tracer", "callTracer"}}}));
    try {
        return call_frame_from_node_json(result);
    } catch (const json::exception& e) {
        throw DecodeError(std::string("malformed trace: ") + e.what());
    }
}

std::vector<uint8_t> HttpChainClient::fetch_code(const Address& address) {
    json result = impl_->rpc("eth_getCode", json::array({address, "latest"}));
    return from_hex(result.get<std::string>());
}

std::vector<BalanceDiff> HttpChainClient::fetch_balance_diffs(
    const TxHash& tx_hash, const std::set<Address>& addresses) {
    json jtx = impl_->rpc("eth_getTransactionByHash", json::array({tx_hash}));
    if (jtx.is_null())
        throw NotFoundError("unknown transaction " + tx_hash);
    uint64_t block = std::stoull(jtx.at("blockNumber").get<std::string>(), nullptr, 16);
    std::vector<BalanceDiff> out;
    for (const auto& addr : addresses) {
        BalanceDiff d;
        d.address = addr;
        d.before = hex_quantity_to_decimal(
            impl_->rpc("eth_getBalance", json::array({addr, to_hex_quantity(block - 1)}))
                .get<std::string>());
        d.after = hex_quantity_to_decimal(
            impl_->rpc("eth_getBalance", json::array({addr, to_hex_quantity(block)}))
                .get<std::string>());
        out.push_back(std::move(d));
    }
    return out;
}

ContractMetadata HttpChainClient::fetch_contract_metadata(const Address& address) {
    ContractMetadata meta;
    auto result = impl_->explorer("contract", "getsourcecode", address);
    if (result && result->is_array() && !result->empty()) {
        const auto& entry = (*result)[0];
        std::string src = entry.value("SourceCode", "");
        std::string abi = entry.value("ABI", "");
        if (!src.empty())
            meta.verified_source = src;
        if (!abi.empty() && abi != "Contract source code not verified")
            meta.abi = abi;
    }
    return meta;
}

std::optional<RawTraceFrame> HttpChainClient::probe_trace(
    const Address& address, const std::array<uint8_t, 4>& selector) {
    json call = {{"to", address},
                 {"data", to_hex(std::vector<uint8_t>(selector.begin(), selector.end()))}};
    try {
        json result = impl_->rpc(
            "debug_traceCall",
            json::array({call, "latest", json{{"tracer", "callTracer"}}}));
        return call_frame_from_node_json(result);
    } catch (const NotFoundError&) {
        return std::nullopt;
    }
}

std::optional<std::pair<Address, TxHash>> HttpChainClient::creator_of(const Address& address) {
    auto result = impl_->explorer("contract", "getcontractcreation", address);
    if (!result || !result->is_array() || result->empty())
        return std::nullopt;
    const auto& entry = (*result)[0];
    return std::make_pair(normalize_address(entry.at("contractCreator").get<std::string>()),
                          entry.at("txHash").get<std::string>());
}

}  // namespace tracellm
