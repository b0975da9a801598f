#include "doctest.h"
#include "helpers.hpp"
#include "json.hpp"
#include "tracellm/gateway.hpp"
#include "tracellm/types.hpp"

using namespace tracellm;

TEST_SUITE("gateway") {
    TEST_CASE("mock gateway turns PATH lines into a structured report") {
        MockGateway mock;
        std::string prompt =
            "Some narrative text.\n"
            "PATH 0xaaa:3 0xaaa 0xfrom1 0xto1\n"
            "PATH 0xbbb:0 0xbbb 0xfrom2 0xto2\n";
        auto out = mock.send(prompt, {});
        auto j = nlohmann::json::parse(out);
        REQUIRE(j["evidence_refs"].size() == 2);
        CHECK(j["evidence_refs"][0][0] == "0xaaa");
        CHECK(j["evidence_refs"][0][1] == "0xaaa:3");
        CHECK(j["attacker_addresses"] == nlohmann::json::array({"0xfrom1"}));
        CHECK(j["victim_addresses"] == nlohmann::json::array({"0xto1"}));
        CHECK_FALSE(j["exploitation_mechanism"].get<std::string>().empty());

        // determinism
        CHECK(mock.send(prompt, {}) == out);

        // no PATH lines: still well-formed, just empty fields
        auto empty = nlohmann::json::parse(mock.send("nothing to see", {}));
        CHECK(empty["evidence_refs"].empty());
    }

    TEST_CASE("replay gateway records and replays byte-identically") {
        testutil::TempDir dir("replay");
        ReplayGateway gw(dir.path);
        CHECK_THROWS_AS(gw.send("unseen prompt", {}), GatewayError);
        gw.record("the prompt", "the exact response");
        CHECK(gw.send("the prompt", {}) == "the exact response");
        CHECK_THROWS_AS(gw.send("a different prompt", {}), GatewayError);
        // key is a pure function of the prompt
        CHECK(ReplayGateway::prompt_key("x") == ReplayGateway::prompt_key("x"));
        CHECK(ReplayGateway::prompt_key("x") != ReplayGateway::prompt_key("y"));
    }

    TEST_CASE("make_gateway kinds and validation") {
        GatewayConfig cfg;
        CHECK(make_gateway("mock", cfg, "")->name() == "mock");
        CHECK(make_gateway("replay", cfg, "/tmp")->name() == "replay");
        CHECK_THROWS_AS(make_gateway("live", cfg, ""), GatewayError);  // no URL/key
        cfg.url = "http://localhost:1";
        cfg.api_key = "k";
        CHECK(make_gateway("live", cfg, "")->name() == "live");
        CHECK_THROWS_AS(make_gateway("telepathy", cfg, ""), ValidationError);
    }

    TEST_CASE("live gateway fails with a gateway error when unreachable") {
        GatewayConfig cfg;
        cfg.url = "http://127.0.0.1:9";  // discard port, nothing listens
        cfg.api_key = "k";
        HttpGateway gw(cfg);
        CHECK_THROWS_AS(gw.send("hello", {}), GatewayError);
    }

    TEST_CASE("default params match the documented settings") {
        GatewayParams p;
        CHECK(p.model == "gemini-2.0-flash-001");
        CHECK(p.temperature == 0.7);
        CHECK(p.top_p == 1.0);
        CHECK(p.max_response_tokens == 2000);
    }
}
