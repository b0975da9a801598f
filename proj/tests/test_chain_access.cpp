#include "doctest.h"
#include "helpers.hpp"
#include "tracellm/chain_access.hpp"
#include "tracellm/fixture_store.hpp"

using namespace tracellm;
using testutil::addr_n;

namespace {

TxHash hash_n(size_t n) {
    char buf[80];
    snprintf(buf, sizeof(buf), "0x%064zx", n);
    return buf;
}

RawTransaction mk_tx(size_t n, const Address& from, std::optional<Address> to, uint64_t block,
                     uint64_t index) {
    RawTransaction tx;
    tx.tx_hash = hash_n(n);
    tx.from = from;
    tx.to = to;
    tx.block_number = block;
    tx.tx_index = index;
    return tx;
}

}  // namespace

TEST_SUITE("fixture_store") {
    TEST_CASE("record and lookup round trip; misses are absent") {
        testutil::TempDir dir("store");
        FixtureStore store(dir.path);
        nlohmann::json args = {{"a", 1}, {"b", "two"}};
        CHECK_FALSE(store.lookup("method", args).has_value());
        store.record("method", args, nlohmann::json{{"ok", true}});
        auto hit = store.lookup("method", args);
        REQUIRE(hit.has_value());
        CHECK((*hit)["ok"] == true);
        // different args -> different key
        CHECK_FALSE(store.lookup("method", nlohmann::json{{"a", 2}}).has_value());
    }

    TEST_CASE("key is a pure function of method and canonical args") {
        auto k1 = FixtureStore::key_for("m", {{"x", 1}, {"y", 2}});
        auto k2 = FixtureStore::key_for("m", {{"y", 2}, {"x", 1}});
        CHECK(k1 == k2);  // object key order canonicalized
        CHECK(k1 != FixtureStore::key_for("other", {{"x", 1}, {"y", 2}}));
        CHECK(k1.rfind("m-", 0) == 0);
    }
}

TEST_SUITE("chain_access") {
    TEST_CASE("tx and frame JSON round trips") {
        RawTransaction tx = mk_tx(1, addr_n(1), addr_n(2), 10, 3);
        tx.value = "123456789012345678901234567890";
        tx.input = {0xa9, 0x05, 0x9c, 0xbb};
        auto tx2 = tx_from_json(tx_to_json(tx));
        CHECK(tx2.tx_hash == tx.tx_hash);
        CHECK(tx2.to == tx.to);
        CHECK(tx2.value == tx.value);
        CHECK(tx2.input == tx.input);
        CHECK(tx2.tx_index == 3);

        RawTransaction creation = mk_tx(2, addr_n(1), std::nullopt, 10, 0);
        creation.receipt_contract_address = addr_n(9);
        auto c2 = tx_from_json(tx_to_json(creation));
        CHECK_FALSE(c2.to.has_value());
        CHECK(c2.receipt_contract_address == addr_n(9));

        RawTraceFrame f;
        f.frame_type = FrameType::DELEGATECALL;
        f.status = CallStatus::REVERT;
        f.to = addr_n(5);
        RawTraceFrame child;
        child.to = addr_n(6);
        f.children.push_back(child);
        auto f2 = frame_from_json(frame_to_json(f));
        CHECK(f2.frame_type == FrameType::DELEGATECALL);
        CHECK(f2.status == CallStatus::REVERT);
        REQUIRE(f2.children.size() == 1);
        CHECK(f2.children[0].to == addr_n(6));
    }

    TEST_CASE("fetch_transactions filters by scope and orders by (block, index)") {
        testutil::TempDir dir("chain");
        FixtureRecorder rec{FixtureStore(dir.path)};
        Address A = addr_n(1), B = addr_n(2), C = addr_n(3);
        // Insert out of order within a block to exercise the sort.
        rec.put_block_transactions(10, {mk_tx(1, A, B, 10, 1), mk_tx(2, C, A, 10, 0)});
        rec.put_block_transactions(11, {mk_tx(3, C, C, 11, 0)});
        rec.put_block_transactions(12, {mk_tx(4, B, A, 12, 0)});

        FixtureChainClient client{FixtureStore(dir.path)};

        SUBCASE("singleton scope, single block") {
            auto txs = client.fetch_transactions({A}, {10, 10});
            REQUIRE(txs.size() == 2);
            CHECK(txs[0].tx_hash == hash_n(2));  // tx_index 0 first
            CHECK(txs[1].tx_hash == hash_n(1));
        }
        SUBCASE("empty scope yields nothing") {
            CHECK(client.fetch_transactions({}, {10, 12}).empty());
        }
        SUBCASE("scope hits across blocks, in block order") {
            auto txs = client.fetch_transactions({A}, {10, 12});
            REQUIRE(txs.size() == 3);
            CHECK(txs[0].block_number == 10);
            CHECK(txs[2].block_number == 12);
            CHECK(txs[2].tx_hash == hash_n(4));
        }
        SUBCASE("span guard") {
            ChainConfig cfg;
            cfg.max_block_span = 5;
            FixtureChainClient small{FixtureStore(dir.path), cfg};
            CHECK_THROWS_AS(small.fetch_transactions({A}, {0, 100}), ScopeError);
            CHECK_THROWS_AS(small.fetch_transactions({A}, {10, 5}), ScopeError);
        }
    }

    TEST_CASE("trace, code, metadata and balance-diff replay") {
        testutil::TempDir dir("chain");
        FixtureRecorder rec{FixtureStore(dir.path)};

        RawTraceFrame root;
        root.to = addr_n(1);
        RawTraceFrame inner;
        inner.to = addr_n(2);
        inner.status = CallStatus::REVERT;
        root.children.push_back(inner);
        rec.put_trace(hash_n(1), root);
        rec.put_code(addr_n(1), {0x60, 0x01});
        rec.put_contract_metadata(addr_n(1), {std::string("contract C {}"), std::string("[]")});
        rec.put_balance_diff(hash_n(1), {addr_n(1), "7", "3"});

        FixtureChainClient client{FixtureStore(dir.path)};
        auto trace = client.fetch_trace(hash_n(1));
        REQUIRE(trace.children.size() == 1);
        CHECK(trace.children[0].status == CallStatus::REVERT);
        CHECK_THROWS_AS(client.fetch_trace(hash_n(99)), NotFoundError);

        CHECK(client.fetch_code(addr_n(1)) == std::vector<uint8_t>{0x60, 0x01});
        CHECK(client.fetch_code(addr_n(42)).empty());  // unrecorded = EOA

        auto meta = client.fetch_contract_metadata(addr_n(1));
        CHECK(meta.verified_source == "contract C {}");
        auto none = client.fetch_contract_metadata(addr_n(42));
        CHECK_FALSE(none.verified_source.has_value());
        CHECK_FALSE(none.abi.has_value());

        auto diffs = client.fetch_balance_diffs(hash_n(1), {addr_n(1), addr_n(5)});
        REQUIRE(diffs.size() == 2);
        CHECK(diffs[0].before == "7");
        CHECK(diffs[0].after == "3");
        CHECK(diffs[1].before == diffs[1].after);  // untouched address
        CHECK(client.fetch_balance_diffs(hash_n(1), {}).empty());
    }

    TEST_CASE("replay determinism") {
        testutil::TempDir dir("chain");
        FixtureRecorder rec{FixtureStore(dir.path)};
        rec.put_block_transactions(5, {mk_tx(1, addr_n(1), addr_n(2), 5, 0)});
        FixtureChainClient client{FixtureStore(dir.path)};
        auto a = client.fetch_transactions({addr_n(1)}, {5, 5});
        auto b = client.fetch_transactions({addr_n(1)}, {5, 5});
        REQUIRE(a.size() == b.size());
        CHECK(tx_to_json(a[0]).dump() == tx_to_json(b[0]).dump());
    }

    TEST_CASE("make_chain_client prefers fixtures and rejects an empty config") {
        testutil::TempDir dir("chain");
        ChainConfig cfg;
        CHECK(make_chain_client(cfg, dir.str()) != nullptr);
        cfg.rpc_url = "http://localhost:1";
        CHECK(make_chain_client(cfg, dir.str()) != nullptr);
        cfg.rpc_url = "";
        CHECK_THROWS_AS(make_chain_client(cfg, ""), ValidationError);
    }
}
