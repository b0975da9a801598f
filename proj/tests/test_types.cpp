#include "doctest.h"
#include "tracellm/types.hpp"

using namespace tracellm;

TEST_SUITE("types") {
    TEST_CASE("normalize_address lowercases checksum casing") {
        CHECK(normalize_address("0xAbCdEF0123456789abcdef0123456789ABCDEF01") ==
              "0xabcdef0123456789abcdef0123456789abcdef01");
    }

    TEST_CASE("normalize_address rejects malformed input") {
        CHECK_THROWS_AS(normalize_address("0x123"), ValidationError);
        CHECK_THROWS_AS(normalize_address("0xzzcdef0123456789abcdef0123456789abcdef01"),
                        ValidationError);
        CHECK_THROWS_AS(normalize_address(""), ValidationError);
    }

    TEST_CASE("is_address / is_tx_hash") {
        CHECK(is_address("0xabcdef0123456789abcdef0123456789abcdef01"));
        CHECK_FALSE(is_address("0xabcdef"));
        CHECK(is_tx_hash("0x" + std::string(64, 'a')));
        CHECK_FALSE(is_tx_hash("0x" + std::string(63, 'a')));
    }

    TEST_CASE("hex round trip") {
        std::vector<uint8_t> bytes = {0x00, 0xff, 0x12, 0xab};
        CHECK(to_hex(bytes) == "0x00ff12ab");
        CHECK(from_hex("0x00ff12ab") == bytes);
        CHECK(from_hex("00ff12ab") == bytes);
        CHECK(from_hex("0x").empty());
        CHECK_THROWS_AS(from_hex("0x123"), DecodeError);  // odd length
        CHECK_THROWS_AS(from_hex("0xzz"), DecodeError);
    }

    TEST_CASE("block range validity and span") {
        CHECK(BlockRange{5, 5}.valid());
        CHECK(BlockRange{5, 5}.span() == 1);
        CHECK(BlockRange{0, 9}.span() == 10);
        CHECK_FALSE(BlockRange{6, 5}.valid());
    }

    TEST_CASE("enum name round trips") {
        for (auto t : {FrameType::CALL, FrameType::DELEGATECALL, FrameType::STATICCALL,
                       FrameType::CREATE})
            CHECK(frame_type_from_name(frame_type_name(t)) == t);
        for (auto s : {CallStatus::SUCCESS, CallStatus::REVERT})
            CHECK(call_status_from_name(call_status_name(s)) == s);
        CHECK_THROWS_AS(frame_type_from_name("BOGUS"), DecodeError);
        CHECK_THROWS_AS(call_status_from_name("bogus"), DecodeError);
    }
}
