#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "splitauth/frame.hpp"
#include "splitauth/hex.hpp"

using namespace splitauth;

namespace {

std::string payload_of(const std::vector<std::uint8_t>& frame) {
    REQUIRE(frame.size() >= 4);
    return std::string(frame.begin() + 4, frame.end());
}

/// Random valid message generator for the codec property test.
Message random_message(std::mt19937_64& rng) {
    auto hexstr = [&rng](std::size_t bytes) {
        std::vector<std::uint8_t> raw(bytes);
        for (auto& b : raw) b = static_cast<std::uint8_t>(rng());
        return to_hex(raw);
    };
    auto name = [&rng] { return "user" + std::to_string(rng() % 100000); };

    switch (rng() % 18) {
    case 0: return MsgRegister{name(), hexstr(32)};
    case 1: return MsgRegisterOk{};
    case 2: return MsgRegisterErr{"username already exists"};
    case 3: return MsgLogin{name(), hexstr(16)};
    case 4: return MsgChallenge{hexstr(16)};
    case 5: return MsgChallengeResponse{hexstr(32)};
    case 6: return MsgLoginOk{hexstr(32)};
    case 7: return MsgLoginErr{"invalid"};
    case 8: return MsgLogout{};
    case 9: return MsgLogoutOk{};
    case 10: {
        std::uint32_t total = 1 + rng() % 32;
        std::uint32_t index = 1 + rng() % total;
        bool xor_mode = rng() % 2 == 0;
        std::size_t len = xor_mode ? 32 : segment_payload_size(index, total);
        return MsgSharePut{name(), index, total, xor_mode ? SplitMode::Xor : SplitMode::Segment,
                           hexstr(len)};
    }
    case 11: return MsgSharePutOk{};
    case 12: return MsgSharePutErr{"exists"};
    case 13: return MsgShareGet{name()};
    case 14: {
        std::uint32_t total = 1 + rng() % 32;
        std::uint32_t index = 1 + rng() % total;
        bool xor_mode = rng() % 2 == 0;
        std::size_t len = xor_mode ? 32 : segment_payload_size(index, total);
        return MsgShareData{index, total, xor_mode ? SplitMode::Xor : SplitMode::Segment,
                            hexstr(len)};
    }
    case 15: return MsgShareMissing{};
    case 16: return MsgShareDel{name()};
    default: return MsgShareDelOk{};
    }
}

std::vector<std::uint8_t> frame_with_payload(const std::string& payload) {
    std::vector<std::uint8_t> frame;
    std::uint32_t len = static_cast<std::uint32_t>(payload.size());
    frame.push_back(static_cast<std::uint8_t>(len >> 24));
    frame.push_back(static_cast<std::uint8_t>(len >> 16));
    frame.push_back(static_cast<std::uint8_t>(len >> 8));
    frame.push_back(static_cast<std::uint8_t>(len));
    frame.insert(frame.end(), payload.begin(), payload.end());
    return frame;
}

} // namespace

TEST_CASE("logout frame is byte-exact") {
    auto frame = encode_frame(MsgLogout{});
    CHECK(to_hex(frame) == "000000117b2274797065223a226c6f676f7574227d");
    CHECK(payload_of(frame) == "{\"type\":\"logout\"}");
}

TEST_CASE("payload member order follows the declared field order") {
    std::string digest(64, 'a');
    auto reg = encode_frame(MsgRegister{"Alex", digest});
    CHECK(payload_of(reg) ==
          "{\"type\":\"register\",\"username\":\"Alex\",\"digest_hex\":\"" + digest + "\"}");

    auto put = encode_frame(MsgSharePut{"Alex", 1, 2, SplitMode::Segment, std::string(32, 'b')});
    CHECK(payload_of(put) ==
          "{\"type\":\"share_put\",\"username\":\"Alex\",\"index\":1,\"total\":2,"
          "\"mode\":\"segment\",\"payload_hex\":\"" + std::string(32, 'b') + "\"}");

    auto login = encode_frame(MsgLogin{"Rony", std::string(32, 'c')});
    CHECK(payload_of(login) ==
          "{\"type\":\"login\",\"username\":\"Rony\",\"client_nonce_hex\":\"" +
              std::string(32, 'c') + "\"}");
}

TEST_CASE("decode/encode round-trip over generated messages") {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 2000; ++i) {
        Message m = random_message(rng);
        auto frame = encode_frame(m);
        DecodeResult r = decode_frame(frame);
        REQUIRE(r.status == DecodeStatus::Ok);
        CHECK(r.consumed == frame.size());
        CHECK(*r.message == m);
    }
}

TEST_CASE("incomplete buffers consume nothing") {
    auto frame = encode_frame(MsgLogoutOk{});

    DecodeResult r = decode_frame(std::span(frame).first(3));
    CHECK(r.status == DecodeStatus::Incomplete);
    CHECK(r.consumed == 0);

    r = decode_frame(std::span(frame).first(frame.size() - 1));
    CHECK(r.status == DecodeStatus::Incomplete);
    CHECK(r.consumed == 0);
}

TEST_CASE("two concatenated frames decode in sequence") {
    auto first = encode_frame(MsgLogin{"Alex", std::string(32, '0')});
    auto second = encode_frame(MsgLogout{});
    std::vector<std::uint8_t> buffer = first;
    buffer.insert(buffer.end(), second.begin(), second.end());

    DecodeResult r1 = decode_frame(buffer);
    REQUIRE(r1.status == DecodeStatus::Ok);
    CHECK(r1.consumed == first.size());
    CHECK(*r1.message == Message{MsgLogin{"Alex", std::string(32, '0')}});

    DecodeResult r2 = decode_frame(std::span(buffer).subspan(r1.consumed));
    REQUIRE(r2.status == DecodeStatus::Ok);
    CHECK(r2.consumed == second.size());
    CHECK(*r2.message == Message{MsgLogout{}});
}

TEST_CASE("oversize frames are rejected before parsing") {
    std::vector<std::uint8_t> header = {0x00, 0x20, 0x00, 0x00}; // 2 MiB declared
    CHECK(decode_frame(header).status == DecodeStatus::Oversize);

    // 1 MiB exactly is allowed by the cap rule (but incomplete here)
    std::vector<std::uint8_t> at_cap = {0x00, 0x10, 0x00, 0x00};
    CHECK(decode_frame(at_cap).status == DecodeStatus::Incomplete);

    CHECK_THROWS_AS(encode_frame(MsgLoginErr{std::string(kMaxFramePayload, 'x')}),
                    MessageError);
}

TEST_CASE("malformed payloads are connection-fatal errors") {
    auto expect_malformed = [](const std::string& payload) {
        DecodeResult r = decode_frame(frame_with_payload(payload));
        CHECK(r.status == DecodeStatus::Malformed);
    };

    expect_malformed("not json at all");
    expect_malformed("[1,2,3]");
    expect_malformed("{\"type\":\"no_such_type\"}");
    expect_malformed("{\"username\":\"Alex\"}"); // missing type
    expect_malformed("{\"type\":\"logout\",\"extra\":1}");
    expect_malformed("{\"type\":\"challenge\",\"server_nonce_hex\":\"XYZ\"}");
    expect_malformed("{\"type\":\"challenge\",\"server_nonce_hex\":\"abcd\"}"); // wrong length
    // uppercase hex violates the lowercase invariant
    expect_malformed("{\"type\":\"challenge\",\"server_nonce_hex\":\"" + std::string(32, 'A') +
                     "\"}");
    // control character in username
    expect_malformed("{\"type\":\"share_get\",\"username\":\"a\\u0001b\"}");
    // segment share with a payload that contradicts index/total
    expect_malformed(
        "{\"type\":\"share_data\",\"index\":1,\"total\":2,\"mode\":\"segment\","
        "\"payload_hex\":\"aabb\"}");
    // index outside total
    expect_malformed(
        "{\"type\":\"share_data\",\"index\":3,\"total\":2,\"mode\":\"xor\",\"payload_hex\":\"" +
        std::string(64, 'a') + "\"}");
}

TEST_CASE("username bounds") {
    CHECK(valid_username("Alex"));
    CHECK(valid_username(std::string(64, 'a')));
    CHECK_FALSE(valid_username(""));
    CHECK_FALSE(valid_username(std::string(65, 'a')));
    CHECK_FALSE(valid_username("tab\tseparated"));
    CHECK_FALSE(valid_username("nul\x7f"));
    CHECK(valid_username("émile"));       // two-byte code points count once
    CHECK_FALSE(valid_username("\xc3"));  // truncated UTF-8
    CHECK_FALSE(valid_username("\xc0\xaf")); // overlong encoding
    CHECK_FALSE(valid_username("\xc2\x80")); // C1 control

    std::string wide;
    for (int i = 0; i < 64; ++i) wide += "é";
    CHECK(valid_username(wide)); // 64 code points, 128 bytes
    CHECK_FALSE(valid_username(wide + "x"));

    CHECK_THROWS_AS(encode_frame(MsgShareGet{""}), MessageError);
}
