#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <openssl/evp.h>

#include <random>

#include "splitauth/hex.hpp"
#include "splitauth/sha256.hpp"

using namespace splitauth;

namespace {

std::array<std::uint8_t, 32> openssl_sha256(std::span<const std::uint8_t> data) {
    std::array<std::uint8_t, 32> out{};
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr);
    REQUIRE(len == 32);
    return out;
}

std::array<std::uint8_t, 32> own_sha256(std::string_view s) {
    return Sha256::digest({reinterpret_cast<const std::uint8_t*>(s.data()), s.size()});
}

} // namespace

TEST_CASE("FIPS 180-4 vectors") {
    CHECK(to_hex(own_sha256("")) ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(to_hex(own_sha256("abc")) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(to_hex(own_sha256("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq")) ==
          "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
}

TEST_CASE("million 'a' vector") {
    Sha256 h;
    std::vector<std::uint8_t> chunk(1000, 'a');
    for (int i = 0; i < 1000; ++i) {
        h.update(chunk);
    }
    CHECK(to_hex(h.finish()) ==
          "cdc76e5c9914fb9281a1c7e284d73e67f1809a48a497200e046d39ccc7112cd0");
}

TEST_CASE("incremental equals one-shot across block boundaries") {
    std::vector<std::uint8_t> data(300);
    for (std::size_t i = 0; i < data.size(); ++i) data[i] = static_cast<std::uint8_t>(i);

    for (std::size_t cut = 0; cut <= data.size(); cut += 7) {
        Sha256 h;
        h.update({data.data(), cut});
        h.update({data.data() + cut, data.size() - cut});
        CHECK(h.finish() == Sha256::digest(data));
    }
}

TEST_CASE("differential against OpenSSL on random inputs") {
    std::mt19937_64 rng(12345);
    for (int i = 0; i < 1000; ++i) {
        std::size_t len = rng() % 300;
        std::vector<std::uint8_t> data(len);
        for (auto& b : data) b = static_cast<std::uint8_t>(rng());
        CHECK(Sha256::digest(data) == openssl_sha256(data));
    }
    // and a few sizes straddling the padding edge cases
    for (std::size_t len : {55u, 56u, 57u, 63u, 64u, 65u, 119u, 120u, 128u}) {
        std::vector<std::uint8_t> data(len, 0xa5);
        CHECK(Sha256::digest(data) == openssl_sha256(data));
    }
}
