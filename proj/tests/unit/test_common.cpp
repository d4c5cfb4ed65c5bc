// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <string>

#include <txtrace/common/hex.hpp>
#include <txtrace/common/keccak.hpp>
#include <txtrace/common/opcodes.hpp>

using namespace txtrace;

// Digests computed with pycryptodome's Keccak (original padding, 256-bit output).
TEST_CASE("keccak256 matches reference digests across the rate boundary") {
    const auto run = [](const Bytes& b) { return to_hex(keccak256(ByteView{b}).view(), false); };
    CHECK(run({}) == "c5d2460186f7233c927e7db2dcc703c0e500b653ca82273b7bfad8045d85a470");
    CHECK(to_hex(keccak256(std::string_view{"abc"}).view(), false) ==
          "4e03657aea45a94fc7d47ba826c8d667c0d1e6e33a64a036ec44f58fa12d6c45");
    CHECK(run(Bytes(135, 'a')) == "34367dc248bbd832f4e3e69dfaac2f92638bd0bbd18f2912ba4ef454919cf446");
    CHECK(run(Bytes(136, 'a')) == "a6c4d403279fe3e0af03729caada8374b5ca54d8065329a3ebcaeb4b60aa386e");
    CHECK(run(Bytes(137, 'a')) == "d869f639c7046b4929fc92a4d988a8b22c55fbadb802c0c66ebcd484f1915f39");
    Bytes ramp;
    for (int r = 0; r < 3; ++r) {
        for (int i = 0; i < 256; ++i) ramp.push_back(static_cast<std::uint8_t>(i));
    }
    CHECK(run(ramp) == "00e77ce2c4f77212a0d5df106b08157b77058479357a98a6039b457c469723e4");
}

TEST_CASE("selector_of hashes the canonical signature") {
    CHECK(to_string(selector_of("transfer(address,uint256)")) == "0xa9059cbb");
}

TEST_CASE("hex helpers") {
    CHECK(from_hex("0x0a0B") == Bytes{0x0a, 0x0b});
    CHECK(from_hex("abc") == Bytes{0x0a, 0xbc});
    CHECK_THROWS_AS(from_hex("0xzz"), std::invalid_argument);
    CHECK(word_to_hex(Word(0)) == "0x0");
    CHECK(word_to_hex(Word(255)) == "0xff");
    CHECK(word_from_string("1000") == Word(1000));
    CHECK(word_from_string("0x3e8") == Word(1000));
    CHECK(word_to_decimal(Word(1) << 200) == "1606938044258990275541962092341162602522202993782792835301376");
    CHECK_THROWS(word_from_hex(std::string(65, 'f')));
    CHECK_THROWS(address_from_hex("0x1234"));
}

TEST_CASE("words wrap modulo 2^256 and round-trip through big-endian bytes") {
    const Word max = ~Word(0);
    CHECK(max + 1 == 0);
    CHECK(Word(0) - 1 == max);
    const Word w = word_from_hex("0x0102030405060708090a0b0c0d0e0f101112131415161718191a1b1c1d1e1f20");
    const auto be = word_to_be32(w);
    CHECK(be[0] == 0x01);
    CHECK(be[31] == 0x20);
    CHECK(word_from_be(be) == w);
}

TEST_CASE("opcode table arities") {
    CHECK(opcode_info(op::CALL).pops == 7);
    CHECK(opcode_info(op::DELEGATECALL).pops == 6);
    CHECK(opcode_info(op::CREATE2).pops == 4);
    CHECK(opcode_info(op::DUP1 + 15).pops == 16);
    CHECK(opcode_info(op::DUP1 + 15).pushes == 17);
    CHECK(opcode_info(op::SWAP1).pops == 2);
    CHECK(opcode_info(op::LOG0 + 4).pops == 6);
    CHECK(opcode_from_name("KECCAK256") == op::SHA3);
    CHECK(opcode_from_name("SHA3") == op::SHA3);
    CHECK(!opcode_from_name("NOPE").has_value());
    CHECK(push_size(op::PUSH1 + 31) == 32);
}
