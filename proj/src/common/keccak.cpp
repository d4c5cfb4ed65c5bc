// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#include <txtrace/common/keccak.hpp>

#include <array>
#include <cstring>

namespace txtrace {

namespace {

    constexpr std::array<std::uint64_t, 24> kRoundConstants = {
        0x0000000000000001ULL, 0x0000000000008082ULL, 0x800000000000808aULL, 0x8000000080008000ULL,
        0x000000000000808bULL, 0x0000000080000001ULL, 0x8000000080008081ULL, 0x8000000000008009ULL,
        0x000000000000008aULL, 0x0000000000000088ULL, 0x0000000080008009ULL, 0x000000008000000aULL,
        0x000000008000808bULL, 0x800000000000008bULL, 0x8000000000008089ULL, 0x8000000000008003ULL,
        0x8000000000008002ULL, 0x8000000000000080ULL, 0x000000000000800aULL, 0x800000008000000aULL,
        0x8000000080008081ULL, 0x8000000000008080ULL, 0x0000000080000001ULL, 0x8000000080008008ULL,
    };

    // Rotation offsets and lane permutation for the combined rho+pi step.
    constexpr std::array<int, 24> kRho = {1,  3,  6,  10, 15, 21, 28, 36, 45, 55, 2,  14,
                                          27, 41, 56, 8,  25, 43, 62, 18, 39, 61, 20, 44};
    constexpr std::array<int, 24> kPi = {10, 7,  11, 17, 18, 3, 5,  16, 8,  21, 24, 4,
                                         15, 23, 19, 13, 12, 2, 20, 14, 22, 9,  6,  1};

    constexpr std::size_t kRate = 136;

    inline std::uint64_t rotl(std::uint64_t x, int n) { return (x << n) | (x >> (64 - n)); }

    void keccak_f(std::array<std::uint64_t, 25>& st) {
        std::array<std::uint64_t, 5> bc{};
        for (auto rc : kRoundConstants) {
            for (int i = 0; i < 5; ++i) bc[i] = st[i] ^ st[i + 5] ^ st[i + 10] ^ st[i + 15] ^ st[i + 20];
            for (int i = 0; i < 5; ++i) {
                const std::uint64_t t = bc[(i + 4) % 5] ^ rotl(bc[(i + 1) % 5], 1);
                for (int j = 0; j < 25; j += 5) st[j + i] ^= t;
            }
            std::uint64_t t = st[1];
            for (int i = 0; i < 24; ++i) {
                const int j = kPi[i];
                const std::uint64_t tmp = st[j];
                st[j] = rotl(t, kRho[i]);
                t = tmp;
            }
            for (int j = 0; j < 25; j += 5) {
                for (int i = 0; i < 5; ++i) bc[i] = st[j + i];
                for (int i = 0; i < 5; ++i) st[j + i] ^= (~bc[(i + 1) % 5]) & bc[(i + 2) % 5];
            }
            st[0] ^= rc;
        }
    }

    void absorb_block(std::array<std::uint64_t, 25>& st, const std::uint8_t* block) {
        for (std::size_t i = 0; i < kRate / 8; ++i) {
            std::uint64_t lane = 0;
            for (int b = 7; b >= 0; --b) lane = (lane << 8) | block[i * 8 + static_cast<std::size_t>(b)];
            st[i] ^= lane;
        }
        keccak_f(st);
    }

}  // namespace

Hash32 keccak256(ByteView data) {
    std::array<std::uint64_t, 25> st{};
    std::size_t offset = 0;
    while (data.size() - offset >= kRate) {
        absorb_block(st, data.data() + offset);
        offset += kRate;
    }
    std::array<std::uint8_t, kRate> last{};
    const std::size_t rem = data.size() - offset;
    if (rem > 0) std::memcpy(last.data(), data.data() + offset, rem);
    last[rem] ^= 0x01;
    last[kRate - 1] ^= 0x80;
    absorb_block(st, last.data());

    Hash32 out;
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t b = 0; b < 8; ++b) out.bytes[i * 8 + b] = static_cast<std::uint8_t>(st[i] >> (8 * b));
    }
    return out;
}

Hash32 keccak256(std::string_view text) {
    return keccak256(ByteView{reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

Selector selector_of(std::string_view signature) {
    const Hash32 h = keccak256(signature);
    Selector s;
    std::memcpy(s.bytes.data(), h.bytes.data(), 4);
    return s;
}

}  // namespace txtrace
