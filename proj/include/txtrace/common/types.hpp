// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace txtrace {

//! 256-bit EVM word. Arithmetic wraps modulo 2^256.
using Word = boost::multiprecision::uint256_t;

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

template <std::size_t N>
struct FixedBytes {
    std::array<std::uint8_t, N> bytes{};

    static constexpr std::size_t size() noexcept { return N; }
    [[nodiscard]] ByteView view() const noexcept { return {bytes.data(), N}; }
    [[nodiscard]] bool is_zero() const noexcept {
        for (auto b : bytes) {
            if (b != 0) return false;
        }
        return true;
    }

    friend auto operator<=>(const FixedBytes&, const FixedBytes&) = default;
    friend bool operator==(const FixedBytes&, const FixedBytes&) = default;
};

struct Address : FixedBytes<20> {
    //! Low 20 bytes of a word, as the EVM truncates stack values to addresses.
    [[nodiscard]] static Address from_word(const Word& w);
    [[nodiscard]] Word to_word() const;
    friend auto operator<=>(const Address&, const Address&) = default;
    friend bool operator==(const Address&, const Address&) = default;
};

struct Hash32 : FixedBytes<32> {
    [[nodiscard]] static Hash32 from_word(const Word& w);
    [[nodiscard]] Word to_word() const;
    friend auto operator<=>(const Hash32&, const Hash32&) = default;
    friend bool operator==(const Hash32&, const Hash32&) = default;
};

struct Selector : FixedBytes<4> {
    friend auto operator<=>(const Selector&, const Selector&) = default;
    friend bool operator==(const Selector&, const Selector&) = default;
};

//! Big-endian 32-byte encoding of a word.
[[nodiscard]] std::array<std::uint8_t, 32> word_to_be32(const Word& w);
void word_to_be32(const Word& w, std::uint8_t* out);

//! Big-endian decode of up to 32 bytes; shorter input is treated as right-aligned.
[[nodiscard]] Word word_from_be(ByteView bytes);

//! Saturating conversion used for offsets and lengths read off the stack.
[[nodiscard]] std::uint64_t word_to_u64_saturated(const Word& w);

}  // namespace txtrace

template <>
struct std::hash<txtrace::Address> {
    std::size_t operator()(const txtrace::Address& a) const noexcept {
        std::size_t h = 0;
        for (auto b : a.bytes) h = h * 131 + b;
        return h;
    }
};
