// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#include <txtrace/common/types.hpp>

#include <algorithm>
#include <limits>

namespace txtrace {

void word_to_be32(const Word& w, std::uint8_t* out) {
    Word v = w;
    for (int i = 31; i >= 0; --i) {
        out[i] = static_cast<std::uint8_t>(v & 0xff);
        v >>= 8;
    }
}

std::array<std::uint8_t, 32> word_to_be32(const Word& w) {
    std::array<std::uint8_t, 32> out{};
    word_to_be32(w, out.data());
    return out;
}

Word word_from_be(ByteView bytes) {
    Word w = 0;
    const std::size_t start = bytes.size() > 32 ? bytes.size() - 32 : 0;
    for (std::size_t i = start; i < bytes.size(); ++i) {
        w <<= 8;
        w |= bytes[i];
    }
    return w;
}

std::uint64_t word_to_u64_saturated(const Word& w) {
    if (w > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
    return static_cast<std::uint64_t>(w);
}

Address Address::from_word(const Word& w) {
    const auto be = word_to_be32(w);
    Address a;
    std::copy(be.begin() + 12, be.end(), a.bytes.begin());
    return a;
}

Word Address::to_word() const { return word_from_be(view()); }

Hash32 Hash32::from_word(const Word& w) {
    Hash32 h;
    h.bytes = word_to_be32(w);
    return h;
}

Word Hash32::to_word() const { return word_from_be(view()); }

}  // namespace txtrace
