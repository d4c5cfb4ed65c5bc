// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#include <txtrace/common/hex.hpp>

#include <algorithm>
#include <stdexcept>

namespace txtrace {

namespace {

    constexpr char kDigits[] = "0123456789abcdef";

    int nibble(char c) {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    }

    std::string_view strip_prefix(std::string_view hex) {
        if (hex.size() >= 2 && hex[0] == '0' && (hex[1] == 'x' || hex[1] == 'X')) hex.remove_prefix(2);
        return hex;
    }

    template <std::size_t N>
    FixedBytes<N> fixed_from_hex(std::string_view hex, const char* what) {
        const Bytes raw = from_hex(hex);
        if (raw.size() != N) {
            throw std::invalid_argument(std::string(what) + " must be " + std::to_string(N) + " bytes, got " +
                                        std::to_string(raw.size()));
        }
        FixedBytes<N> out;
        std::copy(raw.begin(), raw.end(), out.bytes.begin());
        return out;
    }

}  // namespace

std::string to_hex(ByteView bytes, bool prefix) {
    std::string out;
    out.reserve(bytes.size() * 2 + 2);
    if (prefix) out += "0x";
    for (auto b : bytes) {
        out.push_back(kDigits[b >> 4]);
        out.push_back(kDigits[b & 0x0f]);
    }
    return out;
}

Bytes from_hex(std::string_view hex) {
    hex = strip_prefix(hex);
    Bytes out;
    out.reserve((hex.size() + 1) / 2);
    std::size_t i = 0;
    if (hex.size() % 2 == 1) {
        const int lo = nibble(hex[0]);
        if (lo < 0) throw std::invalid_argument("invalid hex character");
        out.push_back(static_cast<std::uint8_t>(lo));
        i = 1;
    }
    for (; i < hex.size(); i += 2) {
        const int hi = nibble(hex[i]);
        const int lo = nibble(hex[i + 1]);
        if (hi < 0 || lo < 0) throw std::invalid_argument("invalid hex character");
        out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
    }
    return out;
}

std::string word_to_hex(const Word& w) {
    if (w == 0) return "0x0";
    const auto be = word_to_be32(w);
    std::string out = "0x";
    bool leading = true;
    for (auto b : be) {
        for (int shift : {4, 0}) {
            const int d = (b >> shift) & 0x0f;
            if (leading && d == 0) continue;
            leading = false;
            out.push_back(kDigits[d]);
        }
    }
    return out;
}

std::string word_to_hex64(const Word& w) {
    const auto be = word_to_be32(w);
    return to_hex(be);
}

Word word_from_hex(std::string_view hex) {
    hex = strip_prefix(hex);
    if (hex.empty()) throw std::invalid_argument("empty hex word");
    while (hex.size() > 1 && hex.front() == '0') hex.remove_prefix(1);
    if (hex.size() > 64) throw std::invalid_argument("hex word wider than 256 bits");
    Word w = 0;
    for (char c : hex) {
        const int d = nibble(c);
        if (d < 0) throw std::invalid_argument("invalid hex character in word");
        w <<= 4;
        w |= static_cast<unsigned>(d);
    }
    return w;
}

Word word_from_string(std::string_view text) {
    if (text.size() >= 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) return word_from_hex(text);
    if (text.empty()) throw std::invalid_argument("empty number");
    Word w = 0;
    const Word max = ~Word(0);
    for (char c : text) {
        if (c < '0' || c > '9') throw std::invalid_argument("invalid decimal digit");
        const unsigned d = static_cast<unsigned>(c - '0');
        if (w > (max - d) / 10) throw std::invalid_argument("decimal value wider than 256 bits");
        w = w * 10 + d;
    }
    return w;
}

std::string word_to_decimal(const Word& w) { return w.str(); }

std::string to_string(const Address& a) { return to_hex(a.view()); }
std::string to_string(const Hash32& h) { return to_hex(h.view()); }
std::string to_string(const Selector& s) { return to_hex(s.view()); }

Address address_from_hex(std::string_view hex) {
    Address a;
    a.bytes = fixed_from_hex<20>(hex, "address").bytes;
    return a;
}

Hash32 hash_from_hex(std::string_view hex) {
    Hash32 h;
    h.bytes = fixed_from_hex<32>(hex, "hash").bytes;
    return h;
}

Selector selector_from_hex(std::string_view hex) {
    Selector s;
    s.bytes = fixed_from_hex<4>(hex, "selector").bytes;
    return s;
}

}  // namespace txtrace
