// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>

#include <txtrace/common/types.hpp>

namespace txtrace {

//! Lowercase hex with optional 0x prefix.
[[nodiscard]] std::string to_hex(ByteView bytes, bool prefix = true);

//! Accepts an optional 0x prefix; odd-length input is left-padded with a zero nibble.
//! Throws std::invalid_argument on a non-hex character.
[[nodiscard]] Bytes from_hex(std::string_view hex);

//! Minimal 0x-prefixed hex ("0x0" for zero).
[[nodiscard]] std::string word_to_hex(const Word& w);

//! Full-width 0x-prefixed hex, 64 nibbles.
[[nodiscard]] std::string word_to_hex64(const Word& w);

//! Parses 0x-prefixed hex, bare hex (as emitted by older tracers) is accepted too.
//! Throws std::invalid_argument on bad input or values wider than 256 bits.
[[nodiscard]] Word word_from_hex(std::string_view hex);

//! Parses decimal or 0x-prefixed hex.
[[nodiscard]] Word word_from_string(std::string_view text);

[[nodiscard]] std::string word_to_decimal(const Word& w);

[[nodiscard]] std::string to_string(const Address& a);
[[nodiscard]] std::string to_string(const Hash32& h);
[[nodiscard]] std::string to_string(const Selector& s);

[[nodiscard]] Address address_from_hex(std::string_view hex);
[[nodiscard]] Hash32 hash_from_hex(std::string_view hex);
[[nodiscard]] Selector selector_from_hex(std::string_view hex);

}  // namespace txtrace
