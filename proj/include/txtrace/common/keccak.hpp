// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string_view>

#include <txtrace/common/types.hpp>

namespace txtrace {

//! Keccak-256 with the original (pre-SHA-3) padding, as used by the EVM.
[[nodiscard]] Hash32 keccak256(ByteView data);
[[nodiscard]] Hash32 keccak256(std::string_view text);

[[nodiscard]] inline Word keccak_word(ByteView data) { return keccak256(data).to_word(); }

//! First four bytes of keccak-256 over a canonical signature string.
[[nodiscard]] Selector selector_of(std::string_view signature);

}  // namespace txtrace
