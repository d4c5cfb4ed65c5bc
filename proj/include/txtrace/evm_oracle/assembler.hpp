// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string_view>

#include <txtrace/common/types.hpp>

namespace txtrace::oracle {

//! Line-based mnemonic assembler, one instruction per line:
//!
//!     PUSH1 0x05        ; immediates in hex or decimal
//!     loop:             ; a label marks the next instruction's offset
//!     PUSH2 @loop       ; label references resolve to that offset
//!     JUMP
//!
//! Comments start with ';', '#' or '//'. Throws std::invalid_argument naming the line.
[[nodiscard]] Bytes assemble(std::string_view source);

}  // namespace txtrace::oracle
