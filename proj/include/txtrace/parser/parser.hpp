// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string_view>

#include <txtrace/ingestion/trace.hpp>
#include <txtrace/parser/invocation_tree.hpp>

namespace txtrace {

enum class OpClass { function_enter, function_exit, storage_access, sha3, other };

//! Total over arbitrary strings; out-of-gas is an exit condition, not an opcode.
[[nodiscard]] OpClass classify_opcode(std::string_view mnemonic) noexcept;
[[nodiscard]] OpClass classify_opcode(std::uint8_t code) noexcept;

//! First four bytes of calldata, absent for shorter input.
[[nodiscard]] std::optional<Selector> extract_selector(ByteView calldata) noexcept;

struct CallFrameArgs {
    CallKind kind{CallKind::call};
    Address target;  // zero for create/create2
    Word value{0};
    Word gas{0};      // zero for create/create2
    std::uint64_t in_offset{0};
    std::uint64_t in_size{0};
    std::uint64_t out_offset{0};
    std::uint64_t out_size{0};
    Word salt{0};  // create2 only

    friend bool operator==(const CallFrameArgs&, const CallFrameArgs&) = default;
};

//! Decodes call-family stack operands by opcode arity. Throws MalformedTraceError
//! (index 0; callers rethrow with the real index) on stack underflow or a non-enter opcode.
[[nodiscard]] CallFrameArgs extract_call_frame_args(const StructLogEntry& entry);

//! Rebuilds the call tree with per-frame storage and sha3 logs. Works on stack-only traces by
//! reconstructing memory from memory-writing opcodes; captured memory takes precedence.
[[nodiscard]] InvocationNode build_invocation_tree(const TransactionMeta& meta, const RawTrace& trace);

}  // namespace txtrace
