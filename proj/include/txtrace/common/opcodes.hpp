// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace txtrace {

namespace op {
inline constexpr std::uint8_t STOP = 0x00;
inline constexpr std::uint8_t ADD = 0x01;
inline constexpr std::uint8_t MUL = 0x02;
inline constexpr std::uint8_t SUB = 0x03;
inline constexpr std::uint8_t DIV = 0x04;
inline constexpr std::uint8_t LT = 0x10;
inline constexpr std::uint8_t GT = 0x11;
inline constexpr std::uint8_t EQ = 0x14;
inline constexpr std::uint8_t ISZERO = 0x15;
inline constexpr std::uint8_t AND = 0x16;
inline constexpr std::uint8_t OR = 0x17;
inline constexpr std::uint8_t XOR = 0x18;
inline constexpr std::uint8_t NOT = 0x19;
inline constexpr std::uint8_t SHA3 = 0x20;
inline constexpr std::uint8_t CALLER = 0x33;
inline constexpr std::uint8_t ORIGIN = 0x32;
inline constexpr std::uint8_t CALLVALUE = 0x34;
inline constexpr std::uint8_t CALLDATALOAD = 0x35;
inline constexpr std::uint8_t CALLDATASIZE = 0x36;
inline constexpr std::uint8_t CALLDATACOPY = 0x37;
inline constexpr std::uint8_t CODECOPY = 0x39;
inline constexpr std::uint8_t EXTCODECOPY = 0x3c;
inline constexpr std::uint8_t RETURNDATASIZE = 0x3d;
inline constexpr std::uint8_t RETURNDATACOPY = 0x3e;
inline constexpr std::uint8_t TIMESTAMP = 0x42;
inline constexpr std::uint8_t NUMBER = 0x43;
inline constexpr std::uint8_t POP = 0x50;
inline constexpr std::uint8_t MLOAD = 0x51;
inline constexpr std::uint8_t MSTORE = 0x52;
inline constexpr std::uint8_t MSTORE8 = 0x53;
inline constexpr std::uint8_t SLOAD = 0x54;
inline constexpr std::uint8_t SSTORE = 0x55;
inline constexpr std::uint8_t JUMP = 0x56;
inline constexpr std::uint8_t JUMPI = 0x57;
inline constexpr std::uint8_t PC = 0x58;
inline constexpr std::uint8_t GAS = 0x5a;
inline constexpr std::uint8_t JUMPDEST = 0x5b;
inline constexpr std::uint8_t MCOPY = 0x5e;
inline constexpr std::uint8_t PUSH0 = 0x5f;
inline constexpr std::uint8_t PUSH1 = 0x60;
inline constexpr std::uint8_t PUSH32 = 0x7f;
inline constexpr std::uint8_t DUP1 = 0x80;
inline constexpr std::uint8_t DUP16 = 0x8f;
inline constexpr std::uint8_t SWAP1 = 0x90;
inline constexpr std::uint8_t SWAP16 = 0x9f;
inline constexpr std::uint8_t LOG0 = 0xa0;
inline constexpr std::uint8_t LOG4 = 0xa4;
inline constexpr std::uint8_t CREATE = 0xf0;
inline constexpr std::uint8_t CALL = 0xf1;
inline constexpr std::uint8_t CALLCODE = 0xf2;
inline constexpr std::uint8_t RETURN = 0xf3;
inline constexpr std::uint8_t DELEGATECALL = 0xf4;
inline constexpr std::uint8_t CREATE2 = 0xf5;
inline constexpr std::uint8_t STATICCALL = 0xfa;
inline constexpr std::uint8_t REVERT = 0xfd;
inline constexpr std::uint8_t INVALID = 0xfe;
inline constexpr std::uint8_t SELFDESTRUCT = 0xff;
}  // namespace op

struct OpcodeInfo {
    std::uint8_t code{0};
    std::string_view name;
    std::uint8_t pops{0};
    std::uint8_t pushes{0};
    bool defined{false};
};

//! Table entry for a byte value; undefined bytes carry defined=false.
[[nodiscard]] const OpcodeInfo& opcode_info(std::uint8_t code) noexcept;

//! Resolves tracer mnemonics, including aliases (SHA3/KECCAK256, SUICIDE/SELFDESTRUCT,
//! DIFFICULTY/PREVRANDAO). Case-sensitive on uppercase names, as tracers emit them.
[[nodiscard]] std::optional<std::uint8_t> opcode_from_name(std::string_view mnemonic) noexcept;

[[nodiscard]] constexpr bool is_push(std::uint8_t code) noexcept { return code >= op::PUSH1 && code <= op::PUSH32; }
[[nodiscard]] constexpr unsigned push_size(std::uint8_t code) noexcept {
    return is_push(code) ? static_cast<unsigned>(code - op::PUSH1 + 1) : 0;
}
[[nodiscard]] constexpr bool is_dup(std::uint8_t code) noexcept { return code >= op::DUP1 && code <= op::DUP16; }
[[nodiscard]] constexpr bool is_swap(std::uint8_t code) noexcept { return code >= op::SWAP1 && code <= op::SWAP16; }
[[nodiscard]] constexpr bool is_log(std::uint8_t code) noexcept { return code >= op::LOG0 && code <= op::LOG4; }

}  // namespace txtrace
