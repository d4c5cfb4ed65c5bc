// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#include <txtrace/common/opcodes.hpp>

#include <algorithm>
#include <array>
#include <string>
#include <unordered_map>

namespace txtrace {

namespace {

    struct Table {
        std::array<OpcodeInfo, 256> info{};
        std::array<std::string, 256> names{};
        std::unordered_map<std::string_view, std::uint8_t> by_name;

        void set(std::uint8_t code, std::string name, std::uint8_t pops, std::uint8_t pushes) {
            names[code] = std::move(name);
            info[code] = OpcodeInfo{code, names[code], pops, pushes, true};
        }

        Table() {
            for (unsigned c = 0; c < 256; ++c) {
                info[c].code = static_cast<std::uint8_t>(c);
                info[c].name = "UNDEFINED";
            }
            set(0x00, "STOP", 0, 0);
            set(0x01, "ADD", 2, 1);
            set(0x02, "MUL", 2, 1);
            set(0x03, "SUB", 2, 1);
            set(0x04, "DIV", 2, 1);
            set(0x05, "SDIV", 2, 1);
            set(0x06, "MOD", 2, 1);
            set(0x07, "SMOD", 2, 1);
            set(0x08, "ADDMOD", 3, 1);
            set(0x09, "MULMOD", 3, 1);
            set(0x0a, "EXP", 2, 1);
            set(0x0b, "SIGNEXTEND", 2, 1);
            set(0x10, "LT", 2, 1);
            set(0x11, "GT", 2, 1);
            set(0x12, "SLT", 2, 1);
            set(0x13, "SGT", 2, 1);
            set(0x14, "EQ", 2, 1);
            set(0x15, "ISZERO", 1, 1);
            set(0x16, "AND", 2, 1);
            set(0x17, "OR", 2, 1);
            set(0x18, "XOR", 2, 1);
            set(0x19, "NOT", 1, 1);
            set(0x1a, "BYTE", 2, 1);
            set(0x1b, "SHL", 2, 1);
            set(0x1c, "SHR", 2, 1);
            set(0x1d, "SAR", 2, 1);
            set(0x20, "SHA3", 2, 1);
            set(0x30, "ADDRESS", 0, 1);
            set(0x31, "BALANCE", 1, 1);
            set(0x32, "ORIGIN", 0, 1);
            set(0x33, "CALLER", 0, 1);
            set(0x34, "CALLVALUE", 0, 1);
            set(0x35, "CALLDATALOAD", 1, 1);
            set(0x36, "CALLDATASIZE", 0, 1);
            set(0x37, "CALLDATACOPY", 3, 0);
            set(0x38, "CODESIZE", 0, 1);
            set(0x39, "CODECOPY", 3, 0);
            set(0x3a, "GASPRICE", 0, 1);
            set(0x3b, "EXTCODESIZE", 1, 1);
            set(0x3c, "EXTCODECOPY", 4, 0);
            set(0x3d, "RETURNDATASIZE", 0, 1);
            set(0x3e, "RETURNDATACOPY", 3, 0);
            set(0x3f, "EXTCODEHASH", 1, 1);
            set(0x40, "BLOCKHASH", 1, 1);
            set(0x41, "COINBASE", 0, 1);
            set(0x42, "TIMESTAMP", 0, 1);
            set(0x43, "NUMBER", 0, 1);
            set(0x44, "PREVRANDAO", 0, 1);
            set(0x45, "GASLIMIT", 0, 1);
            set(0x46, "CHAINID", 0, 1);
            set(0x47, "SELFBALANCE", 0, 1);
            set(0x48, "BASEFEE", 0, 1);
            set(0x49, "BLOBHASH", 1, 1);
            set(0x4a, "BLOBBASEFEE", 0, 1);
            set(0x50, "POP", 1, 0);
            set(0x51, "MLOAD", 1, 1);
            set(0x52, "MSTORE", 2, 0);
            set(0x53, "MSTORE8", 2, 0);
            set(0x54, "SLOAD", 1, 1);
            set(0x55, "SSTORE", 2, 0);
            set(0x56, "JUMP", 1, 0);
            set(0x57, "JUMPI", 2, 0);
            set(0x58, "PC", 0, 1);
            set(0x59, "MSIZE", 0, 1);
            set(0x5a, "GAS", 0, 1);
            set(0x5b, "JUMPDEST", 0, 0);
            set(0x5c, "TLOAD", 1, 1);
            set(0x5d, "TSTORE", 2, 0);
            set(0x5e, "MCOPY", 3, 0);
            set(0x5f, "PUSH0", 0, 1);
            for (unsigned n = 1; n <= 32; ++n) set(static_cast<std::uint8_t>(0x5f + n), "PUSH" + std::to_string(n), 0, 1);
            for (unsigned n = 1; n <= 16; ++n) {
                set(static_cast<std::uint8_t>(0x7f + n), "DUP" + std::to_string(n), static_cast<std::uint8_t>(n),
                    static_cast<std::uint8_t>(n + 1));
                set(static_cast<std::uint8_t>(0x8f + n), "SWAP" + std::to_string(n), static_cast<std::uint8_t>(n + 1),
                    static_cast<std::uint8_t>(n + 1));
            }
            for (unsigned n = 0; n <= 4; ++n) {
                set(static_cast<std::uint8_t>(0xa0 + n), "LOG" + std::to_string(n), static_cast<std::uint8_t>(n + 2), 0);
            }
            set(0xf0, "CREATE", 3, 1);
            set(0xf1, "CALL", 7, 1);
            set(0xf2, "CALLCODE", 7, 1);
            set(0xf3, "RETURN", 2, 0);
            set(0xf4, "DELEGATECALL", 6, 1);
            set(0xf5, "CREATE2", 4, 1);
            set(0xfa, "STATICCALL", 6, 1);
            set(0xfd, "REVERT", 2, 0);
            set(0xfe, "INVALID", 0, 0);
            set(0xff, "SELFDESTRUCT", 1, 0);

            for (unsigned c = 0; c < 256; ++c) {
                if (info[c].defined) by_name.emplace(info[c].name, static_cast<std::uint8_t>(c));
            }
            by_name.emplace("KECCAK256", 0x20);
            by_name.emplace("SUICIDE", 0xff);
            by_name.emplace("DIFFICULTY", 0x44);
            by_name.emplace("RANDOM", 0x44);
        }
    };

    const Table& table() {
        static const Table t;
        return t;
    }

}  // namespace

const OpcodeInfo& opcode_info(std::uint8_t code) noexcept { return table().info[code]; }

std::optional<std::uint8_t> opcode_from_name(std::string_view mnemonic) noexcept {
    const auto& by_name = table().by_name;
    if (auto it = by_name.find(mnemonic); it != by_name.end()) return it->second;
    return std::nullopt;
}

}  // namespace txtrace
