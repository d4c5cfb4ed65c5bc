// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <txtrace/common/types.hpp>

namespace txtrace {

enum class TxStatus { success, reverted };

struct TransactionMeta {
    Hash32 tx_hash;
    std::uint64_t block_number{0};
    std::optional<std::uint64_t> tx_index;
    Address origin;
    std::optional<Address> to;  // absent for contract creation
    std::optional<Address> contract_address;
    Word value{0};
    Bytes input;
    std::uint64_t gas_limit{0};
    std::uint64_t gas_used{0};
    TxStatus status{TxStatus::success};

    [[nodiscard]] bool is_creation() const noexcept { return !to.has_value(); }

    friend bool operator==(const TransactionMeta&, const TransactionMeta&) = default;
};

//! One executed instruction as reported by the struct-log tracer.
struct StructLogEntry {
    std::uint64_t pc{0};
    std::string op;
    std::uint8_t opcode{0};     // resolved from op; 0xfe when the mnemonic is unknown
    bool known_opcode{true};
    std::uint64_t gas{0};
    std::uint64_t gas_cost{0};
    std::uint32_t depth{1};
    std::vector<Word> stack;  // bottom-to-top
    std::optional<Bytes> memory;
    std::optional<std::string> error;

    //! n-th item from the top (0 = top). Caller checks stack.size() first.
    [[nodiscard]] const Word& peek(std::size_t n) const { return stack[stack.size() - 1 - n]; }

    friend bool operator==(const StructLogEntry&, const StructLogEntry&) = default;
};

struct RawTrace {
    std::vector<StructLogEntry> entries;
    bool failed{false};
    Bytes return_value;

    friend bool operator==(const RawTrace&, const RawTrace&) = default;
};

//! Builds an entry with op and opcode kept in sync.
[[nodiscard]] StructLogEntry make_entry(std::string op, std::uint64_t pc, std::uint64_t gas, std::uint64_t gas_cost,
                                        std::uint32_t depth, std::vector<Word> stack);

}  // namespace txtrace
