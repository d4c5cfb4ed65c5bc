// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <txtrace/ingestion/trace.hpp>
#include <txtrace/parser/invocation_tree.hpp>

namespace txtrace {

//! Fact file grammar, version 1:
//!
//!     #tx <hash>
//!     #block <n>
//!     #from <address>
//!     #to <address>            ; created address for creations, "-" when unknown
//!     <index>\t<relation>\t<operand>,<operand>,...
//!
//! Relations are lowercase mnemonics. Operands are the consumed stack items top first, then the
//! produced value when the instruction pushes and its frame continues. Hex is 0x-prefixed and
//! minimal. LF line endings.
struct FactLine {
    std::size_t index{0};
    std::string relation;
    std::vector<Word> operands;

    friend bool operator==(const FactLine&, const FactLine&) = default;
};

struct FactFile {
    std::string tx;
    std::uint64_t block{0};
    std::string from;
    std::string to;
    std::vector<FactLine> lines;

    friend bool operator==(const FactFile&, const FactFile&) = default;
};

//! Throws MalformedTraceError when an instruction that did not fail has fewer stack items than
//! its opcode consumes. Failed instructions keep whatever operands the snapshot holds.
[[nodiscard]] FactFile build_fact_file(const TransactionMeta& meta, const RawTrace& trace, const InvocationNode& tree);
[[nodiscard]] std::string format_fact_file(const FactFile& file);
[[nodiscard]] std::string to_fact_file(const TransactionMeta& meta, const RawTrace& trace, const InvocationNode& tree);

//! Inverse of format_fact_file; throws SchemaError naming the offending line.
[[nodiscard]] FactFile parse_fact_file(std::string_view text);

}  // namespace txtrace
