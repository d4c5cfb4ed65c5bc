// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#include <txtrace/ingestion/trace.hpp>

#include <txtrace/common/opcodes.hpp>

namespace txtrace {

StructLogEntry make_entry(std::string op, std::uint64_t pc, std::uint64_t gas, std::uint64_t gas_cost,
                          std::uint32_t depth, std::vector<Word> stack) {
    StructLogEntry e;
    const auto code = opcode_from_name(op);
    e.opcode = code.value_or(op::INVALID);
    e.known_opcode = code.has_value();
    e.op = std::move(op);
    e.pc = pc;
    e.gas = gas;
    e.gas_cost = gas_cost;
    e.depth = depth;
    e.stack = std::move(stack);
    return e;
}

}  // namespace txtrace
