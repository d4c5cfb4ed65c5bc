// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <txtrace/dataflow/taint.hpp>
#include <txtrace/ingestion/trace.hpp>
#include <txtrace/parser/invocation_tree.hpp>

namespace txtrace {

enum class OperandRole { slot, value, target_address, data, condition };

[[nodiscard]] std::string_view to_string(OperandRole role) noexcept;
[[nodiscard]] std::optional<OperandRole> operand_role_from_string(std::string_view s) noexcept;

struct SinkDescriptor {
    std::uint8_t opcode{0};
    OperandRole role{OperandRole::value};
    std::size_t instruction_index{0};

    friend bool operator==(const SinkDescriptor&, const SinkDescriptor&) = default;
};

struct FlowFact {
    TaintSource source;
    SinkDescriptor sink;
    Word value{0};  // concrete operand at the sink

    friend bool operator==(const FlowFact&, const FlowFact&) = default;
};

using StorageKey = std::pair<Address, Word>;

struct ShadowResult {
    //! Sources sorted and deduplicated; TagSet ids index into this list.
    std::vector<TaintSource> sources;
    //! Storage tags after the transaction, reverted frames undone.
    std::map<StorageKey, TagSet> storage;
    std::vector<FlowFact> facts;
    //! Tainted TagSets produced on the stack, in memory or in storage. Zero means nothing was tainted.
    std::size_t tainted_writes{0};
    //! Values derived through unmodeled instructions from tainted inputs.
    std::size_t unknown_writes{0};
};

//! Replays `trace` against `tree` with shadow tags. Throws ConsistencyError when the shadow stack
//! depth departs from the recorded stack, or when the trace and tree disagree on frame structure.
[[nodiscard]] ShadowResult shadow_execute(const TransactionMeta& meta, const RawTrace& trace,
                                          const InvocationNode& tree, std::span<const TaintSource> sources);

struct SinkFilter {
    std::optional<std::uint8_t> opcode;
    std::optional<OperandRole> role;
    //! Inclusive instruction range, usually a frame's [entry_index, exit_index].
    std::optional<std::pair<std::size_t, std::size_t>> range;

    [[nodiscard]] static SinkFilter in_frame(const InvocationNode& node) {
        SinkFilter f;
        f.range = std::pair{node.entry_index, node.exit_index};
        return f;
    }
    [[nodiscard]] bool matches(const FlowFact& fact) const noexcept;
};

[[nodiscard]] std::vector<FlowFact> query_flows(std::span<const FlowFact> facts, const SinkFilter& filter);

//! One JSON object per line: source, sink_opcode, operand_role, instruction_index, value_hex.
void write_flow_facts_jsonl(std::ostream& out, std::span<const FlowFact> facts);
[[nodiscard]] std::string flow_fact_to_json_line(const FlowFact& fact);

}  // namespace txtrace
