// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#include <txtrace/invariants/artifacts.hpp>

namespace txtrace {

std::vector<std::uint64_t> frame_gas_used(const RawTrace& trace, const InvocationNode& tree) {
    std::vector<std::uint64_t> out;
    for_each_node(tree, [&](const InvocationNode& n, std::size_t) {
        if (!n.executed || trace.entries.empty() || n.exit_index >= trace.entries.size()) {
            out.push_back(0);
            return;
        }
        const auto& first = trace.entries[n.entry_index];
        const auto& last = trace.entries[n.exit_index];
        std::uint64_t left = 0;
        if (n.exit_reason != ExitReason::out_of_gas && n.exit_reason != ExitReason::invalid) {
            left = last.gas >= last.gas_cost ? last.gas - last.gas_cost : 0;
        }
        out.push_back(first.gas >= left ? first.gas - left : 0);
    });
    return out;
}

void link_block_history(std::vector<TxArtifacts>& corpus) {
    std::map<Address, std::uint64_t> seen;
    for (auto& a : corpus) {
        a.last_seen_block = seen;
        for_each_node(a.tree, [&](const InvocationNode& n, std::size_t) {
            if (n.executed) seen[n.code_address] = a.meta.block_number;
        });
    }
}

}  // namespace txtrace
