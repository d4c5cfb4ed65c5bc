// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#include <txtrace/parser/render.hpp>

#include <fmt/format.h>

#include <txtrace/common/hex.hpp>

namespace txtrace {

std::string render_tree(const InvocationNode& root, const RenderOptions& options) {
    std::string out;
    for_each_node(root, [&](const InvocationNode& n, std::size_t depth) {
        const std::string indent(depth * 2, ' ');
        std::string label = n.selector ? to_string(*n.selector) : "-";
        if (options.function_label) {
            if (auto decoded = options.function_label(n)) label = *decoded;
        }
        out += fmt::format("{}{} {} {} calldata={}B ret={}B exit={}\n", indent, to_string(n.call_kind),
                           to_string(n.code_address), label, n.calldata.size, n.return_data.size,
                           to_string(n.exit_reason));
        if (options.storage_label) {
            for (const auto& ev : n.storage_events) out += indent + "  @" + options.storage_label(ev) + "\n";
        }
    });
    return out;
}

}  // namespace txtrace
