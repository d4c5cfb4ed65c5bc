// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#include <txtrace/parser/invocation_tree.hpp>

namespace txtrace {

std::string_view to_string(CallKind kind) noexcept {
    switch (kind) {
        case CallKind::root: return "root";
        case CallKind::call: return "call";
        case CallKind::callcode: return "callcode";
        case CallKind::staticcall: return "staticcall";
        case CallKind::delegatecall: return "delegatecall";
        case CallKind::create: return "create";
        case CallKind::create2: return "create2";
    }
    return "unknown";
}

std::string_view to_string(ExitReason reason) noexcept {
    switch (reason) {
        case ExitReason::stop: return "stop";
        case ExitReason::return_: return "return";
        case ExitReason::revert: return "revert";
        case ExitReason::selfdestruct: return "selfdestruct";
        case ExitReason::invalid: return "invalid";
        case ExitReason::out_of_gas: return "out_of_gas";
    }
    return "unknown";
}

std::optional<CallKind> call_kind_from_string(std::string_view s) noexcept {
    for (auto k : {CallKind::root, CallKind::call, CallKind::callcode, CallKind::staticcall, CallKind::delegatecall,
                   CallKind::create, CallKind::create2}) {
        if (to_string(k) == s) return k;
    }
    return std::nullopt;
}

namespace {

    template <typename Node, typename Fn>
    void walk(Node& node, std::size_t depth, const Fn& fn) {
        fn(node, depth);
        for (auto& child : node.children) walk(child, depth + 1, fn);
    }

    const InvocationNode* find_frame(const InvocationNode& node, std::size_t& remaining) {
        if (remaining == 0) return &node;
        for (const auto& child : node.children) {
            --remaining;
            if (const auto* hit = find_frame(child, remaining)) return hit;
        }
        return nullptr;
    }

}  // namespace

void for_each_node(const InvocationNode& root, const std::function<void(const InvocationNode&, std::size_t)>& fn) {
    walk(root, 0, fn);
}

void for_each_node(InvocationNode& root, const std::function<void(InvocationNode&, std::size_t)>& fn) {
    walk(root, 0, fn);
}

std::size_t node_count(const InvocationNode& root) {
    std::size_t n = 1;
    for (const auto& child : root.children) n += node_count(child);
    return n;
}

const InvocationNode* node_by_frame_id(const InvocationNode& root, std::size_t frame_id) {
    std::size_t remaining = frame_id;
    return find_frame(root, remaining);
}

void mark_rolled_back(InvocationNode& node) {
    for (auto& ev : node.storage_events) ev.rolled_back = true;
    for (auto& child : node.children) mark_rolled_back(child);
}

}  // namespace txtrace
