// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include <txtrace/common/types.hpp>
#include <txtrace/parser/slot_path.hpp>

namespace txtrace {

enum class CallKind { root, call, callcode, staticcall, delegatecall, create, create2 };
enum class ExitReason { stop, return_, revert, selfdestruct, invalid, out_of_gas };

[[nodiscard]] std::string_view to_string(CallKind kind) noexcept;
[[nodiscard]] std::string_view to_string(ExitReason reason) noexcept;
[[nodiscard]] std::optional<CallKind> call_kind_from_string(std::string_view s) noexcept;

[[nodiscard]] constexpr bool is_create(CallKind k) noexcept { return k == CallKind::create || k == CallKind::create2; }

//! Frames whose state changes the EVM discards.
[[nodiscard]] constexpr bool is_reverting(ExitReason r) noexcept {
    return r == ExitReason::revert || r == ExitReason::out_of_gas || r == ExitReason::invalid;
}

//! Byte payload that may only be partially known when memory was not captured.
struct FrameData {
    Bytes bytes;
    std::uint64_t size{0};
    bool complete{true};

    [[nodiscard]] static FrameData of(Bytes b) {
        FrameData d;
        d.size = b.size();
        d.bytes = std::move(b);
        return d;
    }
    [[nodiscard]] static FrameData length_only(std::uint64_t n) {
        FrameData d;
        d.size = n;
        d.complete = false;
        return d;
    }

    friend bool operator==(const FrameData&, const FrameData&) = default;
};

enum class StorageAccessKind { load, store };

struct StorageAccessEvent {
    StorageAccessKind kind{StorageAccessKind::load};
    Word raw_slot{0};
    Word value{0};
    std::size_t instruction_index{0};
    bool rolled_back{false};
    std::optional<DecodedSlotPath> decoded;

    friend bool operator==(const StorageAccessEvent&, const StorageAccessEvent&) = default;
};

struct Sha3Record {
    Bytes input;
    bool input_complete{true};
    Word output{0};
    std::size_t instruction_index{0};

    friend bool operator==(const Sha3Record&, const Sha3Record&) = default;
};

struct InvocationNode {
    CallKind call_kind{CallKind::root};
    Address caller;
    Address code_address;
    Address storage_address;
    Word value{0};
    std::uint64_t gas_at_entry{0};
    FrameData calldata;
    FrameData return_data;
    std::optional<Selector> selector;
    ExitReason exit_reason{ExitReason::stop};
    std::vector<InvocationNode> children;
    std::vector<StorageAccessEvent> storage_events;
    std::vector<Sha3Record> sha3_events;
    std::size_t entry_index{0};
    std::size_t exit_index{0};
    bool executed{true};  // false for synthetic leaves (code-less or precompile callees)

    friend bool operator==(const InvocationNode&, const InvocationNode&) = default;
};

//! Pre-order traversal; the callback receives the node and its depth (root = 0).
void for_each_node(const InvocationNode& root, const std::function<void(const InvocationNode&, std::size_t)>& fn);
void for_each_node(InvocationNode& root, const std::function<void(InvocationNode&, std::size_t)>& fn);

[[nodiscard]] std::size_t node_count(const InvocationNode& root);

//! Node at a pre-order position (0 = root), the frame numbering used by taint sources.
[[nodiscard]] const InvocationNode* node_by_frame_id(const InvocationNode& root, std::size_t frame_id);

//! Marks every storage event in the subtree rolled back.
void mark_rolled_back(InvocationNode& node);

}  // namespace txtrace
