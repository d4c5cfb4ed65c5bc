// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include <txtrace/parser/invocation_tree.hpp>
#include <txtrace/parser/slot_path.hpp>

namespace txtrace {

struct LayoutEntry {
    std::string label;
    Word slot{0};
    std::uint32_t offset{0};  // byte offset within the slot
    std::string type;         // type id, e.g. "t_mapping(t_address,t_uint256)"

    friend bool operator==(const LayoutEntry&, const LayoutEntry&) = default;
};

//! Subset of the compiler's type table: enough to split array indices from member offsets.
struct LayoutType {
    std::string encoding;  // inplace, mapping, dynamic_array, bytes
    std::uint64_t number_of_bytes{32};
    std::string key;    // mapping
    std::string value;  // mapping
    std::string base;   // arrays
    std::vector<LayoutEntry> members;

    friend bool operator==(const LayoutType&, const LayoutType&) = default;
};

struct StorageLayout {
    std::vector<LayoutEntry> entries;
    std::map<std::string, LayoutType> types;

    //! Entries at a slot, lowest byte offset first.
    [[nodiscard]] std::vector<const LayoutEntry*> at_slot(const Word& slot) const;

    friend bool operator==(const StorageLayout&, const StorageLayout&) = default;
};

//! Accepts either a bare entry array or the compiler's {"storage": [...], "types": {...}}.
[[nodiscard]] StorageLayout parse_storage_layout(const nlohmann::json& j);
[[nodiscard]] StorageLayout load_storage_layout(const std::string& path);

struct SlotDecodeOptions {
    Word max_array_span{Word(1) << 16};
    Word small_slot_threshold{Word(1) << 32};
    std::size_t max_depth{64};
};

//! Sha3 records of one transaction ordered by output for nearest-below lookups.
class Sha3Index {
  public:
    Sha3Index() = default;
    explicit Sha3Index(std::span<const Sha3Record> records);
    explicit Sha3Index(const InvocationNode& root);
    Sha3Index(const Sha3Index&) = delete;
    Sha3Index& operator=(const Sha3Index&) = delete;
    Sha3Index(Sha3Index&&) noexcept = default;
    Sha3Index& operator=(Sha3Index&&) noexcept = default;

    struct Match {
        const Sha3Record* record;
        Word offset;  // slot - record.output
    };

    //! Record with output == slot, else the greatest output within `span` below slot; ties go to
    //! the latest record. Only complete records executed before `before_index` qualify.
    [[nodiscard]] std::optional<Match> find(const Word& slot, std::size_t before_index, const Word& span) const;

  private:
    std::vector<Sha3Record> owned_;
    std::vector<std::pair<Word, const Sha3Record*>> sorted_;
    void build(std::vector<const Sha3Record*> records);
};

[[nodiscard]] std::optional<DecodedSlotPath> decode_storage_access(const StorageAccessEvent& event,
                                                                   const Sha3Index& index,
                                                                   const StorageLayout* layout = nullptr,
                                                                   const SlotDecodeOptions& options = {});

[[nodiscard]] std::optional<DecodedSlotPath> decode_storage_access(const StorageAccessEvent& event,
                                                                   std::span<const Sha3Record> records,
                                                                   const StorageLayout* layout = nullptr,
                                                                   const SlotDecodeOptions& options = {});

//! Forward re-evaluation: mapping_key k gives keccak(pad32(k) ++ pad32(slot)), array_index i gives
//! keccak(pad32(slot)) + i, struct_offset m gives slot + m.
[[nodiscard]] Word evaluate_slot_path(const DecodedSlotPath& path);

//! Fills `decoded` on every storage event; layouts are looked up by storage address.
using LayoutLookup = std::function<const StorageLayout*(const Address&)>;
void decode_tree_storage(InvocationNode& root, const LayoutLookup& layouts = {}, const SlotDecodeOptions& options = {});

//! `balances[0x22]`, `slot2[0x5].+1`; wildcarded form replaces keys and indices with `*`.
[[nodiscard]] std::string format_slot_path(const DecodedSlotPath& path, bool wildcard = false);

}  // namespace txtrace
