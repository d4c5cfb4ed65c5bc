// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#include <txtrace/decoder/storage_decoder.hpp>

#include <algorithm>
#include <fstream>

#include <txtrace/common/error.hpp>
#include <txtrace/common/hex.hpp>
#include <txtrace/common/keccak.hpp>

namespace txtrace {

using nlohmann::json;

std::vector<const LayoutEntry*> StorageLayout::at_slot(const Word& slot) const {
    std::vector<const LayoutEntry*> out;
    for (const auto& e : entries) {
        if (e.slot == slot) out.push_back(&e);
    }
    std::sort(out.begin(), out.end(), [](const auto* a, const auto* b) { return a->offset < b->offset; });
    return out;
}

namespace {

    Word parse_slot(const json& j, const std::string& where) {
        try {
            if (j.is_number_unsigned()) return Word(j.get<std::uint64_t>());
            if (j.is_string()) return word_from_string(j.get<std::string>());
        } catch (const std::invalid_argument& e) {
            throw SchemaError(where, e.what());
        }
        throw SchemaError(where, "expected a slot number");
    }

    std::vector<LayoutEntry> parse_entries(const json& arr, const std::string& where) {
        if (!arr.is_array()) throw SchemaError(where, "expected an array");
        std::vector<LayoutEntry> out;
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const auto& e = arr[i];
            const std::string at = where + "[" + std::to_string(i) + "]";
            if (!e.is_object()) throw SchemaError(at, "expected an object");
            if (!e.contains("label") || !e["label"].is_string()) throw SchemaError(at + ".label", "missing label");
            if (!e.contains("slot")) throw SchemaError(at + ".slot", "missing slot");
            LayoutEntry le;
            le.label = e["label"].get<std::string>();
            le.slot = parse_slot(e["slot"], at + ".slot");
            if (e.contains("offset") && e["offset"].is_number_unsigned()) le.offset = e["offset"].get<std::uint32_t>();
            if (e.contains("type") && e["type"].is_string()) le.type = e["type"].get<std::string>();
            out.push_back(std::move(le));
        }
        return out;
    }

}  // namespace

StorageLayout parse_storage_layout(const json& j) {
    StorageLayout layout;
    if (j.is_array()) {
        layout.entries = parse_entries(j, "storage");
        return layout;
    }
    if (!j.is_object() || !j.contains("storage")) throw SchemaError("storage", "missing storage entries");
    layout.entries = parse_entries(j["storage"], "storage");
    if (auto types = j.find("types"); types != j.end() && types->is_object()) {
        for (const auto& [id, t] : types->items()) {
            LayoutType lt;
            lt.encoding = t.value("encoding", std::string("inplace"));
            if (t.contains("numberOfBytes")) lt.number_of_bytes = parse_slot(t["numberOfBytes"], "types." + id).convert_to<std::uint64_t>();
            lt.key = t.value("key", std::string{});
            lt.value = t.value("value", std::string{});
            lt.base = t.value("base", std::string{});
            if (t.contains("members")) lt.members = parse_entries(t["members"], "types." + id + ".members");
            layout.types.emplace(id, std::move(lt));
        }
    }
    return layout;
}

StorageLayout load_storage_layout(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open storage layout file: " + path);
    try {
        return parse_storage_layout(json::parse(in));
    } catch (const json::parse_error& e) {
        throw SchemaError("storage", std::string("invalid JSON: ") + e.what());
    }
}

Sha3Index::Sha3Index(std::span<const Sha3Record> records) {
    owned_.assign(records.begin(), records.end());
    std::vector<const Sha3Record*> ptrs;
    for (const auto& r : owned_) ptrs.push_back(&r);
    build(std::move(ptrs));
}

Sha3Index::Sha3Index(const InvocationNode& root) {
    for_each_node(root, [&](const InvocationNode& n, std::size_t) {
        owned_.insert(owned_.end(), n.sha3_events.begin(), n.sha3_events.end());
    });
    std::vector<const Sha3Record*> ptrs;
    for (const auto& r : owned_) ptrs.push_back(&r);
    build(std::move(ptrs));
}

void Sha3Index::build(std::vector<const Sha3Record*> records) {
    for (const auto* r : records) {
        if (r->input_complete) sorted_.emplace_back(r->output, r);
    }
    // Output ascending, then instruction index descending so the latest record comes first.
    std::sort(sorted_.begin(), sorted_.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return a.second->instruction_index > b.second->instruction_index;
    });
}

std::optional<Sha3Index::Match> Sha3Index::find(const Word& slot, std::size_t before_index, const Word& span) const {
    // Walk downward from the greatest output <= slot; wrap-around below zero is not searched.
    auto it = std::upper_bound(sorted_.begin(), sorted_.end(), slot,
                               [](const Word& s, const auto& entry) { return s < entry.first; });
    while (it != sorted_.begin()) {
        --it;
        const Word offset = slot - it->first;
        if (offset > span) break;
        if (it->second->instruction_index < before_index) {
            // Within one output group the latest qualifying record sorts first; step to it.
            auto group_begin = it;
            while (group_begin != sorted_.begin() && std::prev(group_begin)->first == it->first) --group_begin;
            for (auto g = group_begin; g != sorted_.end() && g->first == it->first; ++g) {
                if (g->second->instruction_index < before_index) return Match{g->second, offset};
            }
        }
    }
    return std::nullopt;
}

namespace {

    class SlotDecoder {
      public:
        SlotDecoder(const Sha3Index& index, const StorageLayout* layout, const SlotDecodeOptions& options)
            : index_(index), layout_(layout), options_(options) {}

        std::optional<DecodedSlotPath> decode(const Word& slot, std::size_t before, std::size_t depth) const {
            if (slot < options_.small_slot_threshold) return DecodedSlotPath{slot, {}, std::nullopt, {}};
            if (depth >= options_.max_depth) return std::nullopt;
            const auto match = index_.find(slot, before, options_.max_array_span);
            if (!match) {
                if (layout_ && !layout_->at_slot(slot).empty()) return DecodedSlotPath{slot, {}, std::nullopt, {}};
                return std::nullopt;
            }
            const auto& input = match->record->input;
            const std::size_t at = match->record->instruction_index;
            if (input.size() == 64) {
                auto path = decode(word_from_be(ByteView{input}.subspan(32, 32)), at, depth + 1);
                if (!path) return std::nullopt;
                path->steps.push_back({SlotStepKind::mapping_key, word_from_be(ByteView{input}.subspan(0, 32))});
                if (match->offset != 0) path->steps.push_back({SlotStepKind::struct_offset, match->offset});
                return path;
            }
            if (input.size() == 32) {
                auto path = decode(word_from_be(input), at, depth + 1);
                if (!path) return std::nullopt;
                path->steps.push_back({SlotStepKind::array_index, match->offset});
                return path;
            }
            return std::nullopt;
        }

      private:
        const Sha3Index& index_;
        const StorageLayout* layout_;
        SlotDecodeOptions options_;
    };

    std::uint64_t slots_of(const StorageLayout& layout, const std::string& type_id) {
        auto it = layout.types.find(type_id);
        if (it == layout.types.end()) return 1;
        return std::max<std::uint64_t>(1, (it->second.number_of_bytes + 31) / 32);
    }

    //! Splits array offsets into (index, member offset) where the element type spans several slots.
    void refine_with_types(DecodedSlotPath& path, const StorageLayout& layout, std::string type_id) {
        std::vector<SlotStep> refined;
        for (const auto& step : path.steps) {
            const auto it = layout.types.find(type_id);
            if (it == layout.types.end()) {
                refined.push_back(step);
                type_id.clear();
                continue;
            }
            const LayoutType& t = it->second;
            switch (step.kind) {
                case SlotStepKind::mapping_key:
                    refined.push_back(step);
                    type_id = t.value;
                    break;
                case SlotStepKind::array_index: {
                    const std::uint64_t per = slots_of(layout, t.base);
                    if (per > 1) {
                        refined.push_back({SlotStepKind::array_index, step.value / per});
                        if (step.value % per != 0) refined.push_back({SlotStepKind::struct_offset, step.value % per});
                        // The member type is not tracked past a split.
                        type_id.clear();
                    } else {
                        refined.push_back(step);
                        type_id = t.base;
                    }
                    break;
                }
                case SlotStepKind::struct_offset: {
                    refined.push_back(step);
                    std::string next;
                    for (const auto& m : t.members) {
                        if (m.slot == step.value) next = m.type;
                    }
                    type_id = next;
                    break;
                }
            }
        }
        path.steps = std::move(refined);
    }

    void annotate(DecodedSlotPath& path, const StorageLayout& layout) {
        const auto entries = layout.at_slot(path.base_slot);
        if (entries.empty()) return;
        path.variable_name = entries.front()->label;
        if (entries.size() > 1) {
            for (const auto* e : entries) path.packed_variables.push_back(e->label);
        }
        if (!layout.types.empty()) refine_with_types(path, layout, entries.front()->type);
    }

}  // namespace

std::optional<DecodedSlotPath> decode_storage_access(const StorageAccessEvent& event, const Sha3Index& index,
                                                     const StorageLayout* layout, const SlotDecodeOptions& options) {
    auto path = SlotDecoder(index, layout, options).decode(event.raw_slot, event.instruction_index, 0);
    if (path && layout) annotate(*path, *layout);
    return path;
}

std::optional<DecodedSlotPath> decode_storage_access(const StorageAccessEvent& event,
                                                     std::span<const Sha3Record> records,
                                                     const StorageLayout* layout, const SlotDecodeOptions& options) {
    return decode_storage_access(event, Sha3Index(records), layout, options);
}

Word evaluate_slot_path(const DecodedSlotPath& path) {
    Word slot = path.base_slot;
    for (const auto& step : path.steps) {
        switch (step.kind) {
            case SlotStepKind::mapping_key: {
                std::array<std::uint8_t, 64> buf{};
                word_to_be32(step.value, buf.data());
                word_to_be32(slot, buf.data() + 32);
                slot = keccak_word(buf);
                break;
            }
            case SlotStepKind::array_index: {
                const auto be = word_to_be32(slot);
                slot = keccak_word(be) + step.value;
                break;
            }
            case SlotStepKind::struct_offset: slot += step.value; break;
        }
    }
    return slot;
}

void decode_tree_storage(InvocationNode& root, const LayoutLookup& layouts, const SlotDecodeOptions& options) {
    const Sha3Index index(root);
    for_each_node(root, [&](InvocationNode& n, std::size_t) {
        const StorageLayout* layout = layouts ? layouts(n.storage_address) : nullptr;
        for (auto& ev : n.storage_events) ev.decoded = decode_storage_access(ev, index, layout, options);
    });
}

std::string format_slot_path(const DecodedSlotPath& path, bool wildcard) {
    std::string out = path.variable_name ? *path.variable_name : "slot" + word_to_decimal(path.base_slot);
    for (const auto& step : path.steps) {
        switch (step.kind) {
            case SlotStepKind::mapping_key: out += wildcard ? "[*]" : "[" + word_to_hex(step.value) + "]"; break;
            case SlotStepKind::array_index: out += wildcard ? "[*]" : "[" + word_to_decimal(step.value) + "]"; break;
            case SlotStepKind::struct_offset: out += ".+" + word_to_decimal(step.value); break;
        }
    }
    return out;
}

}  // namespace txtrace
