// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#include <txtrace/dataflow/taint.hpp>

#include <algorithm>
#include <charconv>
#include <limits>
#include <tuple>

#include <txtrace/common/error.hpp>
#include <txtrace/common/hex.hpp>
#include <txtrace/common/opcodes.hpp>

namespace txtrace {

TaintSource TaintSource::calldata(std::size_t frame, std::uint64_t offset, std::uint64_t length) {
    TaintSource s;
    s.kind = Kind::calldata_range;
    s.frame = frame;
    s.offset = offset;
    s.length = length;
    return s;
}

TaintSource TaintSource::storage(const Address& address, const Word& slot) {
    TaintSource s;
    s.kind = Kind::storage_slot;
    s.address = address;
    s.slot = slot;
    return s;
}

TaintSource TaintSource::env(std::uint8_t opcode) {
    TaintSource s;
    s.kind = Kind::env_opcode;
    s.opcode = opcode;
    return s;
}

TaintSource TaintSource::call_return(std::size_t frame) {
    TaintSource s;
    s.kind = Kind::call_return;
    s.frame = frame;
    return s;
}

bool operator<(const TaintSource& a, const TaintSource& b) {
    return std::tie(a.kind, a.frame, a.offset, a.length, a.address, a.slot, a.opcode) <
           std::tie(b.kind, b.frame, b.offset, b.length, b.address, b.slot, b.opcode);
}

std::string to_string(const TaintSource& s) {
    switch (s.kind) {
        case TaintSource::Kind::calldata_range:
            return "calldata:" + std::to_string(s.frame) + ":" + std::to_string(s.offset) + ":" + std::to_string(s.length);
        case TaintSource::Kind::storage_slot: return "storage:" + to_string(s.address) + ":" + word_to_hex(s.slot);
        case TaintSource::Kind::env_opcode: return "env:" + std::string(opcode_info(s.opcode).name);
        case TaintSource::Kind::call_return: return "call_return:" + std::to_string(s.frame);
    }
    return {};
}

namespace {

    std::vector<std::string_view> split(std::string_view text, char sep) {
        std::vector<std::string_view> out;
        while (true) {
            const auto pos = text.find(sep);
            out.push_back(text.substr(0, pos));
            if (pos == std::string_view::npos) break;
            text.remove_prefix(pos + 1);
        }
        return out;
    }

    std::uint64_t number(std::string_view s, std::string_view whole) {
        std::uint64_t v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
            throw UsageError("bad number in taint source '" + std::string(whole) + "'");
        }
        return v;
    }

}  // namespace

TaintSource parse_taint_source(std::string_view text) {
    const auto parts = split(text, ':');
    const auto kind = parts[0];
    try {
        if (kind == "calldata" && parts.size() == 4) {
            return TaintSource::calldata(number(parts[1], text), number(parts[2], text), number(parts[3], text));
        }
        if (kind == "storage" && parts.size() == 3) {
            return TaintSource::storage(address_from_hex(parts[1]), word_from_string(parts[2]));
        }
        if (kind == "call_return" && parts.size() == 2) return TaintSource::call_return(number(parts[1], text));
        if (kind == "env" && parts.size() == 2) {
            const auto op = opcode_from_name(std::string(parts[1]));
            if (op && (*op == op::CALLER || *op == op::ORIGIN || *op == op::TIMESTAMP || *op == op::NUMBER ||
                       *op == op::CALLVALUE)) {
                return TaintSource::env(*op);
            }
        }
    } catch (const std::invalid_argument& e) {
        throw UsageError("bad taint source '" + std::string(text) + "': " + e.what());
    }
    throw UsageError("bad taint source '" + std::string(text) +
                     "' (expected calldata:F:OFF:LEN, storage:ADDR:SLOT, env:OPCODE or call_return:F)");
}

TagSet& TagSet::operator|=(const TagSet& other) {
    unknown_ = unknown_ || other.unknown_;
    if (other.ids_.empty()) return *this;
    if (ids_.empty()) {
        ids_ = other.ids_;
        return *this;
    }
    std::vector<std::uint32_t> merged;
    merged.reserve(ids_.size() + other.ids_.size());
    std::set_union(ids_.begin(), ids_.end(), other.ids_.begin(), other.ids_.end(), std::back_inserter(merged));
    ids_ = std::move(merged);
    return *this;
}

namespace {

    std::uint64_t saturating_end(std::uint64_t offset, std::uint64_t length) {
        const auto max = std::numeric_limits<std::uint64_t>::max();
        return length > max - offset ? max : offset + length;
    }

}  // namespace

void RangeTagMap::erase_range(std::uint64_t begin, std::uint64_t end) {
    if (begin >= end) return;
    auto it = segments_.lower_bound(begin);
    if (it != segments_.begin()) {
        auto prev = std::prev(it);
        if (prev->second.end > begin) {
            // Split the segment straddling `begin`.
            const Segment tail{prev->second.end, prev->second.tags};
            prev->second.end = begin;
            if (tail.end > end) segments_.emplace(end, Segment{tail.end, tail.tags});
            it = segments_.lower_bound(begin);
        }
    }
    while (it != segments_.end() && it->first < end) {
        if (it->second.end > end) {
            Segment rest{it->second.end, it->second.tags};
            segments_.erase(it);
            segments_.emplace(end, std::move(rest));
            break;
        }
        it = segments_.erase(it);
    }
}

void RangeTagMap::assign(std::uint64_t offset, std::uint64_t length, const TagSet& tags) {
    if (length == 0) return;
    const auto end = saturating_end(offset, length);
    erase_range(offset, end);
    if (!tags.empty()) segments_.emplace(offset, Segment{end, tags});
}

TagSet RangeTagMap::collect(std::uint64_t offset, std::uint64_t length) const {
    TagSet out;
    if (length == 0 || segments_.empty()) return out;
    const auto end = saturating_end(offset, length);
    auto it = segments_.upper_bound(offset);
    if (it != segments_.begin()) --it;
    for (; it != segments_.end() && it->first < end; ++it) {
        if (it->second.end > offset) out |= it->second.tags;
    }
    return out;
}

void RangeTagMap::copy_from(const RangeTagMap& src, std::uint64_t src_offset, std::uint64_t length,
                            std::uint64_t dst_offset) {
    if (length == 0) return;
    const auto src_end = saturating_end(src_offset, length);
    std::vector<std::pair<std::pair<std::uint64_t, std::uint64_t>, TagSet>> pieces;
    auto it = src.segments_.upper_bound(src_offset);
    if (it != src.segments_.begin()) --it;
    for (; it != src.segments_.end() && it->first < src_end; ++it) {
        const auto b = std::max(it->first, src_offset);
        const auto e = std::min(it->second.end, src_end);
        if (b < e) pieces.push_back({{b - src_offset, e - src_offset}, it->second.tags});
    }
    erase_range(dst_offset, saturating_end(dst_offset, length));
    for (auto& [range, tags] : pieces) {
        const auto b = saturating_end(dst_offset, range.first);
        const auto e = saturating_end(dst_offset, range.second);
        if (b < e) segments_.emplace(b, Segment{e, std::move(tags)});
    }
}

}  // namespace txtrace
