// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <txtrace/common/types.hpp>

namespace txtrace {

struct TaintSource {
    enum class Kind { calldata_range, storage_slot, env_opcode, call_return };

    Kind kind{Kind::calldata_range};
    std::size_t frame{0};  // calldata_range, call_return: pre-order frame id
    std::uint64_t offset{0};
    std::uint64_t length{0};
    Address address;  // storage_slot
    Word slot{0};     // storage_slot
    std::uint8_t opcode{0};  // env_opcode: CALLER, ORIGIN, TIMESTAMP, NUMBER or CALLVALUE

    [[nodiscard]] static TaintSource calldata(std::size_t frame, std::uint64_t offset, std::uint64_t length);
    [[nodiscard]] static TaintSource storage(const Address& address, const Word& slot);
    [[nodiscard]] static TaintSource env(std::uint8_t opcode);
    [[nodiscard]] static TaintSource call_return(std::size_t frame);

    friend bool operator==(const TaintSource&, const TaintSource&) = default;
    friend bool operator<(const TaintSource& a, const TaintSource& b);
};

//! `calldata:<frame>:<offset>:<length>`, `storage:<address>:<slot>`, `env:CALLER`, `call_return:<frame>`.
[[nodiscard]] std::string to_string(const TaintSource& s);
//! Inverse of to_string; throws UsageError on malformed text.
[[nodiscard]] TaintSource parse_taint_source(std::string_view text);

//! Set of source ids (indices into the analysis' source list). `unknown` marks values derived
//! through an unmodeled instruction from tainted inputs.
class TagSet {
  public:
    TagSet() = default;
    explicit TagSet(std::uint32_t id) : ids_{id} {}

    [[nodiscard]] bool empty() const noexcept { return ids_.empty() && !unknown_; }
    [[nodiscard]] bool unknown() const noexcept { return unknown_; }
    [[nodiscard]] const std::vector<std::uint32_t>& ids() const noexcept { return ids_; }

    void mark_unknown() noexcept { unknown_ = true; }
    TagSet& operator|=(const TagSet& other);
    [[nodiscard]] friend TagSet operator|(TagSet a, const TagSet& b) { return a |= b; }

    friend bool operator==(const TagSet&, const TagSet&) = default;

  private:
    std::vector<std::uint32_t> ids_;  // sorted, unique
    bool unknown_{false};
};

//! Byte-granular tags over a 64-bit address space, stored as disjoint tagged ranges.
class RangeTagMap {
  public:
    void assign(std::uint64_t offset, std::uint64_t length, const TagSet& tags);
    [[nodiscard]] TagSet collect(std::uint64_t offset, std::uint64_t length) const;
    //! Copies [src_offset, src_offset+length) of `src` to `dst_offset` here; bytes with no tag in
    //! `src` become untagged.
    void copy_from(const RangeTagMap& src, std::uint64_t src_offset, std::uint64_t length, std::uint64_t dst_offset);
    void clear() { segments_.clear(); }
    [[nodiscard]] bool empty() const noexcept { return segments_.empty(); }

    struct Segment {
        std::uint64_t end;
        TagSet tags;
    };
    [[nodiscard]] const std::map<std::uint64_t, Segment>& segments() const noexcept { return segments_; }

  private:
    void erase_range(std::uint64_t begin, std::uint64_t end);
    std::map<std::uint64_t, Segment> segments_;  // keyed by begin
};

}  // namespace txtrace
