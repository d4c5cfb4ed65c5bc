// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include <txtrace/common/types.hpp>
#include <txtrace/parser/invocation_tree.hpp>

namespace txtrace {

//! Concrete EVM memory rebuilt from stack operands, with per-byte knowledge tracking for
//! regions written by opcodes whose source data the trace does not carry.
class MemoryImage {
  public:
    //! Largest offset+length modelled. Real transactions cannot reach it under memory gas.
    static constexpr std::uint64_t kLimit = std::uint64_t{1} << 26;

    void write(std::uint64_t offset, ByteView data);
    void write(std::uint64_t offset, const FrameData& data, std::uint64_t max_len);
    void write_unknown(std::uint64_t offset, std::uint64_t length);
    void store_word(std::uint64_t offset, const Word& w);
    void store_byte(std::uint64_t offset, std::uint8_t b);
    void copy_within(std::uint64_t dst, std::uint64_t src, std::uint64_t length);

    //! Bytes past the current size read as zero, as in the EVM.
    [[nodiscard]] FrameData read(std::uint64_t offset, std::uint64_t length) const;

    [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }

  private:
    bool ensure(std::uint64_t offset, std::uint64_t length);

    Bytes data_;
    std::vector<std::uint8_t> unknown_;
    std::size_t unknown_count_{0};
};

//! Reads a slice of captured memory with EVM zero-extension.
[[nodiscard]] FrameData read_captured(const Bytes& memory, std::uint64_t offset, std::uint64_t length);

}  // namespace txtrace
