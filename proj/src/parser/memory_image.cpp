// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#include <txtrace/parser/memory_image.hpp>

#include <algorithm>
#include <cstring>

namespace txtrace {

bool MemoryImage::ensure(std::uint64_t offset, std::uint64_t length) {
    if (length == 0) return true;
    if (offset >= kLimit || length > kLimit - offset) return false;
    const auto end = static_cast<std::size_t>(offset + length);
    if (end > data_.size()) {
        const std::size_t rounded = (end + 31) / 32 * 32;
        data_.resize(rounded, 0);
        unknown_.resize(rounded, 0);
    }
    return true;
}

void MemoryImage::write(std::uint64_t offset, ByteView data) {
    if (data.empty()) return;
    if (!ensure(offset, data.size())) return;
    std::memcpy(data_.data() + offset, data.data(), data.size());
    if (unknown_count_ > 0) {
        for (std::size_t i = 0; i < data.size(); ++i) {
            auto& flag = unknown_[offset + i];
            if (flag) {
                flag = 0;
                --unknown_count_;
            }
        }
    }
}

void MemoryImage::write(std::uint64_t offset, const FrameData& data, std::uint64_t max_len) {
    const std::uint64_t n = std::min(max_len, data.size);
    if (n == 0) return;
    if (data.complete) {
        write(offset, ByteView{data.bytes.data(), static_cast<std::size_t>(n)});
    } else {
        write_unknown(offset, n);
    }
}

void MemoryImage::write_unknown(std::uint64_t offset, std::uint64_t length) {
    if (!ensure(offset, length)) return;
    for (std::uint64_t i = 0; i < length; ++i) {
        auto& flag = unknown_[offset + i];
        if (!flag) {
            flag = 1;
            ++unknown_count_;
        }
        data_[offset + i] = 0;
    }
}

void MemoryImage::store_word(std::uint64_t offset, const Word& w) {
    const auto be = word_to_be32(w);
    write(offset, be);
}

void MemoryImage::store_byte(std::uint64_t offset, std::uint8_t b) { write(offset, ByteView{&b, 1}); }

void MemoryImage::copy_within(std::uint64_t dst, std::uint64_t src, std::uint64_t length) {
    if (length == 0) return;
    const FrameData chunk = read(src, length);
    write(dst, chunk, length);
}

FrameData MemoryImage::read(std::uint64_t offset, std::uint64_t length) const {
    if (length == 0) return FrameData::of({});
    if (offset >= kLimit || length > kLimit - offset) return FrameData::length_only(length);
    FrameData out;
    out.size = length;
    out.bytes.assign(static_cast<std::size_t>(length), 0);
    if (offset < data_.size()) {
        const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(length), data_.size() - offset);
        std::memcpy(out.bytes.data(), data_.data() + offset, n);
        if (unknown_count_ > 0) {
            for (std::size_t i = 0; i < n; ++i) {
                if (unknown_[offset + i]) {
                    out.complete = false;
                    break;
                }
            }
        }
    }
    if (!out.complete) out.bytes.clear();
    return out;
}

FrameData read_captured(const Bytes& memory, std::uint64_t offset, std::uint64_t length) {
    if (length == 0) return FrameData::of({});
    if (offset >= MemoryImage::kLimit || length > MemoryImage::kLimit - offset) return FrameData::length_only(length);
    Bytes out(static_cast<std::size_t>(length), 0);
    if (offset < memory.size()) {
        const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(length), memory.size() - offset);
        std::memcpy(out.data(), memory.data() + offset, n);
    }
    return FrameData::of(std::move(out));
}

}  // namespace txtrace
