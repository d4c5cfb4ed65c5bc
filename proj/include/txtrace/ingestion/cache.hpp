// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace txtrace {

enum class CacheKind { trace, receipt, abi, storage_layout };

struct CacheKey {
    CacheKind kind;
    std::string identifier;  // tx hash or contract address

    friend bool operator==(const CacheKey&, const CacheKey&) = default;
};

[[nodiscard]] std::string_view to_string(CacheKind kind) noexcept;

//! Directory of JSON files, one per key: <root>/<kind>/<identifier>.json.
//! Writes are create-only; an existing artifact is never replaced. Readers only ever
//! observe complete files since a write lands via hard-link from a temporary.
class Cache {
  public:
    explicit Cache(std::filesystem::path root);

    [[nodiscard]] const std::filesystem::path& root() const noexcept { return root_; }
    [[nodiscard]] std::filesystem::path path_for(const CacheKey& key) const;

    [[nodiscard]] std::optional<std::string> get(const CacheKey& key) const;

    //! Returns false if the key already existed (content left untouched).
    bool put(const CacheKey& key, std::string_view content) const;

  private:
    std::filesystem::path root_;
};

}  // namespace txtrace
