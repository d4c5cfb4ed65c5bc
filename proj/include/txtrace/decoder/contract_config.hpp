// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <vector>

#include <txtrace/decoder/abi.hpp>
#include <txtrace/decoder/storage_decoder.hpp>

namespace txtrace {

//! Per-contract ABIs and storage layouts, read from `<dir>/abi/<address>.json` and
//! `<dir>/layout/<address>.json`.
class ContractConfig {
  public:
    ContractConfig() = default;
    [[nodiscard]] static ContractConfig load(const std::filesystem::path& dir);

    void add_abi(const Address& contract, std::vector<abi::Function> functions);
    void add_layout(const Address& contract, StorageLayout layout);

    [[nodiscard]] std::span<const abi::Function> abi_for(const Address& contract) const;
    [[nodiscard]] const StorageLayout* layout_for(const Address& contract) const;
    [[nodiscard]] LayoutLookup layouts() const;

    [[nodiscard]] std::size_t abi_count() const noexcept { return abis_.size(); }
    [[nodiscard]] std::size_t layout_count() const noexcept { return layouts_.size(); }

  private:
    std::map<Address, std::vector<abi::Function>> abis_;
    std::map<Address, StorageLayout> layouts_;
};

}  // namespace txtrace
