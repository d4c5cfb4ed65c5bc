// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#include <txtrace/decoder/contract_config.hpp>

#include <txtrace/common/error.hpp>
#include <txtrace/common/hex.hpp>

namespace txtrace {

namespace fs = std::filesystem;

namespace {

    template <typename Fn>
    void for_each_json(const fs::path& dir, Fn&& fn) {
        if (!fs::is_directory(dir)) return;
        for (const auto& e : fs::directory_iterator(dir)) {
            if (e.path().extension() != ".json") continue;
            Address addr;
            try {
                addr = address_from_hex(e.path().stem().string());
            } catch (const std::invalid_argument&) {
                throw ConfigError("file name is not a contract address: " + e.path().string());
            }
            fn(addr, e.path());
        }
    }

}  // namespace

ContractConfig ContractConfig::load(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw ConfigError("config directory does not exist: " + dir.string());
    ContractConfig cfg;
    for_each_json(dir / "abi", [&](const Address& a, const fs::path& p) { cfg.add_abi(a, abi::load_abi(p.string())); });
    for_each_json(dir / "layout",
                  [&](const Address& a, const fs::path& p) { cfg.add_layout(a, load_storage_layout(p.string())); });
    return cfg;
}

void ContractConfig::add_abi(const Address& contract, std::vector<abi::Function> functions) {
    abis_[contract] = std::move(functions);
}

void ContractConfig::add_layout(const Address& contract, StorageLayout layout) {
    layouts_[contract] = std::move(layout);
}

std::span<const abi::Function> ContractConfig::abi_for(const Address& contract) const {
    auto it = abis_.find(contract);
    if (it == abis_.end()) return {};
    return it->second;
}

const StorageLayout* ContractConfig::layout_for(const Address& contract) const {
    auto it = layouts_.find(contract);
    return it == layouts_.end() ? nullptr : &it->second;
}

LayoutLookup ContractConfig::layouts() const {
    return [this](const Address& a) { return layout_for(a); };
}

}  // namespace txtrace
