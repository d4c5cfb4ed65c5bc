// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#include <txtrace/ingestion/cache.hpp>

#include <atomic>
#include <cctype>
#include <fstream>
#include <sstream>
#include <thread>

#include <txtrace/common/error.hpp>

namespace txtrace {

namespace fs = std::filesystem;

std::string_view to_string(CacheKind kind) noexcept {
    switch (kind) {
        case CacheKind::trace: return "trace";
        case CacheKind::receipt: return "receipt";
        case CacheKind::abi: return "abi";
        case CacheKind::storage_layout: return "layout";
    }
    return "unknown";
}

Cache::Cache(fs::path root) : root_(std::move(root)) {}

fs::path Cache::path_for(const CacheKey& key) const {
    std::string name;
    name.reserve(key.identifier.size() + 5);
    for (char c : key.identifier) {
        const bool safe = std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_';
        name.push_back(safe ? static_cast<char>(std::tolower(static_cast<unsigned char>(c))) : '_');
    }
    return root_ / std::string(to_string(key.kind)) / (name + ".json");
}

std::optional<std::string> Cache::get(const CacheKey& key) const {
    std::ifstream in(path_for(key), std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

bool Cache::put(const CacheKey& key, std::string_view content) const {
    const fs::path target = path_for(key);
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
    if (fs::exists(target)) return false;

    static std::atomic<unsigned long> counter{0};
    const auto tid = std::hash<std::thread::id>{}(std::this_thread::get_id());
    fs::path tmp = target;
    tmp += ".tmp." + std::to_string(tid) + "." + std::to_string(counter.fetch_add(1));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write cache file: " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw Error("cannot write cache file: " + tmp.string());
    }
    fs::create_hard_link(tmp, target, ec);
    fs::remove(tmp);
    if (ec) {
        if (ec == std::errc::file_exists) return false;
        throw Error("cannot publish cache file " + target.string() + ": " + ec.message());
    }
    return true;
}

}  // namespace txtrace
