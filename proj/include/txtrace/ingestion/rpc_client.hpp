// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include <txtrace/common/types.hpp>
#include <txtrace/ingestion/cache.hpp>
#include <txtrace/ingestion/trace.hpp>

namespace txtrace {

inline constexpr const char* kEnvEndpoint = "TXTRACE_RPC_URL";
inline constexpr const char* kEnvToken = "TXTRACE_RPC_TOKEN";
inline constexpr const char* kEnvCacheDir = "TXTRACE_CACHE_DIR";

struct RetryPolicy {
    int max_retries{3};
    std::chrono::milliseconds initial_backoff{1000};
    std::chrono::seconds request_timeout{120};
};

//! Plain JSON-RPC 2.0 over HTTP(S). The endpoint is any provider URL; an optional bearer
//! token is sent as an Authorization header.
class RpcClient {
  public:
    explicit RpcClient(std::string endpoint, std::optional<std::string> bearer_token = std::nullopt,
                       RetryPolicy policy = {});
    ~RpcClient();
    RpcClient(RpcClient&&) noexcept;
    RpcClient& operator=(RpcClient&&) noexcept;

    //! Returns the "result" member. Throws TransportError after exhausting retries,
    //! NotFoundError for unknown transactions, SchemaError for malformed envelopes.
    nlohmann::json call(std::string_view method, const nlohmann::json& params);

    [[nodiscard]] const std::string& endpoint() const noexcept { return endpoint_; }

  private:
    struct Impl;
    std::string endpoint_;
    std::optional<std::string> token_;
    RetryPolicy policy_;
    std::unique_ptr<Impl> impl_;
};

struct TracerOptions {
    bool capture_memory{false};
};

//! Transaction source backed by an RPC endpoint and a write-once cache. Either may be
//! absent: without a client only cached artifacts are served.
class TraceFetcher {
  public:
    TraceFetcher(std::optional<RpcClient> client, std::optional<Cache> cache, TracerOptions options = {});

    //! Replays the transaction with the struct-log tracer (stack always, memory on demand,
    //! storage never).
    [[nodiscard]] RawTrace fetch_trace(const Hash32& tx_hash);

    //! Receipt merged with the transaction object so every TransactionMeta field is populated.
    [[nodiscard]] TransactionMeta fetch_receipt(const Hash32& tx_hash);

    [[nodiscard]] std::size_t network_calls() const noexcept { return network_calls_; }

  private:
    std::string cached_or_fetch(const CacheKey& key, const std::function<nlohmann::json()>& fetch);

    std::optional<RpcClient> client_;
    std::optional<Cache> cache_;
    TracerOptions options_;
    std::size_t network_calls_{0};
};

//! Tracer configuration object sent as the second debug_traceTransaction parameter.
[[nodiscard]] nlohmann::json tracer_config(const TracerOptions& options);

}  // namespace txtrace
