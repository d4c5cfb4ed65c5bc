// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <txtrace/ingestion/rpc_client.hpp>

#include <algorithm>
#include <cctype>
#include <thread>

#include <txtrace/common/error.hpp>
#include <txtrace/common/hex.hpp>
#include <txtrace/ingestion/json_codec.hpp>

namespace txtrace {

using nlohmann::json;

namespace {

    struct ParsedUrl {
        std::string scheme_host_port;
        std::string path;
    };

    ParsedUrl split_url(const std::string& url) {
        const auto scheme_end = url.find("://");
        if (scheme_end == std::string::npos) throw ConfigError("endpoint must be an http(s) URL: " + url);
        const auto path_start = url.find('/', scheme_end + 3);
        ParsedUrl out;
        out.scheme_host_port = url.substr(0, path_start);
        out.path = path_start == std::string::npos ? "/" : url.substr(path_start);
        return out;
    }

    bool contains_ci(std::string_view haystack, std::string_view needle) {
        auto it = std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end(), [](char a, char b) {
            return std::tolower(static_cast<unsigned char>(a)) == std::tolower(static_cast<unsigned char>(b));
        });
        return it != haystack.end();
    }

    class RetryableError : public TransportError {
      public:
        using TransportError::TransportError;
    };

}  // namespace

struct RpcClient::Impl {
    ParsedUrl url;
    httplib::Client http;
    std::uint64_t next_id{1};

    explicit Impl(const std::string& endpoint) : url(split_url(endpoint)), http(url.scheme_host_port) {}
};

RpcClient::RpcClient(std::string endpoint, std::optional<std::string> bearer_token, RetryPolicy policy)
    : endpoint_(std::move(endpoint)), token_(std::move(bearer_token)), policy_(policy),
      impl_(std::make_unique<Impl>(endpoint_)) {
    const auto timeout = std::chrono::duration_cast<std::chrono::seconds>(policy_.request_timeout).count();
    impl_->http.set_connection_timeout(static_cast<time_t>(timeout), 0);
    impl_->http.set_read_timeout(static_cast<time_t>(timeout), 0);
    impl_->http.set_write_timeout(static_cast<time_t>(timeout), 0);
    if (token_) impl_->http.set_bearer_token_auth(*token_);
}

RpcClient::~RpcClient() = default;
RpcClient::RpcClient(RpcClient&&) noexcept = default;
RpcClient& RpcClient::operator=(RpcClient&&) noexcept = default;

json RpcClient::call(std::string_view method, const json& params) {
    const json request = {
        {"jsonrpc", "2.0"}, {"id", impl_->next_id++}, {"method", std::string(method)}, {"params", params}};
    const std::string body = request.dump();

    auto attempt = [&]() -> json {
        auto res = impl_->http.Post(impl_->url.path, body, "application/json");
        if (!res) throw RetryableError("request to " + endpoint_ + " failed: " + httplib::to_string(res.error()));
        if (res->status == 429 || res->status >= 500) {
            throw RetryableError("endpoint returned HTTP " + std::to_string(res->status));
        }
        if (res->status != 200) throw TransportError("endpoint returned HTTP " + std::to_string(res->status));
        json reply;
        try {
            reply = json::parse(res->body);
        } catch (const json::parse_error& e) {
            throw SchemaError("response", std::string("invalid JSON: ") + e.what());
        }
        if (!reply.is_object()) throw SchemaError("response", "expected a JSON-RPC object");
        if (auto err = reply.find("error"); err != reply.end() && !err->is_null()) {
            const std::string message = err->is_object() ? err->value("message", std::string{}) : err->dump();
            const int code = err->is_object() ? err->value("code", 0) : 0;
            if (code != -32601 && contains_ci(message, "not found")) throw NotFoundError(message);
            throw Error("rpc error from " + std::string(method) + ": " + message);
        }
        auto result = reply.find("result");
        if (result == reply.end()) throw SchemaError("result", "missing in JSON-RPC response");
        if (result->is_null()) throw NotFoundError(std::string(method) + " returned null");
        return *result;
    };

    auto backoff = policy_.initial_backoff;
    for (int tries = 0;; ++tries) {
        try {
            return attempt();
        } catch (const RetryableError& e) {
            if (tries >= policy_.max_retries) throw TransportError(e.what());
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }
    }
}

json tracer_config(const TracerOptions& options) {
    return json{{"disableStack", false},
                {"enableMemory", options.capture_memory},
                {"disableStorage", true},
                {"enableReturnData", true}};
}

TraceFetcher::TraceFetcher(std::optional<RpcClient> client, std::optional<Cache> cache, TracerOptions options)
    : client_(std::move(client)), cache_(std::move(cache)), options_(options) {}

std::string TraceFetcher::cached_or_fetch(const CacheKey& key, const std::function<json()>& fetch) {
    if (cache_) {
        if (auto hit = cache_->get(key)) return *hit;
    }
    if (!client_) throw ConfigError("no RPC endpoint configured and " + key.identifier + " is not cached");
    ++network_calls_;
    std::string content = fetch().dump();
    if (cache_ && !cache_->put(key, content)) {
        // Another writer won the race; serve the published artifact.
        if (auto hit = cache_->get(key)) return *hit;
    }
    return content;
}

RawTrace TraceFetcher::fetch_trace(const Hash32& tx_hash) {
    const std::string id = to_string(tx_hash) + (options_.capture_memory ? ".mem" : "");
    const std::string content = cached_or_fetch({CacheKind::trace, id}, [&] {
        return client_->call("debug_traceTransaction", json::array({to_string(tx_hash), tracer_config(options_)}));
    });
    json j;
    try {
        j = json::parse(content);
    } catch (const json::parse_error& e) {
        throw SchemaError("trace", std::string("invalid JSON: ") + e.what());
    }
    return json_codec::parse_raw_trace(j, "result");
}

TransactionMeta TraceFetcher::fetch_receipt(const Hash32& tx_hash) {
    const std::string hash = to_string(tx_hash);
    const std::string content = cached_or_fetch({CacheKind::receipt, hash}, [&] {
        json receipt = client_->call("eth_getTransactionReceipt", json::array({hash}));
        json tx = client_->call("eth_getTransactionByHash", json::array({hash}));
        if (!receipt.is_object()) throw SchemaError("result", "receipt must be an object");
        if (!tx.is_object()) throw SchemaError("result", "transaction must be an object");
        for (const char* field : {"gas", "value", "input"}) {
            if (tx.contains(field)) receipt[field] = tx[field];
        }
        if (!receipt.contains("transactionIndex") && tx.contains("transactionIndex")) {
            receipt["transactionIndex"] = tx["transactionIndex"];
        }
        return receipt;
    });
    json j;
    try {
        j = json::parse(content);
    } catch (const json::parse_error& e) {
        throw SchemaError("receipt", std::string("invalid JSON: ") + e.what());
    }
    return json_codec::parse_meta(j, "result");
}

}  // namespace txtrace
