// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include <txtrace/decoder/abi.hpp>
#include <txtrace/parser/invocation_tree.hpp>

namespace txtrace {

enum class DecodeStatus { full, args_only, selector_only, undecoded };

[[nodiscard]] std::string_view to_string(DecodeStatus s) noexcept;

struct DecodedArg {
    std::string name;
    abi::Type type;
    abi::Value value;

    friend bool operator==(const DecodedArg&, const DecodedArg&) = default;
};

struct DecodedCall {
    std::optional<Selector> selector;
    std::optional<abi::Function> function;
    std::vector<DecodedArg> args;
    std::vector<DecodedArg> returns;
    DecodeStatus status{DecodeStatus::undecoded};

    friend bool operator==(const DecodedCall&, const DecodedCall&) = default;
};

//! Never throws on malformed data; failures show up in `status`. Return data is decoded only
//! for frames that returned normally, so a revert reason leaves the call at args_only.
[[nodiscard]] DecodedCall decode_call(const InvocationNode& node, std::span<const abi::Function> abis);

//! `name(arg=value, ...)` or the bare selector when no ABI matched.
[[nodiscard]] std::string describe_call(const DecodedCall& call);
[[nodiscard]] nlohmann::json to_json(const DecodedCall& call);

}  // namespace txtrace
