// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#include <txtrace/decoder/call_decoder.hpp>

#include <txtrace/common/hex.hpp>

namespace txtrace {

std::string_view to_string(DecodeStatus s) noexcept {
    switch (s) {
        case DecodeStatus::full: return "full";
        case DecodeStatus::args_only: return "args_only";
        case DecodeStatus::selector_only: return "selector_only";
        case DecodeStatus::undecoded: return "undecoded";
    }
    return "undecoded";
}

namespace {

    std::vector<abi::Type> types_of(const std::vector<abi::Param>& params) {
        std::vector<abi::Type> out;
        out.reserve(params.size());
        for (const auto& p : params) out.push_back(p.type);
        return out;
    }

    //! Decodes `data` as exactly the given parameter list.
    std::optional<std::vector<DecodedArg>> decode_exact(const std::vector<abi::Param>& params, ByteView data) {
        const auto result = abi::decode(types_of(params), data);
        if (!result || result->consumed != data.size()) return std::nullopt;
        std::vector<DecodedArg> out;
        for (std::size_t i = 0; i < params.size(); ++i) {
            out.push_back({params[i].name, params[i].type, result->values[i]});
        }
        return out;
    }

}  // namespace

DecodedCall decode_call(const InvocationNode& node, std::span<const abi::Function> abis) {
    DecodedCall out;
    out.selector = node.selector;
    if (!node.selector || !node.calldata.complete) {
        out.status = DecodeStatus::undecoded;
        return out;
    }
    out.status = DecodeStatus::selector_only;
    const abi::Function* fn = nullptr;
    for (const auto& f : abis) {
        if (f.selector == *node.selector) {
            fn = &f;
            break;
        }
    }
    if (!fn) return out;
    out.function = *fn;

    const ByteView args = ByteView{node.calldata.bytes}.subspan(4);
    auto decoded_args = decode_exact(fn->inputs, args);
    if (!decoded_args) return out;
    out.args = std::move(*decoded_args);
    out.status = DecodeStatus::args_only;

    const bool normal_exit = node.exit_reason == ExitReason::return_ || node.exit_reason == ExitReason::stop;
    if (!normal_exit || !node.return_data.complete) return out;
    auto decoded_returns = decode_exact(fn->outputs, node.return_data.bytes);
    if (!decoded_returns) return out;
    out.returns = std::move(*decoded_returns);
    out.status = DecodeStatus::full;
    return out;
}

std::string describe_call(const DecodedCall& call) {
    if (!call.function) return call.selector ? to_string(*call.selector) : std::string("-");
    std::string out = call.function->name + "(";
    if (call.args.empty() && !call.function->inputs.empty()) {
        out += "?";
    }
    for (std::size_t i = 0; i < call.args.size(); ++i) {
        if (i) out += ", ";
        if (!call.args[i].name.empty()) out += call.args[i].name + "=";
        out += abi::format_value(call.args[i].type, call.args[i].value);
    }
    out += ")";
    if (!call.returns.empty()) {
        out += " -> (";
        for (std::size_t i = 0; i < call.returns.size(); ++i) {
            if (i) out += ", ";
            out += abi::format_value(call.returns[i].type, call.returns[i].value);
        }
        out += ")";
    }
    return out;
}

nlohmann::json to_json(const DecodedCall& call) {
    using nlohmann::json;
    auto args_json = [](const std::vector<DecodedArg>& args) {
        json arr = json::array();
        for (const auto& a : args) {
            arr.push_back({{"name", a.name}, {"type", a.type.canonical()}, {"value", abi::value_to_json(a.type, a.value)}});
        }
        return arr;
    };
    json j{{"status", std::string(to_string(call.status))}};
    j["selector"] = call.selector ? json(to_string(*call.selector)) : json(nullptr);
    if (call.function) j["signature"] = call.function->signature();
    j["args"] = args_json(call.args);
    j["returns"] = args_json(call.returns);
    return j;
}

}  // namespace txtrace
