// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include <txtrace/ingestion/trace.hpp>

namespace txtrace::json_codec {

//! Parses one structLog object. Unknown fields are ignored; `path` prefixes field names in errors.
[[nodiscard]] StructLogEntry parse_struct_log(const nlohmann::json& j, const std::string& path = "structLogs[0]");
[[nodiscard]] nlohmann::json to_json(const StructLogEntry& e);

//! Parses a tracer result object {"structLogs": [...], "failed": bool, "returnValue": hex}.
[[nodiscard]] RawTrace parse_raw_trace(const nlohmann::json& j, const std::string& path = "trace");
[[nodiscard]] nlohmann::json to_json(const RawTrace& t);

//! Parses a receipt-shaped object merged with the transaction's own fields (gas, value, input).
[[nodiscard]] TransactionMeta parse_meta(const nlohmann::json& j, const std::string& path = "meta");
[[nodiscard]] nlohmann::json to_json(const TransactionMeta& m);

}  // namespace txtrace::json_codec
