// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <optional>
#include <string>

#include <txtrace/parser/invocation_tree.hpp>

namespace txtrace {

struct RenderOptions {
    //! Replaces the selector column (e.g. with a decoded signature) when it returns a value.
    std::function<std::optional<std::string>(const InvocationNode&)> function_label;
    //! When set, each storage event is printed under its frame using this text.
    std::function<std::string(const StorageAccessEvent&)> storage_label;
};

//! One line per node, two-space indent per depth:
//! `{kind} {code_address} {selector|-} calldata={N}B ret={M}B exit={reason}`.
[[nodiscard]] std::string render_tree(const InvocationNode& root, const RenderOptions& options = {});

}  // namespace txtrace
