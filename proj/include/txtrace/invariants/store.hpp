// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include <txtrace/invariants/templates.hpp>

namespace txtrace {

//! Values render as decimal strings, or as addresses for address-valued templates.
[[nodiscard]] std::string format_sample_value(const InvariantTemplate& t, const Word& v);

//! Store layout: array of {template_id, target:{address, selector}, parameters, training_support}.
[[nodiscard]] nlohmann::json store_to_json(std::span<const ConcreteInvariant> invariants);
[[nodiscard]] std::vector<ConcreteInvariant> store_from_json(const nlohmann::json& j);
void save_store(const std::filesystem::path& path, std::span<const ConcreteInvariant> invariants);
[[nodiscard]] std::vector<ConcreteInvariant> load_store(const std::filesystem::path& path);

struct InvariantReport {
    ConcreteInvariant invariant;
    std::size_t train_total{0};
    std::size_t train_pass{0};
    std::size_t test_total{0};
    std::size_t test_pass{0};
    std::vector<GuardVerdict> violations;  // trace order
};

struct CheckReport {
    std::optional<Address> contract;
    std::vector<InvariantReport> invariants;

    [[nodiscard]] std::size_t total_pass() const;
    [[nodiscard]] std::size_t total_violate() const;
};

//! Runs every invariant over both halves of a chronological split.
[[nodiscard]] CheckReport check_corpus(std::span<const ConcreteInvariant> invariants,
                                       std::span<const TxArtifacts> train, std::span<const TxArtifacts> test);

//! {contract, invariants_inferred, invariants:[{template_id, target, train_pass_rate, test_pass_rate,
//! violations:[{tx, witness}]}], summary:{pass, violate}}. Rates are null for an empty half.
[[nodiscard]] nlohmann::json report_to_json(const CheckReport& report);

}  // namespace txtrace
