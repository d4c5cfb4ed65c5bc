// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <txtrace/common/error.hpp>
#include <txtrace/common/types.hpp>
#include <txtrace/invariants/artifacts.hpp>

namespace txtrace {

enum class Category {
    access_control,
    time_lock,
    gas_control,
    oracle_slippage,
    reentrancy,
    money_flow,
    special_storage,
    data_flow
};
enum class Tier { tree_only, storage, dataflow };
//! How parameters are concretized: max, min, [min, max], observed members, or "never violated".
enum class InferenceKind { upper_bound, lower_bound, range, set, lock };
enum class ValueKind { number, address };

[[nodiscard]] std::string_view to_string(Category c) noexcept;
[[nodiscard]] std::string_view to_string(Tier t) noexcept;

struct InvariantTemplate {
    std::string_view id;
    Category category;
    Tier tier;
    InferenceKind kind;
    ValueKind value_kind;
    std::string_view parameter_shape;
};

[[nodiscard]] const std::vector<InvariantTemplate>& template_catalog();
[[nodiscard]] const InvariantTemplate* find_template(std::string_view id) noexcept;
[[nodiscard]] const InvariantTemplate& template_by_id(std::string_view id);  // UsageError if unknown

//! A contract entry point. Frames match on code address, so a proxy and its implementation are
//! distinct targets.
struct Target {
    Address address;
    std::optional<Selector> selector;

    friend auto operator<=>(const Target&, const Target&) = default;
    friend bool operator==(const Target&, const Target&) = default;
};

[[nodiscard]] std::string to_string(const Target& t);
[[nodiscard]] Target target_of(const InvocationNode& node);

//! One measured value. `key` separates independent parameters of one invariant (a slot path, a
//! sink kind); templates without such structure use "value". Lock samples carry `ok` and the
//! offending value as `value`.
struct Sample {
    std::string key;
    Word value{0};
    bool ok{true};

    friend bool operator==(const Sample&, const Sample&) = default;
};

struct Observation {
    Hash32 tx_hash;
    Target target;
    std::vector<Sample> samples;

    friend bool operator==(const Observation&, const Observation&) = default;
};

//! One observation per executed invocation (of `contract`, when given). Oracle-slippage
//! templates skip invocations without a swap-shaped call. Throws ConfigError when the artifacts
//! lack the template's tier.
[[nodiscard]] std::vector<Observation> collect_observations(const InvariantTemplate& t, const TxArtifacts& a,
                                                            std::optional<Address> contract = std::nullopt);

struct Parameter {
    std::optional<Word> min;
    std::optional<Word> max;
    std::vector<Word> members;  // sorted, unique

    friend bool operator==(const Parameter&, const Parameter&) = default;
};

struct ConcreteInvariant {
    std::string template_id;
    Target target;
    std::map<std::string, Parameter> parameters;
    std::size_t training_support{0};

    friend bool operator==(const ConcreteInvariant&, const ConcreteInvariant&) = default;
};

enum class InferStatus { inferred, no_observations, not_applicable, violated_in_training, set_too_large };
[[nodiscard]] std::string_view to_string(InferStatus s) noexcept;

struct InferResult {
    std::optional<ConcreteInvariant> invariant;
    InferStatus status{InferStatus::no_observations};
};

struct InferOptions {
    std::size_t max_set_size{64};
};

//! Exact extremum inference. All observations must share one target (UsageError otherwise).
[[nodiscard]] InferResult infer(const InvariantTemplate& t, std::span<const Observation> observations,
                                const InferOptions& options = {});

enum class Outcome { pass, violate };

struct GuardVerdict {
    std::string template_id;
    Target target;
    Hash32 tx_hash;
    Outcome outcome{Outcome::pass};
    std::optional<Word> witness;  // present iff violate
    std::string witness_key;

    friend bool operator==(const GuardVerdict&, const GuardVerdict&) = default;
};

//! Whether a sample satisfies the concretized predicate. Keys the invariant never saw pass.
[[nodiscard]] bool satisfies(const InvariantTemplate& t, const ConcreteInvariant& inv, const Sample& s);

[[nodiscard]] GuardVerdict check(const ConcreteInvariant& inv, const TxArtifacts& a);

//! Train size for a chronological split: ceil(n * fraction), guarded against float noise.
[[nodiscard]] std::size_t train_size(std::size_t n, double train_fraction);

template <typename T>
[[nodiscard]] std::pair<std::vector<T>, std::vector<T>> split_corpus(std::span<const T> items, double train_fraction) {
    const auto k = train_size(items.size(), train_fraction);
    return {std::vector<T>(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(k)),
            std::vector<T>(items.begin() + static_cast<std::ptrdiff_t>(k), items.end())};
}

}  // namespace txtrace
