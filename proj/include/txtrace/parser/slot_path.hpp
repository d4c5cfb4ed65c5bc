// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <txtrace/common/types.hpp>

namespace txtrace {

enum class SlotStepKind { mapping_key, array_index, struct_offset };

struct SlotStep {
    SlotStepKind kind{SlotStepKind::mapping_key};
    Word value{0};  // key word, element index or member offset

    friend bool operator==(const SlotStep&, const SlotStep&) = default;
};

//! Structural origin of a storage slot: a base slot refined by a chain of steps.
struct DecodedSlotPath {
    Word base_slot{0};
    std::vector<SlotStep> steps;
    std::optional<std::string> variable_name;
    std::vector<std::string> packed_variables;  // other layout labels sharing the base slot

    friend bool operator==(const DecodedSlotPath&, const DecodedSlotPath&) = default;
};

}  // namespace txtrace
