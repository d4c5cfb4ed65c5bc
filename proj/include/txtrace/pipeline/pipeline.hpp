// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <txtrace/decoder/contract_config.hpp>
#include <txtrace/decoder/storage_decoder.hpp>
#include <txtrace/ingestion/trace.hpp>
#include <txtrace/invariants/artifacts.hpp>

namespace txtrace {

struct TxInput {
    std::string label;  // hash or fixture path, for diagnostics
    TransactionMeta meta;
    RawTrace trace;
};

struct AnalysisOptions {
    bool decode_calls{true};
    bool decode_storage{true};
    //! Shadow-executes with the whole root calldata as the only source.
    bool taint{true};
    SlotDecodeOptions slot_options;
};

//! Parse, decode and taint one transaction. `config` may be null.
[[nodiscard]] TxArtifacts analyze_transaction(const TxInput& input, const ContractConfig* config,
                                              const AnalysisOptions& options = {});

struct BatchResult {
    std::optional<TxArtifacts> artifacts;
    std::string error;  // set when artifacts is absent
};

//! Reference implementation: one transaction after another.
[[nodiscard]] std::vector<BatchResult> analyze_batch_serial(std::span<const TxInput> inputs,
                                                            const ContractConfig* config,
                                                            const AnalysisOptions& options = {});

//! Same results as the serial path, one transaction per OpenMP task. `jobs` <= 0 uses the
//! runtime default.
[[nodiscard]] std::vector<BatchResult> analyze_batch_parallel(std::span<const TxInput> inputs,
                                                              const ContractConfig* config,
                                                              const AnalysisOptions& options = {}, int jobs = 0);

//! Successful artifacts in input order with block history linked.
[[nodiscard]] std::vector<TxArtifacts> collect_successes(std::vector<BatchResult>& results);

}  // namespace txtrace
