// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include <txtrace/dataflow/shadow.hpp>
#include <txtrace/decoder/call_decoder.hpp>
#include <txtrace/ingestion/trace.hpp>
#include <txtrace/parser/invocation_tree.hpp>

namespace txtrace {

//! Everything the invariant templates look at for one transaction. Frame-indexed vectors use
//! pre-order frame ids.
struct TxArtifacts {
    TransactionMeta meta;
    InvocationNode tree;
    std::vector<std::uint64_t> frame_gas_used;
    //! ABI-decoded calls by frame id; empty when no ABIs were configured.
    std::vector<DecodedCall> calls;
    //! Set once storage events carry decoded slot paths.
    bool storage_decoded{false};
    //! Facts for a root-calldata source; absent when taint analysis did not run.
    std::optional<std::vector<FlowFact>> flows;
    //! Block of the latest earlier corpus transaction that invoked each contract.
    std::map<Address, std::uint64_t> last_seen_block;
};

//! Gas each frame consumed: gas at its first instruction minus what it handed back. Failing
//! frames consume everything; synthetic leaves consume nothing.
[[nodiscard]] std::vector<std::uint64_t> frame_gas_used(const RawTrace& trace, const InvocationNode& tree);

//! Fills `last_seen_block` across a chronologically ordered corpus.
void link_block_history(std::vector<TxArtifacts>& corpus);

}  // namespace txtrace
