// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#include <txtrace/pipeline/pipeline.hpp>

#include <exception>

#include <omp.h>

#include <txtrace/dataflow/shadow.hpp>
#include <txtrace/decoder/call_decoder.hpp>
#include <txtrace/parser/parser.hpp>

namespace txtrace {

TxArtifacts analyze_transaction(const TxInput& input, const ContractConfig* config, const AnalysisOptions& options) {
    TxArtifacts a;
    a.meta = input.meta;
    a.tree = build_invocation_tree(input.meta, input.trace);
    a.frame_gas_used = frame_gas_used(input.trace, a.tree);

    if (options.decode_calls && config != nullptr && config->abi_count() > 0) {
        for_each_node(a.tree, [&](const InvocationNode& n, std::size_t) {
            a.calls.push_back(decode_call(n, config->abi_for(n.code_address)));
        });
    }
    if (options.decode_storage) {
        decode_tree_storage(a.tree, config != nullptr ? config->layouts() : LayoutLookup{}, options.slot_options);
        a.storage_decoded = true;
    }
    if (options.taint) {
        std::vector<TaintSource> sources;
        if (a.tree.calldata.size > 0) sources.push_back(TaintSource::calldata(0, 0, a.tree.calldata.size));
        a.flows = shadow_execute(a.meta, input.trace, a.tree, sources).facts;
    }
    return a;
}

namespace {

    BatchResult analyze_one(const TxInput& input, const ContractConfig* config, const AnalysisOptions& options) {
        BatchResult r;
        try {
            r.artifacts = analyze_transaction(input, config, options);
        } catch (const std::exception& e) {
            r.error = input.label + ": " + e.what();
        }
        return r;
    }

}  // namespace

std::vector<BatchResult> analyze_batch_serial(std::span<const TxInput> inputs, const ContractConfig* config,
                                              const AnalysisOptions& options) {
    std::vector<BatchResult> out;
    out.reserve(inputs.size());
    for (const auto& in : inputs) out.push_back(analyze_one(in, config, options));
    return out;
}

std::vector<BatchResult> analyze_batch_parallel(std::span<const TxInput> inputs, const ContractConfig* config,
                                                const AnalysisOptions& options, int jobs) {
    std::vector<BatchResult> out(inputs.size());
    const auto n = static_cast<std::ptrdiff_t>(inputs.size());
    const int threads = jobs > 0 ? jobs : omp_get_max_threads();
    // Transactions differ wildly in length, so hand them out one at a time.
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = analyze_one(inputs[static_cast<std::size_t>(i)], config, options);
    }
    return out;
}

std::vector<TxArtifacts> collect_successes(std::vector<BatchResult>& results) {
    std::vector<TxArtifacts> out;
    for (auto& r : results) {
        if (r.artifacts) out.push_back(std::move(*r.artifacts));
    }
    link_block_history(out);
    return out;
}

}  // namespace txtrace
