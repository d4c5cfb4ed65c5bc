// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

// Serial reference against the OpenMP batch path, plus single-trace parse and shadow costs.

#include <benchmark/benchmark.h>

#include <txtrace/dataflow/shadow.hpp>
#include <txtrace/evm_oracle/machine.hpp>
#include <txtrace/parser/parser.hpp>
#include <txtrace/pipeline/pipeline.hpp>

#include "corpus.hpp"
#include "scenario.hpp"

using namespace txtrace;

namespace {

//! Every corpus program plus a few mid-sized loops so items differ in cost.
const std::vector<TxInput>& batch() {
    static const auto inputs = [] {
        std::vector<TxInput> v;
        for (const auto& sc : testing::load_scenarios(testing::programs_dir())) v.push_back(testing::oracle_input(sc));
        for (std::uint64_t n : {200, 800, 1600, 3200}) v.push_back(testing::oracle_input(testing::long_loop_scenario(n)));
        return v;
    }();
    return inputs;
}

const TxInput& long_trace() {
    static const auto input = testing::oracle_input(testing::long_loop_scenario(5883));
    return input;
}

void BM_BatchSerial(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(analyze_batch_serial(batch(), nullptr));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch().size()));
}
BENCHMARK(BM_BatchSerial)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_BatchParallel(benchmark::State& state) {
    const int jobs = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(analyze_batch_parallel(batch(), nullptr, {}, jobs));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch().size()));
}
BENCHMARK(BM_BatchParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_ParseLongTrace(benchmark::State& state) {
    const auto& in = long_trace();
    for (auto _ : state) benchmark::DoNotOptimize(build_invocation_tree(in.meta, in.trace));
    state.counters["entries"] = static_cast<double>(in.trace.entries.size());
}
BENCHMARK(BM_ParseLongTrace)->Unit(benchmark::kMillisecond);

void BM_ShadowLongTrace(benchmark::State& state) {
    const auto& in = long_trace();
    const auto tree = build_invocation_tree(in.meta, in.trace);
    const std::vector<TaintSource> sources{TaintSource::calldata(0, 0, tree.calldata.size)};
    for (auto _ : state) benchmark::DoNotOptimize(shadow_execute(in.meta, in.trace, tree, sources));
}
BENCHMARK(BM_ShadowLongTrace)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
