// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include <txtrace/common/error.hpp>
#include <txtrace/common/hex.hpp>
#include <txtrace/invariants/store.hpp>
#include <txtrace/invariants/templates.hpp>
#include <txtrace/pipeline/pipeline.hpp>

#include "corpus.hpp"
#include "scenario.hpp"

using namespace txtrace;
using txtrace::testing::deposit_contract;
using txtrace::testing::deposit_corpus;
using txtrace::testing::load_scenario;
using txtrace::testing::load_scenarios;
using txtrace::testing::oracle_input;
using txtrace::testing::programs_dir;

namespace {

TxArtifacts analyze(const std::string& program) {
    return analyze_transaction(oracle_input(load_scenario(programs_dir() / program)), nullptr);
}

std::vector<TxArtifacts> analyze_all(const std::vector<TxInput>& inputs) {
    auto results = analyze_batch_serial(inputs, nullptr);
    for (const auto& r : results) REQUIRE(r.error.empty());
    return collect_successes(results);
}

Observation obs(const Target& target, std::uint64_t v, std::string key = "value", bool ok = true) {
    return {Hash32{}, target, {{std::move(key), Word(v), ok}}};
}

const Address kA = address_from_hex("0x00000000000000000000000000000000000000a1");
const Address kB = address_from_hex("0x00000000000000000000000000000000000000b2");

}  // namespace

TEST_CASE("catalog has 23 templates over 8 categories", "[invariants]") {
    const auto& cat = template_catalog();
    CHECK(cat.size() == 23);
    std::set<Category> categories;
    std::set<std::string_view> ids;
    for (const auto& t : cat) {
        categories.insert(t.category);
        ids.insert(t.id);
        const Tier expected = t.category == Category::special_storage ? Tier::storage
                              : t.category == Category::data_flow     ? Tier::dataflow
                                                                      : Tier::tree_only;
        CHECK(t.tier == expected);
    }
    CHECK(categories.size() == 8);
    CHECK(ids.size() == 23);
    const auto* gas = find_template("GasStartUpperBound");
    REQUIRE(gas != nullptr);
    CHECK(gas->category == Category::gas_control);
    CHECK_THROWS_AS(template_by_id("NoSuchTemplate"), UsageError);
}

TEST_CASE("chronological split takes the ceiling", "[invariants]") {
    CHECK(train_size(10, 0.7) == 7);
    CHECK(train_size(31, 0.7) == 22);
    CHECK(train_size(1, 0.7) == 1);
    const std::vector<int> v{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    const auto [train, test] = split_corpus<int>(v, 0.7);
    CHECK(train == std::vector<int>{1, 2, 3, 4, 5, 6, 7});
    CHECK(test == std::vector<int>{8, 9, 10});
    CHECK_THROWS_AS(train_size(0, 0.7), UsageError);
    CHECK_THROWS_AS(train_size(5, 0.0), UsageError);
    CHECK_THROWS_AS(train_size(5, 1.0), UsageError);
    // Deterministic: ceil(n * f) for every small n.
    for (std::size_t n = 1; n < 200; ++n) {
        CHECK(train_size(n, 0.7) == (n * 7 + 9) / 10);
        CHECK(train_size(n, 0.5) == (n + 1) / 2);
    }
}

TEST_CASE("observations follow the invocations of the target", "[invariants]") {
    const std::uint64_t gas[] = {100000};
    auto corpus = analyze_all(deposit_corpus(gas));
    const auto& gas_start = template_by_id("GasStartUpperBound");
    const auto got = collect_observations(gas_start, corpus[0], deposit_contract());
    REQUIRE(got.size() == 1);
    REQUIRE(got[0].samples.size() == 1);
    CHECK(got[0].samples[0].value == 100000);
    CHECK(got[0].target.selector == selector_from_hex("0xd0e30db0"));
    CHECK(collect_observations(gas_start, corpus[0], kB).empty());
}

TEST_CASE("two ERC20 payments into the target sum to 12", "[invariants]") {
    const auto a = analyze("p28_erc20_transfers.asm");
    const auto in = collect_observations(template_by_id("TransferInUpperBound"), a, kA);
    REQUIRE(in.size() == 1);
    CHECK(in[0].samples[0].value == 12);
    const auto out = collect_observations(template_by_id("TransferOutUpperBound"), a, kA);
    REQUIRE(out.size() == 1);
    CHECK(out[0].samples[0].value == 0);
}

TEST_CASE("swap-shaped calls drive the oracle-slippage templates", "[invariants]") {
    const auto a = analyze("p29_swaps.asm");
    const auto ratio = collect_observations(template_by_id("PriceRatioRange"), a, kA);
    REQUIRE(ratio.size() == 1);
    REQUIRE(ratio[0].samples.size() == 2);
    // 1000/2000 and 1000/2500, scaled by 1e18.
    CHECK(ratio[0].samples[0].value == Word(500'000'000'000'000'000ULL));
    CHECK(ratio[0].samples[1].value == Word(400'000'000'000'000'000ULL));
    const auto slip = collect_observations(template_by_id("SwapSlippageBound"), a, kA);
    REQUIRE(slip.size() == 1);
    REQUIRE(slip[0].samples.size() == 2);
    // |0.4 - 0.5| / 0.5 = 0.2
    CHECK(slip[0].samples[1].value == Word(200'000'000'000'000'000ULL));

    // Without swaps the templates do not apply.
    const auto plain = analyze("p02_sstore.asm");
    const auto none = collect_observations(template_by_id("PriceRatioRange"), plain);
    CHECK(none.empty());
    CHECK(infer(template_by_id("PriceRatioRange"), none).status == InferStatus::not_applicable);
    CHECK(infer(template_by_id("SwapSlippageBound"), none).status == InferStatus::not_applicable);
}

TEST_CASE("reentrancy locks see nesting on one call path", "[invariants]") {
    const auto self = analyze("p30_self_reentry.asm");
    const auto lock = collect_observations(template_by_id("SelfReentrancyLock"), self, kA);
    REQUIRE(lock.size() == 2);
    CHECK_FALSE(lock[0].samples[0].ok);
    CHECK_FALSE(lock[1].samples[0].ok);
    for (const auto& o : collect_observations(template_by_id("CrossContractReentrancyLock"), self, kA)) {
        CHECK(o.samples[0].ok);
    }

    const auto cross = analyze("p31_cross_reentry.asm");
    for (const auto& o : collect_observations(template_by_id("SelfReentrancyLock"), cross, kA)) {
        CHECK(o.samples[0].ok);
    }
    const auto c = collect_observations(template_by_id("CrossContractReentrancyLock"), cross, kA);
    REQUIRE(c.size() == 2);
    CHECK_FALSE(c[0].samples[0].ok);
}

TEST_CASE("access-control observations", "[invariants]") {
    const auto self = analyze("p30_self_reentry.asm");
    const auto eoa = collect_observations(template_by_id("EOASenderOnly"), self, kA);
    REQUIRE(eoa.size() == 2);
    CHECK(eoa[0].samples[0].ok);        // called by the origin
    CHECK_FALSE(eoa[1].samples[0].ok);  // re-entered from contract B
    CHECK(eoa[1].samples[0].value == kB.to_word());
    const auto same = collect_observations(template_by_id("OriginEqualsSender"), self, kA);
    CHECK(same[0].samples[0].ok);
    CHECK_FALSE(same[1].samples[0].ok);
}

TEST_CASE("money flow in ether", "[invariants]") {
    const auto a = analyze("p26_value_transfer.asm");
    const auto& root = a.tree;
    const auto in = collect_observations(template_by_id("EtherInUpperBound"), a, root.code_address);
    if (root.executed) {
        REQUIRE_FALSE(in.empty());
        CHECK(in[0].samples[0].value == root.value);
    }
    const auto b = analyze("p12_codeless.asm");
    const auto out = collect_observations(template_by_id("EtherOutUpperBound"), b, b.tree.code_address);
    REQUIRE(out.size() == 1);
    CHECK(out[0].samples[0].value == 100);
}

TEST_CASE("storage templates read decoded slot paths", "[invariants]") {
    const auto a = analyze("p15_mapping.asm");
    const auto up = collect_observations(template_by_id("MonitoredSlotUpperBound"), a, kA);
    REQUIRE(up.size() == 1);
    REQUIRE(up[0].samples.size() == 1);
    CHECK(up[0].samples[0].key == "slot3[*]");
    CHECK(up[0].samples[0].value == 250);

    auto named = a;
    for (auto& ev : named.tree.storage_events) {
        if (ev.decoded) ev.decoded->variable_name = "owner";
    }
    const auto owner = collect_observations(template_by_id("OwnerSlotUnchanged"), named, kA);
    REQUIRE(owner.size() == 1);
    CHECK_FALSE(owner[0].samples[0].ok);
}

TEST_CASE("tier requirements are enforced", "[invariants]") {
    const std::uint64_t gas[] = {100000};
    const auto inputs = deposit_corpus(gas);
    AnalysisOptions bare;
    bare.decode_storage = false;
    bare.taint = false;
    const auto a = analyze_transaction(inputs[0], nullptr, bare);
    CHECK_THROWS_AS(collect_observations(template_by_id("MonitoredSlotUpperBound"), a), ConfigError);
    CHECK_THROWS_AS(collect_observations(template_by_id("TaintedSinkUpperBound"), a), ConfigError);
    CHECK_NOTHROW(collect_observations(template_by_id("GasStartUpperBound"), a));
}

TEST_CASE("inference examples", "[invariants]") {
    const Target t{kA, selector_from_hex("0xd0e30db0")};
    const std::vector<Observation> gas{obs(t, 90000), obs(t, 100000), obs(t, 75000)};
    const auto r = infer(template_by_id("GasStartUpperBound"), gas);
    REQUIRE(r.invariant);
    CHECK(r.invariant->parameters.at("value").max == Word(100000));
    CHECK(r.invariant->training_support == 3);

    const auto s = infer(template_by_id("AllowedSenderSet"), std::vector{obs(t, 0xabc)});
    REQUIRE(s.invariant);
    CHECK(s.invariant->parameters.at("value").members == std::vector<Word>{0xabc});

    const auto e = infer(template_by_id("EOASenderOnly"), std::vector{obs(t, 1), obs(t, 2, "value", false)});
    CHECK_FALSE(e.invariant);
    CHECK(e.status == InferStatus::violated_in_training);

    const auto lo = infer(template_by_id("BlockDelayLowerBound"), std::vector{obs(t, 9), obs(t, 4), obs(t, 6)});
    CHECK(lo.invariant->parameters.at("value").min == Word(4));
    const auto rg = infer(template_by_id("PriceRatioRange"), std::vector{obs(t, 9), obs(t, 4), obs(t, 6)});
    CHECK(rg.invariant->parameters.at("value").min == Word(4));
    CHECK(rg.invariant->parameters.at("value").max == Word(9));

    std::vector<Observation> many;
    for (std::uint64_t k = 0; k < 65; ++k) many.push_back(obs(t, k));
    CHECK(infer(template_by_id("AllowedSenderSet"), many).status == InferStatus::set_too_large);
    many.pop_back();
    CHECK(infer(template_by_id("AllowedSenderSet"), many).status == InferStatus::inferred);

    const Target other{kB, std::nullopt};
    CHECK_THROWS_AS(infer(template_by_id("GasStartUpperBound"), std::vector{obs(t, 1), obs(other, 2)}), UsageError);
    CHECK(infer(template_by_id("GasStartUpperBound"), {}).status == InferStatus::no_observations);
}

TEST_CASE("check examples", "[invariants]") {
    const std::uint64_t gas[] = {150000};
    auto corpus = analyze_all(deposit_corpus(gas));
    const Target t{deposit_contract(), selector_from_hex("0xd0e30db0")};
    ConcreteInvariant bound{"GasStartUpperBound", t, {{"value", {std::nullopt, Word(100000), {}}}}, 7};
    const auto v = check(bound, corpus[0]);
    CHECK(v.outcome == Outcome::violate);
    CHECK(v.witness == Word(150000));

    ConcreteInvariant elsewhere = bound;
    elsewhere.target.address = kB;
    const auto vacuous = check(elsewhere, corpus[0]);
    CHECK(vacuous.outcome == Outcome::pass);
    CHECK_FALSE(vacuous.witness);

    const Address origin = corpus[0].meta.origin;
    ConcreteInvariant senders{"AllowedSenderSet", t, {{"value", {std::nullopt, std::nullopt, {origin.to_word()}}}}, 1};
    CHECK(check(senders, corpus[0]).outcome == Outcome::pass);
    senders.parameters["value"].members = {kB.to_word()};
    const auto bad = check(senders, corpus[0]);
    CHECK(bad.outcome == Outcome::violate);
    CHECK(bad.witness == origin.to_word());
}

namespace {

std::vector<TxInput> mixed_corpus() {
    std::vector<TxInput> inputs;
    std::mt19937_64 rng(31);
    std::vector<std::uint64_t> gas;
    for (int i = 0; i < 12; ++i) gas.push_back(60000 + rng() % 90000);
    inputs = deposit_corpus(gas);
    for (const auto& sc : load_scenarios(programs_dir())) inputs.push_back(oracle_input(sc));
    return inputs;
}

struct Inferred {
    const InvariantTemplate* t;
    ConcreteInvariant inv;
    std::vector<const TxArtifacts*> training;
};

std::vector<Inferred> infer_everything(const std::vector<TxArtifacts>& corpus) {
    std::vector<Inferred> out;
    for (const auto& t : template_catalog()) {
        std::map<Target, std::vector<Observation>> by_target;
        std::map<Target, std::set<const TxArtifacts*>> txs;
        for (const auto& a : corpus) {
            for (auto& o : collect_observations(t, a)) {
                txs[o.target].insert(&a);
                by_target[o.target].push_back(std::move(o));
            }
        }
        for (const auto& [target, observations] : by_target) {
            auto r = infer(t, observations);
            if (r.invariant) out.push_back({&t, *r.invariant, {txs[target].begin(), txs[target].end()}});
        }
    }
    return out;
}

}  // namespace

TEST_CASE("inferred invariants hold on their own training set", "[invariants][property]") {
    const auto corpus = analyze_all(mixed_corpus());
    const auto inferred = infer_everything(corpus);
    REQUIRE(inferred.size() > 20);
    for (const auto& i : inferred) {
        INFO(i.inv.template_id << " " << to_string(i.inv.target));
        for (const auto* a : i.training) CHECK(check(i.inv, *a).outcome == Outcome::pass);
    }
}

TEST_CASE("bounds are tight", "[invariants][property]") {
    const auto corpus = analyze_all(mixed_corpus());
    std::size_t tested = 0;
    for (const auto& i : infer_everything(corpus)) {
        if (i.t->kind != InferenceKind::upper_bound && i.t->kind != InferenceKind::lower_bound) continue;
        for (const auto& [key, p] : i.inv.parameters) {
            auto tighter = i.inv;
            auto& q = tighter.parameters[key];
            if (i.t->kind == InferenceKind::upper_bound) {
                if (*p.max == 0) continue;
                q.max = *p.max - 1;
            } else {
                if (*p.min == ~Word(0)) continue;
                q.min = *p.min + 1;
            }
            INFO(i.inv.template_id << " " << to_string(i.inv.target) << " key " << key);
            const bool some_violation = std::any_of(i.training.begin(), i.training.end(), [&](const TxArtifacts* a) {
                const auto v = check(tighter, *a);
                return v.outcome == Outcome::violate && v.witness_key == key;
            });
            CHECK(some_violation);
            ++tested;
        }
    }
    CHECK(tested > 5);
}

TEST_CASE("adding observations never shrinks sets or lowers upper bounds", "[invariants][property]") {
    std::mt19937_64 rng(5);
    const Target t{kA, std::nullopt};
    for (int round = 0; round < 200; ++round) {
        std::vector<Observation> o;
        const auto n = 1 + rng() % 10;
        for (std::size_t k = 0; k < n; ++k) o.push_back(obs(t, rng() % 50));
        auto more = o;
        more.push_back(obs(t, rng() % 50));
        const auto up = infer(template_by_id("GasStartUpperBound"), o);
        const auto up2 = infer(template_by_id("GasStartUpperBound"), more);
        CHECK(*up2.invariant->parameters.at("value").max >= *up.invariant->parameters.at("value").max);
        const auto set = infer(template_by_id("AllowedOriginSet"), o).invariant->parameters.at("value").members;
        const auto set2 = infer(template_by_id("AllowedOriginSet"), more).invariant->parameters.at("value").members;
        CHECK(std::includes(set2.begin(), set2.end(), set.begin(), set.end()));
        // Determinism.
        CHECK(infer(template_by_id("GasStartUpperBound"), o).invariant == up.invariant);
    }
}

TEST_CASE("exploit-shaped transaction trips the gas bound", "[invariants]") {
    // Ten transactions, the ninth is the exploit.
    const std::vector<std::uint64_t> gas{90000, 100000, 75000, 80000, 95000, 70000, 99000, 85000, 150000, 60000};
    const auto corpus = analyze_all(deposit_corpus(gas));
    const auto [train, test] = split_corpus<TxArtifacts>(corpus, 0.7);
    REQUIRE(train.size() == 7);
    const auto& t = template_by_id("GasStartUpperBound");
    std::vector<Observation> o;
    for (const auto& a : train) {
        for (auto& x : collect_observations(t, a, deposit_contract())) o.push_back(std::move(x));
    }
    const auto inv = infer(t, o).invariant;
    REQUIRE(inv);
    CHECK(inv->parameters.at("value").max == Word(100000));
    const auto report = check_corpus(std::vector{*inv}, train, test);
    REQUIRE(report.invariants.size() == 1);
    CHECK(report.invariants[0].train_pass == 7);
    CHECK(report.invariants[0].test_pass == 2);
    REQUIRE(report.invariants[0].violations.size() == 1);
    CHECK(report.invariants[0].violations[0].tx_hash == corpus[8].meta.tx_hash);
    CHECK(report.invariants[0].violations[0].witness == Word(150000));
}

TEST_CASE("store and report JSON", "[invariants]") {
    const Target t{kA, selector_from_hex("0xd0e30db0")};
    std::vector<ConcreteInvariant> invs{
        {"GasStartUpperBound", t, {{"value", {std::nullopt, Word(100000), {}}}}, 7},
        {"AllowedSenderSet", t, {{"value", {std::nullopt, std::nullopt, {kA.to_word(), kB.to_word()}}}}, 3},
        {"PriceRatioRange", {kB, std::nullopt}, {{"value", {Word(4), Word(9), {}}}}, 2},
        {"EOASenderOnly", t, {}, 4},
    };
    const auto j = store_to_json(invs);
    CHECK(j[0]["template_id"] == "GasStartUpperBound");
    CHECK(j[0]["target"]["selector"] == "0xd0e30db0");
    CHECK(j[0]["parameters"]["value"]["max"] == "100000");
    CHECK(j[1]["parameters"]["value"]["members"][0] == to_string(kA));
    CHECK(j[2]["target"]["selector"].is_null());
    CHECK(store_from_json(j) == invs);
    CHECK_THROWS_AS(store_from_json(nlohmann::json::parse(R"([{"template_id":"Nope","target":{}}])")), SchemaError);
    CHECK_THROWS_AS(store_from_json(nlohmann::json::object()), SchemaError);

    CheckReport empty;
    const auto rj = report_to_json(empty);
    CHECK(rj["invariants"].empty());
    CHECK(rj["summary"]["violate"] == 0);
}

TEST_CASE("parallel batch matches the serial reference", "[pipeline]") {
    const auto inputs = mixed_corpus();
    auto serial = analyze_batch_serial(inputs, nullptr);
    auto parallel = analyze_batch_parallel(inputs, nullptr, {}, 4);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        INFO(inputs[i].label);
        CHECK(serial[i].error == parallel[i].error);
        REQUIRE(serial[i].artifacts.has_value() == parallel[i].artifacts.has_value());
        if (!serial[i].artifacts) continue;
        CHECK(serial[i].artifacts->tree == parallel[i].artifacts->tree);
        CHECK(serial[i].artifacts->flows == parallel[i].artifacts->flows);
        CHECK(serial[i].artifacts->frame_gas_used == parallel[i].artifacts->frame_gas_used);
    }
    // A broken input fails alone.
    auto broken = inputs;
    broken[1].trace.entries[0].depth = 3;
    const auto r = analyze_batch_parallel(broken, nullptr);
    CHECK_FALSE(r[1].artifacts);
    CHECK_FALSE(r[1].error.empty());
    CHECK(r[0].artifacts);
}

TEST_CASE("gas accounting per frame", "[invariants]") {
    const auto a = analyze("p02_sstore.asm");
    REQUIRE(a.frame_gas_used.size() == 1);
    CHECK(a.frame_gas_used[0] == a.meta.gas_used);
    const auto oog = analyze("p21_root_oog.asm");
    CHECK(oog.frame_gas_used[0] == oog.tree.gas_at_entry);
}
