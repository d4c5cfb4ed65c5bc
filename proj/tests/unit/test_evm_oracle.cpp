// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <map>

#include <txtrace/common/hex.hpp>
#include <txtrace/evm_oracle/assembler.hpp>
#include <txtrace/evm_oracle/machine.hpp>
#include <txtrace/ingestion/json_codec.hpp>
#include <txtrace/parser/parser.hpp>

#include "scenario.hpp"

using namespace txtrace;
using namespace txtrace::oracle;
using txtrace::testing::load_scenario;
using txtrace::testing::load_scenarios;
using txtrace::testing::parse_scenario;
using txtrace::testing::programs_dir;

namespace {

Address a(std::string_view s) { return Address::from_word(word_from_string(s)); }

}  // namespace

TEST_CASE("assembler encodes immediates and resolves labels") {
    CHECK(assemble("PUSH1 0x05\nPUSH2 258\nSTOP") == Bytes{0x60, 0x05, 0x61, 0x01, 0x02, 0x00});
    CHECK(assemble("start:\nJUMPDEST ; here\nPUSH1 @start\nJUMP") == Bytes{0x5b, 0x60, 0x00, 0x56});
    CHECK(assemble("PUSH1 @end\nJUMP\nend:\nJUMPDEST") == Bytes{0x60, 0x03, 0x56, 0x5b});
    CHECK_THROWS_WITH(assemble("PUSH1\n"), Catch::Matchers::ContainsSubstring("line 1"));
    CHECK_THROWS_WITH(assemble("STOP\nFROB"), Catch::Matchers::ContainsSubstring("line 2"));
    CHECK_THROWS(assemble("PUSH1 0x100"));
    CHECK_THROWS(assemble("PUSH1 @nowhere"));
}

TEST_CASE("PUSH1 0, PUSH1 0, RETURN runs three entries in a lone root frame") {
    const auto gt = execute(load_scenario(programs_dir() / "p01_return_empty.asm").world,
                            load_scenario(programs_dir() / "p01_return_empty.asm").tx);
    CHECK(gt.trace.entries.size() == 3);
    CHECK(gt.tree.children.empty());
    CHECK(gt.tree.exit_reason == ExitReason::return_);
    CHECK(gt.meta.status == TxStatus::success);
}

TEST_CASE("a reverting callee leaves the root running with 0 pushed") {
    const auto sc = load_scenario(programs_dir() / "p03_call_revert.asm");
    const auto gt = execute(sc.world, sc.tx);
    REQUIRE(gt.tree.children.size() == 1);
    const auto& child = gt.tree.children[0];
    CHECK(child.exit_reason == ExitReason::revert);
    // The entry after the child's last instruction is back at depth 1 with the call result on top.
    const auto& resumed = gt.trace.entries.at(child.exit_index + 1);
    CHECK(resumed.depth == 1);
    CHECK(resumed.stack.back() == 0);
    CHECK(gt.tree.exit_reason == ExitReason::stop);
    // Revert data reaches the caller's output buffer.
    CHECK(gt.world_after.accounts.at(a("0xa1")).storage.at(Word(2)) == Word(0x0bad));
    CHECK(gt.world_after.accounts.at(a("0xb2")).storage.count(Word(0)) == 0);
}

TEST_CASE("SSTORE(5, 7) yields one store event") {
    const auto sc = load_scenario(programs_dir() / "p02_sstore.asm");
    const auto gt = execute(sc.world, sc.tx);
    REQUIRE(gt.storage_events.size() == 1);
    CHECK(gt.storage_events[0].kind == StorageAccessKind::store);
    CHECK(gt.storage_events[0].raw_slot == 5);
    CHECK(gt.storage_events[0].value == 7);
}

TEST_CASE("gas model charges flat costs") {
    const auto sc = load_scenario(programs_dir() / "p02_sstore.asm");
    const auto gt = execute(sc.world, sc.tx);
    // PUSH1, PUSH1, SSTORE, STOP
    CHECK(gt.meta.gas_used == 1 + 1 + kSstoreGas + 1);
    CHECK(gt.trace.entries[2].gas_cost == kSstoreGas);
    CHECK(gt.trace.entries[3].gas == sc.tx.gas_limit - 102);

    const auto hash = parse_scenario(".account 0xa1\nPUSH1 0x21\nPUSH1 0\nSHA3\nSTOP\n.tx to=0xa1 gas=1000");
    const auto gh = execute(hash.world, hash.tx);
    CHECK(gh.trace.entries[2].gas_cost == kSha3BaseGas + 2 * kSha3WordGas);
}

TEST_CASE("unsupported opcodes raise instead of being skipped") {
    // 0x1b is SHL, outside the supported subset.
    const auto sc = parse_scenario(".account 0xa1\nPUSH1 1\nPUSH1 1\nSHL\nSTOP\n.tx to=0xa1");
    try {
        (void)execute(sc.world, sc.tx);
        FAIL("expected UnsupportedInstruction");
    } catch (const UnsupportedInstruction& e) {
        CHECK(e.opcode() == 0x1b);
        CHECK(e.pc() == 4);
    }
}

TEST_CASE("CREATE and CREATE2 addresses match published vectors") {
    const auto sender = address_from_hex("0x6ac7ea33f8831ea9dcc53393aaa88b25a785dbf0");
    CHECK(to_string(create_address(sender, 0)) == "0xcd234a471b72ba2f1ccf0a70fcaba648a5eecd8d");
    CHECK(to_string(create_address(sender, 1)) == "0x343c43a37d37dff08ae8c4a11544c718abb4fcf8");
    CHECK(to_string(create_address(sender, 2)) == "0xf778b86fa74e846c4f0a1fbd1335fe81c00a0c91");
    CHECK(to_string(create_address(sender, 200)) == "0xeb7facd118466c9acbcb4ee964a0ac0b0b2ef256");
    const Bytes zero{0x00};
    CHECK(to_string(create2_address(Address{}, 0, zero)) == "0x4d1a2e2bb4f88f0250f26ffff098b0b30b26bf38");
    CHECK(to_string(create2_address(address_from_hex("0xdeadbeef00000000000000000000000000000000"),
                                    word_from_hex("0x000000000000000000000000feed000000000000000000000000000000000000"),
                                    zero)) == "0xd04116cdd17bebe565eb2422f2497e06cc1c9833");
}

TEST_CASE("corpus executions obey gas monotonicity, depth discipline and schema conformance") {
    for (const auto& sc : load_scenarios(programs_dir())) {
        for (const bool memory : {false, true}) {
            INFO(sc.name << " memory=" << memory);
            const auto gt = execute(sc.world, sc.tx, {.capture_memory = memory});
            const auto& e = gt.trace.entries;

            // Gas never increases between consecutive entries at the same depth unless a
            // callee ran in between (the refund arrives when the caller resumes).
            for (std::size_t i = 1; i < e.size(); ++i) {
                if (e[i].depth == e[i - 1].depth) CHECK(e[i].gas <= e[i - 1].gas);
                CHECK(e[i].depth <= e[i - 1].depth + 1);
                if (e[i].depth == e[i - 1].depth + 1) {
                    CHECK(classify_opcode(e[i - 1].opcode) == OpClass::function_enter);
                }
            }

            // The node count counts frames that began execution.
            std::size_t executed = 0;
            for_each_node(gt.tree, [&](const InvocationNode& n, std::size_t) { executed += n.executed ? 1 : 0; });
            std::size_t entered = 1;
            for (std::size_t i = 1; i < e.size(); ++i) entered += e[i].depth == e[i - 1].depth + 1 ? 1 : 0;
            if (!e.empty()) CHECK(executed == entered);

            // Serialized entries parse back to the same value.
            const auto round = json_codec::parse_raw_trace(json_codec::to_json(gt.trace));
            CHECK(round == gt.trace);
        }
    }
}

TEST_CASE("execution touches only accounts it reaches") {
    auto sc = load_scenario(programs_dir() / "p04_nested_static.asm");
    sc.world.accounts[a("0x0123")].balance = 55;
    sc.world.accounts[a("0x0123")].storage[Word(1)] = 2;
    const auto gt = execute(sc.world, sc.tx);
    CHECK(gt.world_after.accounts.at(a("0x0123")) == sc.world.accounts.at(a("0x0123")));
    CHECK(gt.world_after.accounts.at(a("0xc3")) == sc.world.accounts.at(a("0xc3")));
}
