// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <txtrace/common/error.hpp>
#include <txtrace/common/hex.hpp>
#include <txtrace/common/opcodes.hpp>
#include <txtrace/parser/parser.hpp>
#include <txtrace/translator/facts.hpp>

#include "corpus.hpp"
#include "scenario.hpp"

using namespace txtrace;
using txtrace::testing::load_scenario;
using txtrace::testing::load_scenarios;
using txtrace::testing::oracle_input;
using txtrace::testing::parse_scenario;
using txtrace::testing::programs_dir;

namespace {

FactFile facts_of(const TxInput& in) {
    return build_fact_file(in.meta, in.trace, build_invocation_tree(in.meta, in.trace));
}

std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

}  // namespace

TEST_CASE("one fact line per trace entry", "[translator]") {
    const auto in = oracle_input(load_scenario(programs_dir() / "p01_return_empty.asm"));
    REQUIRE(in.trace.entries.size() == 3);
    const auto f = facts_of(in);
    REQUIRE(f.lines.size() == 3);
    CHECK(f.lines[0].relation == "push1");
    CHECK(f.lines[0].operands == std::vector<Word>{0});
    CHECK(f.lines[2].relation == "return");
    CHECK(f.lines[2].operands == std::vector<Word>{0, 0});
}

TEST_CASE("operands are consumed items top first, then the result", "[translator]") {
    const auto sc = parse_scenario(R"(
.account 0xa1
PUSH1 2
PUSH1 3
ADD
PUSH1 0
PUSH1 0
REVERT
.tx to=0xa1 gas=100000
)");
    const auto in = oracle_input(sc);
    const auto f = facts_of(in);
    REQUIRE(f.lines.size() == 6);
    CHECK(f.lines[2].relation == "add");
    CHECK(f.lines[2].operands == std::vector<Word>{3, 2, 5});
    // REVERT pushes nothing.
    CHECK(f.lines[5].relation == "revert");
    CHECK(f.lines[5].operands == std::vector<Word>{0, 0});

    const auto text = format_fact_file(f);
    CHECK(text.find("2\tadd\t0x3,0x2,0x5\n") != std::string::npos);
    CHECK(text.rfind("#tx ", 0) == 0);
    CHECK(text.find('\r') == std::string::npos);
}

TEST_CASE("translation properties over the program corpus", "[translator][property]") {
    for (const auto& sc : load_scenarios(programs_dir())) {
        INFO(sc.name);
        const auto in = oracle_input(sc);
        const auto f = facts_of(in);
        // Count preservation.
        REQUIRE(f.lines.size() == in.trace.entries.size());
        for (std::size_t i = 0; i < f.lines.size(); ++i) {
            CHECK(f.lines[i].index == i);
            // Opcode recovery: the relation names the instruction that ran.
            CHECK(f.lines[i].relation == lower(in.trace.entries[i].op));
            const auto info = opcode_info(in.trace.entries[i].opcode);
            if (info.defined && !in.trace.entries[i].error) CHECK(f.lines[i].operands.size() >= info.pops);
        }
        // Determinism and round trip.
        const auto text = format_fact_file(f);
        CHECK(text == format_fact_file(facts_of(in)));
        CHECK(parse_fact_file(text) == f);
        CHECK(f.from == to_string(in.meta.origin));
    }
}

TEST_CASE("shallow stacks are rejected with the entry index", "[translator]") {
    auto in = oracle_input(load_scenario(programs_dir() / "p02_sstore.asm"));
    const auto tree = build_invocation_tree(in.meta, in.trace);
    std::size_t target = 0;
    for (; target < in.trace.entries.size(); ++target) {
        if (in.trace.entries[target].op == "SSTORE") break;
    }
    REQUIRE(target < in.trace.entries.size());
    in.trace.entries[target].stack.pop_back();
    try {
        (void)build_fact_file(in.meta, in.trace, tree);
        FAIL("expected MalformedTraceError");
    } catch (const MalformedTraceError& e) {
        CHECK(e.index() == target);
    }
}

TEST_CASE("fact file parser rejects malformed text", "[translator]") {
    const std::string good = "#tx 0x01\n#block 5\n#from 0xaa\n#to -\n0\tstop\t\n";
    const auto f = parse_fact_file(good);
    CHECK(f.block == 5);
    REQUIRE(f.lines.size() == 1);
    CHECK(f.lines[0].operands.empty());
    CHECK_THROWS_AS(parse_fact_file("#tx 0x01\n#block 5\n#from 0xaa\n0\tstop\t\n"), SchemaError);
    CHECK_THROWS_AS(parse_fact_file("#tx 0x01\n#block 5\n#from 0xaa\n#to -\n1\tstop\t\n"), SchemaError);
    CHECK_THROWS_AS(parse_fact_file("#tx 0x01\r\n#block 5\n#from 0xaa\n#to -\n"), SchemaError);
    CHECK_THROWS_AS(parse_fact_file("#tx 0x01\n#block x\n#from 0xaa\n#to -\n"), SchemaError);
}
