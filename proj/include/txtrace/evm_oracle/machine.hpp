// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include <txtrace/common/error.hpp>
#include <txtrace/common/types.hpp>
#include <txtrace/ingestion/trace.hpp>
#include <txtrace/parser/invocation_tree.hpp>

namespace txtrace::oracle {

struct Account {
    Bytes code;
    std::map<Word, Word> storage;
    Word balance{0};
    std::uint64_t nonce{0};

    friend bool operator==(const Account&, const Account&) = default;
};

struct MockWorld {
    std::map<Address, Account> accounts;
    std::uint64_t timestamp{1'700'000'000};

    friend bool operator==(const MockWorld&, const MockWorld&) = default;
};

struct ExecuteOptions {
    bool capture_memory{false};
};

//! Everything one execution produced. `meta` is the input transaction with status, gas used
//! and created address filled in.
struct GroundTruth {
    TransactionMeta meta;
    RawTrace trace;
    InvocationNode tree;
    std::vector<StorageAccessEvent> storage_events;  // all frames, trace order
    MockWorld world_after;
};

class UnsupportedInstruction : public Error {
  public:
    UnsupportedInstruction(std::uint8_t opcode, std::uint64_t pc);
    [[nodiscard]] std::uint8_t opcode() const noexcept { return opcode_; }
    [[nodiscard]] std::uint64_t pc() const noexcept { return pc_; }

  private:
    std::uint8_t opcode_;
    std::uint64_t pc_;
};

//! Opcodes the synthetic machine implements.
[[nodiscard]] bool is_supported(std::uint8_t opcode) noexcept;

//! Flat gas: 1 per instruction, SSTORE 100, SHA3 30 + 6 per word, call family 100 plus the
//! forwarded gas. An instruction whose cost exceeds the remaining gas fails with "out of gas".
inline constexpr std::uint64_t kCallBaseGas = 100;
inline constexpr std::uint64_t kSstoreGas = 100;
inline constexpr std::uint64_t kSha3BaseGas = 30;
inline constexpr std::uint64_t kSha3WordGas = 6;

//! Runs the transaction against a copy of `world`. Calls into addresses 1-9 or without code
//! complete immediately with empty output and produce no trace entries.
[[nodiscard]] GroundTruth execute(const MockWorld& world, const TransactionMeta& tx, const ExecuteOptions& options = {});

//! Address for CREATE: low 20 bytes of keccak over rlp([creator, nonce]).
[[nodiscard]] Address create_address(const Address& creator, std::uint64_t nonce);
//! Address for CREATE2: keccak(0xff ++ creator ++ salt ++ keccak(initcode)).
[[nodiscard]] Address create2_address(const Address& creator, const Word& salt, ByteView initcode);

}  // namespace txtrace::oracle
