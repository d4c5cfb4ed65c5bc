// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include <txtrace/common/error.hpp>
#include <txtrace/common/types.hpp>

namespace txtrace::abi {

class TypeError : public Error {
  public:
    explicit TypeError(std::string type)
        : Error("unknown ABI type '" + type + "'"), type_(std::move(type)) {}
    [[nodiscard]] const std::string& type() const noexcept { return type_; }

  private:
    std::string type_;
};

struct Type {
    enum class Kind { uint, int_, address, bool_, fixed_bytes, bytes, string, array, fixed_array, tuple };

    Kind kind{Kind::uint};
    unsigned width{256};          // bits for uint/int, bytes for fixed_bytes
    std::size_t length{0};        // fixed_array only
    std::vector<Type> components; // element type for arrays, members for tuples

    [[nodiscard]] std::string canonical() const;
    [[nodiscard]] bool is_dynamic() const;
    //! Bytes occupied in the head of an enclosing tuple.
    [[nodiscard]] std::size_t head_size() const;

    friend bool operator==(const Type&, const Type&) = default;
};

//! Parses a type string. Tuples come from `components` (the ABI JSON shape), e.g.
//! parse_type("tuple[]", {uint256, address}).
[[nodiscard]] Type parse_type(std::string_view text, const std::vector<Type>& tuple_components = {});

//! uint/int/address/bool are words (int in two's complement), bytesN and bytes are byte
//! strings, string is text, arrays and tuples are sequences.
struct Value {
    std::variant<Word, Bytes, std::string, std::vector<Value>> data;

    Value() = default;
    Value(Word w) : data(std::move(w)) {}
    Value(Bytes b) : data(std::move(b)) {}
    Value(std::string s) : data(std::move(s)) {}
    Value(std::vector<Value> v) : data(std::move(v)) {}

    [[nodiscard]] const Word& word() const { return std::get<Word>(data); }
    [[nodiscard]] const Bytes& bytes() const { return std::get<Bytes>(data); }
    [[nodiscard]] const std::string& text() const { return std::get<std::string>(data); }
    [[nodiscard]] const std::vector<Value>& items() const { return std::get<std::vector<Value>>(data); }

    friend bool operator==(const Value&, const Value&) = default;
};

struct Param {
    std::string name;
    Type type;

    friend bool operator==(const Param&, const Param&) = default;
};

struct Function {
    std::string name;
    Selector selector;
    std::vector<Param> inputs;
    std::vector<Param> outputs;

    [[nodiscard]] std::string signature() const;

    friend bool operator==(const Function&, const Function&) = default;
};

//! Builds a function and derives its selector from the canonical signature.
[[nodiscard]] Function make_function(std::string name, std::vector<Param> inputs, std::vector<Param> outputs = {});

//! Standard head/tail encoding of a tuple of values.
[[nodiscard]] Bytes encode(const std::vector<Type>& types, const std::vector<Value>& values);

struct DecodeResult {
    std::vector<Value> values;
    std::size_t consumed{0};  // furthest byte any head or tail reached
};

//! Strict decoding: out-of-range offsets, dirty padding or out-of-range integers yield nullopt.
[[nodiscard]] std::optional<DecodeResult> decode(const std::vector<Type>& types, ByteView data);

//! Human-readable rendering: decimal integers, hex addresses and bytes, quoted strings.
[[nodiscard]] std::string format_value(const Type& type, const Value& value);
//! JSON rendering: integers as decimal strings, byte strings and addresses as 0x hex.
[[nodiscard]] nlohmann::json value_to_json(const Type& type, const Value& value);

//! Every "function" entry of a contract-ABI JSON array. Throws TypeError for unknown types and
//! SchemaError for malformed entries.
[[nodiscard]] std::vector<Function> parse_abi(const nlohmann::json& abi);
[[nodiscard]] std::vector<Function> load_abi(const std::string& path);

}  // namespace txtrace::abi
