// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#include <txtrace/ingestion/json_codec.hpp>

#include <limits>

#include <txtrace/common/error.hpp>
#include <txtrace/common/hex.hpp>
#include <txtrace/common/opcodes.hpp>

namespace txtrace::json_codec {

using nlohmann::json;

namespace {

    std::string join(const std::string& path, std::string_view field) {
        return path.empty() ? std::string(field) : path + "." + std::string(field);
    }

    const json& require(const json& j, std::string_view key, const std::string& path) {
        if (!j.is_object()) throw SchemaError(path, "expected an object");
        auto it = j.find(key);
        if (it == j.end()) throw SchemaError(join(path, key), "missing required field");
        return *it;
    }

    const json* optional_field(const json& j, std::string_view key) {
        auto it = j.find(key);
        if (it == j.end() || it->is_null()) return nullptr;
        return &*it;
    }

    //! Integers arrive either as JSON numbers or as hex/decimal quantity strings.
    std::uint64_t as_u64(const json& v, const std::string& field) {
        if (v.is_number_unsigned()) return v.get<std::uint64_t>();
        if (v.is_number_integer()) {
            const auto s = v.get<std::int64_t>();
            if (s < 0) throw SchemaError(field, "negative value");
            return static_cast<std::uint64_t>(s);
        }
        if (v.is_number_float()) {
            const double d = v.get<double>();
            if (d < 0 || d > static_cast<double>(std::numeric_limits<std::uint64_t>::max())) {
                throw SchemaError(field, "value out of range");
            }
            return static_cast<std::uint64_t>(d);
        }
        if (v.is_string()) {
            try {
                const Word w = word_from_string(v.get_ref<const std::string&>());
                if (w > std::numeric_limits<std::uint64_t>::max()) throw SchemaError(field, "value exceeds 64 bits");
                return static_cast<std::uint64_t>(w);
            } catch (const std::invalid_argument& e) {
                throw SchemaError(field, e.what());
            }
        }
        throw SchemaError(field, "expected an integer");
    }

    Word as_word(const json& v, const std::string& field) {
        if (v.is_number_unsigned() || v.is_number_integer()) return Word(as_u64(v, field));
        if (!v.is_string()) throw SchemaError(field, "expected a hex string");
        try {
            return word_from_string(v.get_ref<const std::string&>());
        } catch (const std::invalid_argument& e) {
            throw SchemaError(field, e.what());
        }
    }

    Bytes as_bytes(const json& v, const std::string& field) {
        if (!v.is_string()) throw SchemaError(field, "expected a hex string");
        try {
            return from_hex(v.get_ref<const std::string&>());
        } catch (const std::invalid_argument& e) {
            throw SchemaError(field, e.what());
        }
    }

    template <typename Parse>
    auto guarded(const std::string& field, Parse&& parse) -> decltype(parse()) {
        try {
            return parse();
        } catch (const std::invalid_argument& e) {
            throw SchemaError(field, e.what());
        } catch (const nlohmann::json::exception&) {
            throw SchemaError(field, "unexpected JSON type");
        }
    }

}  // namespace

StructLogEntry parse_struct_log(const json& j, const std::string& path) {
    if (!j.is_object()) throw SchemaError(path, "expected an object");
    StructLogEntry e;
    e.pc = as_u64(require(j, "pc", path), join(path, "pc"));
    const auto& op = require(j, "op", path);
    if (!op.is_string()) throw SchemaError(join(path, "op"), "expected a mnemonic string");
    e.op = op.get<std::string>();
    const auto code = opcode_from_name(e.op);
    e.opcode = code.value_or(op::INVALID);
    e.known_opcode = code.has_value();
    e.gas = as_u64(require(j, "gas", path), join(path, "gas"));
    e.gas_cost = as_u64(require(j, "gasCost", path), join(path, "gasCost"));
    const auto depth = as_u64(require(j, "depth", path), join(path, "depth"));
    if (depth < 1 || depth > std::numeric_limits<std::uint32_t>::max()) {
        throw SchemaError(join(path, "depth"), "depth must be >= 1");
    }
    e.depth = static_cast<std::uint32_t>(depth);

    const auto& stack = require(j, "stack", path);
    if (!stack.is_array()) throw SchemaError(join(path, "stack"), "expected an array");
    if (stack.size() > 1024) throw SchemaError(join(path, "stack"), "stack deeper than 1024");
    e.stack.reserve(stack.size());
    for (std::size_t i = 0; i < stack.size(); ++i) {
        e.stack.push_back(as_word(stack[i], join(path, "stack[" + std::to_string(i) + "]")));
    }

    if (const auto* mem = optional_field(j, "memory")) {
        if (!mem->is_array()) throw SchemaError(join(path, "memory"), "expected an array");
        Bytes memory;
        memory.reserve(mem->size() * 32);
        for (std::size_t i = 0; i < mem->size(); ++i) {
            const auto field = join(path, "memory[" + std::to_string(i) + "]");
            Bytes word = as_bytes((*mem)[i], field);
            if (word.size() != 32) throw SchemaError(field, "memory words must be 32 bytes");
            memory.insert(memory.end(), word.begin(), word.end());
        }
        e.memory = std::move(memory);
    }
    if (const auto* err = optional_field(j, "error")) {
        if (!err->is_string()) throw SchemaError(join(path, "error"), "expected a string");
        if (!err->get_ref<const std::string&>().empty()) e.error = err->get<std::string>();
    }
    return e;
}

json to_json(const StructLogEntry& e) {
    json j;
    j["pc"] = e.pc;
    j["op"] = e.op;
    j["gas"] = e.gas;
    j["gasCost"] = e.gas_cost;
    j["depth"] = e.depth;
    json stack = json::array();
    for (const auto& w : e.stack) stack.push_back(word_to_hex(w));
    j["stack"] = std::move(stack);
    if (e.memory) {
        json mem = json::array();
        for (std::size_t off = 0; off + 32 <= e.memory->size(); off += 32) {
            mem.push_back(to_hex(ByteView{e.memory->data() + off, 32}, false));
        }
        j["memory"] = std::move(mem);
    }
    if (e.error) j["error"] = *e.error;
    return j;
}

RawTrace parse_raw_trace(const json& j, const std::string& path) {
    if (!j.is_object()) throw SchemaError(path, "expected an object");
    RawTrace t;
    const auto& logs = require(j, "structLogs", path);
    if (!logs.is_array()) throw SchemaError(join(path, "structLogs"), "expected an array");
    t.entries.reserve(logs.size());
    for (std::size_t i = 0; i < logs.size(); ++i) {
        t.entries.push_back(parse_struct_log(logs[i], join(path, "structLogs[" + std::to_string(i) + "]")));
    }
    if (const auto* failed = optional_field(j, "failed")) {
        if (!failed->is_boolean()) throw SchemaError(join(path, "failed"), "expected a boolean");
        t.failed = failed->get<bool>();
    }
    if (const auto* ret = optional_field(j, "returnValue")) {
        t.return_value = as_bytes(*ret, join(path, "returnValue"));
    }
    return t;
}

json to_json(const RawTrace& t) {
    json logs = json::array();
    for (const auto& e : t.entries) logs.push_back(to_json(e));
    json j;
    j["structLogs"] = std::move(logs);
    j["failed"] = t.failed;
    j["returnValue"] = to_hex(t.return_value, false);
    return j;
}

TransactionMeta parse_meta(const json& j, const std::string& path) {
    if (!j.is_object()) throw SchemaError(path, "expected an object");
    TransactionMeta m;
    const auto& hash = require(j, "transactionHash", path);
    m.tx_hash = guarded(join(path, "transactionHash"), [&] { return hash_from_hex(hash.get<std::string>()); });
    m.block_number = as_u64(require(j, "blockNumber", path), join(path, "blockNumber"));
    if (const auto* idx = optional_field(j, "transactionIndex")) {
        m.tx_index = as_u64(*idx, join(path, "transactionIndex"));
    }
    const auto& from = require(j, "from", path);
    if (!from.is_string()) throw SchemaError(join(path, "from"), "expected an address");
    m.origin = guarded(join(path, "from"), [&] { return address_from_hex(from.get<std::string>()); });
    if (const auto* to = optional_field(j, "to")) {
        if (!to->is_string()) throw SchemaError(join(path, "to"), "expected an address");
        m.to = guarded(join(path, "to"), [&] { return address_from_hex(to->get<std::string>()); });
    }
    if (const auto* created = optional_field(j, "contractAddress")) {
        if (!created->is_string()) throw SchemaError(join(path, "contractAddress"), "expected an address");
        m.contract_address =
            guarded(join(path, "contractAddress"), [&] { return address_from_hex(created->get<std::string>()); });
    }
    if (m.to && m.contract_address) {
        throw SchemaError(join(path, "contractAddress"), "present on a transaction with a recipient");
    }
    if (const auto* value = optional_field(j, "value")) m.value = as_word(*value, join(path, "value"));
    if (const auto* input = optional_field(j, "input")) m.input = as_bytes(*input, join(path, "input"));
    m.gas_limit = as_u64(require(j, "gas", path), join(path, "gas"));
    m.gas_used = as_u64(require(j, "gasUsed", path), join(path, "gasUsed"));
    if (m.gas_used > m.gas_limit) throw SchemaError(join(path, "gasUsed"), "gasUsed exceeds gas limit");
    const auto status = as_u64(require(j, "status", path), join(path, "status"));
    if (status > 1) throw SchemaError(join(path, "status"), "status must be 0x0 or 0x1");
    m.status = status == 1 ? TxStatus::success : TxStatus::reverted;
    return m;
}

json to_json(const TransactionMeta& m) {
    auto quantity = [](std::uint64_t v) { return word_to_hex(Word(v)); };
    json j;
    j["transactionHash"] = to_string(m.tx_hash);
    j["blockNumber"] = quantity(m.block_number);
    if (m.tx_index) j["transactionIndex"] = quantity(*m.tx_index);
    j["from"] = to_string(m.origin);
    j["to"] = m.to ? json(to_string(*m.to)) : json(nullptr);
    j["contractAddress"] = m.contract_address ? json(to_string(*m.contract_address)) : json(nullptr);
    j["value"] = word_to_hex(m.value);
    j["input"] = to_hex(m.input);
    j["gas"] = quantity(m.gas_limit);
    j["gasUsed"] = quantity(m.gas_used);
    j["status"] = m.status == TxStatus::success ? "0x1" : "0x0";
    return j;
}

}  // namespace txtrace::json_codec
