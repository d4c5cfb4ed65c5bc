// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#include <txtrace/translator/facts.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>

#include <txtrace/common/error.hpp>
#include <txtrace/common/hex.hpp>
#include <txtrace/common/opcodes.hpp>

namespace txtrace {

namespace {

    std::string lowercase(std::string_view s) {
        std::string out(s);
        std::transform(out.begin(), out.end(), out.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        return out;
    }

    // Next entry of the same frame, if the frame continues after `i`.
    std::optional<std::size_t> successor(const std::vector<StructLogEntry>& entries, std::size_t i) {
        const auto depth = entries[i].depth;
        for (std::size_t j = i + 1; j < entries.size(); ++j) {
            if (entries[j].depth == depth) return j;
            if (entries[j].depth < depth) return std::nullopt;
        }
        return std::nullopt;
    }

}  // namespace

FactFile build_fact_file(const TransactionMeta& meta, const RawTrace& trace, const InvocationNode& tree) {
    FactFile f;
    f.tx = to_string(meta.tx_hash);
    f.block = meta.block_number;
    f.from = to_string(meta.origin);
    if (meta.to) {
        f.to = to_string(*meta.to);
    } else if (meta.contract_address) {
        f.to = to_string(*meta.contract_address);
    } else if (meta.is_creation() && !tree.code_address.is_zero()) {
        f.to = to_string(tree.code_address);
    } else {
        f.to = "-";
    }

    const auto& entries = trace.entries;
    f.lines.reserve(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        FactLine line{i, lowercase(e.op), {}};
        if (e.known_opcode) {
            const auto& info = opcode_info(e.opcode);
            if (e.stack.size() < info.pops && !e.error) {
                throw MalformedTraceError(i, e.op + " consumes " + std::to_string(info.pops) + " stack items, snapshot has " +
                                                 std::to_string(e.stack.size()));
            }
            const std::size_t take = std::min<std::size_t>(info.pops, e.stack.size());
            for (std::size_t k = 0; k < take; ++k) line.operands.push_back(e.peek(k));
            if (info.pushes > 0 && !e.error) {
                if (auto j = successor(entries, i); j && !entries[*j].stack.empty()) {
                    line.operands.push_back(entries[*j].stack.back());
                }
            }
        }
        f.lines.push_back(std::move(line));
    }
    return f;
}

std::string format_fact_file(const FactFile& file) {
    std::string out;
    out += "#tx " + file.tx + "\n";
    out += "#block " + std::to_string(file.block) + "\n";
    out += "#from " + file.from + "\n";
    out += "#to " + file.to + "\n";
    for (const auto& l : file.lines) {
        out += std::to_string(l.index);
        out += '\t';
        out += l.relation;
        out += '\t';
        for (std::size_t k = 0; k < l.operands.size(); ++k) {
            if (k > 0) out += ',';
            out += word_to_hex(l.operands[k]);
        }
        out += '\n';
    }
    return out;
}

std::string to_fact_file(const TransactionMeta& meta, const RawTrace& trace, const InvocationNode& tree) {
    return format_fact_file(build_fact_file(meta, trace, tree));
}

FactFile parse_fact_file(std::string_view text) {
    FactFile f;
    std::size_t line_no = 0;
    int headers = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        if (nl == std::string_view::npos) throw SchemaError("line " + std::to_string(line_no), "missing LF ending");
        const std::string_view line = text.substr(0, nl);
        text.remove_prefix(nl + 1);
        const std::string where = "line " + std::to_string(line_no);
        if (!line.empty() && line.back() == '\r') throw SchemaError(where, "CR line ending");

        if (!line.empty() && line.front() == '#') {
            const auto sp = line.find(' ');
            if (sp == std::string_view::npos) throw SchemaError(where, "header without a value");
            const auto key = line.substr(1, sp - 1);
            const std::string value(line.substr(sp + 1));
            if (key == "tx") {
                f.tx = value;
            } else if (key == "block") {
                const auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), f.block);
                if (ec != std::errc{} || p != value.data() + value.size()) throw SchemaError(where, "bad block number");
            } else if (key == "from") {
                f.from = value;
            } else if (key == "to") {
                f.to = value;
            } else {
                throw SchemaError(where, "unknown header '" + std::string(key) + "'");
            }
            ++headers;
            continue;
        }

        const auto t1 = line.find('\t');
        const auto t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
        if (t2 == std::string_view::npos) throw SchemaError(where, "expected index, relation and operands");
        FactLine fl;
        const auto idx = line.substr(0, t1);
        const auto [p, ec] = std::from_chars(idx.data(), idx.data() + idx.size(), fl.index);
        if (ec != std::errc{} || p != idx.data() + idx.size()) throw SchemaError(where, "bad index");
        if (fl.index != f.lines.size()) throw SchemaError(where, "indices must be dense and increasing");
        fl.relation = std::string(line.substr(t1 + 1, t2 - t1 - 1));
        auto ops = line.substr(t2 + 1);
        while (!ops.empty()) {
            const auto comma = ops.find(',');
            try {
                fl.operands.push_back(word_from_hex(ops.substr(0, comma)));
            } catch (const std::invalid_argument& e) {
                throw SchemaError(where, e.what());
            }
            if (comma == std::string_view::npos) break;
            ops.remove_prefix(comma + 1);
        }
        f.lines.push_back(std::move(fl));
    }
    if (headers != 4) throw SchemaError("header", "expected #tx, #block, #from and #to");
    return f;
}

}  // namespace txtrace
