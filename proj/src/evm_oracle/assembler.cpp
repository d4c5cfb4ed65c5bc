// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#include <txtrace/evm_oracle/assembler.hpp>

#include <algorithm>
#include <cctype>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <txtrace/common/hex.hpp>
#include <txtrace/common/opcodes.hpp>

namespace txtrace::oracle {

namespace {

    std::string_view trim(std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
        return s;
    }

    std::string_view strip_comment(std::string_view line) {
        std::size_t cut = line.size();
        for (std::string_view marker : {";", "#", "//"}) cut = std::min(cut, line.find(marker));
        return line.substr(0, cut);
    }

    struct Fixup {
        std::size_t at;
        unsigned width;
        std::string label;
        std::size_t line;
    };

}  // namespace

Bytes assemble(std::string_view source) {
    Bytes code;
    std::map<std::string, std::size_t, std::less<>> labels;
    std::vector<Fixup> fixups;

    std::size_t line_no = 0;
    while (!source.empty()) {
        ++line_no;
        const auto nl = source.find('\n');
        std::string_view line = source.substr(0, nl);
        source = nl == std::string_view::npos ? std::string_view{} : source.substr(nl + 1);

        line = trim(strip_comment(line));
        if (line.empty()) continue;
        auto fail = [&](const std::string& why) {
            throw std::invalid_argument("line " + std::to_string(line_no) + ": " + why);
        };

        if (line.back() == ':') {
            std::string name(trim(line.substr(0, line.size() - 1)));
            if (name.empty()) fail("empty label");
            if (!labels.emplace(name, code.size()).second) fail("duplicate label '" + name + "'");
            continue;
        }

        const auto space = line.find_first_of(" \t");
        std::string mnemonic(line.substr(0, space));
        std::transform(mnemonic.begin(), mnemonic.end(), mnemonic.begin(),
                       [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
        const std::string_view operand = space == std::string_view::npos ? "" : trim(line.substr(space));

        const auto opcode = opcode_from_name(mnemonic);
        if (!opcode) fail("unknown mnemonic '" + mnemonic + "'");
        code.push_back(*opcode);

        const unsigned width = push_size(*opcode);
        if (width == 0) {
            if (!operand.empty()) fail(mnemonic + " takes no operand");
            continue;
        }
        if (operand.empty()) fail(mnemonic + " needs an immediate");
        if (operand.front() == '@') {
            fixups.push_back({code.size(), width, std::string(operand.substr(1)), line_no});
            code.insert(code.end(), width, 0);
            continue;
        }
        Word value;
        try {
            value = word_from_string(operand);
        } catch (const std::invalid_argument& e) {
            fail("bad immediate '" + std::string(operand) + "': " + e.what());
        }
        if (width < 32 && value >> (8 * width) != 0) fail("immediate does not fit in " + mnemonic);
        const auto be = word_to_be32(value);
        code.insert(code.end(), be.end() - width, be.end());
    }

    for (const auto& f : fixups) {
        auto it = labels.find(f.label);
        if (it == labels.end()) {
            throw std::invalid_argument("line " + std::to_string(f.line) + ": unknown label '" + f.label + "'");
        }
        const auto be = word_to_be32(Word(it->second));
        if (f.width < 32 && Word(it->second) >> (8 * f.width) != 0) {
            throw std::invalid_argument("line " + std::to_string(f.line) + ": label offset does not fit");
        }
        std::copy(be.end() - f.width, be.end(), code.begin() + static_cast<std::ptrdiff_t>(f.at));
    }
    return code;
}

}  // namespace txtrace::oracle
