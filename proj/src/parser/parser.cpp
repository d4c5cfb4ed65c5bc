// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#include <txtrace/parser/parser.hpp>

#include <algorithm>
#include <cctype>
#include <cstring>
#include <string>

#include <txtrace/common/error.hpp>
#include <txtrace/common/keccak.hpp>
#include <txtrace/common/opcodes.hpp>
#include <txtrace/parser/memory_image.hpp>

namespace txtrace {

OpClass classify_opcode(std::uint8_t code) noexcept {
    switch (code) {
        case op::CALL:
        case op::CALLCODE:
        case op::STATICCALL:
        case op::DELEGATECALL:
        case op::CREATE:
        case op::CREATE2: return OpClass::function_enter;
        case op::STOP:
        case op::RETURN:
        case op::REVERT:
        case op::SELFDESTRUCT:
        case op::INVALID: return OpClass::function_exit;
        case op::SLOAD:
        case op::SSTORE: return OpClass::storage_access;
        case op::SHA3: return OpClass::sha3;
        default: return OpClass::other;
    }
}

OpClass classify_opcode(std::string_view mnemonic) noexcept {
    std::string upper(mnemonic);
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    const auto code = opcode_from_name(upper);
    if (!code) return OpClass::other;
    return classify_opcode(*code);
}

std::optional<Selector> extract_selector(ByteView calldata) noexcept {
    if (calldata.size() < 4) return std::nullopt;
    Selector s;
    std::memcpy(s.bytes.data(), calldata.data(), 4);
    return s;
}

CallFrameArgs extract_call_frame_args(const StructLogEntry& e) {
    auto need = [&](std::size_t n) {
        if (e.stack.size() < n) {
            throw MalformedTraceError(0, e.op + " needs " + std::to_string(n) + " stack operands, found " +
                                             std::to_string(e.stack.size()));
        }
    };
    auto u64 = [&](std::size_t n) { return word_to_u64_saturated(e.peek(n)); };

    CallFrameArgs a;
    switch (e.opcode) {
        case op::CALL:
        case op::CALLCODE:
            need(7);
            a.kind = e.opcode == op::CALL ? CallKind::call : CallKind::callcode;
            a.gas = e.peek(0);
            a.target = Address::from_word(e.peek(1));
            a.value = e.peek(2);
            a.in_offset = u64(3);
            a.in_size = u64(4);
            a.out_offset = u64(5);
            a.out_size = u64(6);
            break;
        case op::DELEGATECALL:
        case op::STATICCALL:
            need(6);
            a.kind = e.opcode == op::DELEGATECALL ? CallKind::delegatecall : CallKind::staticcall;
            a.gas = e.peek(0);
            a.target = Address::from_word(e.peek(1));
            a.in_offset = u64(2);
            a.in_size = u64(3);
            a.out_offset = u64(4);
            a.out_size = u64(5);
            break;
        case op::CREATE:
        case op::CREATE2:
            need(e.opcode == op::CREATE ? 3 : 4);
            a.kind = e.opcode == op::CREATE ? CallKind::create : CallKind::create2;
            a.value = e.peek(0);
            a.in_offset = u64(1);
            a.in_size = u64(2);
            if (e.opcode == op::CREATE2) a.salt = e.peek(3);
            break;
        default: throw MalformedTraceError(0, e.op + " is not a call-family opcode");
    }
    if (!e.known_opcode) throw MalformedTraceError(0, e.op + " is not a call-family opcode");
    return a;
}

namespace {

    bool mentions_out_of_gas(const std::optional<std::string>& error) {
        if (!error) return false;
        std::string lower(*error);
        std::transform(lower.begin(), lower.end(), lower.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        return lower.find("out of gas") != std::string::npos;
    }

    //! Exit precedence: explicit out-of-gas error, then any other error (an exceptional halt,
    //! even on an exit opcode), then the exit opcode, else a silent depth drop.
    ExitReason exit_reason_of(const StructLogEntry& last) {
        if (mentions_out_of_gas(last.error)) return ExitReason::out_of_gas;
        if (last.error) return ExitReason::invalid;
        if (last.known_opcode) {
            switch (last.opcode) {
                case op::STOP: return ExitReason::stop;
                case op::RETURN: return ExitReason::return_;
                case op::REVERT: return ExitReason::revert;
                case op::SELFDESTRUCT: return ExitReason::selfdestruct;
                case op::INVALID: return ExitReason::invalid;
                default: break;
            }
        }
        return ExitReason::out_of_gas;
    }

    struct PendingCall {
        std::size_t index{0};
        CallFrameArgs args;
        FrameData input;
    };

    struct Frame {
        InvocationNode node;
        std::uint32_t depth{1};
        CallFrameArgs args;      // how this frame was entered; unused for the root
        FrameData exec_calldata;  // what CALLDATA* observe (empty for create frames)
        MemoryImage memory;
        FrameData returndata = FrameData::of({});
        std::optional<PendingCall> pending;
        std::size_t last_index{0};
        std::optional<Address> placeholder;  // stands in for a create frame's unknown address
    };

    class TreeBuilder {
      public:
        TreeBuilder(const TransactionMeta& meta, const RawTrace& trace) : meta_(meta), trace_(trace) {}

        InvocationNode build() {
            const auto& entries = trace_.entries;
            Frame root;
            root.node.call_kind = CallKind::root;
            root.node.caller = meta_.origin;
            const Address self = meta_.to.value_or(meta_.contract_address.value_or(Address{}));
            root.node.code_address = self;
            root.node.storage_address = self;
            root.node.value = meta_.value;
            root.node.calldata = FrameData::of(meta_.input);
            if (!meta_.is_creation()) {
                root.node.selector = extract_selector(meta_.input);
                root.exec_calldata = root.node.calldata;
            } else {
                root.exec_calldata = FrameData::of({});
            }
            if (entries.empty()) {
                root.node.gas_at_entry = meta_.gas_limit;
                root.node.return_data = FrameData::of(trace_.return_value);
                root.node.exit_reason = ExitReason::stop;
                return std::move(root.node);
            }
            root.node.gas_at_entry = entries.front().gas;
            root.depth = entries.front().depth;
            frames_.push_back(std::move(root));

            for (std::size_t i = 0; i < entries.size(); ++i) step(i);

            while (frames_.size() > 1) close_top(std::nullopt);
            return finish_root();
        }

      private:
        void step(std::size_t i) {
            const auto& e = trace_.entries[i];
            const std::uint32_t top_depth = frames_.back().depth;
            if (e.depth > top_depth) {
                auto& f = frames_.back();
                if (e.depth != top_depth + 1 || !f.pending || f.pending->index + 1 != i) {
                    throw MalformedTraceError(i, "depth jumps from " + std::to_string(top_depth) + " to " +
                                                     std::to_string(e.depth) + " without a matching call");
                }
                open_child(i);
            } else if (e.depth < top_depth) {
                while (frames_.back().depth > e.depth) {
                    if (frames_.size() == 1) break;
                    close_top(i);
                }
                if (frames_.back().depth != e.depth) {
                    throw MalformedTraceError(i, "depth " + std::to_string(e.depth) + " below the root frame");
                }
            }
            process(i);
        }

        FrameData read_memory(const Frame& f, const StructLogEntry& e, std::uint64_t off, std::uint64_t len) const {
            if (e.memory) return read_captured(*e.memory, off, len);
            return f.memory.read(off, len);
        }

        void need(const StructLogEntry& e, std::size_t i, std::size_t n) const {
            if (e.stack.size() < n) {
                throw MalformedTraceError(i, e.op + " needs " + std::to_string(n) + " stack operands, found " +
                                                 std::to_string(e.stack.size()));
            }
        }

        //! The entry executed right after `i` in the same frame, when `i` did not call out.
        const StructLogEntry* successor(std::size_t i) const {
            if (i + 1 >= trace_.entries.size()) return nullptr;
            const auto& next = trace_.entries[i + 1];
            return next.depth == trace_.entries[i].depth ? &next : nullptr;
        }

        void process(std::size_t i) {
            auto& f = frames_.back();
            const auto& e = trace_.entries[i];
            f.last_index = i;
            // A failing instruction halts its frame without taking effect.
            if (!e.known_opcode || e.error) return;

            switch (e.opcode) {
                case op::SLOAD: {
                    need(e, i, 1);
                    StorageAccessEvent ev;
                    ev.kind = StorageAccessKind::load;
                    ev.raw_slot = e.peek(0);
                    const auto* next = successor(i);
                    ev.value = next && !next->stack.empty() ? next->stack.back() : Word(0);
                    ev.instruction_index = i;
                    f.node.storage_events.push_back(std::move(ev));
                    return;
                }
                case op::SSTORE: {
                    need(e, i, 2);
                    StorageAccessEvent ev;
                    ev.kind = StorageAccessKind::store;
                    ev.raw_slot = e.peek(0);
                    ev.value = e.peek(1);
                    ev.instruction_index = i;
                    f.node.storage_events.push_back(std::move(ev));
                    return;
                }
                case op::SHA3: {
                    need(e, i, 2);
                    FrameData input =
                        read_memory(f, e, word_to_u64_saturated(e.peek(0)), word_to_u64_saturated(e.peek(1)));
                    Sha3Record rec;
                    rec.instruction_index = i;
                    rec.input_complete = input.complete;
                    if (const auto* next = successor(i); next && !next->stack.empty()) {
                        rec.output = next->stack.back();
                    } else if (input.complete) {
                        rec.output = keccak_word(input.bytes);
                    }
                    rec.input = std::move(input.bytes);
                    f.node.sha3_events.push_back(std::move(rec));
                    return;
                }
                case op::CALL:
                case op::CALLCODE:
                case op::DELEGATECALL:
                case op::STATICCALL:
                case op::CREATE:
                case op::CREATE2: enter(i); return;
                default: break;
            }
            apply_memory_effects(f, e, i);
        }

        void apply_memory_effects(Frame& f, const StructLogEntry& e, std::size_t i) {
            auto u64 = [&](std::size_t n) { return word_to_u64_saturated(e.peek(n)); };
            switch (e.opcode) {
                case op::MSTORE: need(e, i, 2); f.memory.store_word(u64(0), e.peek(1)); break;
                case op::MSTORE8:
                    need(e, i, 2);
                    f.memory.store_byte(u64(0), static_cast<std::uint8_t>(e.peek(1) & 0xff));
                    break;
                case op::CALLDATACOPY:
                    need(e, i, 3);
                    copy_from(f.memory, u64(0), f.exec_calldata, u64(1), u64(2));
                    break;
                case op::RETURNDATACOPY:
                    need(e, i, 3);
                    copy_from(f.memory, u64(0), f.returndata, u64(1), u64(2));
                    break;
                case op::MCOPY: need(e, i, 3); f.memory.copy_within(u64(0), u64(1), u64(2)); break;
                case op::CODECOPY: need(e, i, 3); f.memory.write_unknown(u64(0), u64(2)); break;
                case op::EXTCODECOPY: need(e, i, 4); f.memory.write_unknown(u64(1), u64(3)); break;
                default: break;
            }
        }

        //! Copies src[offset, offset+len) with zero-extension past the end of src.
        static void copy_from(MemoryImage& mem, std::uint64_t dst, const FrameData& src, std::uint64_t offset,
                              std::uint64_t len) {
            if (len == 0) return;
            if (!src.complete) {
                mem.write_unknown(dst, len);
                return;
            }
            if (len > MemoryImage::kLimit) return;
            Bytes chunk(static_cast<std::size_t>(len), 0);
            if (offset < src.bytes.size()) {
                const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(len), src.bytes.size() - offset);
                std::memcpy(chunk.data(), src.bytes.data() + offset, n);
            }
            mem.write(dst, chunk);
        }

        InvocationNode make_child_node(const Frame& parent, const CallFrameArgs& args, FrameData input) {
            InvocationNode n;
            n.call_kind = args.kind;
            const auto& p = parent.node;
            switch (args.kind) {
                case CallKind::call:
                case CallKind::staticcall:
                    n.caller = p.storage_address;
                    n.code_address = args.target;
                    n.storage_address = args.target;
                    break;
                case CallKind::callcode:
                    n.caller = p.storage_address;
                    n.code_address = args.target;
                    n.storage_address = p.storage_address;
                    break;
                case CallKind::delegatecall:
                    n.caller = p.caller;
                    n.code_address = args.target;
                    n.storage_address = p.storage_address;
                    break;
                case CallKind::create:
                case CallKind::create2:
                    n.caller = p.storage_address;
                    break;
                case CallKind::root: break;
            }
            n.value = (args.kind == CallKind::call || args.kind == CallKind::callcode || is_create(args.kind))
                          ? args.value
                          : Word(0);
            if (!is_create(args.kind) && input.complete) n.selector = extract_selector(input.bytes);
            n.calldata = std::move(input);
            return n;
        }

        void enter(std::size_t i) {
            auto& f = frames_.back();
            const auto& e = trace_.entries[i];
            if (e.error) return;  // failed before the callee was entered
            CallFrameArgs args;
            try {
                args = extract_call_frame_args(e);
            } catch (const MalformedTraceError& err) {
                throw MalformedTraceError(i, err.what());
            }
            FrameData input = read_memory(f, e, args.in_offset, args.in_size);

            const auto& entries = trace_.entries;
            if (i + 1 < entries.size() && entries[i + 1].depth == e.depth + 1) {
                f.pending = PendingCall{i, args, std::move(input)};
                return;
            }

            // Code-less or precompile callee: the trace shows only the pushed result.
            InvocationNode leaf = make_child_node(f, args, std::move(input));
            const auto* next = successor(i);
            const std::optional<Word> result =
                next && !next->stack.empty() ? std::optional<Word>(next->stack.back()) : std::nullopt;
            if (is_create(args.kind)) {
                const Address created = result ? Address::from_word(*result) : Address{};
                leaf.code_address = created;
                leaf.storage_address = created;
            }
            leaf.gas_at_entry = is_create(args.kind) ? 0 : word_to_u64_saturated(args.gas);
            leaf.return_data = FrameData::of({});
            leaf.exit_reason = (result && *result == 0) ? ExitReason::revert : ExitReason::stop;
            leaf.entry_index = i;
            leaf.exit_index = i;
            leaf.executed = false;
            f.returndata = FrameData::of({});
            f.node.children.push_back(std::move(leaf));
        }

        void open_child(std::size_t i) {
            auto& parent = frames_.back();
            PendingCall p = std::move(*parent.pending);
            parent.pending.reset();

            Frame child;
            child.depth = trace_.entries[i].depth;
            child.args = p.args;
            child.node = make_child_node(parent, p.args, p.input);
            if (is_create(p.args.kind)) {
                child.placeholder = next_placeholder();
                child.node.code_address = *child.placeholder;
                child.node.storage_address = *child.placeholder;
                child.exec_calldata = FrameData::of({});
            } else {
                child.exec_calldata = child.node.calldata;
            }
            child.node.gas_at_entry = trace_.entries[i].gas;
            child.node.entry_index = i;
            child.last_index = i;
            frames_.push_back(std::move(child));
        }

        Address next_placeholder() {
            Address a;
            a.bytes.fill(0xfe);
            const auto n = ++placeholder_counter_;
            for (int b = 0; b < 8; ++b) a.bytes[19 - b] = static_cast<std::uint8_t>(n >> (8 * b));
            return a;
        }

        static void replace_address(InvocationNode& node, const Address& from, const Address& to) {
            for_each_node(node, [&](InvocationNode& n, std::size_t) {
                if (n.caller == from) n.caller = to;
                if (n.code_address == from) n.code_address = to;
                if (n.storage_address == from) n.storage_address = to;
            });
        }

        FrameData frame_return_data(const Frame& f, const StructLogEntry& last, ExitReason reason) const {
            if (reason != ExitReason::return_ && reason != ExitReason::revert) return FrameData::of({});
            need(last, f.last_index, 2);
            return read_memory(f, last, word_to_u64_saturated(last.peek(0)), word_to_u64_saturated(last.peek(1)));
        }

        void close_top(std::optional<std::size_t> resume) {
            Frame f = std::move(frames_.back());
            frames_.pop_back();
            Frame& parent = frames_.back();

            const auto& last = trace_.entries[f.last_index];
            const ExitReason reason = exit_reason_of(last);
            f.node.exit_index = f.last_index;
            f.node.exit_reason = reason;
            f.node.return_data = frame_return_data(f, last, reason);
            if (is_reverting(reason)) mark_rolled_back(f.node);

            std::optional<Word> result;
            if (resume && trace_.entries[*resume].depth == parent.depth && !trace_.entries[*resume].stack.empty()) {
                result = trace_.entries[*resume].stack.back();
            }

            const bool returned_data = reason == ExitReason::return_ || reason == ExitReason::revert;
            if (is_create(f.args.kind)) {
                Address created;
                if (result && *result != 0) {
                    created = Address::from_word(*result);
                } else if (f.args.kind == CallKind::create2 && f.node.calldata.complete) {
                    created = create2_address(parent.node.storage_address, f.args.salt, f.node.calldata.bytes);
                }
                replace_address(f.node, *f.placeholder, created);
                parent.returndata = reason == ExitReason::revert ? f.node.return_data : FrameData::of({});
            } else {
                parent.returndata = returned_data ? f.node.return_data : FrameData::of({});
                if (returned_data) parent.memory.write(f.args.out_offset, parent.returndata, f.args.out_size);
            }
            parent.node.children.push_back(std::move(f.node));
        }

        static Address create2_address(const Address& creator, const Word& salt, const Bytes& initcode) {
            Bytes pre;
            pre.reserve(85);
            pre.push_back(0xff);
            pre.insert(pre.end(), creator.bytes.begin(), creator.bytes.end());
            const auto salt_be = word_to_be32(salt);
            pre.insert(pre.end(), salt_be.begin(), salt_be.end());
            const Hash32 code_hash = keccak256(initcode);
            pre.insert(pre.end(), code_hash.bytes.begin(), code_hash.bytes.end());
            return Address::from_word(keccak_word(pre));
        }

        InvocationNode finish_root() {
            Frame& root = frames_.back();
            const auto& last = trace_.entries[root.last_index];
            const ExitReason reason = exit_reason_of(last);
            root.node.exit_index = root.last_index;
            root.node.exit_reason = reason;
            FrameData ret = frame_return_data(root, last, reason);
            if (!ret.complete) ret = FrameData::of(trace_.return_value);
            root.node.return_data = std::move(ret);
            if (is_reverting(reason)) mark_rolled_back(root.node);
            return std::move(root.node);
        }

        const TransactionMeta& meta_;
        const RawTrace& trace_;
        std::vector<Frame> frames_;
        std::uint64_t placeholder_counter_{0};
    };

}  // namespace

InvocationNode build_invocation_tree(const TransactionMeta& meta, const RawTrace& trace) {
    return TreeBuilder(meta, trace).build();
}

}  // namespace txtrace
