// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#include <txtrace/evm_oracle/machine.hpp>

#include <algorithm>
#include <cstring>
#include <limits>
#include <string>

#include <fmt/format.h>

#include <txtrace/common/keccak.hpp>
#include <txtrace/common/opcodes.hpp>
#include <txtrace/parser/parser.hpp>

namespace txtrace::oracle {

UnsupportedInstruction::UnsupportedInstruction(std::uint8_t opcode, std::uint64_t pc)
    : Error(fmt::format("unsupported instruction 0x{:02x} ({}) at pc {}", opcode, opcode_info(opcode).name, pc)),
      opcode_(opcode), pc_(pc) {}

bool is_supported(std::uint8_t c) noexcept {
    if (is_push(c) || is_dup(c) || is_swap(c)) return true;
    if (c >= op::LOG0 && c <= op::LOG0 + 2) return true;
    switch (c) {
        case op::POP:
        case op::ADD:
        case op::SUB:
        case op::MUL:
        case op::DIV:
        case op::LT:
        case op::GT:
        case op::EQ:
        case op::ISZERO:
        case op::AND:
        case op::OR:
        case op::XOR:
        case op::NOT:
        case op::SHA3:
        case op::MLOAD:
        case op::MSTORE:
        case op::CALLDATALOAD:
        case op::CALLDATASIZE:
        case op::CALLDATACOPY:
        case op::SLOAD:
        case op::SSTORE:
        case op::CALLER:
        case op::ORIGIN:
        case op::CALLVALUE:
        case op::TIMESTAMP:
        case op::NUMBER:
        case op::GAS:
        case op::JUMP:
        case op::JUMPI:
        case op::JUMPDEST:
        case op::PC:
        case op::RETURNDATASIZE:
        case op::RETURNDATACOPY:
        case op::CALL:
        case op::CALLCODE:
        case op::STATICCALL:
        case op::DELEGATECALL:
        case op::CREATE:
        case op::CREATE2:
        case op::STOP:
        case op::RETURN:
        case op::REVERT:
        case op::SELFDESTRUCT:
        case op::INVALID: return true;
        default: return false;
    }
}

namespace {

    void rlp_append_u64(Bytes& out, std::uint64_t v) {
        if (v == 0) {
            out.push_back(0x80);
        } else if (v < 0x80) {
            out.push_back(static_cast<std::uint8_t>(v));
        } else {
            Bytes be;
            while (v) {
                be.insert(be.begin(), static_cast<std::uint8_t>(v & 0xff));
                v >>= 8;
            }
            out.push_back(static_cast<std::uint8_t>(0x80 + be.size()));
            out.insert(out.end(), be.begin(), be.end());
        }
    }

}  // namespace

Address create_address(const Address& creator, std::uint64_t nonce) {
    Bytes payload;
    payload.push_back(0x94);
    payload.insert(payload.end(), creator.bytes.begin(), creator.bytes.end());
    rlp_append_u64(payload, nonce);
    Bytes rlp;
    rlp.push_back(static_cast<std::uint8_t>(0xc0 + payload.size()));
    rlp.insert(rlp.end(), payload.begin(), payload.end());
    return Address::from_word(keccak_word(rlp));
}

Address create2_address(const Address& creator, const Word& salt, ByteView initcode) {
    Bytes pre;
    pre.push_back(0xff);
    pre.insert(pre.end(), creator.bytes.begin(), creator.bytes.end());
    const auto salt_be = word_to_be32(salt);
    pre.insert(pre.end(), salt_be.begin(), salt_be.end());
    const auto code_hash = keccak256(initcode);
    pre.insert(pre.end(), code_hash.bytes.begin(), code_hash.bytes.end());
    return Address::from_word(keccak_word(pre));
}

namespace {

    constexpr std::uint64_t kMemoryLimit = std::uint64_t{1} << 24;

    bool is_precompile(const Address& a) {
        for (std::size_t i = 0; i < 19; ++i) {
            if (a.bytes[i] != 0) return false;
        }
        return a.bytes[19] >= 1 && a.bytes[19] <= 9;
    }

    struct FrameContext {
        CallKind kind{CallKind::root};
        Address caller;
        Address code_address;
        Address storage_address;
        Word apparent_value{0};
        Bytes calldata;  // what CALLDATA* observe
        Bytes code;
        std::uint64_t gas{0};
        std::uint32_t depth{1};
        bool is_static{false};
    };

    struct FrameResult {
        ExitReason reason{ExitReason::stop};
        Bytes output;
        std::uint64_t gas_left{0};
    };

    bool succeeded(ExitReason r) { return !is_reverting(r); }

    class Halt {
      public:
        Halt(ExitReason reason, std::string error) : reason(reason), error(std::move(error)) {}
        ExitReason reason;
        std::string error;
    };

    class Machine {
      public:
        Machine(const MockWorld& world, const TransactionMeta& tx, const ExecuteOptions& options)
            : world_(world), tx_(tx), options_(options) {}

        GroundTruth run() {
            GroundTruth gt;
            gt.meta = tx_;

            InvocationNode root;
            root.call_kind = CallKind::root;
            root.caller = tx_.origin;
            root.value = tx_.value;
            root.gas_at_entry = tx_.gas_limit;
            root.calldata = FrameData::of(tx_.input);

            FrameContext ctx;
            ctx.kind = CallKind::root;
            ctx.caller = tx_.origin;
            ctx.apparent_value = tx_.value;
            ctx.gas = tx_.gas_limit;
            ctx.depth = 1;

            const MockWorld before = world_;
            if (tx_.to) {
                root.selector = extract_selector(tx_.input);
                ctx.code_address = ctx.storage_address = *tx_.to;
                ctx.calldata = tx_.input;
                ctx.code = world_.accounts[*tx_.to].code;
                gt.meta.contract_address.reset();
            } else {
                auto& origin = world_.accounts[tx_.origin];
                const Address created = create_address(tx_.origin, origin.nonce);
                ++origin.nonce;
                ctx.code_address = ctx.storage_address = created;
                ctx.code = tx_.input;
                gt.meta.contract_address = created;
                world_.accounts[created].nonce = 1;
            }
            root.code_address = ctx.code_address;
            root.storage_address = ctx.storage_address;
            world_.accounts[ctx.storage_address].balance += tx_.value;
            if (world_.accounts[tx_.origin].balance >= tx_.value) world_.accounts[tx_.origin].balance -= tx_.value;

            FrameResult result;
            if (ctx.code.empty()) {
                result.reason = ExitReason::stop;
                result.gas_left = tx_.gas_limit;
            } else {
                result = run_frame(ctx, root);
            }
            root.exit_reason = result.reason;
            root.return_data = FrameData::of(returns_data(result.reason) ? result.output : Bytes{});
            if (is_reverting(result.reason)) {
                mark_rolled_back(root);
                const auto origin_nonce = world_.accounts[tx_.origin].nonce;
                world_ = before;
                world_.accounts[tx_.origin].nonce = origin_nonce;
            } else if (!tx_.to && result.reason == ExitReason::return_) {
                world_.accounts[ctx.storage_address].code = result.output;
            }

            gt.meta.status = succeeded(result.reason) ? TxStatus::success : TxStatus::reverted;
            gt.meta.gas_used = tx_.gas_limit - result.gas_left;
            gt.trace.entries = std::move(entries_);
            gt.trace.failed = !succeeded(result.reason);
            gt.trace.return_value = root.return_data.bytes;

            for_each_node(root, [&](const InvocationNode& n, std::size_t) {
                gt.storage_events.insert(gt.storage_events.end(), n.storage_events.begin(), n.storage_events.end());
            });
            std::sort(gt.storage_events.begin(), gt.storage_events.end(),
                      [](const auto& a, const auto& b) { return a.instruction_index < b.instruction_index; });
            gt.tree = std::move(root);
            gt.world_after = std::move(world_);
            return gt;
        }

      private:
        static bool returns_data(ExitReason r) { return r == ExitReason::return_ || r == ExitReason::revert; }

        struct State {
            std::uint64_t pc{0};
            std::vector<Word> stack;
            Bytes memory;
            Bytes returndata;
            std::uint64_t gas{0};
        };

        static std::vector<bool> jumpdests(const Bytes& code) {
            std::vector<bool> valid(code.size(), false);
            for (std::size_t pc = 0; pc < code.size(); ++pc) {
                if (code[pc] == op::JUMPDEST) valid[pc] = true;
                pc += push_size(code[pc]);
            }
            return valid;
        }

        static Word pop(State& s) {
            Word w = s.stack.back();
            s.stack.pop_back();
            return w;
        }

        static void push(State& s, Word w) {
            if (s.stack.size() >= 1024) throw Halt(ExitReason::invalid, "stack limit reached 1024 (1023)");
            s.stack.push_back(std::move(w));
        }

        //! Grows memory to cover [off, off+len) rounded to words; absurd ranges fail as gas exhaustion.
        static void expand(State& s, const Word& off, const Word& len) {
            if (len == 0) return;
            if (off >= kMemoryLimit || len >= kMemoryLimit) throw Halt(ExitReason::out_of_gas, "out of gas");
            const auto end = static_cast<std::size_t>(off + len);
            if (end > s.memory.size()) s.memory.resize((end + 31) / 32 * 32, 0);
        }

        static Bytes mem_read(State& s, const Word& off, const Word& len) {
            expand(s, off, len);
            if (len == 0) return {};
            const auto o = static_cast<std::size_t>(off);
            return Bytes(s.memory.begin() + static_cast<std::ptrdiff_t>(o),
                         s.memory.begin() + static_cast<std::ptrdiff_t>(o + static_cast<std::size_t>(len)));
        }

        static void mem_write(State& s, const Word& off, ByteView data) {
            if (data.empty()) return;
            expand(s, off, data.size());
            std::memcpy(s.memory.data() + static_cast<std::size_t>(off), data.data(), data.size());
        }

        //! Copies src[src_off, src_off+len) into memory, zero-filling past the end of src.
        static void copy_padded(State& s, const Word& dst, ByteView src, const Word& src_off, const Word& len) {
            if (len == 0) return;
            expand(s, dst, len);
            Bytes chunk(static_cast<std::size_t>(len), 0);
            if (src_off < src.size()) {
                const auto o = static_cast<std::size_t>(src_off);
                const std::size_t n = std::min(chunk.size(), src.size() - o);
                std::memcpy(chunk.data(), src.data() + o, n);
            }
            mem_write(s, dst, chunk);
        }

        std::uint64_t static_cost(std::uint8_t c, const State& s) const {
            if (c == op::SSTORE) return kSstoreGas;
            if (c == op::SHA3) {
                if (s.stack.size() < 2) return kSha3BaseGas;
                const Word& len = s.stack[s.stack.size() - 2];
                if (len >= kMemoryLimit) return std::numeric_limits<std::uint64_t>::max();
                return kSha3BaseGas + kSha3WordGas * ((static_cast<std::uint64_t>(len) + 31) / 32);
            }
            return 1;
        }

        std::size_t record(const FrameContext& ctx, const State& s, std::uint8_t c, std::uint64_t cost) {
            StructLogEntry e;
            e.pc = s.pc;
            e.opcode = c;
            e.known_opcode = true;
            e.op = std::string(opcode_info(c).name);
            e.gas = s.gas;
            e.gas_cost = cost;
            e.depth = ctx.depth;
            e.stack = s.stack;
            if (options_.capture_memory) e.memory = s.memory;
            entries_.push_back(std::move(e));
            return entries_.size() - 1;
        }

        FrameResult run_frame(const FrameContext& ctx, InvocationNode& node) {
            State s;
            s.gas = ctx.gas;
            node.entry_index = entries_.size();
            const auto valid_jumps = jumpdests(ctx.code);
            std::size_t last = entries_.size();

            while (true) {
                const std::uint8_t c = s.pc < ctx.code.size() ? ctx.code[s.pc] : op::STOP;
                if (!is_supported(c)) throw UnsupportedInstruction(c, s.pc);
                const auto& info = opcode_info(c);
                last = record(ctx, s, c, static_cost(c, s));
                auto& entry = entries_[last];
                try {
                    if (s.stack.size() < info.pops) {
                        throw Halt(ExitReason::invalid,
                                   fmt::format("stack underflow ({} <=> {})", s.stack.size(), info.pops));
                    }
                    if (const auto exit = step(ctx, node, s, c, last, valid_jumps)) {
                        node.exit_index = last;
                        return *exit;
                    }
                } catch (const Halt& h) {
                    entries_[last].error = h.error;
                    node.exit_index = last;
                    return FrameResult{h.reason, {}, 0};
                }
                (void)entry;
            }
        }

        void charge(State& s, std::size_t index, std::uint64_t cost) {
            entries_[index].gas_cost = cost;
            if (cost > s.gas) throw Halt(ExitReason::out_of_gas, "out of gas");
            s.gas -= cost;
        }

        std::optional<FrameResult> step(const FrameContext& ctx, InvocationNode& node, State& s, std::uint8_t c,
                                        std::size_t index, const std::vector<bool>& valid_jumps) {
            if (c != op::CALL && c != op::CALLCODE && c != op::DELEGATECALL && c != op::STATICCALL &&
                c != op::CREATE && c != op::CREATE2) {
                charge(s, index, entries_[index].gas_cost);
            }

            if (is_push(c)) {
                const unsigned n = push_size(c);
                Bytes imm(n, 0);
                for (unsigned k = 0; k < n; ++k) {
                    const auto at = s.pc + 1 + k;
                    if (at < ctx.code.size()) imm[k] = ctx.code[at];
                }
                push(s, word_from_be(imm));
                s.pc += 1 + n;
                return std::nullopt;
            }
            if (is_dup(c)) {
                const unsigned n = c - op::DUP1 + 1;
                push(s, s.stack[s.stack.size() - n]);
                ++s.pc;
                return std::nullopt;
            }
            if (is_swap(c)) {
                const unsigned n = c - op::SWAP1 + 1;
                std::swap(s.stack.back(), s.stack[s.stack.size() - 1 - n]);
                ++s.pc;
                return std::nullopt;
            }
            if (is_log(c)) {
                if (ctx.is_static) throw Halt(ExitReason::invalid, "write protection");
                const Word off = pop(s);
                const Word len = pop(s);
                for (unsigned k = 0; k < static_cast<unsigned>(c - op::LOG0); ++k) pop(s);
                expand(s, off, len);
                ++s.pc;
                return std::nullopt;
            }

            switch (c) {
                case op::STOP: return FrameResult{ExitReason::stop, {}, s.gas};
                case op::ADD: binary(s, [](const Word& a, const Word& b) { return a + b; }); break;
                case op::SUB: binary(s, [](const Word& a, const Word& b) { return a - b; }); break;
                case op::MUL: binary(s, [](const Word& a, const Word& b) { return a * b; }); break;
                case op::DIV: binary(s, [](const Word& a, const Word& b) { return b == 0 ? Word(0) : Word(a / b); }); break;
                case op::LT: binary(s, [](const Word& a, const Word& b) { return Word(a < b ? 1 : 0); }); break;
                case op::GT: binary(s, [](const Word& a, const Word& b) { return Word(a > b ? 1 : 0); }); break;
                case op::EQ: binary(s, [](const Word& a, const Word& b) { return Word(a == b ? 1 : 0); }); break;
                case op::AND: binary(s, [](const Word& a, const Word& b) { return Word(a & b); }); break;
                case op::OR: binary(s, [](const Word& a, const Word& b) { return Word(a | b); }); break;
                case op::XOR: binary(s, [](const Word& a, const Word& b) { return Word(a ^ b); }); break;
                case op::ISZERO: s.stack.back() = s.stack.back() == 0 ? 1 : 0; break;
                case op::NOT: s.stack.back() = ~s.stack.back(); break;
                case op::POP: s.stack.pop_back(); break;
                case op::SHA3: {
                    const Word off = pop(s);
                    const Word len = pop(s);
                    Sha3Record rec;
                    rec.input = mem_read(s, off, len);
                    rec.output = keccak_word(rec.input);
                    rec.instruction_index = index;
                    push(s, rec.output);
                    node.sha3_events.push_back(std::move(rec));
                    break;
                }
                case op::MLOAD: {
                    const Word off = pop(s);
                    const Bytes w = mem_read(s, off, 32);
                    push(s, word_from_be(w));
                    break;
                }
                case op::MSTORE: {
                    const Word off = pop(s);
                    const Word v = pop(s);
                    const auto be = word_to_be32(v);
                    mem_write(s, off, be);
                    break;
                }
                case op::CALLDATALOAD: {
                    const Word off = pop(s);
                    std::array<std::uint8_t, 32> buf{};
                    if (off < ctx.calldata.size()) {
                        const auto o = static_cast<std::size_t>(off);
                        std::memcpy(buf.data(), ctx.calldata.data() + o, std::min<std::size_t>(32, ctx.calldata.size() - o));
                    }
                    push(s, word_from_be(buf));
                    break;
                }
                case op::CALLDATASIZE: push(s, Word(ctx.calldata.size())); break;
                case op::CALLDATACOPY: {
                    const Word dst = pop(s);
                    const Word off = pop(s);
                    const Word len = pop(s);
                    copy_padded(s, dst, ctx.calldata, off, len);
                    break;
                }
                case op::RETURNDATASIZE: push(s, Word(s.returndata.size())); break;
                case op::RETURNDATACOPY: {
                    const Word dst = pop(s);
                    const Word off = pop(s);
                    const Word len = pop(s);
                    if (off + len > s.returndata.size() || off + len < off) {
                        throw Halt(ExitReason::invalid, "return data out of bounds");
                    }
                    copy_padded(s, dst, s.returndata, off, len);
                    break;
                }
                case op::SLOAD: {
                    const Word slot = pop(s);
                    const auto& storage = world_.accounts[ctx.storage_address].storage;
                    auto it = storage.find(slot);
                    const Word value = it == storage.end() ? Word(0) : it->second;
                    node.storage_events.push_back({StorageAccessKind::load, slot, value, index, false, std::nullopt});
                    push(s, value);
                    break;
                }
                case op::SSTORE: {
                    if (ctx.is_static) throw Halt(ExitReason::invalid, "write protection");
                    const Word slot = pop(s);
                    const Word value = pop(s);
                    node.storage_events.push_back({StorageAccessKind::store, slot, value, index, false, std::nullopt});
                    world_.accounts[ctx.storage_address].storage[slot] = value;
                    break;
                }
                case op::CALLER: push(s, ctx.caller.to_word()); break;
                case op::ORIGIN: push(s, tx_.origin.to_word()); break;
                case op::CALLVALUE: push(s, ctx.apparent_value); break;
                case op::TIMESTAMP: push(s, Word(world_.timestamp)); break;
                case op::NUMBER: push(s, Word(tx_.block_number)); break;
                case op::GAS: push(s, Word(s.gas)); break;
                case op::PC: push(s, Word(s.pc)); break;
                case op::JUMPDEST: break;
                case op::JUMP: {
                    const Word dest = pop(s);
                    jump_to(s, dest, valid_jumps);
                    return std::nullopt;
                }
                case op::JUMPI: {
                    const Word dest = pop(s);
                    const Word cond = pop(s);
                    if (cond != 0) {
                        jump_to(s, dest, valid_jumps);
                        return std::nullopt;
                    }
                    break;
                }
                case op::RETURN:
                case op::REVERT: {
                    const Word off = pop(s);
                    const Word len = pop(s);
                    Bytes out = mem_read(s, off, len);
                    return FrameResult{c == op::RETURN ? ExitReason::return_ : ExitReason::revert, std::move(out),
                                       s.gas};
                }
                case op::INVALID: throw Halt(ExitReason::invalid, "invalid opcode: INVALID");
                case op::SELFDESTRUCT: {
                    if (ctx.is_static) throw Halt(ExitReason::invalid, "write protection");
                    const Address beneficiary = Address::from_word(pop(s));
                    auto& self = world_.accounts[ctx.storage_address];
                    const Word amount = self.balance;
                    self.balance = 0;
                    world_.accounts[beneficiary].balance += amount;
                    return FrameResult{ExitReason::selfdestruct, {}, s.gas};
                }
                case op::CALL:
                case op::CALLCODE:
                case op::DELEGATECALL:
                case op::STATICCALL: do_call(ctx, node, s, c, index); break;
                case op::CREATE:
                case op::CREATE2: do_create(ctx, node, s, c, index); break;
                default: throw UnsupportedInstruction(c, s.pc);
            }
            ++s.pc;
            return std::nullopt;
        }

        template <typename Fn>
        static void binary(State& s, Fn fn) {
            const Word a = pop(s);
            const Word b = pop(s);
            s.stack.push_back(fn(a, b));
        }

        static void jump_to(State& s, const Word& dest, const std::vector<bool>& valid) {
            if (dest >= valid.size() || !valid[static_cast<std::size_t>(dest)]) {
                throw Halt(ExitReason::invalid, "invalid jump destination");
            }
            s.pc = static_cast<std::uint64_t>(dest);
        }

        void do_call(const FrameContext& ctx, InvocationNode& node, State& s, std::uint8_t c, std::size_t index) {
            const bool has_value = c == op::CALL || c == op::CALLCODE;
            const Word gas_op = pop(s);
            const Address target = Address::from_word(pop(s));
            const Word value = has_value ? pop(s) : Word(0);
            const Word in_off = pop(s);
            const Word in_len = pop(s);
            const Word out_off = pop(s);
            const Word out_len = pop(s);

            if (c == op::CALL && ctx.is_static && value != 0) throw Halt(ExitReason::invalid, "write protection");
            if (s.gas < kCallBaseGas) charge(s, index, kCallBaseGas);
            const std::uint64_t available = s.gas - kCallBaseGas;
            const std::uint64_t forwarded = gas_op < available ? static_cast<std::uint64_t>(gas_op) : available;
            expand(s, out_off, out_len);
            Bytes input = mem_read(s, in_off, in_len);
            charge(s, index, kCallBaseGas + forwarded);

            InvocationNode child;
            FrameContext cctx;
            cctx.depth = ctx.depth + 1;
            cctx.gas = forwarded;
            cctx.calldata = input;
            cctx.is_static = ctx.is_static || c == op::STATICCALL;
            switch (c) {
                case op::CALL:
                    child.call_kind = CallKind::call;
                    cctx.caller = ctx.storage_address;
                    cctx.code_address = cctx.storage_address = target;
                    cctx.apparent_value = value;
                    break;
                case op::CALLCODE:
                    child.call_kind = CallKind::callcode;
                    cctx.caller = ctx.storage_address;
                    cctx.code_address = target;
                    cctx.storage_address = ctx.storage_address;
                    cctx.apparent_value = value;
                    break;
                case op::DELEGATECALL:
                    child.call_kind = CallKind::delegatecall;
                    cctx.caller = ctx.caller;
                    cctx.code_address = target;
                    cctx.storage_address = ctx.storage_address;
                    cctx.apparent_value = ctx.apparent_value;
                    break;
                default:
                    child.call_kind = CallKind::staticcall;
                    cctx.caller = ctx.storage_address;
                    cctx.code_address = cctx.storage_address = target;
                    break;
            }
            cctx.kind = child.call_kind;
            child.caller = cctx.caller;
            child.code_address = cctx.code_address;
            child.storage_address = cctx.storage_address;
            child.value = has_value ? value : Word(0);
            child.calldata = FrameData::of(input);
            child.selector = extract_selector(input);

            auto leaf = [&](bool ok) {
                child.gas_at_entry = word_to_u64_saturated(gas_op);
                child.return_data = FrameData::of({});
                child.exit_reason = ok ? ExitReason::stop : ExitReason::revert;
                child.entry_index = child.exit_index = index;
                child.executed = false;
                s.gas += forwarded;
                s.returndata.clear();
                s.stack.push_back(ok ? 1 : 0);
                node.children.push_back(std::move(child));
            };

            if (has_value && world_.accounts[ctx.storage_address].balance < value) return leaf(false);

            const Bytes code = world_.accounts[target].code;
            if (code.empty() || is_precompile(target)) {
                if (c == op::CALL && value != 0) transfer(ctx.storage_address, target, value);
                return leaf(true);
            }

            const MockWorld snapshot = world_;
            if (c == op::CALL && value != 0) transfer(ctx.storage_address, target, value);
            cctx.code = code;
            child.gas_at_entry = forwarded;
            const FrameResult r = run_frame(cctx, child);
            finish_child(child, r);
            if (is_reverting(r.reason)) world_ = snapshot;

            s.gas += r.gas_left;
            s.returndata = returns_data(r.reason) ? r.output : Bytes{};
            if (!s.returndata.empty() && out_len != 0) {
                const std::size_t n = std::min<std::size_t>(s.returndata.size(), static_cast<std::size_t>(out_len));
                mem_write(s, out_off, ByteView{s.returndata.data(), n});
            }
            s.stack.push_back(succeeded(r.reason) ? 1 : 0);
            node.children.push_back(std::move(child));
        }

        void do_create(const FrameContext& ctx, InvocationNode& node, State& s, std::uint8_t c, std::size_t index) {
            if (ctx.is_static) throw Halt(ExitReason::invalid, "write protection");
            const Word value = pop(s);
            const Word off = pop(s);
            const Word len = pop(s);
            const Word salt = c == op::CREATE2 ? pop(s) : Word(0);

            if (s.gas < kCallBaseGas) charge(s, index, kCallBaseGas);
            const std::uint64_t forwarded = s.gas - kCallBaseGas;
            const Bytes initcode = mem_read(s, off, len);
            charge(s, index, kCallBaseGas + forwarded);

            InvocationNode child;
            child.call_kind = c == op::CREATE ? CallKind::create : CallKind::create2;
            child.caller = ctx.storage_address;
            child.value = value;
            child.calldata = FrameData::of(initcode);

            auto& creator = world_.accounts[ctx.storage_address];
            const Address address = c == op::CREATE ? create_address(ctx.storage_address, creator.nonce)
                                                     : create2_address(ctx.storage_address, salt, initcode);
            s.returndata.clear();

            auto leaf = [&](bool ok) {
                const Address shown = ok ? address : Address{};
                child.code_address = child.storage_address = shown;
                child.gas_at_entry = 0;
                child.return_data = FrameData::of({});
                child.exit_reason = ok ? ExitReason::stop : ExitReason::revert;
                child.entry_index = child.exit_index = index;
                child.executed = false;
                s.gas += forwarded;
                s.stack.push_back(ok ? shown.to_word() : Word(0));
                node.children.push_back(std::move(child));
            };

            if (creator.balance < value) return leaf(false);
            ++creator.nonce;
            const auto& existing = world_.accounts[address];
            if (!existing.code.empty() || existing.nonce != 0) return leaf(false);

            const MockWorld snapshot = world_;
            transfer(ctx.storage_address, address, value);
            world_.accounts[address].nonce = 1;
            if (initcode.empty()) return leaf(true);

            FrameContext cctx;
            cctx.kind = child.call_kind;
            cctx.caller = ctx.storage_address;
            cctx.code_address = cctx.storage_address = address;
            cctx.apparent_value = value;
            cctx.code = initcode;
            cctx.gas = forwarded;
            cctx.depth = ctx.depth + 1;
            child.code_address = child.storage_address = address;
            child.gas_at_entry = forwarded;

            const FrameResult r = run_frame(cctx, child);
            finish_child(child, r);
            s.gas += r.gas_left;
            if (succeeded(r.reason)) {
                world_.accounts[address].code = r.reason == ExitReason::return_ ? r.output : Bytes{};
                s.stack.push_back(address.to_word());
            } else {
                world_ = snapshot;
                ++world_.accounts[ctx.storage_address].nonce;
                if (r.reason == ExitReason::revert) s.returndata = r.output;
                // A failed CREATE leaves no trace of the address it would have used.
                if (c == op::CREATE) rename(child, address, Address{});
                s.stack.push_back(0);
            }
            node.children.push_back(std::move(child));
        }

        static void rename(InvocationNode& node, const Address& from, const Address& to) {
            for_each_node(node, [&](InvocationNode& n, std::size_t) {
                if (n.caller == from) n.caller = to;
                if (n.code_address == from) n.code_address = to;
                if (n.storage_address == from) n.storage_address = to;
            });
        }

        static void finish_child(InvocationNode& child, const FrameResult& r) {
            child.exit_reason = r.reason;
            child.return_data = FrameData::of(returns_data(r.reason) ? r.output : Bytes{});
            if (is_reverting(r.reason)) mark_rolled_back(child);
        }

        void transfer(const Address& from, const Address& to, const Word& value) {
            world_.accounts[from].balance -= value;
            world_.accounts[to].balance += value;
        }

        MockWorld world_;
        const TransactionMeta& tx_;
        ExecuteOptions options_;
        std::vector<StructLogEntry> entries_;
    };

}  // namespace

GroundTruth execute(const MockWorld& world, const TransactionMeta& tx, const ExecuteOptions& options) {
    return Machine(world, tx, options).run();
}

}  // namespace txtrace::oracle
