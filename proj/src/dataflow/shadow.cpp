// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#include <txtrace/dataflow/shadow.hpp>

#include <algorithm>
#include <array>

#include <nlohmann/json.hpp>

#include <txtrace/common/error.hpp>
#include <txtrace/common/hex.hpp>
#include <txtrace/common/opcodes.hpp>
#include <txtrace/parser/parser.hpp>

namespace txtrace {

std::string_view to_string(OperandRole role) noexcept {
    switch (role) {
        case OperandRole::slot: return "slot";
        case OperandRole::value: return "value";
        case OperandRole::target_address: return "target_address";
        case OperandRole::data: return "data";
        case OperandRole::condition: return "condition";
    }
    return "?";
}

std::optional<OperandRole> operand_role_from_string(std::string_view s) noexcept {
    for (auto r : {OperandRole::slot, OperandRole::value, OperandRole::target_address, OperandRole::data,
                   OperandRole::condition}) {
        if (to_string(r) == s) return r;
    }
    return std::nullopt;
}

namespace {

    // Opcodes whose result depends on chain state the shadow does not model.
    bool reads_unmodeled_state(std::uint8_t code) {
        switch (code) {
            case 0x31:  // BALANCE
            case 0x3b:  // EXTCODESIZE
            case 0x3f:  // EXTCODEHASH
            case 0x40:  // BLOCKHASH
            case 0x49:  // BLOBHASH
                return true;
            default: return false;
        }
    }

    constexpr std::uint8_t kTload = 0x5c;
    constexpr std::uint8_t kTstore = 0x5d;

    struct PendingCall {
        std::uint64_t out_offset{0};
        std::uint64_t out_size{0};
        bool is_create{false};
        std::size_t child_id{0};
    };

    struct Frame {
        const InvocationNode* node{nullptr};
        std::size_t id{0};
        std::vector<TagSet> stack;
        RangeTagMap memory;
        RangeTagMap calldata;
        RangeTagMap returndata;
        TagSet callvalue;
        std::size_t next_child{0};
        std::size_t journal_mark{0};
        std::size_t transient_mark{0};
        PendingCall pending;
        // Set by the frame's own RETURN/REVERT, consumed by the parent on exit.
        RangeTagMap output;
    };

    struct JournalEntry {
        StorageKey key;
        std::optional<TagSet> previous;
    };

    class Shadow {
      public:
        Shadow(const RawTrace& trace, const InvocationNode& tree, std::span<const TaintSource> sources)
            : trace_(trace), tree_(tree) {
            result_.sources.assign(sources.begin(), sources.end());
            std::sort(result_.sources.begin(), result_.sources.end());
            result_.sources.erase(std::unique(result_.sources.begin(), result_.sources.end()), result_.sources.end());
            for_each_node(tree_, [&](const InvocationNode& n, std::size_t) { ids_.emplace(&n, ids_.size()); });
            for (std::uint32_t i = 0; i < result_.sources.size(); ++i) {
                const auto& s = result_.sources[i];
                switch (s.kind) {
                    case TaintSource::Kind::env_opcode: env_[s.opcode] |= TagSet(i); break;
                    case TaintSource::Kind::storage_slot: storage_sources_[{s.address, s.slot}] |= TagSet(i); break;
                    case TaintSource::Kind::call_return: call_return_[s.frame] |= TagSet(i); break;
                    case TaintSource::Kind::calldata_range: break;
                }
            }
        }

        ShadowResult run() {
            const auto& entries = trace_.entries;
            if (entries.empty()) return std::move(result_);
            enter(tree_, RangeTagMap{}, TagSet{});
            for (std::size_t i = 0; i < entries.size(); ++i) {
                const auto& e = entries[i];
                if (e.depth != frames_.size()) {
                    throw ConsistencyError(i, "entry depth " + std::to_string(e.depth) + " but shadow is in frame depth " +
                                                  std::to_string(frames_.size()));
                }
                Frame& f = frames_.back();
                if (f.stack.size() != e.stack.size()) {
                    throw ConsistencyError(i, "shadow stack holds " + std::to_string(f.stack.size()) +
                                                  " items, trace stack holds " + std::to_string(e.stack.size()));
                }
                const bool descends = i + 1 < entries.size() && entries[i + 1].depth > e.depth;
                step(i, e, descends);
                const std::size_t next_depth = i + 1 < entries.size() ? entries[i + 1].depth : 0;
                while (frames_.size() > next_depth && !frames_.empty()) leave(i);
            }
            while (!frames_.empty()) leave(entries.size() - 1);
            return std::move(result_);
        }

      private:
        void count(const TagSet& t) {
            if (t.empty()) return;
            ++result_.tainted_writes;
            if (t.unknown()) ++result_.unknown_writes;
        }

        void push(Frame& f, TagSet t) {
            count(t);
            f.stack.push_back(std::move(t));
        }

        TagSet pop(Frame& f) {
            TagSet t = std::move(f.stack.back());
            f.stack.pop_back();
            return t;
        }

        void write_memory(Frame& f, std::uint64_t off, std::uint64_t len, const TagSet& t) {
            count(t);
            f.memory.assign(off, len, t);
        }

        void copy_memory(Frame& f, const RangeTagMap& src, std::uint64_t src_off, std::uint64_t len,
                         std::uint64_t dst_off) {
            f.memory.copy_from(src, src_off, len, dst_off);
            if (len > 0 && !src.empty()) count(f.memory.collect(dst_off, len));
        }

        void sink(std::size_t index, std::uint8_t opcode, OperandRole role, const TagSet& tags, const Word& value) {
            for (auto id : tags.ids()) result_.facts.push_back({result_.sources[id], {opcode, role, index}, value});
        }

        void enter(const InvocationNode& node, RangeTagMap calldata, TagSet callvalue) {
            Frame f;
            f.node = &node;
            f.id = ids_.at(&node);
            f.calldata = std::move(calldata);
            f.callvalue = std::move(callvalue);
            f.journal_mark = journal_.size();
            f.transient_mark = transient_journal_.size();
            for (std::uint32_t i = 0; i < result_.sources.size(); ++i) {
                const auto& s = result_.sources[i];
                if (s.kind != TaintSource::Kind::calldata_range || s.frame != f.id) continue;
                // A range beyond the calldata reads as zero bytes and never taints anything.
                const std::uint64_t size = node.calldata.size;
                if (s.offset >= size || s.length == 0) continue;
                const auto len = std::min(s.length, size - s.offset);
                f.calldata.assign(s.offset, len, f.calldata.collect(s.offset, len) | TagSet(i));
            }
            frames_.push_back(std::move(f));
        }

        void undo(std::size_t journal_mark, std::size_t transient_mark) {
            auto rewind = [](auto& journal, auto& map, std::size_t mark) {
                while (journal.size() > mark) {
                    auto& j = journal.back();
                    if (j.previous) {
                        map[j.key] = std::move(*j.previous);
                    } else {
                        map.erase(j.key);
                    }
                    journal.pop_back();
                }
            };
            rewind(journal_, result_.storage, journal_mark);
            rewind(transient_journal_, transient_, transient_mark);
        }

        void store(std::map<StorageKey, TagSet>& map, std::vector<JournalEntry>& journal, const StorageKey& key,
                   const TagSet& t) {
            auto it = map.find(key);
            journal.push_back({key, it == map.end() ? std::nullopt : std::optional<TagSet>(it->second)});
            count(t);
            if (t.empty()) {
                if (it != map.end()) map.erase(it);
            } else {
                map[key] = t;
            }
        }

        TagSet load(const std::map<StorageKey, TagSet>& map, const StorageKey& key) const {
            auto it = map.find(key);
            return it == map.end() ? TagSet{} : it->second;
        }

        void leave(std::size_t last_index) {
            Frame done = std::move(frames_.back());
            frames_.pop_back();
            if (is_reverting(done.node->exit_reason)) undo(done.journal_mark, done.transient_mark);
            if (frames_.empty()) return;
            Frame& parent = frames_.back();
            finish_call(parent, parent.pending, &done, last_index);
        }

        // Completes the parent side of a call: return data, output memory and the pushed result.
        void finish_call(Frame& parent, const PendingCall& call, Frame* child, std::size_t) {
            RangeTagMap output;
            if (child != nullptr) output = std::move(child->output);
            const bool reverted = child != nullptr && child->node->exit_reason == ExitReason::revert;
            if (call.is_create) {
                // A successful create leaves the return buffer empty; a reverted one exposes the revert data.
                parent.returndata = reverted ? std::move(output) : RangeTagMap{};
            } else {
                const std::uint64_t ret_size = child != nullptr ? child->node->return_data.size : 0;
                copy_memory(parent, output, 0, std::min(call.out_size, ret_size), call.out_offset);
                parent.returndata = std::move(output);
            }
            TagSet result;
            if (auto it = call_return_.find(call.child_id); it != call_return_.end()) result = it->second;
            push(parent, std::move(result));
        }

        static Word first_word(const FrameData& data) {
            if (!data.complete || data.bytes.empty()) return 0;
            std::array<std::uint8_t, 32> buf{};
            std::copy_n(data.bytes.begin(), std::min<std::size_t>(32, data.bytes.size()), buf.begin());
            return word_from_be(buf);
        }

        void step(std::size_t i, const StructLogEntry& e, bool descends) {
            Frame& f = frames_.back();
            const std::uint8_t code = e.opcode;
            if (!e.known_opcode) {
                resync_unknown(i, f);
                return;
            }
            const auto& info = opcode_info(code);
            // A failing instruction halts the frame without effect; sinks it would reach never execute.
            if (e.error) return;
            if (e.stack.size() < info.pops) return;  // underflow halts with an error field; defensive only
            auto u64 = [&](std::size_t n) { return word_to_u64_saturated(e.peek(n)); };

            if (is_push(code) || code == op::PUSH0) {
                push(f, {});
                return;
            }
            if (is_dup(code)) {
                const std::size_t n = code - op::DUP1 + 1;
                push(f, f.stack[f.stack.size() - n]);
                return;
            }
            if (is_swap(code)) {
                const std::size_t n = code - op::SWAP1 + 1;
                std::swap(f.stack.back(), f.stack[f.stack.size() - 1 - n]);
                return;
            }
            if (is_log(code)) {
                for (unsigned k = 0; k < info.pops; ++k) pop(f);
                return;
            }

            switch (code) {
                case op::CALLER:
                case op::ORIGIN:
                case op::TIMESTAMP:
                case op::NUMBER: {
                    auto it = env_.find(code);
                    push(f, it == env_.end() ? TagSet{} : it->second);
                    return;
                }
                case op::CALLVALUE: {
                    auto it = env_.find(code);
                    push(f, (it == env_.end() ? TagSet{} : it->second) | f.callvalue);
                    return;
                }
                case op::CALLDATALOAD: {
                    const auto off = u64(0);
                    pop(f);
                    push(f, f.calldata.collect(off, 32));
                    return;
                }
                case op::CALLDATACOPY:
                case op::RETURNDATACOPY: {
                    const auto dst = u64(0), src = u64(1), len = u64(2);
                    for (int k = 0; k < 3; ++k) pop(f);
                    copy_memory(f, code == op::CALLDATACOPY ? f.calldata : f.returndata, src, len, dst);
                    return;
                }
                case op::CODECOPY: {
                    const auto dst = u64(0), len = u64(2);
                    for (int k = 0; k < 3; ++k) pop(f);
                    f.memory.assign(dst, len, {});
                    return;
                }
                case op::EXTCODECOPY: {
                    const auto dst = u64(1), len = u64(3);
                    TagSet t = pop(f);
                    for (int k = 0; k < 3; ++k) pop(f);
                    if (!t.empty()) t.mark_unknown();
                    write_memory(f, dst, len, t);
                    return;
                }
                case op::MCOPY: {
                    const auto dst = u64(0), src = u64(1), len = u64(2);
                    for (int k = 0; k < 3; ++k) pop(f);
                    const RangeTagMap snapshot = f.memory;
                    copy_memory(f, snapshot, src, len, dst);
                    return;
                }
                case op::MLOAD: {
                    const auto off = u64(0);
                    pop(f);
                    push(f, f.memory.collect(off, 32));
                    return;
                }
                case op::MSTORE:
                case op::MSTORE8: {
                    const auto off = u64(0);
                    pop(f);
                    write_memory(f, off, code == op::MSTORE ? 32 : 1, pop(f));
                    return;
                }
                case op::SHA3: {
                    const auto off = u64(0), len = u64(1);
                    pop(f);
                    pop(f);
                    push(f, f.memory.collect(off, len));
                    return;
                }
                case op::SLOAD: {
                    const StorageKey key{f.node->storage_address, e.peek(0)};
                    pop(f);
                    TagSet t = load(result_.storage, key);
                    if (auto it = storage_sources_.find(key); it != storage_sources_.end()) t |= it->second;
                    push(f, std::move(t));
                    return;
                }
                case op::SSTORE: {
                    TagSet slot = pop(f);
                    TagSet value = pop(f);
                    sink(i, code, OperandRole::slot, slot, e.peek(0));
                    sink(i, code, OperandRole::value, value, e.peek(1));
                    store(result_.storage, journal_, {f.node->storage_address, e.peek(0)}, value);
                    return;
                }
                case kTload: {
                    const StorageKey key{f.node->storage_address, e.peek(0)};
                    TagSet t = pop(f) | load(transient_, key);
                    push(f, std::move(t));
                    return;
                }
                case kTstore: {
                    pop(f);
                    TagSet value = pop(f);
                    store(transient_, transient_journal_, {f.node->storage_address, e.peek(0)}, value);
                    return;
                }
                case op::JUMPI: {
                    pop(f);
                    sink(i, code, OperandRole::condition, pop(f), e.peek(1));
                    return;
                }
                case op::RETURN:
                case op::REVERT: {
                    const auto off = u64(0), len = u64(1);
                    pop(f);
                    pop(f);
                    if (code == op::RETURN) {
                        sink(i, code, OperandRole::data, f.memory.collect(off, len), first_word(f.node->return_data));
                    }
                    f.output = RangeTagMap{};
                    f.output.copy_from(f.memory, off, len, 0);
                    return;
                }
                case op::CALL:
                case op::CALLCODE:
                case op::DELEGATECALL:
                case op::STATICCALL:
                case op::CREATE:
                case op::CREATE2: call(i, e, f, descends); return;
                default: break;
            }

            // Pure stack functions: the result carries the union of the operand tags.
            TagSet t;
            for (unsigned k = 0; k < info.pops; ++k) t |= pop(f);
            if (!t.empty() && reads_unmodeled_state(code)) t.mark_unknown();
            for (unsigned k = 0; k < info.pushes; ++k) push(f, t);
        }

        // The tracer knew an opcode the table does not: realign to the next recorded stack and widen.
        void resync_unknown(std::size_t i, Frame& f) {
            const auto& entries = trace_.entries;
            if (i + 1 >= entries.size() || entries[i + 1].depth != entries[i].depth) return;
            const std::size_t target = entries[i + 1].stack.size();
            TagSet all;
            for (const auto& t : f.stack) all |= t;
            if (!all.empty()) all.mark_unknown();
            const std::size_t keep = target == 0 ? 0 : std::min(f.stack.size(), target - 1);
            f.stack.resize(keep);
            while (f.stack.size() < target) push(f, all);
        }

        void call(std::size_t i, const StructLogEntry& e, Frame& f, bool descends) {
            const std::uint8_t code = e.opcode;
            CallFrameArgs args;
            try {
                args = extract_call_frame_args(e);
            } catch (const MalformedTraceError& err) {
                throw ConsistencyError(i, err.what());
            }
            const bool create = code == op::CREATE || code == op::CREATE2;
            const bool has_value = code == op::CALL || code == op::CALLCODE || create;

            // Operand tags by position from the top.
            const auto& info = opcode_info(code);
            std::vector<TagSet> operands(info.pops);
            for (unsigned k = 0; k < info.pops; ++k) operands[k] = pop(f);
            if (!create) {
                sink(i, code, OperandRole::target_address, operands[1], e.peek(1));
            }
            if (has_value) {
                const std::size_t pos = create ? 0 : 2;
                sink(i, code, OperandRole::value, operands[pos], e.peek(pos));
            }

            if (f.next_child >= f.node->children.size()) {
                throw ConsistencyError(i, "call instruction without a matching frame in the invocation tree");
            }
            const InvocationNode& child = f.node->children[f.next_child++];
            PendingCall pending{args.out_offset, args.out_size, create, ids_.at(&child)};
            if (child.executed != descends) {
                throw ConsistencyError(i, "invocation tree and trace disagree on whether the callee ran");
            }
            if (!child.executed) {
                finish_call(f, pending, nullptr, i);
                return;
            }
            f.pending = pending;
            RangeTagMap calldata;
            if (!create) calldata.copy_from(f.memory, args.in_offset, args.in_size, 0);
            TagSet callvalue;
            if (has_value) {
                callvalue = operands[create ? 0 : 2];
            } else if (code == op::DELEGATECALL) {
                callvalue = f.callvalue;
            }
            enter(child, std::move(calldata), std::move(callvalue));
        }

        const RawTrace& trace_;
        const InvocationNode& tree_;
        ShadowResult result_;
        std::map<const InvocationNode*, std::size_t> ids_;
        std::map<std::uint8_t, TagSet> env_;
        std::map<StorageKey, TagSet> storage_sources_;
        std::map<std::size_t, TagSet> call_return_;
        std::vector<Frame> frames_;
        std::vector<JournalEntry> journal_;
        std::map<StorageKey, TagSet> transient_;
        std::vector<JournalEntry> transient_journal_;
    };

}  // namespace

ShadowResult shadow_execute(const TransactionMeta& /*meta*/, const RawTrace& trace, const InvocationNode& tree,
                            std::span<const TaintSource> sources) {
    return Shadow(trace, tree, sources).run();
}

bool SinkFilter::matches(const FlowFact& fact) const noexcept {
    if (opcode && fact.sink.opcode != *opcode) return false;
    if (role && fact.sink.role != *role) return false;
    if (range && (fact.sink.instruction_index < range->first || fact.sink.instruction_index > range->second)) {
        return false;
    }
    return true;
}

std::vector<FlowFact> query_flows(std::span<const FlowFact> facts, const SinkFilter& filter) {
    std::vector<FlowFact> out;
    std::copy_if(facts.begin(), facts.end(), std::back_inserter(out),
                 [&](const FlowFact& f) { return filter.matches(f); });
    return out;
}

std::string flow_fact_to_json_line(const FlowFact& fact) {
    const nlohmann::ordered_json j = {{"source", to_string(fact.source)},
                                      {"sink_opcode", std::string(opcode_info(fact.sink.opcode).name)},
                                      {"operand_role", std::string(to_string(fact.sink.role))},
                                      {"instruction_index", fact.sink.instruction_index},
                                      {"value_hex", word_to_hex(fact.value)}};
    return j.dump();
}

void write_flow_facts_jsonl(std::ostream& out, std::span<const FlowFact> facts) {
    for (const auto& f : facts) out << flow_fact_to_json_line(f) << '\n';
}

}  // namespace txtrace
