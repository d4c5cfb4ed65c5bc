// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#include <txtrace/invariants/templates.hpp>

#include <algorithm>
#include <cctype>
#include <functional>

#include <boost/multiprecision/cpp_int.hpp>

#include <txtrace/common/hex.hpp>
#include <txtrace/common/opcodes.hpp>
#include <txtrace/decoder/abi.hpp>
#include <txtrace/decoder/storage_decoder.hpp>

namespace txtrace {

std::string_view to_string(Category c) noexcept {
    switch (c) {
        case Category::access_control: return "access_control";
        case Category::time_lock: return "time_lock";
        case Category::gas_control: return "gas_control";
        case Category::oracle_slippage: return "oracle_slippage";
        case Category::reentrancy: return "reentrancy";
        case Category::money_flow: return "money_flow";
        case Category::special_storage: return "special_storage";
        case Category::data_flow: return "data_flow";
    }
    return "?";
}

std::string_view to_string(Tier t) noexcept {
    switch (t) {
        case Tier::tree_only: return "tree_only";
        case Tier::storage: return "storage";
        case Tier::dataflow: return "dataflow";
    }
    return "?";
}

std::string_view to_string(InferStatus s) noexcept {
    switch (s) {
        case InferStatus::inferred: return "inferred";
        case InferStatus::no_observations: return "no observations";
        case InferStatus::not_applicable: return "not applicable";
        case InferStatus::violated_in_training: return "violated in training";
        case InferStatus::set_too_large: return "set too large";
    }
    return "?";
}

const std::vector<InvariantTemplate>& template_catalog() {
    using C = Category;
    using T = Tier;
    using K = InferenceKind;
    using V = ValueKind;
    static const std::vector<InvariantTemplate> catalog = {
        {"EOASenderOnly", C::access_control, T::tree_only, K::lock, V::address,
         "none: the caller never executes code in the transaction"},
        {"AllowedSenderSet", C::access_control, T::tree_only, K::set, V::address, "a set of caller addresses"},
        {"AllowedOriginSet", C::access_control, T::tree_only, K::set, V::address, "a set of origin addresses"},
        {"OriginEqualsSender", C::access_control, T::tree_only, K::lock, V::address, "none: caller equals origin"},
        {"SameBlockReentryLock", C::time_lock, T::tree_only, K::lock, V::number,
         "none: at most one invocation per (block, origin)"},
        {"BlockDelayLowerBound", C::time_lock, T::tree_only, K::lower_bound, V::number,
         "one unsigned lower bound on blocks since the contract's previous invocation"},
        {"GasStartUpperBound", C::gas_control, T::tree_only, K::upper_bound, V::number,
         "one unsigned upper bound on gas at entry"},
        {"GasConsumedUpperBound", C::gas_control, T::tree_only, K::upper_bound, V::number,
         "one unsigned upper bound on gas consumed by the frame"},
        {"PriceRatioRange", C::oracle_slippage, T::tree_only, K::range, V::number,
         "an interval for the 1e18-scaled ratio of swap amounts"},
        {"SwapSlippageBound", C::oracle_slippage, T::tree_only, K::upper_bound, V::number,
         "one upper bound on the 1e18-scaled relative ratio change between consecutive swaps"},
        {"SelfReentrancyLock", C::reentrancy, T::tree_only, K::lock, V::number,
         "none: the entry point never nests inside itself"},
        {"CrossContractReentrancyLock", C::reentrancy, T::tree_only, K::lock, V::number,
         "none: no other entry point of the contract on the same call path"},
        {"TransferInUpperBound", C::money_flow, T::tree_only, K::upper_bound, V::number,
         "one upper bound on ERC20 amounts received per invocation"},
        {"TransferOutUpperBound", C::money_flow, T::tree_only, K::upper_bound, V::number,
         "one upper bound on ERC20 amounts sent per invocation"},
        {"EtherInUpperBound", C::money_flow, T::tree_only, K::upper_bound, V::number,
         "one upper bound on wei received per invocation"},
        {"EtherOutUpperBound", C::money_flow, T::tree_only, K::upper_bound, V::number,
         "one upper bound on wei sent per invocation"},
        {"MonitoredSlotUpperBound", C::special_storage, T::storage, K::upper_bound, V::number,
         "an upper bound per decoded slot path"},
        {"MonitoredSlotLowerBound", C::special_storage, T::storage, K::lower_bound, V::number,
         "a lower bound per decoded slot path"},
        {"OwnerSlotUnchanged", C::special_storage, T::storage, K::lock, V::number,
         "none: owner and admin variables are never overwritten with a new value"},
        {"TaintedSinkUpperBound", C::data_flow, T::dataflow, K::upper_bound, V::number,
         "an upper bound per sink kind on calldata-derived operands"},
        {"TaintedSinkLowerBound", C::data_flow, T::dataflow, K::lower_bound, V::number,
         "a lower bound per sink kind on calldata-derived operands"},
        {"CalldataToDelegateTargetForbidden", C::data_flow, T::dataflow, K::lock, V::address,
         "none: calldata never selects a delegatecall target"},
        {"CalldataToCallValueBound", C::data_flow, T::dataflow, K::upper_bound, V::number,
         "one upper bound on calldata-derived wei amounts"},
    };
    return catalog;
}

const InvariantTemplate* find_template(std::string_view id) noexcept {
    for (const auto& t : template_catalog()) {
        if (t.id == id) return &t;
    }
    return nullptr;
}

const InvariantTemplate& template_by_id(std::string_view id) {
    if (const auto* t = find_template(id)) return *t;
    throw UsageError("unknown invariant template '" + std::string(id) + "'");
}

std::string to_string(const Target& t) {
    return to_string(t.address) + ":" + (t.selector ? to_string(*t.selector) : std::string("-"));
}

Target target_of(const InvocationNode& node) { return {node.code_address, node.selector}; }

namespace {

    constexpr std::string_view kValueKey = "value";

    struct TreeIndex {
        std::vector<const InvocationNode*> nodes;
        std::vector<std::size_t> parent;  // root points at itself
        std::vector<std::size_t> subtree_end;

        explicit TreeIndex(const InvocationNode& root) { add(root, 0); }

        std::size_t add(const InvocationNode& n, std::size_t parent_id) {
            const std::size_t id = nodes.size();
            nodes.push_back(&n);
            parent.push_back(id == 0 ? 0 : parent_id);
            subtree_end.push_back(0);
            for (const auto& c : n.children) add(c, id);
            subtree_end[id] = nodes.size();
            return id;
        }

        // No reverting frame on the path from `top` down to `id`, both included.
        [[nodiscard]] bool effective(std::size_t id, std::size_t top) const {
            for (std::size_t k = id;; k = parent[k]) {
                if (is_reverting(nodes[k]->exit_reason)) return false;
                if (k == top || k == 0) return true;
            }
        }
    };

    Word saturating_add(const Word& a, const Word& b) {
        const Word sum = a + b;
        return sum < a ? ~Word(0) : sum;
    }

    Word scaled_ratio(const Word& num, const Word& den) {
        using boost::multiprecision::uint512_t;
        const uint512_t q = uint512_t(num) * uint512_t(1'000'000'000'000'000'000ULL) / uint512_t(den);
        const uint512_t cap = uint512_t(~Word(0));
        return q > cap ? ~Word(0) : Word(q);
    }

    bool contains_ci(std::string_view hay, std::string_view needle) {
        auto it = std::search(hay.begin(), hay.end(), needle.begin(), needle.end(), [](char a, char b) {
            return std::tolower(static_cast<unsigned char>(a)) == std::tolower(static_cast<unsigned char>(b));
        });
        return it != hay.end();
    }

    abi::Param param(std::string name, const char* type) { return {std::move(name), abi::parse_type(type)}; }

    const std::vector<abi::Function>& erc20_functions() {
        static const std::vector<abi::Function> fns = {
            abi::make_function("transfer", {param("to", "address"), param("amount", "uint256")}),
            abi::make_function("transferFrom",
                               {param("from", "address"), param("to", "address"), param("amount", "uint256")}),
        };
        return fns;
    }

    // Pair and router swap entry points, recognised without a configured ABI.
    const std::vector<abi::Function>& swap_functions() {
        static const std::vector<abi::Function> fns = {
            abi::make_function("swap", {param("amount0Out", "uint256"), param("amount1Out", "uint256"),
                                        param("to", "address"), param("data", "bytes")}),
            abi::make_function("swapExactTokensForTokens",
                               {param("amountIn", "uint256"), param("amountOutMin", "uint256"),
                                param("path", "address[]"), param("to", "address"), param("deadline", "uint256")}),
            abi::make_function("swapTokensForExactTokens",
                               {param("amountOut", "uint256"), param("amountInMax", "uint256"),
                                param("path", "address[]"), param("to", "address"), param("deadline", "uint256")}),
        };
        return fns;
    }

    bool has_args(const DecodedCall& c) {
        return c.function && (c.status == DecodeStatus::full || c.status == DecodeStatus::args_only);
    }

    std::optional<std::pair<Word, Word>> swap_amounts(const DecodedCall& c) {
        if (!has_args(c) || !contains_ci(c.function->name, "swap")) return std::nullopt;
        std::vector<Word> amounts;
        for (const auto& arg : c.args) {
            if (arg.type.kind == abi::Type::Kind::uint) amounts.push_back(arg.value.word());
            if (amounts.size() == 2) return std::pair{amounts[0], amounts[1]};
        }
        return std::nullopt;
    }

    struct Collector {
        const InvariantTemplate& t;
        const TxArtifacts& a;
        TreeIndex index;

        Collector(const InvariantTemplate& tmpl, const TxArtifacts& art) : t(tmpl), a(art), index(art.tree) {}

        const InvocationNode& node(std::size_t id) const { return *index.nodes[id]; }

        DecodedCall decoded(std::size_t id, std::span<const abi::Function> builtin) const {
            if (id < a.calls.size() && has_args(a.calls[id])) return a.calls[id];
            return decode_call(node(id), builtin);
        }

        bool executes_code(const Address& addr) const {
            return std::any_of(index.nodes.begin(), index.nodes.end(),
                               [&](const InvocationNode* n) { return n->executed && n->storage_address == addr; });
        }

        std::size_t invocations_of(const Target& target) const {
            return static_cast<std::size_t>(std::count_if(index.nodes.begin(), index.nodes.end(), [&](auto* n) {
                return n->executed && target_of(*n) == target;
            }));
        }

        // Ancestors and descendants of `id` running the same code with (or without) the same selector.
        Word path_repeats(std::size_t id, bool same_selector) const {
            const auto& me = node(id);
            auto matches = [&](const InvocationNode& o) {
                return o.executed && o.code_address == me.code_address && (o.selector == me.selector) == same_selector;
            };
            std::size_t count = 0;
            for (std::size_t k = id; k != 0;) {
                k = index.parent[k];
                if (matches(node(k))) ++count;
            }
            for (std::size_t d = id + 1; d < index.subtree_end[id]; ++d) {
                if (matches(node(d))) ++count;
            }
            return count;
        }

        std::vector<std::pair<Word, Word>> swaps_under(std::size_t id) const {
            std::vector<std::pair<Word, Word>> out;
            for (std::size_t d = id; d < index.subtree_end[id]; ++d) {
                if (!index.effective(d, id)) continue;
                if (auto s = swap_amounts(decoded(d, swap_functions()))) out.push_back(*s);
            }
            return out;
        }

        std::pair<Word, Word> token_flows(std::size_t id) const {
            const Address self = node(id).storage_address;
            Word in = 0, out = 0;
            for (std::size_t d = id + 1; d < index.subtree_end[id]; ++d) {
                const auto& n = node(d);
                if (n.call_kind != CallKind::call || !index.effective(d, id)) continue;
                const auto c = decoded(d, erc20_functions());
                if (!has_args(c) || c.args.size() < 2) continue;
                const auto amount = c.args.back().value.word();
                if (c.function->name == "transfer" && c.args.size() == 2) {
                    if (Address::from_word(c.args[0].value.word()) == self) in = saturating_add(in, amount);
                    if (n.caller == self) out = saturating_add(out, amount);
                } else if (c.function->name == "transferFrom" && c.args.size() == 3) {
                    if (Address::from_word(c.args[1].value.word()) == self) in = saturating_add(in, amount);
                    if (Address::from_word(c.args[0].value.word()) == self) out = saturating_add(out, amount);
                }
            }
            return {in, out};
        }

        std::pair<Word, Word> ether_flows(std::size_t id) const {
            const auto& me = node(id);
            Word in = index.effective(id, id) ? me.value : Word(0);
            Word out = 0;
            for (std::size_t d = id + 1; d < index.subtree_end[id]; ++d) {
                const auto& n = node(d);
                if (n.value == 0 || !index.effective(d, id)) continue;
                if (n.call_kind != CallKind::call && !is_create(n.call_kind)) continue;
                if (n.storage_address == me.storage_address) in = saturating_add(in, n.value);
                if (node(index.parent[d]).storage_address == me.storage_address) out = saturating_add(out, n.value);
            }
            return {in, out};
        }

        // Storage events of the invocation and of nested frames writing the same storage, in trace order.
        std::vector<const StorageAccessEvent*> storage_scope(std::size_t id) const {
            std::vector<const StorageAccessEvent*> out;
            const Address self = node(id).storage_address;
            for (std::size_t d = id; d < index.subtree_end[id]; ++d) {
                if (node(d).storage_address != self) continue;
                for (const auto& ev : node(d).storage_events) out.push_back(&ev);
            }
            std::sort(out.begin(), out.end(),
                      [](auto* x, auto* y) { return x->instruction_index < y->instruction_index; });
            return out;
        }

        static bool owner_like(const DecodedSlotPath& p) {
            auto named = [](std::string_view s) { return contains_ci(s, "owner") || contains_ci(s, "admin"); };
            if (p.variable_name && named(*p.variable_name)) return true;
            return std::any_of(p.packed_variables.begin(), p.packed_variables.end(), named);
        }

        std::vector<const FlowFact*> calldata_facts(std::size_t id) const {
            std::vector<const FlowFact*> out;
            const auto& me = node(id);
            for (const auto& f : *a.flows) {
                if (f.source.kind != TaintSource::Kind::calldata_range || f.source.frame != 0) continue;
                if (f.sink.instruction_index < me.entry_index || f.sink.instruction_index > me.exit_index) continue;
                out.push_back(&f);
            }
            return out;
        }

        static std::string sink_key(const FlowFact& f) {
            return std::string(opcode_info(f.sink.opcode).name) + "." + std::string(to_string(f.sink.role));
        }

        // Samples for one invocation; nullopt when the template does not apply to it.
        std::optional<std::vector<Sample>> samples(std::size_t id, std::size_t contract_ordinal) const {
            const auto& n = node(id);
            const std::string key(kValueKey);
            auto one = [&](Word v, bool ok = true) { return std::vector<Sample>{{key, std::move(v), ok}}; };
            const std::string_view tid = t.id;

            if (tid == "EOASenderOnly") return one(n.caller.to_word(), !executes_code(n.caller));
            if (tid == "AllowedSenderSet") return one(n.caller.to_word());
            if (tid == "AllowedOriginSet") return one(a.meta.origin.to_word());
            if (tid == "OriginEqualsSender") return one(n.caller.to_word(), n.caller == a.meta.origin);
            if (tid == "SameBlockReentryLock") {
                const auto count = invocations_of(target_of(n));
                return one(count, count <= 1);
            }
            if (tid == "BlockDelayLowerBound") {
                if (contract_ordinal > 0) return one(0);
                auto it = a.last_seen_block.find(n.code_address);
                if (it == a.last_seen_block.end()) return std::vector<Sample>{};
                const auto b = a.meta.block_number;
                return one(b >= it->second ? b - it->second : 0);
            }
            if (tid == "GasStartUpperBound") return one(n.gas_at_entry);
            if (tid == "GasConsumedUpperBound") return one(id < a.frame_gas_used.size() ? a.frame_gas_used[id] : 0);
            if (tid == "PriceRatioRange" || tid == "SwapSlippageBound") {
                const auto swaps = swaps_under(id);
                if (swaps.empty()) return std::nullopt;
                std::vector<Word> ratios;
                for (const auto& [x, y] : swaps) {
                    if (y != 0) ratios.push_back(scaled_ratio(x, y));
                }
                std::vector<Sample> out;
                if (tid == "PriceRatioRange") {
                    for (const auto& r : ratios) out.push_back({key, r, true});
                    return out;
                }
                out.push_back({key, 0, true});
                for (std::size_t k = 1; k < ratios.size(); ++k) {
                    const auto& prev = ratios[k - 1];
                    const auto& cur = ratios[k];
                    if (prev == 0) continue;
                    out.push_back({key, scaled_ratio(cur > prev ? cur - prev : prev - cur, prev), true});
                }
                return out;
            }
            if (tid == "SelfReentrancyLock") {
                const auto c = path_repeats(id, true);
                return one(c, c == 0);
            }
            if (tid == "CrossContractReentrancyLock") {
                const auto c = path_repeats(id, false);
                return one(c, c == 0);
            }
            if (tid == "TransferInUpperBound") return one(token_flows(id).first);
            if (tid == "TransferOutUpperBound") return one(token_flows(id).second);
            if (tid == "EtherInUpperBound") return one(ether_flows(id).first);
            if (tid == "EtherOutUpperBound") return one(ether_flows(id).second);
            if (tid == "MonitoredSlotUpperBound" || tid == "MonitoredSlotLowerBound") {
                std::vector<Sample> out;
                for (const auto* ev : storage_scope(id)) {
                    if (ev->kind != StorageAccessKind::store || ev->rolled_back || !ev->decoded) continue;
                    out.push_back({format_slot_path(*ev->decoded, true), ev->value, true});
                }
                return out;
            }
            if (tid == "OwnerSlotUnchanged") {
                std::map<Word, Word> known;
                for (const auto* ev : storage_scope(id)) {
                    if (ev->kind == StorageAccessKind::store && !ev->rolled_back && ev->decoded &&
                        owner_like(*ev->decoded)) {
                        auto it = known.find(ev->raw_slot);
                        if (it == known.end() || it->second != ev->value) return one(ev->value, false);
                    }
                    if (!ev->rolled_back) known[ev->raw_slot] = ev->value;
                }
                return one(0, true);
            }
            if (tid == "TaintedSinkUpperBound" || tid == "TaintedSinkLowerBound") {
                std::vector<Sample> out;
                for (const auto* f : calldata_facts(id)) out.push_back({sink_key(*f), f->value, true});
                return out;
            }
            if (tid == "CalldataToDelegateTargetForbidden") {
                for (const auto* f : calldata_facts(id)) {
                    if (f->sink.opcode == op::DELEGATECALL && f->sink.role == OperandRole::target_address) {
                        return one(f->value, false);
                    }
                }
                return one(0, true);
            }
            if (tid == "CalldataToCallValueBound") {
                std::vector<Sample> out;
                for (const auto* f : calldata_facts(id)) {
                    if (f->sink.opcode == op::CALL && f->sink.role == OperandRole::value) {
                        out.push_back({key, f->value, true});
                    }
                }
                return out;
            }
            throw UsageError("template '" + std::string(tid) + "' has no collector");
        }
    };

    void require_tier(const InvariantTemplate& t, const TxArtifacts& a) {
        if (t.tier == Tier::storage && !a.storage_decoded) {
            throw ConfigError(std::string(t.id) + " needs decoded storage events, which were not produced");
        }
        if (t.tier == Tier::dataflow && !a.flows) {
            throw ConfigError(std::string(t.id) + " needs taint flow facts, which were not produced");
        }
    }

}  // namespace

std::vector<Observation> collect_observations(const InvariantTemplate& t, const TxArtifacts& a,
                                              std::optional<Address> contract) {
    require_tier(t, a);
    std::vector<Observation> out;
    Collector c(t, a);
    std::map<Address, std::size_t> ordinal;
    for (std::size_t id = 0; id < c.index.nodes.size(); ++id) {
        const auto& n = c.node(id);
        if (!n.executed) continue;
        const std::size_t k = ordinal[n.code_address]++;
        if (contract && n.code_address != *contract) continue;
        auto s = c.samples(id, k);
        if (!s) continue;
        out.push_back({a.meta.tx_hash, target_of(n), std::move(*s)});
    }
    return out;
}

InferResult infer(const InvariantTemplate& t, std::span<const Observation> observations, const InferOptions& options) {
    InferResult res;
    if (observations.empty()) {
        res.status = t.category == Category::oracle_slippage ? InferStatus::not_applicable : InferStatus::no_observations;
        return res;
    }
    const Target target = observations.front().target;
    ConcreteInvariant inv{std::string(t.id), target, {}, observations.size()};
    std::size_t samples = 0;
    for (const auto& o : observations) {
        if (o.target != target) throw UsageError("infer: observations for more than one target");
        for (const auto& s : o.samples) {
            ++samples;
            if (t.kind == InferenceKind::lock) {
                if (!s.ok) {
                    res.status = InferStatus::violated_in_training;
                    return res;
                }
                continue;
            }
            auto& p = inv.parameters[s.key];
            switch (t.kind) {
                case InferenceKind::upper_bound: p.max = p.max ? std::max(*p.max, s.value) : s.value; break;
                case InferenceKind::lower_bound: p.min = p.min ? std::min(*p.min, s.value) : s.value; break;
                case InferenceKind::range:
                    p.max = p.max ? std::max(*p.max, s.value) : s.value;
                    p.min = p.min ? std::min(*p.min, s.value) : s.value;
                    break;
                case InferenceKind::set: {
                    auto it = std::lower_bound(p.members.begin(), p.members.end(), s.value);
                    if (it == p.members.end() || *it != s.value) p.members.insert(it, s.value);
                    if (p.members.size() > options.max_set_size) {
                        res.status = InferStatus::set_too_large;
                        return res;
                    }
                    break;
                }
                case InferenceKind::lock: break;
            }
        }
    }
    if (samples == 0) {
        res.status = InferStatus::no_observations;
        return res;
    }
    res.invariant = std::move(inv);
    res.status = InferStatus::inferred;
    return res;
}

bool satisfies(const InvariantTemplate& t, const ConcreteInvariant& inv, const Sample& s) {
    if (t.kind == InferenceKind::lock) return s.ok;
    auto it = inv.parameters.find(s.key);
    if (it == inv.parameters.end()) return true;
    const auto& p = it->second;
    switch (t.kind) {
        case InferenceKind::upper_bound: return !p.max || s.value <= *p.max;
        case InferenceKind::lower_bound: return !p.min || s.value >= *p.min;
        case InferenceKind::range: return (!p.min || s.value >= *p.min) && (!p.max || s.value <= *p.max);
        case InferenceKind::set: return std::binary_search(p.members.begin(), p.members.end(), s.value);
        case InferenceKind::lock: return s.ok;
    }
    return true;
}

GuardVerdict check(const ConcreteInvariant& inv, const TxArtifacts& a) {
    const auto& t = template_by_id(inv.template_id);
    GuardVerdict v{inv.template_id, inv.target, a.meta.tx_hash, Outcome::pass, std::nullopt, {}};
    for (const auto& o : collect_observations(t, a, inv.target.address)) {
        if (o.target != inv.target) continue;
        for (const auto& s : o.samples) {
            if (!satisfies(t, inv, s)) {
                v.outcome = Outcome::violate;
                v.witness = s.value;
                v.witness_key = s.key;
                return v;
            }
        }
    }
    return v;
}

std::size_t train_size(std::size_t n, double train_fraction) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw UsageError("train fraction must lie strictly between 0 and 1");
    }
    if (n == 0) throw UsageError("cannot split an empty corpus");
    const auto k = static_cast<std::size_t>(std::ceil(static_cast<double>(n) * train_fraction - 1e-9));
    return std::min(k, n);
}

}  // namespace txtrace
