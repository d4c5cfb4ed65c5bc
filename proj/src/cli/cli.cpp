// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#include <txtrace/cli/cli.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include <txtrace/common/error.hpp>
#include <txtrace/common/hex.hpp>
#include <txtrace/common/opcodes.hpp>
#include <txtrace/dataflow/shadow.hpp>
#include <txtrace/decoder/call_decoder.hpp>
#include <txtrace/decoder/contract_config.hpp>
#include <txtrace/decoder/storage_decoder.hpp>
#include <txtrace/ingestion/fixture.hpp>
#include <txtrace/ingestion/rpc_client.hpp>
#include <txtrace/invariants/store.hpp>
#include <txtrace/parser/parser.hpp>
#include <txtrace/parser/render.hpp>
#include <txtrace/pipeline/pipeline.hpp>
#include <txtrace/translator/facts.hpp>

namespace fs = std::filesystem;

namespace txtrace::cli {

namespace {

std::optional<std::string> env(const char* name) {
    const char* v = std::getenv(name);
    if (v == nullptr || *v == '\0') return std::nullopt;
    return std::string(v);
}

bool looks_like_hash(std::string_view s) {
    if (s.size() != 66 || s.substr(0, 2) != "0x") return false;
    return s.substr(2).find_first_not_of("0123456789abcdefABCDEF") == std::string_view::npos;
}

//! Resolves tx identifiers to traces. Fixture files are read directly; hashes go through the
//! cache and, when an endpoint is configured, the network.
class TxLoader {
  public:
    explicit TxLoader(const RunConfig& cfg) : cfg_(cfg) {}

    TxInput load(const std::string& item) {
        if (!looks_like_hash(item)) {
            if (!fs::exists(item)) throw std::runtime_error("no such fixture: " + item);
            auto fx = load_fixture(item);
            return {item, std::move(fx.meta), std::move(fx.trace)};
        }
        auto& f = fetcher();
        const auto hash = hash_from_hex(item);
        TxInput in{item, f.fetch_receipt(hash), f.fetch_trace(hash)};
        return in;
    }

  private:
    TraceFetcher& fetcher() {
        if (!fetcher_) {
            const auto endpoint = cfg_.endpoint ? cfg_.endpoint : env(kEnvEndpoint);
            std::optional<fs::path> cache_dir = cfg_.cache_dir;
            if (!cache_dir) {
                if (auto e = env(kEnvCacheDir)) cache_dir = *e;
            }
            std::optional<RpcClient> client;
            if (endpoint) client.emplace(*endpoint, env(kEnvToken));
            std::optional<Cache> cache;
            if (cache_dir) cache.emplace(*cache_dir);
            if (!client && !cache) {
                throw ConfigError("transaction hashes need --endpoint or --cache-dir (or " + std::string(kEnvEndpoint) +
                                  ")");
            }
            fetcher_.emplace(std::move(client), std::move(cache), TracerOptions{cfg_.memory_capture});
        }
        return *fetcher_;
    }

    const RunConfig& cfg_;
    std::optional<TraceFetcher> fetcher_;
};

std::optional<ContractConfig> load_config(const RunConfig& cfg) {
    if (!cfg.config_dir) return std::nullopt;
    return ContractConfig::load(*cfg.config_dir);
}

//! Writes to --out when given, otherwise to `out`.
void emit(const RunConfig& cfg, std::ostream& out, const std::string& text) {
    if (!cfg.out) {
        out << text;
        return;
    }
    std::ofstream f(*cfg.out, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + cfg.out->string());
    f << text;
    if (!f.flush()) throw std::runtime_error("write failed: " + cfg.out->string());
}

std::vector<const InvariantTemplate*> selected_templates(const RunConfig& cfg) {
    std::vector<const InvariantTemplate*> out;
    if (cfg.template_filter) {
        for (const auto& id : *cfg.template_filter) {
            if (find_template(id) == nullptr) throw UsageError("unknown template '" + id + "'");
        }
    }
    for (const auto& t : template_catalog()) {
        if (!cfg.template_filter || cfg.template_filter->count(std::string(t.id))) out.push_back(&t);
    }
    return out;
}

struct Corpus {
    std::vector<TxArtifacts> artifacts;
    std::size_t requested{0};
    std::size_t failed{0};

    //! Batch commands tolerate a few unreadable transactions, not more than one in ten.
    [[nodiscard]] bool too_many_failures() const { return failed * 10 > requested; }
};

Corpus load_corpus(const RunConfig& cfg, const fs::path& list, const ContractConfig* config,
                   const AnalysisOptions& options, std::ostream& err) {
    const auto items = read_tx_list(list);
    if (items.empty()) throw UsageError("transaction list is empty: " + list.string());

    Corpus c;
    c.requested = items.size();
    TxLoader loader(cfg);
    std::vector<TxInput> inputs;
    for (const auto& item : items) {
        try {
            inputs.push_back(loader.load(item));
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            err << "skipping " << item << ": " << e.what() << "\n";
            ++c.failed;
        }
    }
    auto results = analyze_batch_parallel(inputs, config, options, cfg.jobs);
    for (const auto& r : results) {
        if (!r.artifacts) {
            err << "skipping " << r.error << "\n";
            ++c.failed;
        }
    }
    c.artifacts = collect_successes(results);
    return c;
}

AnalysisOptions options_for(const std::vector<const InvariantTemplate*>& templates) {
    AnalysisOptions o;
    o.taint = std::any_of(templates.begin(), templates.end(), [](auto* t) { return t->tier == Tier::dataflow; });
    return o;
}

std::string describe_parameters(const InvariantTemplate& t, const ConcreteInvariant& inv) {
    std::string s;
    for (const auto& [key, p] : inv.parameters) {
        if (!s.empty()) s += " ";
        if (p.min && p.max) {
            s += fmt::format("{} in [{}, {}]", key, format_sample_value(t, *p.min), format_sample_value(t, *p.max));
        } else if (p.max) {
            s += fmt::format("{} <= {}", key, format_sample_value(t, *p.max));
        } else if (p.min) {
            s += fmt::format("{} >= {}", key, format_sample_value(t, *p.min));
        } else if (!p.members.empty()) {
            s += key + " in {";
            for (std::size_t i = 0; i < p.members.size(); ++i) {
                if (i) s += ", ";
                s += format_sample_value(t, p.members[i]);
            }
            s += "}";
        }
    }
    return s.empty() ? "holds" : s;
}

// --- subcommands ---------------------------------------------------------------------------

int cmd_parse(const RunConfig& cfg, const std::string& tx, std::ostream& out) {
    TxLoader loader(cfg);
    const auto in = loader.load(tx);
    auto tree = build_invocation_tree(in.meta, in.trace);
    RenderOptions ro;
    std::optional<ContractConfig> config;
    if (cfg.decode) {
        config = load_config(cfg);
        decode_tree_storage(tree, config ? config->layouts() : LayoutLookup{});
        if (config) {
            ro.function_label = [&](const InvocationNode& n) -> std::optional<std::string> {
                const auto call = decode_call(n, config->abi_for(n.code_address));
                if (!call.function) return std::nullopt;
                return describe_call(call);
            };
        }
        ro.storage_label = [](const StorageAccessEvent& ev) {
            const char* kind = ev.kind == StorageAccessKind::store ? "SSTORE" : "SLOAD";
            const auto slot = ev.decoded ? format_slot_path(*ev.decoded) : word_to_hex(ev.raw_slot);
            return fmt::format("{} {} = {}{}", kind, slot, word_to_hex(ev.value), ev.rolled_back ? " (rolled back)" : "");
        };
    }
    emit(cfg, out, render_tree(tree, ro));
    return kExitOk;
}

int cmd_infer(const RunConfig& cfg, const std::string& contract_text, const fs::path& list, std::ostream& out,
              std::ostream& err) {
    Address contract;
    try {
        contract = address_from_hex(contract_text);
    } catch (const std::invalid_argument& e) {
        throw UsageError("bad contract address '" + contract_text + "': " + e.what());
    }
    const auto templates = selected_templates(cfg);
    const auto config = load_config(cfg);
    auto corpus = load_corpus(cfg, list, config ? &*config : nullptr, options_for(templates), err);
    if (corpus.artifacts.empty()) {
        err << "no transaction could be analyzed\n";
        return kExitFailure;
    }
    const auto [train, test] = split_corpus<TxArtifacts>(corpus.artifacts, cfg.train_fraction);
    out << fmt::format("{} transactions: {} training, {} held out\n", corpus.artifacts.size(), train.size(),
                       test.size());

    std::vector<ConcreteInvariant> store;
    for (const auto* t : templates) {
        std::map<Target, std::vector<Observation>> by_target;
        for (const auto& a : train) {
            for (auto& o : collect_observations(*t, a, contract)) by_target[o.target].push_back(std::move(o));
        }
        if (by_target.empty()) {
            out << fmt::format("{:<36} {}\n", t->id, to_string(infer(*t, {}).status));
            continue;
        }
        for (const auto& [target, obs] : by_target) {
            const auto r = infer(*t, obs);
            if (r.invariant) {
                out << fmt::format("{:<36} {} {}\n", t->id, to_string(target), describe_parameters(*t, *r.invariant));
                store.push_back(*r.invariant);
            } else {
                out << fmt::format("{:<36} {} {}\n", t->id, to_string(target), to_string(r.status));
            }
        }
    }

    const fs::path path = cfg.out.value_or("invariants.json");
    save_store(path, store);
    out << fmt::format("{} invariants written to {}\n", store.size(), path.string());
    if (corpus.too_many_failures()) {
        err << fmt::format("{} of {} transactions failed\n", corpus.failed, corpus.requested);
        return kExitFailure;
    }
    return kExitOk;
}

int cmd_check(const RunConfig& cfg, const fs::path& store_path, const fs::path& list, std::ostream& out,
              std::ostream& err) {
    const auto invariants = load_store(store_path);
    std::vector<const InvariantTemplate*> templates;
    for (const auto& inv : invariants) templates.push_back(&template_by_id(inv.template_id));
    const auto config = load_config(cfg);
    auto corpus = load_corpus(cfg, list, config ? &*config : nullptr, options_for(templates), err);
    if (corpus.artifacts.empty()) {
        err << "no transaction could be analyzed\n";
        return kExitFailure;
    }
    const auto [train, test] = split_corpus<TxArtifacts>(corpus.artifacts, cfg.train_fraction);
    auto report = check_corpus(invariants, train, test);
    if (!invariants.empty() &&
        std::all_of(invariants.begin(), invariants.end(),
                    [&](const ConcreteInvariant& i) { return i.target.address == invariants[0].target.address; })) {
        report.contract = invariants[0].target.address;
    }
    emit(cfg, out, report_to_json(report).dump(2) + "\n");
    if (corpus.too_many_failures()) {
        err << fmt::format("{} of {} transactions failed\n", corpus.failed, corpus.requested);
        return kExitFailure;
    }
    return kExitOk;
}

int cmd_translate(const RunConfig& cfg, const std::string& tx, std::ostream& out) {
    TxLoader loader(cfg);
    const auto in = loader.load(tx);
    const auto tree = build_invocation_tree(in.meta, in.trace);
    emit(cfg, out, to_fact_file(in.meta, in.trace, tree));
    return kExitOk;
}

struct ExtractArgs {
    std::vector<std::string> sources;
    std::optional<std::string> sink_opcode;
    std::optional<std::string> sink_role;
    std::optional<std::size_t> frame;
};

int cmd_extract(const RunConfig& cfg, const std::string& tx, const ExtractArgs& args, std::ostream& out) {
    // Validate the specs before touching the trace so a typo is a usage error.
    std::vector<TaintSource> sources;
    for (const auto& s : args.sources) sources.push_back(parse_taint_source(s));
    SinkFilter filter;
    if (args.sink_opcode) {
        filter.opcode = opcode_from_name(*args.sink_opcode);
        if (!filter.opcode) throw UsageError("unknown opcode '" + *args.sink_opcode + "'");
    }
    if (args.sink_role) {
        filter.role = operand_role_from_string(*args.sink_role);
        if (!filter.role) throw UsageError("unknown operand role '" + *args.sink_role + "'");
    }

    TxLoader loader(cfg);
    const auto in = loader.load(tx);
    const auto tree = build_invocation_tree(in.meta, in.trace);
    if (args.frame) {
        const InvocationNode* node = nullptr;
        std::size_t id = 0;
        for_each_node(tree, [&](const InvocationNode& n, std::size_t) {
            if (id++ == *args.frame) node = &n;
        });
        if (node == nullptr) throw UsageError(fmt::format("no frame {} in {}", *args.frame, tx));
        filter.range = SinkFilter::in_frame(*node).range;
    }
    const auto result = shadow_execute(in.meta, in.trace, tree, sources);
    std::ostringstream s;
    write_flow_facts_jsonl(s, query_flows(result.facts, filter));
    emit(cfg, out, s.str());
    return kExitOk;
}

}  // namespace

std::vector<std::string> read_tx_list(const fs::path& list) {
    std::ifstream f(list);
    if (!f) throw std::runtime_error("cannot read transaction list " + list.string());
    std::vector<std::string> out;
    std::string line;
    while (std::getline(f, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        const auto e = line.find_last_not_of(" \t\r");
        std::string item = line.substr(b, e - b + 1);
        if (!looks_like_hash(item) && fs::path(item).is_relative()) {
            const auto beside = list.parent_path() / item;
            if (fs::exists(beside)) item = beside.string();
        }
        out.push_back(std::move(item));
    }
    return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Transaction trace analysis: invocation trees, invariants, data flow, fact export", "txtrace"};
    app.require_subcommand(1);

    std::string endpoint, cache_dir, config_dir, out_path, templates;
    app.add_option("--endpoint", endpoint, "JSON-RPC endpoint URL (default: $TXTRACE_RPC_URL)");
    app.add_option("--cache-dir", cache_dir, "Write-once artifact cache (default: $TXTRACE_CACHE_DIR)");
    app.add_option("--config-dir", config_dir, "Directory with abi/ and layout/ JSON files");
    app.add_option("--train-fraction", cfg.train_fraction, "Share of transactions used for training")
        ->check(CLI::Range(0.0, 1.0));
    app.add_flag("--memory", cfg.memory_capture, "Capture memory when tracing over RPC");
    app.add_option("--templates", templates, "Comma-separated template ids");
    app.add_option("--jobs", cfg.jobs, "Worker threads for batch commands (0: all processors)")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--out", out_path, "Output file");

    std::string tx, contract, list, store;
    auto* parse = app.add_subcommand("parse", "Print the invocation tree of one transaction");
    parse->alias("explore");
    parse->add_option("tx", tx, "Transaction hash or fixture path")->required();
    parse->add_flag("--decode", cfg.decode, "Substitute function names and decoded storage paths");

    auto* infer_cmd = app.add_subcommand("infer", "Infer invariants for a contract from a transaction list");
    infer_cmd->add_option("contract", contract, "Contract address")->required();
    infer_cmd->add_option("txlist", list, "Transaction list file")->required();

    auto* check_cmd = app.add_subcommand("check", "Check stored invariants against a transaction list");
    check_cmd->add_option("store", store, "Invariant store JSON")->required();
    check_cmd->add_option("txlist", list, "Transaction list file")->required();

    auto* translate = app.add_subcommand("translate", "Write the fact file of one transaction");
    translate->add_option("tx", tx, "Transaction hash or fixture path")->required();

    ExtractArgs ex;
    std::size_t frame = 0;
    auto* extract = app.add_subcommand("extract", "Print taint flows from sources to sinks as JSON lines");
    extract->add_option("tx", tx, "Transaction hash or fixture path")->required();
    extract->add_option("--source", ex.sources,
                        "calldata:FRAME:OFFSET:LENGTH, storage:ADDRESS:SLOT, env:NAME or call_return:FRAME");
    extract->add_option("--sink-opcode", ex.sink_opcode, "Only sinks at this opcode");
    extract->add_option("--sink-role", ex.sink_role, "Only sinks of this role (slot, value, target_address, data, condition)");
    auto* frame_opt = extract->add_option("--frame", frame, "Only sinks inside this frame (pre-order id)");

    // Global options may also follow the subcommand.
    for (auto* sub : {parse, infer_cmd, check_cmd, translate, extract}) sub->fallthrough();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (!endpoint.empty()) cfg.endpoint = endpoint;
        if (!cache_dir.empty()) cfg.cache_dir = cache_dir;
        if (!config_dir.empty()) cfg.config_dir = config_dir;
        if (!out_path.empty()) cfg.out = out_path;
        if (cfg.train_fraction <= 0.0 || cfg.train_fraction >= 1.0) {
            throw UsageError("--train-fraction must lie strictly between 0 and 1");
        }
        if (!templates.empty()) {
            std::set<std::string> ids;
            std::stringstream s(templates);
            for (std::string id; std::getline(s, id, ',');) {
                if (!id.empty()) ids.insert(id);
            }
            cfg.template_filter = std::move(ids);
        }
        if (*frame_opt) ex.frame = frame;

        if (parse->parsed()) return cmd_parse(cfg, tx, out);
        if (infer_cmd->parsed()) return cmd_infer(cfg, contract, list, out, err);
        if (check_cmd->parsed()) return cmd_check(cfg, store, list, out, err);
        if (translate->parsed()) return cmd_translate(cfg, tx, out);
        if (extract->parsed()) return cmd_extract(cfg, tx, ex, out);
        return kExitUsage;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

}  // namespace txtrace::cli
