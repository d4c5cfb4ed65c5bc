// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#include <txtrace/invariants/store.hpp>

#include <fstream>

#include <txtrace/common/error.hpp>
#include <txtrace/common/hex.hpp>

namespace txtrace {

using nlohmann::json;

std::string format_sample_value(const InvariantTemplate& t, const Word& v) {
    if (t.value_kind == ValueKind::address) return to_string(Address::from_word(v));
    return word_to_decimal(v);
}

namespace {

    json target_json(const Target& t) {
        return {{"address", to_string(t.address)},
                {"selector", t.selector ? json(to_string(*t.selector)) : json(nullptr)}};
    }

    Target target_from(const json& j, const std::string& where) {
        Target t;
        try {
            t.address = address_from_hex(j.at("address").get<std::string>());
            const auto& sel = j.at("selector");
            if (!sel.is_null()) t.selector = selector_from_hex(sel.get<std::string>());
        } catch (const std::exception& e) {
            throw SchemaError(where + ".target", e.what());
        }
        return t;
    }

    Word value_from(const json& j, const std::string& where) {
        try {
            return word_from_string(j.get<std::string>());
        } catch (const std::exception& e) {
            throw SchemaError(where, e.what());
        }
    }

}  // namespace

json store_to_json(std::span<const ConcreteInvariant> invariants) {
    json out = json::array();
    for (const auto& inv : invariants) {
        const auto& t = template_by_id(inv.template_id);
        json params = json::object();
        for (const auto& [key, p] : inv.parameters) {
            json pj = json::object();
            if (p.min) pj["min"] = format_sample_value(t, *p.min);
            if (p.max) pj["max"] = format_sample_value(t, *p.max);
            if (t.kind == InferenceKind::set) {
                pj["members"] = json::array();
                for (const auto& m : p.members) pj["members"].push_back(format_sample_value(t, m));
            }
            params[key] = std::move(pj);
        }
        out.push_back({{"template_id", inv.template_id},
                       {"target", target_json(inv.target)},
                       {"parameters", std::move(params)},
                       {"training_support", inv.training_support}});
    }
    return out;
}

std::vector<ConcreteInvariant> store_from_json(const json& j) {
    if (!j.is_array()) throw SchemaError("store", "expected an array of invariants");
    std::vector<ConcreteInvariant> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string where = "store[" + std::to_string(i) + "]";
        const auto& e = j[i];
        if (!e.is_object()) throw SchemaError(where, "expected an object");
        ConcreteInvariant inv;
        if (!e.contains("template_id") || !e["template_id"].is_string()) {
            throw SchemaError(where + ".template_id", "missing or not a string");
        }
        inv.template_id = e["template_id"].get<std::string>();
        if (!find_template(inv.template_id)) {
            throw SchemaError(where + ".template_id", "unknown template '" + inv.template_id + "'");
        }
        if (!e.contains("target") || !e["target"].is_object()) throw SchemaError(where + ".target", "missing");
        inv.target = target_from(e["target"], where);
        if (auto it = e.find("parameters"); it != e.end()) {
            if (!it->is_object()) throw SchemaError(where + ".parameters", "expected an object");
            for (const auto& [key, pj] : it->items()) {
                const std::string pw = where + ".parameters." + key;
                Parameter p;
                if (pj.contains("min")) p.min = value_from(pj["min"], pw + ".min");
                if (pj.contains("max")) p.max = value_from(pj["max"], pw + ".max");
                if (pj.contains("members")) {
                    for (const auto& m : pj["members"]) p.members.push_back(value_from(m, pw + ".members"));
                    std::sort(p.members.begin(), p.members.end());
                }
                inv.parameters.emplace(key, std::move(p));
            }
        }
        inv.training_support = e.value("training_support", std::size_t{0});
        out.push_back(std::move(inv));
    }
    return out;
}

void save_store(const std::filesystem::path& path, std::span<const ConcreteInvariant> invariants) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << store_to_json(invariants).dump(2) << '\n';
}

std::vector<ConcreteInvariant> load_store(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read invariant store " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError("store", std::string("invalid JSON: ") + e.what());
    }
    return store_from_json(j);
}

std::size_t CheckReport::total_pass() const {
    std::size_t n = 0;
    for (const auto& r : invariants) n += r.train_pass + r.test_pass;
    return n;
}

std::size_t CheckReport::total_violate() const {
    std::size_t n = 0;
    for (const auto& r : invariants) n += (r.train_total - r.train_pass) + (r.test_total - r.test_pass);
    return n;
}

CheckReport check_corpus(std::span<const ConcreteInvariant> invariants, std::span<const TxArtifacts> train,
                         std::span<const TxArtifacts> test) {
    CheckReport report;
    if (!invariants.empty()) report.contract = invariants.front().target.address;
    for (const auto& inv : invariants) {
        InvariantReport r{inv, train.size(), 0, test.size(), 0, {}};
        for (const auto& a : train) {
            auto v = check(inv, a);
            if (v.outcome == Outcome::pass) {
                ++r.train_pass;
            } else {
                r.violations.push_back(std::move(v));
            }
        }
        for (const auto& a : test) {
            auto v = check(inv, a);
            if (v.outcome == Outcome::pass) {
                ++r.test_pass;
            } else {
                r.violations.push_back(std::move(v));
            }
        }
        report.invariants.push_back(std::move(r));
    }
    return report;
}

json report_to_json(const CheckReport& report) {
    auto rate = [](std::size_t pass, std::size_t total) {
        return total == 0 ? json(nullptr) : json(static_cast<double>(pass) / static_cast<double>(total));
    };
    json out;
    out["contract"] = report.contract ? json(to_string(*report.contract)) : json(nullptr);
    out["invariants_inferred"] = report.invariants.size();
    out["invariants"] = json::array();
    for (const auto& r : report.invariants) {
        const auto& t = template_by_id(r.invariant.template_id);
        json violations = json::array();
        for (const auto& v : r.violations) {
            violations.push_back({{"tx", to_string(v.tx_hash)},
                                  {"witness", v.witness ? format_sample_value(t, *v.witness) : std::string()},
                                  {"key", v.witness_key}});
        }
        out["invariants"].push_back({{"template_id", r.invariant.template_id},
                                     {"target", target_json(r.invariant.target)},
                                     {"train_pass_rate", rate(r.train_pass, r.train_total)},
                                     {"test_pass_rate", rate(r.test_pass, r.test_total)},
                                     {"violations", std::move(violations)}});
    }
    out["summary"] = {{"pass", report.total_pass()}, {"violate", report.total_violate()}};
    return out;
}

}  // namespace txtrace
