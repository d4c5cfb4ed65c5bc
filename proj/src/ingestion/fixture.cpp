// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#include <txtrace/ingestion/fixture.hpp>

#include <fstream>
#include <sstream>

#include <txtrace/common/error.hpp>
#include <txtrace/ingestion/json_codec.hpp>

namespace txtrace {

Fixture parse_fixture(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError("$", std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw SchemaError("$", "fixture must be a JSON object");
    if (!j.contains("meta")) throw SchemaError("meta", "missing required field");
    if (!j.contains("trace")) throw SchemaError("trace", "missing required field");
    Fixture f;
    f.meta = json_codec::parse_meta(j["meta"], "meta");
    f.trace = json_codec::parse_raw_trace(j["trace"], "trace");
    return f;
}

Fixture load_fixture(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open fixture file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_fixture(buf.str());
}

std::string serialize_fixture(const Fixture& fixture) {
    nlohmann::json j;
    j["meta"] = json_codec::to_json(fixture.meta);
    j["trace"] = json_codec::to_json(fixture.trace);
    return j.dump();
}

void store_fixture(const std::filesystem::path& path, const Fixture& fixture) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write fixture file: " + path.string());
    out << serialize_fixture(fixture) << '\n';
}

}  // namespace txtrace
