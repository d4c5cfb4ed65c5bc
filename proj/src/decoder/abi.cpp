// Copyright 2026 The txtrace Authors
// SPDX-License-Identifier: Apache-2.0

#include <txtrace/decoder/abi.hpp>

#include <charconv>
#include <fstream>
#include <sstream>

#include <txtrace/common/hex.hpp>
#include <txtrace/common/keccak.hpp>

namespace txtrace::abi {

using nlohmann::json;

namespace {

    std::optional<unsigned> parse_uint(std::string_view s) {
        unsigned v = 0;
        if (s.empty()) return std::nullopt;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
        return v;
    }

    constexpr std::size_t round_up32(std::size_t n) { return (n + 31) / 32 * 32; }

    Word low_mask(unsigned bits) { return bits >= 256 ? ~Word(0) : (Word(1) << bits) - 1; }

}  // namespace

std::string Type::canonical() const {
    switch (kind) {
        case Kind::uint: return "uint" + std::to_string(width);
        case Kind::int_: return "int" + std::to_string(width);
        case Kind::address: return "address";
        case Kind::bool_: return "bool";
        case Kind::fixed_bytes: return "bytes" + std::to_string(width);
        case Kind::bytes: return "bytes";
        case Kind::string: return "string";
        case Kind::array: return components.at(0).canonical() + "[]";
        case Kind::fixed_array: return components.at(0).canonical() + "[" + std::to_string(length) + "]";
        case Kind::tuple: {
            std::string out = "(";
            for (std::size_t i = 0; i < components.size(); ++i) {
                if (i) out += ',';
                out += components[i].canonical();
            }
            return out + ")";
        }
    }
    return {};
}

bool Type::is_dynamic() const {
    switch (kind) {
        case Kind::bytes:
        case Kind::string:
        case Kind::array: return true;
        case Kind::fixed_array: return components.at(0).is_dynamic();
        case Kind::tuple:
            for (const auto& c : components) {
                if (c.is_dynamic()) return true;
            }
            return false;
        default: return false;
    }
}

std::size_t Type::head_size() const {
    if (is_dynamic()) return 32;
    if (kind == Kind::fixed_array) return length * components.at(0).head_size();
    if (kind == Kind::tuple) {
        std::size_t n = 0;
        for (const auto& c : components) n += c.head_size();
        return n;
    }
    return 32;
}

Type parse_type(std::string_view text, const std::vector<Type>& tuple_components) {
    const std::string original(text);
    if (!text.empty() && text.back() == ']') {
        const auto open = text.rfind('[');
        if (open == std::string_view::npos) throw TypeError(original);
        const auto dim = text.substr(open + 1, text.size() - open - 2);
        Type t;
        t.components.push_back(parse_type(text.substr(0, open), tuple_components));
        if (dim.empty()) {
            t.kind = Type::Kind::array;
        } else {
            const auto n = parse_uint(dim);
            if (!n || *n == 0) throw TypeError(original);
            t.kind = Type::Kind::fixed_array;
            t.length = *n;
        }
        return t;
    }

    Type t;
    auto sized = [&](std::string_view prefix, Type::Kind kind, unsigned max, unsigned step, unsigned dflt) {
        if (text.substr(0, prefix.size()) != prefix) return false;
        const auto rest = text.substr(prefix.size());
        if (rest.empty()) {
            if (dflt == 0) return false;
            t.kind = kind;
            t.width = dflt;
            return true;
        }
        const auto n = parse_uint(rest);
        if (!n || *n == 0 || *n > max || *n % step != 0) throw TypeError(original);
        t.kind = kind;
        t.width = *n;
        return true;
    };

    if (text == "address") {
        t.kind = Type::Kind::address;
    } else if (text == "bool") {
        t.kind = Type::Kind::bool_;
    } else if (text == "string") {
        t.kind = Type::Kind::string;
    } else if (text == "bytes") {
        t.kind = Type::Kind::bytes;
    } else if (text == "tuple") {
        if (tuple_components.empty()) throw TypeError(original);
        t.kind = Type::Kind::tuple;
        t.components = tuple_components;
    } else if (sized("uint", Type::Kind::uint, 256, 8, 256) || sized("int", Type::Kind::int_, 256, 8, 256) ||
               sized("bytes", Type::Kind::fixed_bytes, 32, 1, 0)) {
        // width set by `sized`
    } else {
        throw TypeError(original);
    }
    return t;
}

std::string Function::signature() const {
    std::string out = name + "(";
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        if (i) out += ',';
        out += inputs[i].type.canonical();
    }
    return out + ")";
}

Function make_function(std::string name, std::vector<Param> inputs, std::vector<Param> outputs) {
    Function f{std::move(name), {}, std::move(inputs), std::move(outputs)};
    f.selector = selector_of(f.signature());
    return f;
}

namespace {

    void append_word(Bytes& out, const Word& w) {
        const auto be = word_to_be32(w);
        out.insert(out.end(), be.begin(), be.end());
    }

    void append_padded(Bytes& out, ByteView data) {
        out.insert(out.end(), data.begin(), data.end());
        out.resize(out.size() + round_up32(data.size()) - data.size(), 0);
    }

    Bytes encode_single(const Type& t, const Value& v);

    Bytes encode_tuple(const std::vector<Type>& types, const std::vector<Value>& values) {
        if (types.size() != values.size()) throw std::invalid_argument("abi encode: arity mismatch");
        std::size_t head_total = 0;
        for (const auto& t : types) head_total += t.head_size();
        Bytes head, tail;
        for (std::size_t i = 0; i < types.size(); ++i) {
            Bytes enc = encode_single(types[i], values[i]);
            if (types[i].is_dynamic()) {
                append_word(head, Word(head_total + tail.size()));
                tail.insert(tail.end(), enc.begin(), enc.end());
            } else {
                head.insert(head.end(), enc.begin(), enc.end());
            }
        }
        head.insert(head.end(), tail.begin(), tail.end());
        return head;
    }

    Bytes encode_single(const Type& t, const Value& v) {
        Bytes out;
        switch (t.kind) {
            case Type::Kind::uint:
            case Type::Kind::int_:
            case Type::Kind::address:
            case Type::Kind::bool_: append_word(out, v.word()); break;
            case Type::Kind::fixed_bytes: {
                if (v.bytes().size() != t.width) throw std::invalid_argument("abi encode: wrong bytesN length");
                append_padded(out, v.bytes());
                break;
            }
            case Type::Kind::bytes:
                append_word(out, Word(v.bytes().size()));
                append_padded(out, v.bytes());
                break;
            case Type::Kind::string: {
                const auto& s = v.text();
                append_word(out, Word(s.size()));
                append_padded(out, ByteView{reinterpret_cast<const std::uint8_t*>(s.data()), s.size()});
                break;
            }
            case Type::Kind::array: {
                append_word(out, Word(v.items().size()));
                const Bytes body = encode_tuple(std::vector<Type>(v.items().size(), t.components.at(0)), v.items());
                out.insert(out.end(), body.begin(), body.end());
                break;
            }
            case Type::Kind::fixed_array:
                if (v.items().size() != t.length) throw std::invalid_argument("abi encode: wrong fixed array length");
                out = encode_tuple(std::vector<Type>(t.length, t.components.at(0)), v.items());
                break;
            case Type::Kind::tuple: out = encode_tuple(t.components, v.items()); break;
        }
        return out;
    }

    class Decoder {
      public:
        explicit Decoder(ByteView data) : data_(data) {}

        std::optional<std::vector<Value>> tuple(const std::vector<Type>& types, std::size_t start) {
            std::vector<Value> out;
            out.reserve(types.size());
            std::size_t pos = start;
            for (const auto& t : types) {
                std::optional<Value> v;
                if (t.is_dynamic()) {
                    const auto off = offset_at(pos);
                    if (!off || *off > data_.size() - start) return std::nullopt;
                    v = single(t, start + *off);
                    pos += 32;
                } else {
                    v = single(t, pos);
                    pos += t.head_size();
                }
                if (!v) return std::nullopt;
                out.push_back(std::move(*v));
            }
            return out;
        }

        [[nodiscard]] std::size_t consumed() const { return max_end_; }

      private:
        std::optional<Word> word_at(std::size_t pos) {
            if (pos > data_.size() || data_.size() - pos < 32) return std::nullopt;
            max_end_ = std::max(max_end_, pos + 32);
            return word_from_be(data_.subspan(pos, 32));
        }

        //! A word used as an offset or length, bounded by the data size.
        std::optional<std::size_t> offset_at(std::size_t pos) {
            const auto w = word_at(pos);
            if (!w || *w > data_.size()) return std::nullopt;
            return static_cast<std::size_t>(*w);
        }

        std::optional<Bytes> byte_run(std::size_t at) {
            const auto len = offset_at(at);
            if (!len) return std::nullopt;
            const std::size_t begin = at + 32;
            const std::size_t padded = round_up32(*len);
            if (begin > data_.size() || data_.size() - begin < padded) return std::nullopt;
            for (std::size_t i = begin + *len; i < begin + padded; ++i) {
                if (data_[i] != 0) return std::nullopt;
            }
            max_end_ = std::max(max_end_, begin + padded);
            return Bytes(data_.begin() + static_cast<std::ptrdiff_t>(begin),
                         data_.begin() + static_cast<std::ptrdiff_t>(begin + *len));
        }

        std::optional<Value> single(const Type& t, std::size_t at) {
            switch (t.kind) {
                case Type::Kind::uint: {
                    auto w = word_at(at);
                    if (!w || (*w & ~low_mask(t.width)) != 0) return std::nullopt;
                    return Value(*w);
                }
                case Type::Kind::int_: {
                    auto w = word_at(at);
                    if (!w) return std::nullopt;
                    if (t.width < 256) {
                        const Word high = *w >> (t.width - 1);
                        if (high != 0 && high != low_mask(257 - t.width)) return std::nullopt;
                    }
                    return Value(*w);
                }
                case Type::Kind::address: {
                    auto w = word_at(at);
                    if (!w || (*w >> 160) != 0) return std::nullopt;
                    return Value(*w);
                }
                case Type::Kind::bool_: {
                    auto w = word_at(at);
                    if (!w || *w > 1) return std::nullopt;
                    return Value(*w);
                }
                case Type::Kind::fixed_bytes: {
                    if (!word_at(at)) return std::nullopt;
                    for (std::size_t i = at + t.width; i < at + 32; ++i) {
                        if (data_[i] != 0) return std::nullopt;
                    }
                    return Value(Bytes(data_.begin() + static_cast<std::ptrdiff_t>(at),
                                       data_.begin() + static_cast<std::ptrdiff_t>(at + t.width)));
                }
                case Type::Kind::bytes: {
                    auto b = byte_run(at);
                    if (!b) return std::nullopt;
                    return Value(std::move(*b));
                }
                case Type::Kind::string: {
                    auto b = byte_run(at);
                    if (!b) return std::nullopt;
                    return Value(std::string(b->begin(), b->end()));
                }
                case Type::Kind::array: {
                    const auto n = offset_at(at);
                    // Every element needs at least one 32-byte head slot.
                    if (!n || *n > (data_.size() - at - 32) / 32) return std::nullopt;
                    auto items = tuple(std::vector<Type>(*n, t.components.at(0)), at + 32);
                    if (!items) return std::nullopt;
                    return Value(std::move(*items));
                }
                case Type::Kind::fixed_array: {
                    auto items = tuple(std::vector<Type>(t.length, t.components.at(0)), at);
                    if (!items) return std::nullopt;
                    return Value(std::move(*items));
                }
                case Type::Kind::tuple: {
                    auto items = tuple(t.components, at);
                    if (!items) return std::nullopt;
                    return Value(std::move(*items));
                }
            }
            return std::nullopt;
        }

        ByteView data_;
        std::size_t max_end_{0};
    };

    std::string signed_decimal(const Word& w, unsigned width) {
        const bool negative = width > 0 && ((w >> 255) & 1) != 0;
        if (!negative) return word_to_decimal(w);
        return "-" + word_to_decimal(~w + 1);
    }

}  // namespace

Bytes encode(const std::vector<Type>& types, const std::vector<Value>& values) { return encode_tuple(types, values); }

std::optional<DecodeResult> decode(const std::vector<Type>& types, ByteView data) {
    Decoder d(data);
    auto values = d.tuple(types, 0);
    if (!values) return std::nullopt;
    return DecodeResult{std::move(*values), d.consumed()};
}

std::string format_value(const Type& type, const Value& value) {
    switch (type.kind) {
        case Type::Kind::uint: return word_to_decimal(value.word());
        case Type::Kind::int_: return signed_decimal(value.word(), type.width);
        case Type::Kind::address: return to_string(Address::from_word(value.word()));
        case Type::Kind::bool_: return value.word() == 0 ? "false" : "true";
        case Type::Kind::fixed_bytes:
        case Type::Kind::bytes: return to_hex(value.bytes());
        case Type::Kind::string: return json(value.text()).dump();
        case Type::Kind::array:
        case Type::Kind::fixed_array:
        case Type::Kind::tuple: {
            const bool tuple = type.kind == Type::Kind::tuple;
            std::string out = tuple ? "(" : "[";
            const auto& items = value.items();
            for (std::size_t i = 0; i < items.size(); ++i) {
                if (i) out += ", ";
                out += format_value(tuple ? type.components.at(i) : type.components.at(0), items[i]);
            }
            return out + (tuple ? ")" : "]");
        }
    }
    return {};
}

json value_to_json(const Type& type, const Value& value) {
    switch (type.kind) {
        case Type::Kind::bool_: return value.word() != 0;
        case Type::Kind::string: return value.text();
        case Type::Kind::array:
        case Type::Kind::fixed_array:
        case Type::Kind::tuple: {
            json arr = json::array();
            const auto& items = value.items();
            for (std::size_t i = 0; i < items.size(); ++i) {
                arr.push_back(value_to_json(type.kind == Type::Kind::tuple ? type.components.at(i) : type.components.at(0),
                                            items[i]));
            }
            return arr;
        }
        default: return format_value(type, value);
    }
}

namespace {

    Param parse_param(const json& j, const std::string& where) {
        if (!j.is_object()) throw SchemaError(where, "expected an object");
        const auto type_it = j.find("type");
        if (type_it == j.end() || !type_it->is_string()) throw SchemaError(where + ".type", "missing type");
        std::vector<Type> components;
        if (auto c = j.find("components"); c != j.end()) {
            if (!c->is_array()) throw SchemaError(where + ".components", "expected an array");
            for (std::size_t i = 0; i < c->size(); ++i) {
                components.push_back(parse_param((*c)[i], where + ".components[" + std::to_string(i) + "]").type);
            }
        }
        Param p;
        if (auto n = j.find("name"); n != j.end() && n->is_string()) p.name = n->get<std::string>();
        p.type = parse_type(type_it->get<std::string>(), components);
        return p;
    }

    std::vector<Param> parse_params(const json& entry, const char* key, const std::string& where) {
        std::vector<Param> out;
        auto it = entry.find(key);
        if (it == entry.end() || it->is_null()) return out;
        if (!it->is_array()) throw SchemaError(where + "." + key, "expected an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            out.push_back(parse_param((*it)[i], where + "." + key + "[" + std::to_string(i) + "]"));
        }
        return out;
    }

}  // namespace

std::vector<Function> parse_abi(const json& abi) {
    if (!abi.is_array()) throw SchemaError("abi", "expected a JSON array");
    std::vector<Function> out;
    for (std::size_t i = 0; i < abi.size(); ++i) {
        const auto& entry = abi[i];
        const std::string where = "abi[" + std::to_string(i) + "]";
        if (!entry.is_object()) throw SchemaError(where, "expected an object");
        const std::string kind = entry.value("type", std::string("function"));
        if (kind != "function") continue;
        auto name = entry.find("name");
        if (name == entry.end() || !name->is_string()) throw SchemaError(where + ".name", "missing function name");
        out.push_back(make_function(name->get<std::string>(), parse_params(entry, "inputs", where),
                                    parse_params(entry, "outputs", where)));
    }
    return out;
}

std::vector<Function> load_abi(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open ABI file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError("abi", std::string("invalid JSON: ") + e.what());
    }
    return parse_abi(j);
}

}  // namespace txtrace::abi
