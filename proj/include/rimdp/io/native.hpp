#pragma once

#include "rimdp/io/common.hpp"

#include <json.hpp>

#include <cstring>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace rimdp::io {

/*
 * Native model container: named arrays in a little-endian binary file.
 *
 *   magic            8 bytes "IMDPCSC1"
 *   attribute count  u32
 *   per attribute    u32 key length, key bytes, u32 value length, value bytes
 *   variable count   u32
 *   per variable     u32 key length, key bytes, u8 dtype, u64 element count,
 *                    payload
 *
 *   dtype 1 = int32, 2 = float64, 3 = float32,
 *         4 = string (per element: u32 length, bytes),
 *         5 = rational (per element: i64 numerator, i64 denominator)
 *
 * Attributes: num_states, model ("imc" or "imdp"), format ("sparse_csc"),
 * rows ("to"), cols ("from" for imc, "from/action" for imdp).
 * Variables: lower_colptr, lower_rowval, lower_nzval, upper_colptr,
 * upper_rowval, upper_nzval, and for imdp additionally stateptr and
 * action_vals. All indices are 0-based. Both bound matrices are stored with
 * their own sparsity pattern; zero-valued lower bounds are stripped.
 *
 * A JSON debug variant with the same attributes/variables is also accepted
 * (and written with json_debug = true); the reader dispatches on the magic.
 *
 * The specification lives in a separate JSON file; see docs/formats.md for
 * both schemas. State indices in the specification are 1-based.
 */

namespace detail {

using VariableData =
    std::variant<std::vector<std::int32_t>, std::vector<double>, std::vector<float>,
                 std::vector<std::string>, std::vector<std::pair<std::int64_t, std::int64_t>>>;

struct Container {
    std::map<std::string, std::string> attributes;
    std::map<std::string, VariableData> variables;
};

inline constexpr char native_magic[8] = {'I', 'M', 'D', 'P', 'C', 'S', 'C', '1'};

class BinaryWriter {
public:
    explicit BinaryWriter(const std::string& path) : out_(open_output(path)) {}

    void u8(std::uint8_t v) { out_.put(static_cast<char>(v)); }
    void u32(std::uint32_t v) { write_le(v); }
    void u64(std::uint64_t v) { write_le(v); }
    void i32(std::int32_t v) { write_le(static_cast<std::uint32_t>(v)); }
    void i64(std::int64_t v) { write_le(static_cast<std::uint64_t>(v)); }
    void f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        write_le(bits);
    }
    void f32(float v) {
        std::uint32_t bits;
        std::memcpy(&bits, &v, 4);
        write_le(bits);
    }
    void bytes(const void* data, std::size_t size) {
        out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
    }
    void str(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        bytes(s.data(), s.size());
    }

private:
    template <typename U>
    void write_le(U v) {
        char buf[sizeof(U)];
        for (std::size_t i = 0; i < sizeof(U); ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
        out_.write(buf, sizeof(U));
    }

    std::ofstream out_;
};

class BinaryReader {
public:
    explicit BinaryReader(const std::string& path) : path_(path), in_(path, std::ios::binary) {
        if (!in_) throw MissingFile(path);
    }

    std::uint8_t u8() {
        int c = in_.get();
        if (c == EOF) fail("unexpected end of file");
        return static_cast<std::uint8_t>(c);
    }
    std::uint32_t u32() { return read_le<std::uint32_t>(); }
    std::uint64_t u64() { return read_le<std::uint64_t>(); }
    std::int32_t i32() { return static_cast<std::int32_t>(read_le<std::uint32_t>()); }
    std::int64_t i64() { return static_cast<std::int64_t>(read_le<std::uint64_t>()); }
    double f64() {
        std::uint64_t bits = read_le<std::uint64_t>();
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }
    float f32() {
        std::uint32_t bits = read_le<std::uint32_t>();
        float v;
        std::memcpy(&v, &bits, 4);
        return v;
    }
    std::string str() {
        std::uint32_t len = u32();
        if (len > (1u << 28)) fail("string length implausibly large");
        std::string s(len, '\0');
        if (!in_.read(s.data(), len)) fail("unexpected end of file");
        return s;
    }

    [[noreturn]] void fail(const std::string& reason) const {
        throw SchemaViolation(path_ + ": " + reason);
    }

private:
    template <typename U>
    U read_le() {
        char buf[sizeof(U)];
        if (!in_.read(buf, sizeof(U))) fail("unexpected end of file");
        U v = 0;
        for (std::size_t i = 0; i < sizeof(U); ++i) {
            v |= static_cast<U>(static_cast<unsigned char>(buf[i])) << (8 * i);
        }
        return v;
    }

    std::string path_;
    std::ifstream in_;
};

// ---- value array encoding per scalar type -------------------------------

template <typename Value>
struct NativeValueCodec;

template <>
struct NativeValueCodec<double> {
    static constexpr std::uint8_t dtype = 2;
    static VariableData pack(const std::vector<double>& values) { return values; }
    static std::vector<double> unpack(const std::string& path, const VariableData& data,
                                      const std::string& name);
};

template <>
struct NativeValueCodec<float> {
    static constexpr std::uint8_t dtype = 3;
    static VariableData pack(const std::vector<float>& values) { return values; }
    static std::vector<float> unpack(const std::string& path, const VariableData& data,
                                     const std::string& name);
};

template <>
struct NativeValueCodec<Rational> {
    static constexpr std::uint8_t dtype = 5;
    static VariableData pack(const std::vector<Rational>& values) {
        std::vector<std::pair<std::int64_t, std::int64_t>> out;
        out.reserve(values.size());
        for (const Rational& v : values) {
            const auto num = numerator(v);
            const auto den = denominator(v);
            if (num > std::numeric_limits<std::int64_t>::max() ||
                num < std::numeric_limits<std::int64_t>::min() ||
                den > std::numeric_limits<std::int64_t>::max()) {
                throw SchemaViolation("rational value " + NumericTraits<Rational>::to_string(v) +
                                      " does not fit the 64-bit container encoding");
            }
            out.emplace_back(num.template convert_to<std::int64_t>(),
                             den.template convert_to<std::int64_t>());
        }
        return out;
    }
    static std::vector<Rational> unpack(const std::string& path, const VariableData& data,
                                        const std::string& name);
};

// Cross-type promotion on read: f64 containers load exactly into rationals,
// f32 loads into f64/rational, rationals only into rationals.
inline double to_f64_entry(const VariableData& data, std::size_t i) {
    if (const auto* d = std::get_if<std::vector<double>>(&data)) return (*d)[i];
    if (const auto* f = std::get_if<std::vector<float>>(&data)) return (*f)[i];
    return std::numeric_limits<double>::quiet_NaN();
}

inline std::size_t variable_size(const VariableData& data) {
    return std::visit([](const auto& v) { return v.size(); }, data);
}

inline std::vector<double> NativeValueCodec<double>::unpack(const std::string& path,
                                                            const VariableData& data,
                                                            const std::string& name) {
    if (std::holds_alternative<std::vector<std::pair<std::int64_t, std::int64_t>>>(data) ||
        std::holds_alternative<std::vector<std::int32_t>>(data) ||
        std::holds_alternative<std::vector<std::string>>(data)) {
        throw SchemaViolation(path + ": variable " + name + " is not floating point");
    }
    std::vector<double> out(variable_size(data));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = to_f64_entry(data, i);
    return out;
}

inline std::vector<float> NativeValueCodec<float>::unpack(const std::string& path,
                                                          const VariableData& data,
                                                          const std::string& name) {
    const auto* f = std::get_if<std::vector<float>>(&data);
    if (!f) throw SchemaViolation(path + ": variable " + name + " is not float32; convert explicitly");
    return *f;
}

inline std::vector<Rational> NativeValueCodec<Rational>::unpack(const std::string& path,
                                                                const VariableData& data,
                                                                const std::string& name) {
    if (const auto* r = std::get_if<std::vector<std::pair<std::int64_t, std::int64_t>>>(&data)) {
        std::vector<Rational> out;
        out.reserve(r->size());
        for (const auto& [num, den] : *r) {
            if (den == 0) {
                throw SchemaViolation(path + ": variable " + name + " holds a zero denominator");
            }
            out.emplace_back(BigInt(num), BigInt(den));
        }
        return out;
    }
    if (std::holds_alternative<std::vector<double>>(data) ||
        std::holds_alternative<std::vector<float>>(data)) {
        std::vector<Rational> out(variable_size(data));
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = Rational(to_f64_entry(data, i));
        return out;
    }
    throw SchemaViolation(path + ": variable " + name + " is not numeric");
}

// ---- container serialization --------------------------------------------

inline void write_container_binary(const std::string& path, const Container& c) {
    BinaryWriter out(path);
    out.bytes(native_magic, sizeof(native_magic));
    out.u32(static_cast<std::uint32_t>(c.attributes.size()));
    for (const auto& [key, value] : c.attributes) {
        out.str(key);
        out.str(value);
    }
    out.u32(static_cast<std::uint32_t>(c.variables.size()));
    for (const auto& [key, data] : c.variables) {
        out.str(key);
        std::visit(
            [&](const auto& values) {
                using V = std::decay_t<decltype(values)>;
                if constexpr (std::is_same_v<V, std::vector<std::int32_t>>) {
                    out.u8(1);
                    out.u64(values.size());
                    for (auto v : values) out.i32(v);
                } else if constexpr (std::is_same_v<V, std::vector<double>>) {
                    out.u8(2);
                    out.u64(values.size());
                    for (auto v : values) out.f64(v);
                } else if constexpr (std::is_same_v<V, std::vector<float>>) {
                    out.u8(3);
                    out.u64(values.size());
                    for (auto v : values) out.f32(v);
                } else if constexpr (std::is_same_v<V, std::vector<std::string>>) {
                    out.u8(4);
                    out.u64(values.size());
                    for (const auto& v : values) out.str(v);
                } else {
                    out.u8(5);
                    out.u64(values.size());
                    for (const auto& [num, den] : values) {
                        out.i64(num);
                        out.i64(den);
                    }
                }
            },
            data);
    }
}

inline Container read_container_binary(BinaryReader& in) {
    Container c;
    const std::uint32_t nattrs = in.u32();
    for (std::uint32_t i = 0; i < nattrs; ++i) {
        std::string key = in.str();
        c.attributes[key] = in.str();
    }
    const std::uint32_t nvars = in.u32();
    for (std::uint32_t i = 0; i < nvars; ++i) {
        std::string key = in.str();
        const std::uint8_t dtype = in.u8();
        const std::uint64_t count = in.u64();
        if (count > (1ull << 33)) in.fail("variable " + key + " implausibly large");
        switch (dtype) {
        case 1: {
            std::vector<std::int32_t> v(count);
            for (auto& x : v) x = in.i32();
            c.variables[key] = std::move(v);
            break;
        }
        case 2: {
            std::vector<double> v(count);
            for (auto& x : v) x = in.f64();
            c.variables[key] = std::move(v);
            break;
        }
        case 3: {
            std::vector<float> v(count);
            for (auto& x : v) x = in.f32();
            c.variables[key] = std::move(v);
            break;
        }
        case 4: {
            std::vector<std::string> v(count);
            for (auto& x : v) x = in.str();
            c.variables[key] = std::move(v);
            break;
        }
        case 5: {
            std::vector<std::pair<std::int64_t, std::int64_t>> v(count);
            for (auto& x : v) {
                x.first = in.i64();
                x.second = in.i64();
            }
            c.variables[key] = std::move(v);
            break;
        }
        default:
            in.fail("unknown dtype " + std::to_string(dtype) + " for variable " + key);
        }
    }
    return c;
}

inline void write_container_json(const std::string& path, const Container& c) {
    nlohmann::json j;
    j["attributes"] = c.attributes;
    nlohmann::json vars = nlohmann::json::object();
    for (const auto& [key, data] : c.variables) {
        std::visit(
            [&](const auto& values) {
                using V = std::decay_t<decltype(values)>;
                if constexpr (std::is_same_v<V,
                                             std::vector<std::pair<std::int64_t, std::int64_t>>>) {
                    nlohmann::json arr = nlohmann::json::array();
                    for (const auto& [num, den] : values) {
                        arr.push_back(std::to_string(num) + "/" + std::to_string(den));
                    }
                    vars[key] = {{"dtype", "rational"}, {"data", std::move(arr)}};
                } else if constexpr (std::is_same_v<V, std::vector<std::string>>) {
                    vars[key] = {{"dtype", "string"}, {"data", values}};
                } else if constexpr (std::is_same_v<V, std::vector<std::int32_t>>) {
                    vars[key] = {{"dtype", "int32"}, {"data", values}};
                } else if constexpr (std::is_same_v<V, std::vector<float>>) {
                    vars[key] = {{"dtype", "float32"}, {"data", values}};
                } else {
                    vars[key] = {{"dtype", "float64"}, {"data", values}};
                }
            },
            data);
    }
    j["variables"] = std::move(vars);
    auto out = open_output(path);
    out << j.dump(1) << "\n";
}

inline Container read_container_json(const std::string& path, const nlohmann::json& j) {
    Container c;
    if (!j.contains("attributes") || !j.contains("variables")) {
        throw SchemaViolation(path + ": expected attributes and variables objects");
    }
    for (const auto& [key, value] : j.at("attributes").items()) {
        c.attributes[key] = value.is_string() ? value.get<std::string>() : value.dump();
    }
    for (const auto& [key, var] : j.at("variables").items()) {
        const std::string dtype = var.at("dtype").get<std::string>();
        const auto& data = var.at("data");
        if (dtype == "int32") {
            c.variables[key] = data.get<std::vector<std::int32_t>>();
        } else if (dtype == "float64") {
            c.variables[key] = data.get<std::vector<double>>();
        } else if (dtype == "float32") {
            c.variables[key] = data.get<std::vector<float>>();
        } else if (dtype == "string") {
            c.variables[key] = data.get<std::vector<std::string>>();
        } else if (dtype == "rational") {
            std::vector<std::pair<std::int64_t, std::int64_t>> v;
            for (const auto& item : data) {
                const std::string s = item.get<std::string>();
                auto slash = s.find('/');
                auto num = parse_int(std::string_view(s).substr(0, slash));
                auto den = slash == std::string::npos
                               ? std::optional<std::int64_t>(1)
                               : parse_int(std::string_view(s).substr(slash + 1));
                if (!num || !den) throw SchemaViolation(path + ": bad rational \"" + s + "\"");
                v.emplace_back(*num, *den);
            }
            c.variables[key] = std::move(v);
        } else {
            throw SchemaViolation(path + ": unknown dtype " + dtype);
        }
    }
    return c;
}

} // namespace detail

/// Writes the model container. `json_debug` selects the human-readable JSON
/// variant instead of the binary encoding.
template <typename Value>
void write_native_model(const std::string& path, const IntervalMDP<Value>& imdp,
                        bool json_debug = false) {
    using Codec = detail::NativeValueCodec<Value>;
    detail::Container c;
    c.attributes["num_states"] = std::to_string(imdp.num_states());
    c.attributes["model"] = "imdp";
    c.attributes["format"] = "sparse_csc";
    c.attributes["rows"] = "to";
    c.attributes["cols"] = "from/action";

    const CscMatrix<Value> lower = imdp.transition().lower_csc();
    const CscMatrix<Value> upper = imdp.transition().upper_csc();
    c.variables["lower_colptr"] = lower.colptr;
    c.variables["lower_rowval"] = lower.rowval;
    c.variables["lower_nzval"] = Codec::pack(lower.nzval);
    c.variables["upper_colptr"] = upper.colptr;
    c.variables["upper_rowval"] = upper.rowval;
    c.variables["upper_nzval"] = Codec::pack(upper.nzval);
    c.variables["stateptr"] = std::vector<index_t>(imdp.stateptr().begin(), imdp.stateptr().end());
    c.variables["action_vals"] =
        std::vector<std::string>(imdp.actions().begin(), imdp.actions().end());

    if (json_debug) {
        detail::write_container_json(path, c);
    } else {
        detail::write_container_binary(path, c);
    }
}

/// Reads a model container (binary or JSON debug variant, detected by the
/// magic bytes). `imc` containers are promoted to IMDPs with one action per
/// state labelled "0".
template <typename Value>
IntervalMDP<Value> read_native_model(const std::string& path) {
    using Codec = detail::NativeValueCodec<Value>;
    auto fail = [&](const std::string& reason) -> void {
        throw SchemaViolation(path + ": " + reason);
    };

    detail::Container c;
    {
        std::ifstream probe(path, std::ios::binary);
        if (!probe) throw MissingFile(path);
        char magic[8] = {};
        probe.read(magic, 8);
        if (probe.gcount() == 8 && std::memcmp(magic, detail::native_magic, 8) == 0) {
            detail::BinaryReader in(path);
            for (int i = 0; i < 8; ++i) in.u8(); // magic
            c = detail::read_container_binary(in);
        } else {
            std::ifstream text(path);
            nlohmann::json j;
            try {
                text >> j;
            } catch (const nlohmann::json::exception& e) {
                fail(std::string("neither IMDPCSC1 binary nor JSON (") + e.what() + ")");
            }
            c = detail::read_container_json(path, j);
        }
    }

    auto attr = [&](const char* key) -> const std::string& {
        auto it = c.attributes.find(key);
        if (it == c.attributes.end()) fail(std::string("missing attribute ") + key);
        return it->second;
    };
    const std::string model = attr("model");
    if (model != "imc" && model != "imdp") fail("model must be imc or imdp");
    if (attr("format") != "sparse_csc") fail("format must be sparse_csc");
    if (attr("rows") != "to") fail("rows must be to");
    const std::string expected_cols = model == "imc" ? "from" : "from/action";
    if (attr("cols") != expected_cols) {
        fail("cols must be " + expected_cols + " for model " + model);
    }
    auto ns = detail::parse_int(attr("num_states"));
    if (!ns || *ns <= 0) fail("bad num_states");
    const index_t num_states = static_cast<index_t>(*ns);

    auto variable = [&](const char* key) -> const detail::VariableData& {
        auto it = c.variables.find(key);
        if (it == c.variables.end()) fail(std::string("missing variable ") + key);
        return it->second;
    };
    auto int_variable = [&](const char* key) -> std::vector<index_t> {
        const auto* v = std::get_if<std::vector<std::int32_t>>(&variable(key));
        if (!v) fail(std::string("variable ") + key + " must be int32");
        return *v;
    };

    const std::vector<index_t> lower_colptr = int_variable("lower_colptr");
    const std::vector<index_t> lower_rowval = int_variable("lower_rowval");
    const std::vector<index_t> upper_colptr = int_variable("upper_colptr");
    const std::vector<index_t> upper_rowval = int_variable("upper_rowval");
    const std::vector<Value> lower_nzval = Codec::unpack(path, variable("lower_nzval"), "lower_nzval");
    const std::vector<Value> upper_nzval = Codec::unpack(path, variable("upper_nzval"), "upper_nzval");

    if (upper_colptr.empty()) fail("empty upper_colptr");
    const index_t num_cols = static_cast<index_t>(upper_colptr.size()) - 1;
    if (static_cast<index_t>(lower_colptr.size()) - 1 != num_cols) {
        fail("lower and upper matrices must have the same column count");
    }

    std::vector<index_t> stateptr;
    std::vector<std::string> actions;
    if (model == "imdp") {
        stateptr = int_variable("stateptr");
        const auto* labels = std::get_if<std::vector<std::string>>(&variable("action_vals"));
        if (!labels) fail("variable action_vals must be strings");
        actions = *labels;
    } else {
        if (num_cols != num_states) fail("imc requires one column per state");
        stateptr.resize(num_states + 1);
        for (index_t s = 0; s <= num_states; ++s) stateptr[s] = s;
        actions.assign(num_states, "0");
    }

    // Index bounds are checked here so a broken file reports against the
    // file rather than failing deep inside the model constructor.
    for (index_t r : lower_rowval) {
        if (r < 0 || r >= num_states) fail("IndexOutOfBounds: lower_rowval entry");
    }
    for (index_t r : upper_rowval) {
        if (r < 0 || r >= num_states) fail("IndexOutOfBounds: upper_rowval entry");
    }

    try {
        auto lower = CscMatrix<Value>::from_csc(num_states, num_cols, lower_colptr, lower_rowval,
                                                lower_nzval);
        auto upper = CscMatrix<Value>::from_csc(num_states, num_cols, upper_colptr, upper_rowval,
                                                upper_nzval);
        auto transition = IntervalProbabilities<Value>::from_sparse(lower, upper);
        return IntervalMDP<Value>::from_parts(std::move(transition), std::move(stateptr),
                                              std::move(actions));
    } catch (const ModelError& e) {
        throw SchemaViolation(path + ": " + e.what());
    }
}

// ---- JSON specification ---------------------------------------------------

namespace detail {

template <typename Value>
std::vector<index_t> states_from_json(const nlohmann::json& arr, const char* field) {
    if (!arr.is_array()) throw SpecSchemaError(std::string(field) + " must be an array");
    std::vector<index_t> out;
    out.reserve(arr.size());
    for (const auto& v : arr) {
        if (!v.is_number_integer() || v.get<std::int64_t>() < 1) {
            throw SpecSchemaError(std::string(field) + " entries must be positive integers");
        }
        out.push_back(static_cast<index_t>(v.get<std::int64_t>() - 1)); // 1-based on disk
    }
    return out;
}

/// Parses a JSON number as the scalar type via its shortest decimal form,
/// so "0.95" becomes the exact rational 19/20 rather than the binary double.
template <typename Value>
Value value_from_json(const nlohmann::json& v, const char* field) {
    if (!v.is_number()) throw SpecSchemaError(std::string(field) + " must be a number");
    auto parsed = NumericTraits<Value>::parse(v.dump());
    if (!parsed) throw SpecSchemaError(std::string(field) + ": cannot represent value");
    return *parsed;
}

inline nlohmann::json json_number(double v) { return v; }

} // namespace detail

/// Reads the JSON specification file (Appendix-style schema; see
/// docs/formats.md). Enforces the exclusion rules: a finite-horizon property
/// must not carry `eps`, an infinite-horizon property must not carry
/// `time_horizon`, and plain reachability must not carry `avoid`.
template <typename Value>
Specification<Value> read_native_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingFile(path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw SpecSchemaError(path + ": " + e.what());
    }

    try {
        if (!j.contains("property")) throw SpecSchemaError("missing property object");
        const auto& prop = j.at("property");
        const std::string type = prop.at("type").get<std::string>();
        if (!prop.contains("infinite_time") || !prop.at("infinite_time").is_boolean()) {
            throw SpecSchemaError("property.infinite_time must be a boolean");
        }
        const bool infinite = prop.at("infinite_time").get<bool>();

        if (prop.contains("eps") && prop.contains("time_horizon")) {
            throw SpecSchemaError("eps and time_horizon are mutually exclusive");
        }
        std::int64_t horizon = 0;
        double eps = 0;
        if (infinite) {
            if (prop.contains("time_horizon")) {
                throw SpecSchemaError("an infinite-time property must not carry time_horizon");
            }
            if (!prop.contains("eps")) throw SpecSchemaError("an infinite-time property needs eps");
            eps = prop.at("eps").get<double>();
            if (!(eps > 0)) throw SpecSchemaError("eps must be positive");
        } else {
            if (prop.contains("eps")) {
                throw SpecSchemaError("a finite-time property must not carry eps");
            }
            if (!prop.contains("time_horizon")) {
                throw SpecSchemaError("a finite-time property needs time_horizon");
            }
            if (!prop.at("time_horizon").is_number_integer() ||
                prop.at("time_horizon").get<std::int64_t>() < 1) {
                throw SpecSchemaError("time_horizon must be a positive integer");
            }
            horizon = prop.at("time_horizon").get<std::int64_t>();
        }

        Specification<Value> spec;
        if (type == "reachability") {
            if (prop.contains("avoid")) {
                throw SpecSchemaError("a reachability property must not carry avoid");
            }
            auto reach = detail::states_from_json<Value>(prop.at("reach"), "reach");
            if (infinite) {
                spec.property = InfiniteTimeReachability{std::move(reach), eps};
            } else {
                spec.property = FiniteTimeReachability{std::move(reach), horizon};
            }
        } else if (type == "reach-avoid") {
            auto reach = detail::states_from_json<Value>(prop.at("reach"), "reach");
            auto avoid = detail::states_from_json<Value>(prop.at("avoid"), "avoid");
            if (infinite) {
                spec.property = InfiniteTimeReachAvoid{std::move(reach), std::move(avoid), eps};
            } else {
                spec.property = FiniteTimeReachAvoid{std::move(reach), std::move(avoid), horizon};
            }
        } else if (type == "reward") {
            if (!prop.contains("reward") || !prop.at("reward").is_array()) {
                throw SpecSchemaError("a reward property needs a reward array");
            }
            std::vector<Value> rewards;
            for (const auto& r : prop.at("reward")) {
                rewards.push_back(detail::value_from_json<Value>(r, "reward"));
            }
            Value discount = detail::value_from_json<Value>(prop.at("discount"), "discount");
            if (infinite) {
                spec.property = InfiniteTimeReward<Value>{std::move(rewards), discount, eps};
            } else {
                spec.property = FiniteTimeReward<Value>{std::move(rewards), discount, horizon};
            }
        } else {
            throw SpecSchemaError("unknown property type \"" + type + "\"");
        }

        const std::string sat = j.at("satisfaction_mode").get<std::string>();
        if (sat == "pessimistic") {
            spec.satisfaction_mode = SatisfactionMode::Pessimistic;
        } else if (sat == "optimistic") {
            spec.satisfaction_mode = SatisfactionMode::Optimistic;
        } else {
            throw SpecSchemaError("satisfaction_mode must be pessimistic or optimistic");
        }
        const std::string strat = j.at("strategy_mode").get<std::string>();
        if (strat == "minimize") {
            spec.strategy_mode = StrategyMode::Minimize;
        } else if (strat == "maximize") {
            spec.strategy_mode = StrategyMode::Maximize;
        } else {
            throw SpecSchemaError("strategy_mode must be minimize or maximize");
        }
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw SpecSchemaError(path + ": " + e.what());
    }
}

/// The specification as the JSON object stored on disk (1-based states).
template <typename Value>
nlohmann::json spec_to_json(const Specification<Value>& spec) {
    nlohmann::json prop;
    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            auto states_to_json = [](const std::vector<index_t>& states) {
                nlohmann::json arr = nlohmann::json::array();
                for (index_t s : states) arr.push_back(s + 1); // 1-based on disk
                return arr;
            };
            if constexpr (std::is_same_v<P, FiniteTimeReachability>) {
                prop["type"] = "reachability";
                prop["infinite_time"] = false;
                prop["time_horizon"] = p.horizon;
                prop["reach"] = states_to_json(p.goal);
            } else if constexpr (std::is_same_v<P, InfiniteTimeReachability>) {
                prop["type"] = "reachability";
                prop["infinite_time"] = true;
                prop["eps"] = p.eps;
                prop["reach"] = states_to_json(p.goal);
            } else if constexpr (std::is_same_v<P, FiniteTimeReachAvoid>) {
                prop["type"] = "reach-avoid";
                prop["infinite_time"] = false;
                prop["time_horizon"] = p.horizon;
                prop["reach"] = states_to_json(p.reach);
                prop["avoid"] = states_to_json(p.avoid);
            } else if constexpr (std::is_same_v<P, InfiniteTimeReachAvoid>) {
                prop["type"] = "reach-avoid";
                prop["infinite_time"] = true;
                prop["eps"] = p.eps;
                prop["reach"] = states_to_json(p.reach);
                prop["avoid"] = states_to_json(p.avoid);
            } else {
                prop["type"] = "reward";
                nlohmann::json rewards = nlohmann::json::array();
                for (const auto& r : p.rewards) {
                    rewards.push_back(NumericTraits<Value>::to_double(r));
                }
                prop["reward"] = std::move(rewards);
                prop["discount"] = NumericTraits<Value>::to_double(p.discount);
                if constexpr (std::is_same_v<P, FiniteTimeReward<Value>>) {
                    prop["infinite_time"] = false;
                    prop["time_horizon"] = p.horizon;
                } else {
                    prop["infinite_time"] = true;
                    prop["eps"] = p.eps;
                }
            }
        },
        spec.property);

    nlohmann::json j;
    j["property"] = std::move(prop);
    j["satisfaction_mode"] =
        spec.satisfaction_mode == SatisfactionMode::Pessimistic ? "pessimistic" : "optimistic";
    j["strategy_mode"] = spec.strategy_mode == StrategyMode::Minimize ? "minimize" : "maximize";
    return j;
}

template <typename Value>
void write_native_spec(const std::string& path, const Specification<Value>& spec) {
    auto out = detail::open_output(path);
    out << spec_to_json(spec).dump(1) << "\n";
}

/// Reads model and specification into a problem.
template <typename Value>
FormatProblem<Value> read_native(const std::string& model_path, const std::string& spec_path) {
    FormatProblem<Value> out;
    out.imdp = read_native_model<Value>(model_path);
    out.spec = read_native_spec<Value>(spec_path);
    check_property(out.spec->property, out.imdp.num_states());
    return out;
}

/// Writes model and specification.
template <typename Value>
void write_native(const std::string& model_path, const std::string& spec_path,
                  const Problem<Value>& problem, bool json_debug = false) {
    write_native_model(model_path, problem.imdp, json_debug);
    write_native_spec(spec_path, problem.spec);
}

} // namespace rimdp::io
