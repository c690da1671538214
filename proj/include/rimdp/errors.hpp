#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rimdp {

/// Base class for all errors thrown by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Kinds of model-level violations, reported by validation and thrown
/// by the checked constructors.
enum class ViolationKind {
    ShapeMismatch,
    EntryOutOfRange,
    BoundOrderViolation,
    InfeasibleColumn,
    DestinationCountMismatch,
    DuplicateActionLabel,
    EmptyActionSet,
    StructuralError,
};

const char* violation_kind_name(ViolationKind kind);

/// One validation diagnostic. Indices are 0-based; -1 means not applicable.
struct Violation {
    ViolationKind kind;
    std::string message;
    std::int64_t column = -1;
    std::int64_t row = -1;
    std::int64_t state = -1;

    std::string to_string() const;
};

using ValidationReport = std::vector<Violation>;

/// Thrown by checked model constructors on the first violation found.
class ModelError : public Error {
public:
    explicit ModelError(Violation v) : Error(v.to_string()), violation_(std::move(v)) {}

    const Violation& violation() const { return violation_; }
    ViolationKind kind() const { return violation_.kind; }

private:
    Violation violation_;
};

/// A required input file does not exist or cannot be opened.
class MissingFile : public Error {
public:
    explicit MissingFile(const std::string& path)
        : Error("missing file: " + path), path_(path) {}

    const std::string& path() const { return path_; }

private:
    std::string path_;
};

/// Parse failure with file and line provenance.
class ParseError : public Error {
public:
    ParseError(std::string file, std::int64_t line, const std::string& reason)
        : Error(file + ":" + std::to_string(line) + ": " + reason),
          file_(std::move(file)), line_(line), reason_(reason) {}

    const std::string& file() const { return file_; }
    std::int64_t line() const { return line_; }
    const std::string& reason() const { return reason_; }

private:
    std::string file_;
    std::int64_t line_;
    std::string reason_;
};

/// The PRISM query is outside the supported grammar.
class UnsupportedQuery : public Error {
public:
    explicit UnsupportedQuery(const std::string& msg) : Error("unsupported query: " + msg) {}
};

/// A container attribute or variable is missing or has the wrong type/tag.
class SchemaViolation : public Error {
public:
    explicit SchemaViolation(const std::string& msg) : Error("schema violation: " + msg) {}
};

/// The JSON specification violates the schema (missing or mutually
/// exclusive fields, wrong types).
class SpecSchemaError : public Error {
public:
    explicit SpecSchemaError(const std::string& msg) : Error("specification schema: " + msg) {}
};

/// A property references a state index outside the model.
class PropertyStateOutOfRange : public Error {
public:
    PropertyStateOutOfRange(std::int64_t state, std::int64_t num_states)
        : Error("property state index " + std::to_string(state) + " out of range (model has " +
                std::to_string(num_states) + " states)") {}
};

/// A property is internally inconsistent (overlapping reach/avoid sets,
/// reward vector of the wrong length, discount outside [0,1], ...).
class InvalidProperty : public Error {
public:
    explicit InvalidProperty(const std::string& msg) : Error("invalid property: " + msg) {}
};

/// Infinite-horizon iteration exceeded the iteration cap.
class NonConvergence : public Error {
public:
    NonConvergence(std::int64_t iterations, double residual)
        : Error("no convergence after " + std::to_string(iterations) +
                " iterations (max residual " + std::to_string(residual) + ")"),
          iterations_(iterations), residual_(residual) {}

    std::int64_t iterations() const { return iterations_; }
    double residual() const { return residual_; }

private:
    std::int64_t iterations_;
    double residual_;
};

/// A policy entry is not an action of its state, or the policy shape does
/// not match the property.
class InvalidPolicyAction : public Error {
public:
    explicit InvalidPolicyAction(const std::string& msg) : Error("invalid policy: " + msg) {}
};

inline const char* violation_kind_name(ViolationKind kind) {
    switch (kind) {
    case ViolationKind::ShapeMismatch: return "ShapeMismatch";
    case ViolationKind::EntryOutOfRange: return "EntryOutOfRange";
    case ViolationKind::BoundOrderViolation: return "BoundOrderViolation";
    case ViolationKind::InfeasibleColumn: return "InfeasibleColumn";
    case ViolationKind::DestinationCountMismatch: return "DestinationCountMismatch";
    case ViolationKind::DuplicateActionLabel: return "DuplicateActionLabel";
    case ViolationKind::EmptyActionSet: return "EmptyActionSet";
    case ViolationKind::StructuralError: return "StructuralError";
    }
    return "Unknown";
}

inline std::string Violation::to_string() const {
    std::string s = violation_kind_name(kind);
    if (state >= 0) s += " state=" + std::to_string(state);
    if (column >= 0) s += " column=" + std::to_string(column);
    if (row >= 0) s += " row=" + std::to_string(row);
    s += ": " + message;
    return s;
}

} // namespace rimdp
