#pragma once

#include "rimdp/io/bmdp.hpp"
#include "rimdp/io/native.hpp"
#include "rimdp/io/prism.hpp"
#include "rimdp/solver.hpp"

#include <optional>
#include <string>

namespace rimdp::io {

enum class Format { Prism, Bmdp, Native };

inline std::optional<Format> parse_format(std::string_view name) {
    if (name == "prism") return Format::Prism;
    if (name == "bmdp") return Format::Bmdp;
    if (name == "native") return Format::Native;
    return std::nullopt;
}

inline const char* to_string(Format f) {
    switch (f) {
    case Format::Prism: return "prism";
    case Format::Bmdp: return "bmdp";
    case Format::Native: return "native";
    }
    return "?";
}

/// Input or output location of a problem: PRISM uses `model` as the path
/// stem; bmdp-tool uses `model` alone; native uses `model` plus `spec`.
struct FormatPaths {
    std::string model;
    std::string spec;
};

template <typename Value>
FormatProblem<Value> read_problem(Format format, const FormatPaths& paths) {
    switch (format) {
    case Format::Prism: return read_prism<Value>(paths.model);
    case Format::Bmdp: return read_bmdp_tool<Value>(paths.model);
    case Format::Native: {
        FormatProblem<Value> out;
        out.imdp = read_native_model<Value>(paths.model);
        if (!paths.spec.empty()) {
            out.spec = read_native_spec<Value>(paths.spec);
            check_property(out.spec->property, out.imdp.num_states());
        }
        return out;
    }
    }
    throw Error("unknown format");
}

template <typename Value>
void write_problem(Format format, const FormatPaths& paths, const FormatProblem<Value>& problem,
                   bool json_debug = false) {
    switch (format) {
    case Format::Prism: {
        if (!problem.spec) {
            throw UnsupportedQuery("the PRISM format requires a specification");
        }
        write_prism<Value>(paths.model, {problem.imdp, *problem.spec});
        return;
    }
    case Format::Bmdp: write_bmdp_tool(paths.model, problem); return;
    case Format::Native: {
        write_native_model(paths.model, problem.imdp, json_debug);
        if (problem.spec) {
            if (paths.spec.empty()) {
                throw Error("a specification is present but no spec output path was given");
            }
            write_native_spec(paths.spec, *problem.spec);
        }
        return;
    }
    }
}

struct ConvertOptions {
    /// Query used for the semantic-preservation check when the source format
    /// carries no specification: maximum pessimistic reachability of the
    /// terminal states over this horizon.
    std::int64_t default_horizon = 200;
    bool run_check = true;
    bool json_debug = false;
    unsigned workers = 0;
};

struct ConvertReport {
    bool checked = false;
    double max_value_difference = 0.0;
};

namespace detail {

/// Specification used to compare source and converted model semantically.
template <typename Value>
Specification<Value> check_spec(const FormatProblem<Value>& problem,
                                const ConvertOptions& options) {
    if (problem.spec) return *problem.spec;
    std::vector<index_t> goal;
    if (problem.terminal_states && !problem.terminal_states->empty()) {
        goal = *problem.terminal_states;
    } else {
        goal = {problem.imdp.num_states() - 1};
    }
    return {FiniteTimeReachability{std::move(goal), options.default_horizon},
            SatisfactionMode::Pessimistic, StrategyMode::Maximize};
}

} // namespace detail

/// Converts a problem between formats and, unless disabled, verifies that
/// value iteration agrees on the source and the converted files. Returns
/// the measured maximum state-wise difference (0 when the check is skipped).
template <typename Value>
ConvertReport convert(Format from, const FormatPaths& in, Format to, const FormatPaths& out,
                      const ConvertOptions& options = {}) {
    FormatProblem<Value> source = read_problem<Value>(from, in);

    // The bmdp format keeps the terminal set rather than a property; derive
    // it so the information is not lost on the way out.
    if (to == Format::Bmdp && !source.terminal_states) {
        source.terminal_states = detail::derive_terminal_states(source);
    }
    if (to == Format::Prism && !source.spec) {
        source.spec = detail::check_spec(source, options);
    }
    write_problem<Value>(to, out, source, options.json_debug);

    ConvertReport report;
    if (!options.run_check) return report;

    FormatProblem<Value> converted = read_problem<Value>(to, out);
    const Specification<Value> spec = detail::check_spec(source, options);
    SolverOptions solver_options;
    solver_options.workers = options.workers;
    auto v_src = value_iteration<Value>({source.imdp, spec}, solver_options);
    auto v_dst = value_iteration<Value>({converted.imdp, spec}, solver_options);
    report.checked = true;
    for (std::size_t i = 0; i < v_src.values.size(); ++i) {
        const double d = std::abs(NumericTraits<Value>::to_double(v_src.values[i]) -
                                  NumericTraits<Value>::to_double(v_dst.values[i]));
        report.max_value_difference = std::max(report.max_value_difference, d);
    }
    return report;
}

} // namespace rimdp::io
