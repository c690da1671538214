// rimdp command line: robust value iteration, strategy synthesis and format
// conversion for interval Markov decision processes.
//
// Exit codes: 0 success, 1 internal error, 2 parse/format error,
// 3 infeasible or invalid model, 4 no convergence.

#include "rimdp/rimdp.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <sys/resource.h>

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace rimdp;
using nlohmann::json;

struct CommonArgs {
    std::string format = "native";
    std::string model;
    std::string spec;
    unsigned threads = 0;
    bool threads_given = false;
    std::string precision = "f64";
    std::string output = "text";
    std::int64_t max_iter = 1'000'000;
    bool full_values = false;
};

unsigned resolve_threads(const CommonArgs& args) {
    if (args.threads_given) return args.threads;
    if (const char* env = std::getenv("RIMDP_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end && *end == '\0' && v >= 0) return static_cast<unsigned>(v);
    }
    return 0; // auto
}

double peak_rss_mb() {
    struct rusage usage {};
    getrusage(RUSAGE_SELF, &usage);
    return static_cast<double>(usage.ru_maxrss) / 1024.0; // ru_maxrss is in KiB on Linux
}

void add_common_flags(CLI::App* cmd, CommonArgs& args, bool with_output = true) {
    cmd->add_option("--format", args.format, "Input format: prism, bmdp or native")
        ->check(CLI::IsMember({"prism", "bmdp", "native"}));
    cmd->add_option("--model", args.model,
                    "Model path (PRISM: path stem of the four files)")
        ->required();
    cmd->add_option("--spec", args.spec,
                    "Specification path (JSON; required for native and bmdp input)");
    cmd->add_option("--threads", args.threads, "Worker threads; 0 = all cores")
        ->each([&args](const std::string&) { args.threads_given = true; });
    cmd->add_option("--precision", args.precision, "Scalar type: f64, f32 or rational")
        ->check(CLI::IsMember({"f64", "f32", "rational"}));
    if (with_output) {
        cmd->add_option("--output", args.output, "Report format: text, json or csv")
            ->check(CLI::IsMember({"text", "json", "csv"}));
        cmd->add_flag("--full", args.full_values,
                      "Print every state's value in text mode regardless of model size");
    }
    cmd->add_option("--max-iter", args.max_iter,
                    "Iteration cap for infinite-horizon properties");
}

template <typename Value>
io::FormatProblem<Value> load_problem(const CommonArgs& args) {
    auto format = io::parse_format(args.format);
    io::FormatProblem<Value> problem =
        io::read_problem<Value>(*format, {args.model, args.spec});
    if (!problem.spec) {
        if (args.spec.empty()) {
            throw SpecSchemaError("the " + args.format +
                                  " format carries no specification; pass --spec FILE.json");
        }
        problem.spec = io::read_native_spec<Value>(args.spec);
        check_property(problem.spec->property, problem.imdp.num_states());
    }
    return problem;
}

template <typename Value>
json property_report(const Specification<Value>& spec) {
    return io::spec_to_json(spec);
}

template <typename Value>
json values_to_json(const std::vector<Value>& values) {
    json arr = json::array();
    for (const Value& v : values) {
        if constexpr (NumericTraits<Value>::is_exact) {
            arr.push_back(NumericTraits<Value>::to_string(v));
        } else {
            arr.push_back(v);
        }
    }
    return arr;
}

template <typename Value>
struct SolveReport {
    const IntervalMDP<Value>* imdp;
    const Specification<Value>* spec;
    const ValueFunction<Value>* vf;
    double wall_seconds;
    unsigned threads;
};

template <typename Value>
json report_to_json(const CommonArgs& args, const SolveReport<Value>& r) {
    json j;
    j["model"] = {{"path", args.model},
                  {"format", args.format},
                  {"states", r.imdp->num_states()},
                  {"columns", r.imdp->num_cols()},
                  {"transitions", r.imdp->num_transitions()}};
    j["specification"] = property_report(*r.spec);
    j["precision"] = args.precision;
    j["threads"] = r.threads;

    double min_v = 0, max_v = 0, sum = 0;
    for (std::size_t i = 0; i < r.vf->values.size(); ++i) {
        const double v = NumericTraits<Value>::to_double(r.vf->values[i]);
        if (i == 0) min_v = max_v = v;
        min_v = std::min(min_v, v);
        max_v = std::max(max_v, v);
        sum += v;
    }
    json result;
    result["iterations"] = r.vf->iterations;
    result["max_residual"] = NumericTraits<Value>::to_double(r.vf->max_residual());
    result["wall_time_seconds"] = r.wall_seconds;
    result["values"] = values_to_json(r.vf->values);
    if constexpr (NumericTraits<Value>::is_exact) {
        json approx = json::array();
        for (const Value& v : r.vf->values) approx.push_back(NumericTraits<Value>::to_double(v));
        result["values_f64"] = std::move(approx);
    }
    result["summary"] = {{"min", min_v},
                         {"mean", r.vf->values.empty() ? 0.0 : sum / r.vf->values.size()},
                         {"max", max_v}};
    j["result"] = std::move(result);
    return j;
}

template <typename Value>
void print_report(const CommonArgs& args, const SolveReport<Value>& r) {
    using Traits = NumericTraits<Value>;
    if (args.output == "json") {
        std::cout << report_to_json(args, r).dump(1) << "\n";
        return;
    }
    if (args.output == "csv") {
        std::cout << "state,value,residual\n";
        for (std::size_t i = 0; i < r.vf->values.size(); ++i) {
            std::cout << i << "," << Traits::to_string(r.vf->values[i]) << ","
                      << Traits::to_string(r.vf->residual[i]) << "\n";
        }
        return;
    }

    std::cout << "model: " << r.imdp->num_states() << " states, " << r.imdp->num_cols()
              << " columns, " << r.imdp->num_transitions() << " transitions\n";
    std::cout << "specification: " << property_report(*r.spec).dump() << "\n";
    std::cout << "precision: " << args.precision << ", threads: " << r.threads << "\n";
    std::cout << "iterations: " << r.vf->iterations << "\n";
    std::cout << "max residual: " << Traits::to_string(r.vf->max_residual()) << "\n";
    std::cout << "wall time: " << r.wall_seconds << " s\n";

    const json summary = report_to_json(args, r)["result"]["summary"];
    std::cout << "values: min " << summary["min"].dump() << ", mean " << summary["mean"].dump()
              << ", max " << summary["max"].dump() << "\n";
    if (args.full_values || r.imdp->num_states() <= 50) {
        for (std::size_t i = 0; i < r.vf->values.size(); ++i) {
            std::cout << "  " << i << ": " << Traits::to_string(r.vf->values[i]) << "\n";
        }
    }
}

// ---- verify ----------------------------------------------------------------

template <typename Value>
int run_verify(const CommonArgs& args) {
    auto problem_files = load_problem<Value>(args);
    Problem<Value> problem{std::move(problem_files.imdp), *problem_files.spec};

    SolverOptions options;
    options.workers = resolve_threads(args);
    options.max_iterations = args.max_iter;

    const auto start = std::chrono::steady_clock::now();
    ValueFunction<Value> vf = value_iteration(problem, options);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    print_report<Value>(args, {&problem.imdp, &problem.spec, &vf, seconds,
                               effective_workers(options.workers)});
    return 0;
}

// ---- synthesize -------------------------------------------------------------

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

void write_policy_csv(const std::string& path, const Policy& policy) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path + " for writing");
    if (const auto* stationary = std::get_if<StationaryPolicy>(&policy)) {
        out << "state,action\n";
        for (std::size_t s = 0; s < stationary->actions.size(); ++s) {
            out << s << "," << csv_escape(stationary->actions[s]) << "\n";
        }
    } else {
        const auto& td = std::get<TimeDependentPolicy>(policy);
        out << "state";
        for (std::int64_t t = 0; t < td.horizon; ++t) out << ",t" << t;
        out << "\n";
        for (std::int64_t s = 0; s < td.num_states; ++s) {
            out << s;
            for (std::int64_t t = 0; t < td.horizon; ++t) out << "," << csv_escape(td.at(s, t));
            out << "\n";
        }
    }
}

template <typename Value>
int run_synthesize(const CommonArgs& args, const std::string& policy_out) {
    auto problem_files = load_problem<Value>(args);
    Problem<Value> problem{std::move(problem_files.imdp), *problem_files.spec};

    SolverOptions options;
    options.workers = resolve_threads(args);
    options.max_iterations = args.max_iter;

    const auto start = std::chrono::steady_clock::now();
    auto [policy, vf] = control_synthesis(problem, options);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    write_policy_csv(policy_out, policy);
    std::cout << "policy written to " << policy_out << " ("
              << (std::holds_alternative<StationaryPolicy>(policy) ? "stationary" : "time-dependent")
              << ")\n";
    print_report<Value>(args, {&problem.imdp, &problem.spec, &vf, seconds,
                               effective_workers(options.workers)});
    return 0;
}

// ---- validate ---------------------------------------------------------------

template <typename Value>
int run_validate(const CommonArgs& args) {
    auto format = io::parse_format(args.format);
    io::FormatProblem<Value> problem = io::read_problem<Value>(*format, {args.model, args.spec});
    ValidationReport report = problem.imdp.validate();
    if (problem.spec) check_property(problem.spec->property, problem.imdp.num_states());
    if (report.empty()) {
        std::cout << "ok: " << problem.imdp.num_states() << " states, " << problem.imdp.num_cols()
                  << " columns, " << problem.imdp.num_transitions() << " transitions\n";
        return 0;
    }
    for (const auto& violation : report) std::cout << violation.to_string() << "\n";
    return 3;
}

// ---- convert ----------------------------------------------------------------

struct ConvertArgs {
    std::string in_format;
    std::string out_format;
    std::string in_model, in_spec;
    std::string out_model, out_spec;
    std::string precision = "f64";
    bool skip_check = false;
    bool json_debug = false;
    std::int64_t horizon = 200;
    unsigned threads = 0;
};

template <typename Value>
int run_convert(const ConvertArgs& args) {
    io::ConvertOptions options;
    options.run_check = !args.skip_check;
    options.json_debug = args.json_debug;
    options.default_horizon = args.horizon;
    options.workers = args.threads;
    auto report = io::convert<Value>(*io::parse_format(args.in_format),
                                     {args.in_model, args.in_spec},
                                     *io::parse_format(args.out_format),
                                     {args.out_model, args.out_spec}, options);
    if (report.checked) {
        std::cout << "semantic check: max value difference " << report.max_value_difference
                  << "\n";
        if (report.max_value_difference > 1e-9) {
            std::cout << "conversion changed the model semantics\n";
            return 3;
        }
    }
    std::cout << "converted " << args.in_model << " (" << args.in_format << ") -> "
              << args.out_model << " (" << args.out_format << ")\n";
    return 0;
}

// ---- bench ------------------------------------------------------------------

struct BenchArgs {
    index_t states = 10000;
    index_t actions = 2;
    double density = 0.001;
    double scale = 0.2;
    std::uint64_t seed = 1;
    std::int64_t horizon = 200;
    std::string threads_list = "1,2,4";
    std::string output = "text";
    std::string precision = "f64";
    std::string format;
    std::string model, spec;
};

template <typename Value>
int run_bench(const BenchArgs& args) {
    IntervalMDP<Value> imdp;
    if (!args.model.empty()) {
        auto problem = io::read_problem<Value>(*io::parse_format(args.format.empty() ? "native" : args.format),
                                               {args.model, args.spec});
        imdp = std::move(problem.imdp);
    } else {
        RandomModelConfig config{args.states, args.actions, args.density, args.scale, args.seed};
        imdp = random_imdp<Value>(config);
    }

    // The benchmark query: maximum pessimistic reachability of the last
    // state over a fixed horizon. Model generation/loading is not timed.
    Specification<Value> spec{FiniteTimeReachability{{imdp.num_states() - 1}, args.horizon},
                              SatisfactionMode::Pessimistic, StrategyMode::Maximize};
    Problem<Value> problem{std::move(imdp), spec};

    std::vector<unsigned> thread_counts;
    {
        std::string item;
        std::stringstream ss{args.threads_list};
        while (std::getline(ss, item, ',')) {
            thread_counts.push_back(static_cast<unsigned>(std::stoul(item)));
        }
    }
    if (thread_counts.empty()) thread_counts = {1};

    json rows = json::array();
    for (unsigned threads : thread_counts) {
        SolverOptions options;
        options.workers = threads;
        const auto start = std::chrono::steady_clock::now();
        auto vf = value_iteration(problem, options);
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        rows.push_back({{"threads", threads},
                        {"seconds", seconds},
                        {"iterations", vf.iterations},
                        {"peak_rss_mb", peak_rss_mb()}});
    }

    if (args.output == "json") {
        json j = {{"states", problem.imdp.num_states()},
                  {"columns", problem.imdp.num_cols()},
                  {"transitions", problem.imdp.num_transitions()},
                  {"horizon", args.horizon},
                  {"seed", args.seed},
                  {"precision", args.precision},
                  {"runs", rows}};
        std::cout << j.dump(1) << "\n";
    } else if (args.output == "csv") {
        std::cout << "threads,seconds,iterations,peak_rss_mb\n";
        for (const auto& row : rows) {
            std::cout << row["threads"] << "," << row["seconds"] << "," << row["iterations"]
                      << "," << row["peak_rss_mb"] << "\n";
        }
    } else {
        std::cout << "model: " << problem.imdp.num_states() << " states, "
                  << problem.imdp.num_cols() << " columns, " << problem.imdp.num_transitions()
                  << " transitions; horizon " << args.horizon << "\n";
        std::cout << "threads  seconds      iterations  peak_rss_mb\n";
        for (const auto& row : rows) {
            std::cout << "  " << row["threads"] << "      " << row["seconds"] << "   "
                      << row["iterations"] << "       " << row["peak_rss_mb"] << "\n";
        }
        // computation time only; model generation and I/O are excluded
    }
    return 0;
}

// ---- dispatch ----------------------------------------------------------------

template <typename Fn>
int dispatch_precision(const std::string& precision, Fn&& fn) {
    if (precision == "f64") return fn(double{});
    if (precision == "f32") return fn(float{});
    return fn(Rational{});
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robust value iteration for interval Markov decision processes"};
    app.require_subcommand(1);

    CommonArgs verify_args, synth_args, validate_args;
    std::string policy_out = "policy.csv";
    ConvertArgs convert_args;
    BenchArgs bench_args;

    auto* verify = app.add_subcommand("verify", "Run value iteration and report values");
    add_common_flags(verify, verify_args);

    auto* synthesize = app.add_subcommand("synthesize", "Synthesize an optimal policy");
    add_common_flags(synthesize, synth_args);
    synthesize->add_option("--policy-out", policy_out, "Policy CSV output path");

    auto* validate = app.add_subcommand("validate", "Check model invariants and report violations");
    add_common_flags(validate, validate_args, false);

    auto* convert = app.add_subcommand("convert", "Convert between model formats");
    convert->add_option("--in-format", convert_args.in_format, "Source format")
        ->check(CLI::IsMember({"prism", "bmdp", "native"}))
        ->required();
    convert->add_option("--out-format", convert_args.out_format, "Target format")
        ->check(CLI::IsMember({"prism", "bmdp", "native"}))
        ->required();
    convert->add_option("--in-model", convert_args.in_model, "Source model path/stem")->required();
    convert->add_option("--in-spec", convert_args.in_spec, "Source specification (native)");
    convert->add_option("--out-model", convert_args.out_model, "Target model path/stem")->required();
    convert->add_option("--out-spec", convert_args.out_spec, "Target specification path (native)");
    convert->add_option("--precision", convert_args.precision, "Scalar type")
        ->check(CLI::IsMember({"f64", "f32", "rational"}));
    convert->add_flag("--skip-check", convert_args.skip_check,
                      "Skip the semantic-preservation value check");
    convert->add_flag("--json-debug", convert_args.json_debug,
                      "Write the native container as readable JSON");
    convert->add_option("--horizon", convert_args.horizon,
                        "Query horizon for the check when the source has no specification");
    convert->add_option("--threads", convert_args.threads, "Worker threads for the check");

    auto* bench = app.add_subcommand("bench", "Benchmark value iteration on random models");
    bench->add_option("--states", bench_args.states, "Number of states");
    bench->add_option("--actions", bench_args.actions, "Actions per state");
    bench->add_option("--density", bench_args.density, "Support fraction per column");
    bench->add_option("--scale", bench_args.scale, "Lower-bound mass scale of the generator");
    bench->add_option("--seed", bench_args.seed, "Generator seed");
    bench->add_option("--horizon", bench_args.horizon, "Query horizon");
    bench->add_option("--threads-list", bench_args.threads_list,
                      "Comma-separated worker counts to benchmark");
    bench->add_option("--output", bench_args.output, "Report format: text, json or csv")
        ->check(CLI::IsMember({"text", "json", "csv"}));
    bench->add_option("--precision", bench_args.precision, "Scalar type")
        ->check(CLI::IsMember({"f64", "f32", "rational"}));
    bench->add_option("--format", bench_args.format, "Load a model instead of generating one")
        ->check(CLI::IsMember({"prism", "bmdp", "native"}));
    bench->add_option("--model", bench_args.model, "Model path when --format is given");
    bench->add_option("--spec", bench_args.spec, "Specification path when --format is native");

    CLI11_PARSE(app, argc, argv);

    try {
        if (verify->parsed()) {
            return dispatch_precision(verify_args.precision,
                                      [&](auto v) { return run_verify<decltype(v)>(verify_args); });
        }
        if (synthesize->parsed()) {
            return dispatch_precision(synth_args.precision, [&](auto v) {
                return run_synthesize<decltype(v)>(synth_args, policy_out);
            });
        }
        if (validate->parsed()) {
            return dispatch_precision(validate_args.precision,
                                      [&](auto v) { return run_validate<decltype(v)>(validate_args); });
        }
        if (convert->parsed()) {
            return dispatch_precision(convert_args.precision,
                                      [&](auto v) { return run_convert<decltype(v)>(convert_args); });
        }
        if (bench->parsed()) {
            return dispatch_precision(bench_args.precision,
                                      [&](auto v) { return run_bench<decltype(v)>(bench_args); });
        }
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const MissingFile& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const SchemaViolation& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const SpecSchemaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const UnsupportedQuery& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NonConvergence& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const ModelError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
