#pragma once

#include "rimdp/io/common.hpp"

#include <set>
#include <string>

namespace rimdp::io {

/*
 * bmdp-tool data format: a single ASCII file.
 *
 *   line 1            number of states
 *   line 2            number of actions (the largest action count of any
 *                     state)
 *   line 3            number of terminal states
 *   next lines        the terminal state indices (whitespace separated,
 *                     any line layout)
 *   remaining lines   one transition each:  src action dst lower upper
 *
 * States and actions are 0-based. Actions are positional indices: the file
 * carries no label text, so reading yields labels "0", "1", ... per state.
 * The format stores no property; only the terminal state set is returned.
 * Tabs and spaces are both accepted as separators.
 */

/// Reads a bmdp-tool file into a model plus terminal state set.
template <typename Value>
FormatProblem<Value> read_bmdp_tool(const std::string& path) {
    using namespace detail;
    LineReader in(path);
    std::string line;

    auto read_count = [&](const char* what) -> std::int64_t {
        if (!in.next_content(line)) in.fail(std::string("missing ") + what);
        auto tokens = split_whitespace(line);
        auto v = tokens.size() == 1 ? parse_int(tokens[0]) : std::nullopt;
        if (!v || *v < 0) in.fail(std::string("bad ") + what);
        return *v;
    };

    const std::int64_t num_states = read_count("state count");
    const std::int64_t num_actions = read_count("action count");
    const std::int64_t num_terminal = read_count("terminal state count");
    if (num_states <= 0) in.fail("state count must be positive");

    std::set<index_t> terminal;
    std::int64_t terminal_tokens = 0;
    while (terminal_tokens < num_terminal) {
        if (!in.next_content(line)) in.fail("unexpected end of file in terminal state list");
        for (auto token : split_whitespace(line)) {
            auto t = parse_int(token);
            if (!t || *t < 0 || *t >= num_states) {
                in.fail("DanglingStateIndex: terminal state " + std::string(token));
            }
            if (terminal_tokens == num_terminal) {
                in.fail("more terminal states than declared");
            }
            terminal.insert(static_cast<index_t>(*t));
            ++terminal_tokens;
        }
    }

    TransitionAccumulator<Value> acc(static_cast<index_t>(num_states), path);
    while (in.next_content(line)) {
        auto tokens = split_whitespace(line);
        if (tokens.size() != 5) in.fail("expected \"src action dst lower upper\"");
        auto src = parse_int(tokens[0]);
        auto action = parse_int(tokens[1]);
        auto dst = parse_int(tokens[2]);
        if (!src || !action || !dst) in.fail("bad indices");
        if (*action >= num_actions) {
            in.fail("action index " + std::to_string(*action) + " exceeds the declared count");
        }
        Value lo = parse_probability<Value>(in, tokens[3]);
        Value hi = parse_probability<Value>(in, tokens[4]);
        acc.add(in, *src, *action, *dst, lo, hi);
    }

    FormatProblem<Value> out;
    out.imdp = acc.build();
    out.terminal_states = std::vector<index_t>(terminal.begin(), terminal.end());
    return out;
}

namespace detail {

/// Terminal set written for a problem: an explicit set if present, else the
/// reach states of a reachability property, else empty.
template <typename Value>
std::vector<index_t> derive_terminal_states(const FormatProblem<Value>& problem) {
    if (problem.terminal_states) return *problem.terminal_states;
    if (problem.spec) {
        if (const auto* p = std::get_if<FiniteTimeReachability>(&problem.spec->property)) {
            return p->goal;
        }
        if (const auto* p = std::get_if<InfiniteTimeReachability>(&problem.spec->property)) {
            return p->goal;
        }
        if (const auto* p = std::get_if<FiniteTimeReachAvoid>(&problem.spec->property)) {
            return p->reach;
        }
        if (const auto* p = std::get_if<InfiniteTimeReachAvoid>(&problem.spec->property)) {
            return p->reach;
        }
    }
    return {};
}

} // namespace detail

/// Writes a bmdp-tool file. Action labels are not representable in this
/// format; columns are written as their positional index within the state.
template <typename Value>
void write_bmdp_tool(const std::string& path, const FormatProblem<Value>& problem) {
    using Traits = NumericTraits<Value>;
    const auto& imdp = problem.imdp;
    const index_t n = imdp.num_states();

    index_t max_actions = 0;
    for (index_t s = 0; s < n; ++s) max_actions = std::max(max_actions, imdp.num_actions(s));
    const std::vector<index_t> terminal = detail::derive_terminal_states(problem);

    auto out = detail::open_output(path);
    out << n << "\n" << max_actions << "\n" << terminal.size() << "\n";
    for (index_t t : terminal) out << t << "\n";
    for (index_t s = 0; s < n; ++s) {
        for (index_t c = imdp.columns_begin(s); c < imdp.columns_end(s); ++c) {
            const auto col = imdp.transition().column(c);
            const index_t choice = c - imdp.columns_begin(s);
            for (std::size_t k = 0; k < col.size(); ++k) {
                out << s << " " << choice << " " << col.rows[k] << " "
                    << Traits::to_string(col.lower[k]) << " " << Traits::to_string(col.upper[k])
                    << "\n";
            }
        }
    }
}

template <typename Value>
void write_bmdp_tool(const std::string& path, const Problem<Value>& problem) {
    FormatProblem<Value> fp;
    fp.imdp = problem.imdp;
    fp.spec = problem.spec;
    write_bmdp_tool(path, fp);
}

} // namespace rimdp::io
