#pragma once

#include "rimdp/io/common.hpp"

#include <map>
#include <set>
#include <string>

namespace rimdp::io {

/*
 * PRISM explicit data format, split over four files sharing one path stem:
 *
 *   <stem>.sta   states: a header line with the variable tuple, then one
 *                line "i:(i)" per state.
 *   <stem>.lab   labels: a declaration line `0="init" 1="deadlock" ...`,
 *                then one line `state: id id ...` per labelled state.
 *   <stem>.tra   transitions: a header "states columns transitions", then
 *                one line per interval transition:
 *                    src choice dst [lo,hi] action-label
 *                `choice` is the action's position within the source state
 *                (0-based); the trailing label is optional on input.
 *   <stem>.pctl  the query. Supported grammar (one query per file):
 *                    P{min|max}{min|max}=? [ F "label" ]
 *                    P{min|max}{min|max}=? [ F<=K "label" ]
 *                The first min/max selects the strategy, the second the
 *                adversary (min = pessimistic). Anything else is rejected.
 *
 * See docs/formats.md for byte-level examples.
 */

namespace detail {

struct PrismQuery {
    StrategyMode strategy;
    SatisfactionMode satisfaction;
    bool bounded;
    std::int64_t horizon = 0;
    std::string label;
};

inline PrismQuery parse_pctl_query(const LineReader& reader, const std::string& text) {
    PrismQuery q;
    std::size_t pos = 0;
    auto skip_ws = [&] {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    };
    auto expect = [&](std::string_view token) {
        skip_ws();
        if (text.compare(pos, token.size(), token) != 0) {
            throw UnsupportedQuery("expected \"" + std::string(token) + "\" in query \"" + text +
                                   "\"");
        }
        pos += token.size();
    };

    skip_ws();
    expect("P");
    auto mode = [&](const char* what) -> bool {
        skip_ws();
        if (text.compare(pos, 3, "min") == 0) {
            pos += 3;
            return true;
        }
        if (text.compare(pos, 3, "max") == 0) {
            pos += 3;
            return false;
        }
        throw UnsupportedQuery(std::string("expected min or max for the ") + what + " in \"" +
                               text + "\"");
    };
    q.strategy = mode("strategy") ? StrategyMode::Minimize : StrategyMode::Maximize;
    q.satisfaction = mode("adversary") ? SatisfactionMode::Pessimistic : SatisfactionMode::Optimistic;
    expect("=?");
    expect("[");
    expect("F");

    skip_ws();
    q.bounded = false;
    if (text.compare(pos, 2, "<=") == 0) {
        pos += 2;
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
        auto k = parse_int(std::string_view(text).substr(start, pos - start));
        if (!k) throw UnsupportedQuery("bad step bound in \"" + text + "\"");
        q.bounded = true;
        q.horizon = *k;
    }

    skip_ws();
    if (pos >= text.size() || text[pos] != '"') {
        throw UnsupportedQuery("expected a quoted label in \"" + text + "\"");
    }
    ++pos;
    std::size_t end = text.find('"', pos);
    if (end == std::string::npos) reader.fail("unterminated label");
    q.label = text.substr(pos, end - pos);
    pos = end + 1;
    expect("]");
    skip_ws();
    if (pos != text.size()) {
        throw UnsupportedQuery("trailing characters after query \"" + text + "\"");
    }
    return q;
}

} // namespace detail

/// Tolerance used for unbounded PRISM queries, which carry no convergence
/// threshold of their own.
inline constexpr double prism_default_eps = 1e-6;

/// Reads the four PRISM explicit files at `stem` (.sta/.lab/.tra/.pctl) into
/// a problem. Throws MissingFile naming the absent file, ParseError with
/// file/line provenance, or UnsupportedQuery.
template <typename Value>
FormatProblem<Value> read_prism(const std::string& stem) {
    using namespace detail;

    // States: count the entries and require indices 0..n-1 in order.
    index_t num_states = 0;
    {
        LineReader sta(stem + ".sta");
        std::string line;
        if (!sta.next_content(line)) sta.fail("empty state file");
        // header line "(var,...)" is not interpreted further
        while (sta.next_content(line)) {
            auto colon = line.find(':');
            if (colon == std::string::npos) sta.fail("expected \"index:(values)\"");
            auto idx = parse_int(std::string_view(line).substr(0, colon));
            if (!idx || *idx != num_states) {
                sta.fail("state indices must be consecutive from 0");
            }
            ++num_states;
        }
        if (num_states == 0) sta.fail("no states");
    }

    // Labels: declarations, then per-state label id lists.
    std::map<std::string, std::set<index_t>> label_states;
    {
        LineReader lab(stem + ".lab");
        std::string line;
        if (!lab.next_content(line)) lab.fail("empty label file");
        std::map<std::int64_t, std::string> names;
        for (auto token : split_whitespace(line)) {
            auto eq = token.find('=');
            if (eq == std::string_view::npos) lab.fail("expected id=\"name\" declarations");
            auto id = parse_int(token.substr(0, eq));
            std::string_view name = token.substr(eq + 1);
            if (!id || name.size() < 2 || name.front() != '"' || name.back() != '"') {
                lab.fail("expected id=\"name\" declarations");
            }
            names[*id] = std::string(name.substr(1, name.size() - 2));
        }
        while (lab.next_content(line)) {
            auto colon = line.find(':');
            if (colon == std::string::npos) lab.fail("expected \"state: id ...\"");
            auto state = parse_int(std::string_view(line).substr(0, colon));
            if (!state || *state < 0 || *state >= num_states) {
                lab.fail("label references unknown state");
            }
            for (auto token : split_whitespace(std::string_view(line).substr(colon + 1))) {
                auto id = parse_int(token);
                if (!id || names.find(*id) == names.end()) {
                    lab.fail("label id " + std::string(token) + " not declared");
                }
                label_states[names[*id]].insert(static_cast<index_t>(*state));
            }
        }
    }

    // Transitions.
    TransitionAccumulator<Value> acc(num_states, stem + ".tra");
    {
        LineReader tra(stem + ".tra");
        std::string line;
        if (!tra.next_content(line)) tra.fail("empty transition file");
        auto header = split_whitespace(line);
        if (header.size() != 3) tra.fail("expected header \"states columns transitions\"");
        auto h_states = parse_int(header[0]);
        auto h_cols = parse_int(header[1]);
        auto h_trans = parse_int(header[2]);
        if (!h_states || !h_cols || !h_trans) tra.fail("bad header");
        if (*h_states != num_states) {
            tra.fail("InconsistentStateCount: .tra declares " + std::to_string(*h_states) +
                     " states, .sta has " + std::to_string(num_states));
        }
        std::int64_t lines = 0;
        while (tra.next_content(line)) {
            auto tokens = split_whitespace(line);
            if (tokens.size() != 4 && tokens.size() != 5) {
                tra.fail("expected \"src choice dst [lo,hi] (label)\"");
            }
            auto src = parse_int(tokens[0]);
            auto choice = parse_int(tokens[1]);
            auto dst = parse_int(tokens[2]);
            if (!src || !choice || !dst) tra.fail("bad indices");
            std::string_view bounds = tokens[3];
            if (bounds.size() < 5 || bounds.front() != '[' || bounds.back() != ']') {
                tra.fail("expected interval \"[lo,hi]\"");
            }
            bounds = bounds.substr(1, bounds.size() - 2);
            auto comma = bounds.find(',');
            if (comma == std::string_view::npos) tra.fail("expected interval \"[lo,hi]\"");
            Value lo = parse_probability<Value>(tra, bounds.substr(0, comma));
            Value hi = parse_probability<Value>(tra, bounds.substr(comma + 1));
            acc.add(tra, *src, *choice, *dst, lo, hi);
            if (tokens.size() == 5) acc.set_action_label(tra, *src, *choice, std::string(tokens[4]));
            ++lines;
        }
        if (lines != *h_trans) {
            tra.fail("header declares " + std::to_string(*h_trans) + " transitions, file has " +
                     std::to_string(lines));
        }
    }

    // Query.
    detail::PrismQuery query;
    {
        LineReader pctl(stem + ".pctl");
        std::string line;
        if (!pctl.next_content(line)) pctl.fail("empty query file");
        query = parse_pctl_query(pctl, line);
        if (pctl.next_content(line)) pctl.fail("expected a single query");
    }

    auto it = label_states.find(query.label);
    if (it == label_states.end()) {
        throw ParseError(stem + ".pctl", 1, "label \"" + query.label + "\" not defined in .lab");
    }
    std::vector<index_t> goal(it->second.begin(), it->second.end());

    FormatProblem<Value> out;
    out.imdp = acc.build();
    Specification<Value> spec;
    if (query.bounded) {
        spec.property = FiniteTimeReachability{std::move(goal), query.horizon};
    } else {
        spec.property = InfiniteTimeReachability{std::move(goal), prism_default_eps};
    }
    spec.satisfaction_mode = query.satisfaction;
    spec.strategy_mode = query.strategy;
    out.spec = std::move(spec);
    return out;
}

/// Writes the four PRISM explicit files for a reachability problem. Reward
/// and reach-avoid properties are outside the PRISM query grammar supported
/// here and raise UnsupportedQuery.
template <typename Value>
void write_prism(const std::string& stem, const Problem<Value>& problem) {
    using Traits = NumericTraits<Value>;
    const auto& imdp = problem.imdp;
    const index_t n = imdp.num_states();

    const std::vector<index_t>* goal = nullptr;
    bool bounded = false;
    std::int64_t horizon = 0;
    if (const auto* p = std::get_if<FiniteTimeReachability>(&problem.spec.property)) {
        goal = &p->goal;
        bounded = true;
        horizon = p->horizon;
    } else if (const auto* p = std::get_if<InfiniteTimeReachability>(&problem.spec.property)) {
        goal = &p->goal;
    } else {
        throw UnsupportedQuery(
            "the PRISM writer supports plain reachability properties only; "
            "use the native format for reach-avoid and reward");
    }

    {
        auto sta = detail::open_output(stem + ".sta");
        sta << "(s)\n";
        for (index_t s = 0; s < n; ++s) sta << s << ":(" << s << ")\n";
    }
    {
        auto lab = detail::open_output(stem + ".lab");
        lab << "0=\"init\" 1=\"deadlock\" 2=\"goal\"\n";
        lab << "0: 0\n";
        for (index_t g : *goal) lab << g << ": 2\n";
    }
    {
        auto tra = detail::open_output(stem + ".tra");
        tra << n << " " << imdp.num_cols() << " " << imdp.num_transitions() << "\n";
        for (index_t s = 0; s < n; ++s) {
            for (index_t c = imdp.columns_begin(s); c < imdp.columns_end(s); ++c) {
                const auto col = imdp.transition().column(c);
                const index_t choice = c - imdp.columns_begin(s);
                for (std::size_t k = 0; k < col.size(); ++k) {
                    tra << s << " " << choice << " " << col.rows[k] << " ["
                        << Traits::to_string(col.lower[k]) << "," << Traits::to_string(col.upper[k])
                        << "] " << imdp.action(c) << "\n";
                }
            }
        }
    }
    {
        auto pctl = detail::open_output(stem + ".pctl");
        pctl << "P" << (problem.spec.strategy_mode == StrategyMode::Minimize ? "min" : "max")
             << (problem.spec.satisfaction_mode == SatisfactionMode::Pessimistic ? "min" : "max")
             << "=? [ F";
        if (bounded) pctl << "<=" << horizon;
        pctl << " \"goal\" ]\n";
    }
}

} // namespace rimdp::io
