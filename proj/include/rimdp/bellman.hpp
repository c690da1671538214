#pragma once

#include "rimdp/imdp.hpp"
#include "rimdp/omax.hpp"
#include "rimdp/parallel.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

namespace rimdp {

/// Result of one Bellman step: the new value per state and the column chosen
/// by the action optimization (-1 for frozen states, where no action is
/// recorded and the value is carried over unchanged).
template <typename Value>
struct BellmanResult {
    std::vector<Value> values;
    std::vector<index_t> chosen_column;
};

namespace detail {

/// States sorted by value (ascending for the pessimistic adversary,
/// descending for the optimistic one), ties by ascending state index. The
/// rank array maps a state to its position in that global ordering; sorting
/// a column's support by rank is exactly the global ordering filtered to
/// the support.
template <typename Value>
std::vector<index_t> global_value_ranks(std::span<const Value> values, SatisfactionMode mode) {
    const index_t n = static_cast<index_t>(values.size());
    std::vector<index_t> order(n);
    std::iota(order.begin(), order.end(), index_t{0});
    if (mode == SatisfactionMode::Pessimistic) {
        std::sort(order.begin(), order.end(), [&](index_t a, index_t b) {
            if (values[a] != values[b]) return values[a] < values[b];
            return a < b;
        });
    } else {
        std::sort(order.begin(), order.end(), [&](index_t a, index_t b) {
            if (values[a] != values[b]) return values[a] > values[b];
            return a < b;
        });
    }
    std::vector<index_t> rank(n);
    for (index_t pos = 0; pos < n; ++pos) rank[order[pos]] = pos;
    return rank;
}

/// Per-worker scratch for the column kernels.
template <typename Value>
struct ColumnScratch {
    std::vector<index_t> ordering;
    std::vector<Value> p;
};

/// Robust expectation of one column using precomputed global ranks.
template <typename Value>
Value column_value(const ColumnView<Value>& col, std::span<const Value> values,
                   std::span<const index_t> rank, ColumnScratch<Value>& scratch) {
    scratch.ordering.resize(col.size());
    for (std::size_t i = 0; i < col.size(); ++i) scratch.ordering[i] = static_cast<index_t>(i);
    std::sort(scratch.ordering.begin(), scratch.ordering.end(),
              [&](index_t a, index_t b) { return rank[col.rows[a]] < rank[col.rows[b]]; });
    scratch.p.resize(col.size());
    return omax_expectation(std::span<const index_t>(scratch.ordering), col.rows, col.lower,
                            col.upper, values, std::span<Value>(scratch.p));
}

/// One Bellman step where each state's candidate columns can be restricted
/// to a single forced column (policy evaluation). `forced_column` may be
/// empty (no restriction) or hold one column per state (-1 = unrestricted).
template <typename Value>
BellmanResult<Value> bellman_step_impl(const IntervalMDP<Value>& mdp,
                                       std::span<const Value> v_prev, OptimizationMode mode,
                                       std::span<const std::uint8_t> frozen,
                                       std::span<const index_t> forced_column, unsigned workers) {
    const index_t n = mdp.num_states();
    BellmanResult<Value> out;
    out.values.resize(n);
    out.chosen_column.assign(n, index_t{-1});

    const std::vector<index_t> rank = global_value_ranks(v_prev, mode.satisfaction);
    const bool maximize = mode.strategy == StrategyMode::Maximize;

    parallel_for_index(static_cast<std::size_t>(n), workers, [&](std::size_t si) {
        const index_t s = static_cast<index_t>(si);
        if (!frozen.empty() && frozen[si]) {
            out.values[si] = v_prev[si];
            return;
        }
        thread_local ColumnScratch<Value> scratch;

        index_t begin = mdp.columns_begin(s);
        index_t end = mdp.columns_end(s);
        if (!forced_column.empty() && forced_column[si] >= 0) {
            begin = forced_column[si];
            end = begin + 1;
        }

        index_t best_col = begin;
        Value best = column_value(mdp.transition().column(begin), v_prev, rank, scratch);
        for (index_t c = begin + 1; c < end; ++c) {
            Value v = column_value(mdp.transition().column(c), v_prev, rank, scratch);
            // Ties keep the lowest column index.
            if (maximize ? (v > best) : (v < best)) {
                best = v;
                best_col = c;
            }
        }
        out.values[si] = best;
        out.chosen_column[si] = best_col;
    });

    return out;
}

} // namespace detail

/// Applies one robust Bellman step across all states: for every non-frozen
/// state, optimizes the robust expectation over the state's actions and
/// records the chosen column. Frozen states keep their previous value. The
/// value ordering is computed once over the global value vector and shared
/// by all columns.
template <typename Value>
BellmanResult<Value> bellman_step(const IntervalMDP<Value>& mdp, std::span<const Value> v_prev,
                                  OptimizationMode mode,
                                  std::span<const std::uint8_t> frozen = {},
                                  unsigned workers = 0) {
    return detail::bellman_step_impl(mdp, v_prev, mode, frozen, {}, workers);
}

} // namespace rimdp
