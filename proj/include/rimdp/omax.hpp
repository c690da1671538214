#pragma once

#include "rimdp/errors.hpp"
#include "rimdp/interval.hpp"
#include "rimdp/numeric.hpp"

#include <algorithm>
#include <span>
#include <vector>

namespace rimdp {

/// Which value the adversary resolves the intervals towards.
enum class SatisfactionMode { Pessimistic, Optimistic };

/// Which value the strategy optimizes.
enum class StrategyMode { Minimize, Maximize };

/// The full optimization direction of a Bellman step: the outer action
/// optimization and the inner adversary optimization.
struct OptimizationMode {
    StrategyMode strategy;
    SatisfactionMode satisfaction;
};

inline const char* to_string(SatisfactionMode m) {
    return m == SatisfactionMode::Pessimistic ? "pessimistic" : "optimistic";
}
inline const char* to_string(StrategyMode m) {
    return m == StrategyMode::Minimize ? "minimize" : "maximize";
}

/// Builds the O-maximization ordering for one column: the positions of the
/// column's support sorted by the value at their destination — ascending for
/// the pessimistic adversary, descending for the optimistic one — with ties
/// broken by ascending destination index. This makes the assignment (and
/// hence every output) bit-reproducible.
///
/// `rows` maps positions to destination indices; `values` is indexed by
/// destination. The result contains positions into `rows`.
template <typename Value>
std::vector<index_t> value_ordering(std::span<const index_t> rows, std::span<const Value> values,
                                    SatisfactionMode mode) {
    std::vector<index_t> order(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) order[i] = static_cast<index_t>(i);
    if (mode == SatisfactionMode::Pessimistic) {
        std::sort(order.begin(), order.end(), [&](index_t a, index_t b) {
            if (values[rows[a]] != values[rows[b]]) return values[rows[a]] < values[rows[b]];
            return rows[a] < rows[b];
        });
    } else {
        std::sort(order.begin(), order.end(), [&](index_t a, index_t b) {
            if (values[rows[a]] != values[rows[b]]) return values[rows[a]] > values[rows[b]];
            return rows[a] < rows[b];
        });
    }
    return order;
}

namespace detail {

/// Remaining probability mass after the lower bounds are committed,
/// clamped into [0, sum of gaps] to absorb parsing noise in the inputs.
template <typename Value>
Value omax_remainder(std::span<const Value> lower, std::span<const Value> upper) {
    using Traits = NumericTraits<Value>;
    Value lower_sum(0), gap_sum(0);
    for (std::size_t i = 0; i < lower.size(); ++i) {
        lower_sum += lower[i];
        gap_sum += upper[i] - lower[i];
    }
    const Value tol = Traits::feasibility_tolerance();
    if (lower_sum > Value(1) + tol) {
        throw ModelError({ViolationKind::InfeasibleColumn,
                          "lower bounds sum to " + Traits::to_string(lower_sum) + " > 1"});
    }
    if (lower_sum + gap_sum < Value(1) - tol) {
        throw ModelError({ViolationKind::InfeasibleColumn,
                          "upper bounds sum to " + Traits::to_string(lower_sum + gap_sum) + " < 1"});
    }
    Value rem = Value(1) - lower_sum;
    if (rem < Value(0)) rem = Value(0);
    if (rem > gap_sum) rem = gap_sum;
    return rem;
}

} // namespace detail

/// Greedy assignment of the remaining probability mass along the ordering:
/// every position receives its lower bound plus as much of its gap as the
/// mass left over from earlier positions allows. The mass available at step
/// i is max(rem - E_i, 0) with E_i the running sum of the gaps consumed
/// before i; both kernels below evaluate exactly this expression, so their
/// outputs are identical bit for bit.
///
/// Writes the resulting feasible distribution over the column support into
/// `p_out` (same length as lower/upper).
template <typename Value>
void omaximize_sequential(std::span<const index_t> ordering, std::span<const Value> lower,
                          std::span<const Value> upper, std::span<Value> p_out) {
    std::copy(lower.begin(), lower.end(), p_out.begin());
    const Value rem = detail::omax_remainder(lower, upper);

    Value consumed(0); // exclusive running sum of gaps along the ordering
    for (index_t o : ordering) {
        Value available = rem - consumed;
        if (!(available > Value(0))) break; // everything after gets its lower bound
        const Value gap = upper[o] - lower[o];
        p_out[o] = lower[o] + (gap < available ? gap : available);
        consumed += gap;
    }
}

/// The prefix-scan formulation of the same assignment: the exclusive
/// cumulative sum of the ordered gaps is materialized first, after which
/// every position is computed independently of the others. Output is
/// bit-identical to `omaximize_sequential` for the same scalar type.
template <typename Value>
void omaximize_prefix(std::span<const index_t> ordering, std::span<const Value> lower,
                      std::span<const Value> upper, std::span<Value> p_out) {
    const Value rem = detail::omax_remainder(lower, upper);

    // cumgap[i] = sum of gaps of the first i ordered positions.
    std::vector<Value> cumgap(ordering.size() + 1);
    cumgap[0] = Value(0);
    for (std::size_t i = 0; i < ordering.size(); ++i) {
        cumgap[i + 1] = cumgap[i] + (upper[ordering[i]] - lower[ordering[i]]);
    }

    std::copy(lower.begin(), lower.end(), p_out.begin());
    for (std::size_t i = 0; i < ordering.size(); ++i) {
        const index_t o = ordering[i];
        Value available = rem - cumgap[i];
        if (!(available > Value(0))) continue;
        const Value gap = upper[o] - lower[o];
        p_out[o] = lower[o] + (gap < available ? gap : available);
    }
}

/// Convenience overloads returning the distribution.
template <typename Value>
std::vector<Value> omaximize_sequential(std::span<const index_t> ordering,
                                        std::span<const Value> lower,
                                        std::span<const Value> upper) {
    std::vector<Value> p(lower.size());
    omaximize_sequential(ordering, lower, upper, std::span<Value>(p));
    return p;
}

template <typename Value>
std::vector<Value> omaximize_prefix(std::span<const index_t> ordering,
                                    std::span<const Value> lower, std::span<const Value> upper) {
    std::vector<Value> p(lower.size());
    omaximize_prefix(ordering, lower, upper, std::span<Value>(p));
    return p;
}

namespace detail {

/// Shared inner step: O-maximization along a caller-provided ordering,
/// followed by the expectation over the column support in row order. All
/// robust-expectation entry points funnel through here, so their results
/// agree bit for bit.
template <typename Value>
Value omax_expectation(std::span<const index_t> ordering, std::span<const index_t> rows,
                       std::span<const Value> lower, std::span<const Value> upper,
                       std::span<const Value> values, std::span<Value> p_scratch) {
    omaximize_sequential(ordering, lower, upper, p_scratch);
    Value dot(0);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        dot += values[rows[i]] * p_scratch[i];
    }
    return dot;
}

} // namespace detail

/// The inner optimization of robust value iteration for one column: the
/// adversary picks the feasible distribution minimizing (pessimistic) or
/// maximizing (optimistic) the expected value, and the expectation under
/// that distribution is returned.
template <typename Value>
Value robust_expectation(const ColumnView<Value>& column, std::span<const Value> values,
                         SatisfactionMode mode) {
    const std::vector<index_t> ordering = value_ordering(column.rows, values, mode);
    std::vector<Value> p(column.size());
    return detail::omax_expectation(ordering, column.rows, column.lower, column.upper, values,
                                    std::span<Value>(p));
}

/// Overload for a dense column: destination i has bounds lower[i]/upper[i].
template <typename Value>
Value robust_expectation(std::span<const Value> lower, std::span<const Value> upper,
                         std::span<const Value> values, SatisfactionMode mode) {
    std::vector<index_t> rows(lower.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<index_t>(i);
    ColumnView<Value> col{rows, lower, upper};
    return robust_expectation(col, values, mode);
}

} // namespace rimdp
