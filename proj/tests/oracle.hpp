#pragma once

// Test-only reference implementations, kept independent of the library's
// solver path: dense storage, their own sorting calls, and the classic
// break-point enumeration for the inner linear program. Used to generate
// and check expected values; never called by the library itself.

#include "rimdp/imdp.hpp"
#include "rimdp/numeric.hpp"
#include "rimdp/omax.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

using rimdp::index_t;

/// Solves min/max over the interval polytope { l <= p <= u, sum p = 1 } of
/// sum V*p by enumerating every break point of the sorted-threshold basic
/// solutions. For a feasible column the optimum is attained at one of them.
template <typename Value>
Value robust_expectation(std::vector<Value> lower, std::vector<Value> upper,
                         const std::vector<Value>& values, bool minimize) {
    const std::size_t n = lower.size();
    std::vector<std::size_t> sorted(n);
    std::iota(sorted.begin(), sorted.end(), std::size_t{0});
    std::sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) {
        if (values[a] != values[b]) return minimize ? values[a] < values[b] : values[a] > values[b];
        return a < b;
    });

    bool found = false;
    Value best(0);
    auto consider = [&](const std::vector<Value>& p) {
        Value e(0);
        for (std::size_t i = 0; i < n; ++i) e += values[i] * p[i];
        if (!found || (minimize ? e < best : e > best)) {
            best = e;
            found = true;
        }
    };

    // Break point b: positions before b in the sort order take their upper
    // bound, positions after take their lower bound, position b absorbs the
    // remaining mass if it fits its interval.
    for (std::size_t b = 0; b <= n; ++b) {
        std::vector<Value> p(n);
        Value assigned(0);
        for (std::size_t i = 0; i < n; ++i) {
            p[sorted[i]] = i < b ? upper[sorted[i]] : lower[sorted[i]];
            if (i != b) assigned += p[sorted[i]];
        }
        // Exact scalars use exact feasibility; floats get a hair of slack so
        // boundary candidates survive rounding.
        const Value slack = rimdp::NumericTraits<Value>::is_exact
                                ? Value(0)
                                : rimdp::NumericTraits<Value>::from_double(1e-12);
        if (b == n) {
            Value total(0);
            for (std::size_t i = 0; i < n; ++i) total += p[i];
            if (rimdp::NumericTraits<Value>::abs(total - Value(1)) <= slack) consider(p);
            continue;
        }
        const Value x = Value(1) - assigned;
        const std::size_t pivot = sorted[b];
        if (x + slack >= lower[pivot] && x <= upper[pivot] + slack) {
            p[pivot] = x;
            consider(p);
        }
    }
    if (!found) throw std::runtime_error("oracle: infeasible column");
    return best;
}

/// Dense mirror of an interval MDP: per state, per action, full lower and
/// upper bound rows over all destinations.
template <typename Value>
struct DenseModel {
    index_t num_states = 0;
    // [state][action] -> (lower[n], upper[n])
    std::vector<std::vector<std::pair<std::vector<Value>, std::vector<Value>>>> actions;

    static DenseModel from(const rimdp::IntervalMDP<Value>& mdp) {
        DenseModel m;
        m.num_states = mdp.num_states();
        m.actions.resize(m.num_states);
        for (index_t s = 0; s < m.num_states; ++s) {
            for (index_t c = mdp.columns_begin(s); c < mdp.columns_end(s); ++c) {
                auto col = mdp.transition().column(c);
                std::vector<Value> lo(m.num_states, Value(0)), up(m.num_states, Value(0));
                for (std::size_t k = 0; k < col.size(); ++k) {
                    lo[col.rows[k]] = col.lower[k];
                    up[col.rows[k]] = col.upper[k];
                }
                m.actions[s].emplace_back(std::move(lo), std::move(up));
            }
        }
        return m;
    }
};

/// Reference robust value iteration on the dense model: goal states frozen
/// at 1, avoid states frozen at 0, K steps of the recursion with the
/// break-point oracle as the inner solver.
template <typename Value>
std::vector<Value> dense_value_iteration(const DenseModel<Value>& model,
                                         const std::vector<index_t>& goal,
                                         const std::vector<index_t>& avoid, std::int64_t steps,
                                         bool maximize_strategy, bool pessimistic) {
    const index_t n = model.num_states;
    std::vector<char> is_goal(n, 0), is_avoid(n, 0);
    for (index_t g : goal) is_goal[g] = 1;
    for (index_t a : avoid) is_avoid[a] = 1;

    std::vector<Value> v(n, Value(0));
    for (index_t s = 0; s < n; ++s) {
        if (is_goal[s]) v[s] = Value(1);
    }
    for (std::int64_t k = 0; k < steps; ++k) {
        std::vector<Value> next(n);
        for (index_t s = 0; s < n; ++s) {
            if (is_goal[s] || is_avoid[s]) {
                next[s] = v[s];
                continue;
            }
            bool first = true;
            Value best(0);
            for (const auto& [lo, up] : model.actions[s]) {
                Value e = robust_expectation<Value>(lo, up, v, pessimistic);
                if (first || (maximize_strategy ? e > best : e < best)) {
                    best = e;
                    first = false;
                }
            }
            next[s] = best;
        }
        v = std::move(next);
    }
    return v;
}

/// Classical (non-robust) value iteration for a point-distribution model;
/// the adversary has no freedom, so only the strategy direction matters.
template <typename Value>
std::vector<Value> classical_value_iteration(const DenseModel<Value>& model,
                                             const std::vector<index_t>& goal, std::int64_t steps,
                                             bool maximize_strategy) {
    const index_t n = model.num_states;
    std::vector<char> is_goal(n, 0);
    for (index_t g : goal) is_goal[g] = 1;

    std::vector<Value> v(n, Value(0));
    for (index_t g : goal) v[g] = Value(1);
    for (std::int64_t k = 0; k < steps; ++k) {
        std::vector<Value> next(n);
        for (index_t s = 0; s < n; ++s) {
            if (is_goal[s]) {
                next[s] = v[s];
                continue;
            }
            bool first = true;
            Value best(0);
            for (const auto& [lo, up] : model.actions[s]) {
                Value e(0);
                for (index_t t = 0; t < n; ++t) e += lo[t] * v[t]; // lower == upper
                if (first || (maximize_strategy ? e > best : e < best)) {
                    best = e;
                    first = false;
                }
            }
            next[s] = best;
        }
        v = std::move(next);
    }
    return v;
}

/// Reproducible uniform [0,1) (same construction as the library generator,
/// but local to the tests).
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// A random feasible interval column of the given size: lower = u * scale,
/// upper = lower + v * (1 - scale) capped at 1, redrawn until feasible.
template <typename Value>
void random_feasible_column(std::mt19937_64& rng, std::size_t n, std::vector<Value>& lower,
                            std::vector<Value>& upper, double scale = 0.3) {
    lower.resize(n);
    upper.resize(n);
    if (n == 1) {
        // a single destination forces upper = 1
        lower[0] = rimdp::NumericTraits<Value>::from_double(uniform01(rng) * scale);
        upper[0] = Value(1);
        return;
    }
    while (true) {
        Value lo_sum(0), up_sum(0);
        for (std::size_t i = 0; i < n; ++i) {
            const double u = uniform01(rng);
            const double v = uniform01(rng);
            lower[i] = rimdp::NumericTraits<Value>::from_double(u * scale);
            upper[i] = rimdp::NumericTraits<Value>::from_double(
                std::min(u * scale + v * (1.0 - scale), 1.0));
            lo_sum += lower[i];
            up_sum += upper[i];
        }
        if (lo_sum <= Value(1) && up_sum >= Value(1)) return;
    }
}

} // namespace oracle
