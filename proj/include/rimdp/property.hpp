#pragma once

#include "rimdp/errors.hpp"
#include "rimdp/imdp.hpp"
#include "rimdp/omax.hpp"

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace rimdp {

/// Reach a goal state within `horizon` steps.
struct FiniteTimeReachability {
    std::vector<index_t> goal;
    std::int64_t horizon;
};

/// Reach a goal state eventually; iteration stops when the maximum Bellman
/// residual drops to `eps`.
struct InfiniteTimeReachability {
    std::vector<index_t> goal;
    double eps;
};

/// Reach `reach` within `horizon` steps while never entering `avoid`.
struct FiniteTimeReachAvoid {
    std::vector<index_t> reach;
    std::vector<index_t> avoid;
    std::int64_t horizon;
};

struct InfiniteTimeReachAvoid {
    std::vector<index_t> reach;
    std::vector<index_t> avoid;
    double eps;
};

/// Discounted cumulative reward over `horizon` steps.
template <typename Value>
struct FiniteTimeReward {
    std::vector<Value> rewards; // one per state
    Value discount;             // in [0, 1]
    std::int64_t horizon;
};

/// Discounted cumulative reward to convergence; requires discount < 1.
template <typename Value>
struct InfiniteTimeReward {
    std::vector<Value> rewards;
    Value discount;
    double eps;
};

template <typename Value>
using Property = std::variant<FiniteTimeReachability, InfiniteTimeReachability,
                              FiniteTimeReachAvoid, InfiniteTimeReachAvoid,
                              FiniteTimeReward<Value>, InfiniteTimeReward<Value>>;

/// A property together with the adversary direction (pessimistic/optimistic)
/// and the strategy direction (minimize/maximize).
template <typename Value>
struct Specification {
    Property<Value> property;
    SatisfactionMode satisfaction_mode;
    StrategyMode strategy_mode;

    OptimizationMode optimization_mode() const { return {strategy_mode, satisfaction_mode}; }
};

/// A model/specification pair ready to be solved.
template <typename Value>
struct Problem {
    IntervalMDP<Value> imdp;
    Specification<Value> spec;
};

/// Value iteration output: per-state values, the number of iterations
/// performed, and the state-wise Bellman residual of the last iteration.
template <typename Value>
struct ValueFunction {
    std::vector<Value> values;
    std::int64_t iterations = 0;
    std::vector<Value> residual;

    Value max_residual() const {
        Value m(0);
        for (const Value& r : residual) {
            if (r > m) m = r;
        }
        return m;
    }
};

/// One action label per state.
struct StationaryPolicy {
    std::vector<std::string> actions;
};

/// Action labels indexed by (state, time step); entry(s, t) is the action
/// to execute in state s at time t, for t in [0, horizon).
struct TimeDependentPolicy {
    std::int64_t num_states = 0;
    std::int64_t horizon = 0;
    std::vector<std::string> actions; // row-major: state * horizon + t

    const std::string& at(std::int64_t state, std::int64_t t) const {
        return actions[static_cast<std::size_t>(state * horizon + t)];
    }
    std::string& at(std::int64_t state, std::int64_t t) {
        return actions[static_cast<std::size_t>(state * horizon + t)];
    }
};

using Policy = std::variant<StationaryPolicy, TimeDependentPolicy>;

namespace detail {

inline void check_state_set(std::span<const index_t> states, index_t num_states,
                            const char* what) {
    for (index_t s : states) {
        if (s < 0 || s >= num_states) throw PropertyStateOutOfRange(s, num_states);
    }
    (void)what;
}

} // namespace detail

/// Validates a property against a model: state indices in range, disjoint
/// reach/avoid sets, reward length, discount range, positive tolerances.
template <typename Value>
void check_property(const Property<Value>& property, index_t num_states) {
    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, FiniteTimeReachability>) {
                detail::check_state_set(p.goal, num_states, "goal");
                if (p.horizon < 0) throw InvalidProperty("time horizon must be non-negative");
            } else if constexpr (std::is_same_v<P, InfiniteTimeReachability>) {
                detail::check_state_set(p.goal, num_states, "goal");
                if (!(p.eps > 0)) throw InvalidProperty("eps must be positive");
            } else if constexpr (std::is_same_v<P, FiniteTimeReachAvoid> ||
                                 std::is_same_v<P, InfiniteTimeReachAvoid>) {
                detail::check_state_set(p.reach, num_states, "reach");
                detail::check_state_set(p.avoid, num_states, "avoid");
                for (index_t r : p.reach) {
                    for (index_t a : p.avoid) {
                        if (r == a) {
                            throw InvalidProperty("reach and avoid sets overlap at state " +
                                                  std::to_string(r));
                        }
                    }
                }
                if constexpr (std::is_same_v<P, FiniteTimeReachAvoid>) {
                    if (p.horizon < 0) throw InvalidProperty("time horizon must be non-negative");
                } else {
                    if (!(p.eps > 0)) throw InvalidProperty("eps must be positive");
                }
            } else {
                if (static_cast<index_t>(p.rewards.size()) != num_states) {
                    throw InvalidProperty("reward vector length " +
                                          std::to_string(p.rewards.size()) + " does not match " +
                                          std::to_string(num_states) + " states");
                }
                if (p.discount < Value(0) || p.discount > Value(1)) {
                    throw InvalidProperty("discount must be in [0,1]");
                }
                if constexpr (std::is_same_v<P, FiniteTimeReward<Value>>) {
                    if (p.horizon < 0) throw InvalidProperty("time horizon must be non-negative");
                } else {
                    if (!(p.eps > 0)) throw InvalidProperty("eps must be positive");
                    if (p.discount >= Value(1)) {
                        throw InvalidProperty("infinite-time reward requires discount < 1");
                    }
                }
            }
        },
        property);
}

template <typename Value>
bool is_reachability(const Property<Value>& p) {
    return !std::holds_alternative<FiniteTimeReward<Value>>(p) &&
           !std::holds_alternative<InfiniteTimeReward<Value>>(p);
}

template <typename Value>
bool is_finite_time(const Property<Value>& p) {
    return std::holds_alternative<FiniteTimeReachability>(p) ||
           std::holds_alternative<FiniteTimeReachAvoid>(p) ||
           std::holds_alternative<FiniteTimeReward<Value>>(p);
}

} // namespace rimdp
