#pragma once

#include "rimdp/bellman.hpp"
#include "rimdp/property.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace rimdp {

/// Knobs for the iteration loop. `on_iteration` is invoked after every
/// Bellman step with the iteration number and the new value vector (used by
/// tests to assert per-iteration invariants and by the CLI for progress).
struct SolverOptions {
    unsigned workers = 0;                      // 0 = hardware concurrency
    std::int64_t max_iterations = 1'000'000;   // cap for infinite-horizon runs
    std::function<void(std::int64_t, std::span<const double>)> on_iteration_f64;
};

namespace detail {

template <typename Value>
struct IterationPlan {
    std::vector<Value> initial;           // V_0
    std::vector<std::uint8_t> frozen;     // states whose value never changes
    bool finite = false;
    std::int64_t horizon = 0;             // finite only
    Value eps{};                          // infinite only
    const std::vector<Value>* rewards = nullptr; // reward recursion if set
    Value discount{};
};

// The plan's reward pointer aliases the specification; the caller keeps the
// specification alive for the duration of the solve.
template <typename Value>
IterationPlan<Value> make_plan(const Specification<Value>& spec, index_t n) {
    check_property(spec.property, n);

    IterationPlan<Value> plan;
    plan.initial.assign(n, Value(0));
    plan.frozen.assign(n, 0);

    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, FiniteTimeReachability> ||
                          std::is_same_v<P, InfiniteTimeReachability>) {
                for (index_t g : p.goal) {
                    plan.initial[g] = Value(1);
                    plan.frozen[g] = 1;
                }
            } else if constexpr (std::is_same_v<P, FiniteTimeReachAvoid> ||
                                 std::is_same_v<P, InfiniteTimeReachAvoid>) {
                for (index_t g : p.reach) {
                    plan.initial[g] = Value(1);
                    plan.frozen[g] = 1;
                }
                for (index_t a : p.avoid) plan.frozen[a] = 1; // pinned at 0
            } else {
                plan.initial = p.rewards;
                plan.rewards = &p.rewards;
                plan.discount = p.discount;
            }
            if constexpr (std::is_same_v<P, FiniteTimeReachability> ||
                          std::is_same_v<P, FiniteTimeReachAvoid> ||
                          std::is_same_v<P, FiniteTimeReward<Value>>) {
                plan.finite = true;
                plan.horizon = p.horizon;
            } else {
                plan.eps = NumericTraits<Value>::from_double(p.eps);
            }
        },
        spec.property);
    return plan;
}

/// Shared iteration driver. `choose_columns`, when set, returns the forced
/// column per state for the iteration about to run (policy evaluation);
/// `record` is called with each iteration's chosen columns (synthesis).
template <typename Value>
ValueFunction<Value> iterate(const IntervalMDP<Value>& imdp, OptimizationMode mode,
                             const IterationPlan<Value>& plan, const SolverOptions& options,
                             const std::function<std::vector<index_t>(std::int64_t)>& choose_columns,
                             const std::function<void(std::int64_t, std::span<const index_t>)>& record) {

    ValueFunction<Value> vf;
    vf.values = plan.initial;
    vf.residual.assign(plan.initial.size(), Value(0));
    if (plan.finite && plan.horizon == 0) return vf;

    std::vector<Value> prev;
    std::int64_t k = 0;
    while (true) {
        ++k;
        prev = vf.values;

        std::vector<index_t> forced;
        if (choose_columns) forced = choose_columns(k);
        BellmanResult<Value> step =
            bellman_step_impl<Value>(imdp, prev, mode, plan.frozen, forced, options.workers);

        if (plan.rewards != nullptr) {
            // V_k = r + discount * (robust Bellman value of V_{k-1})
            for (std::size_t i = 0; i < step.values.size(); ++i) {
                step.values[i] = (*plan.rewards)[i] + plan.discount * step.values[i];
            }
        }
        vf.values = std::move(step.values);
        vf.iterations = k;
        for (std::size_t i = 0; i < vf.values.size(); ++i) {
            vf.residual[i] = NumericTraits<Value>::abs(vf.values[i] - prev[i]);
        }
        if (record) record(k, step.chosen_column);
        if (options.on_iteration_f64) {
            std::vector<double> as_double(vf.values.size());
            for (std::size_t i = 0; i < vf.values.size(); ++i) {
                as_double[i] = NumericTraits<Value>::to_double(vf.values[i]);
            }
            options.on_iteration_f64(k, as_double);
        }

        if (plan.finite) {
            if (k >= plan.horizon) break;
        } else {
            if (vf.max_residual() <= plan.eps) break;
            if (k >= options.max_iterations) {
                throw NonConvergence(k, NumericTraits<Value>::to_double(vf.max_residual()));
            }
        }
    }
    return vf;
}

} // namespace detail

/// Runs robust value iteration for the problem's specification.
///
/// Reachability properties start from the goal indicator with goal states
/// frozen at 1 (and avoid states frozen at 0); reward properties start from
/// the reward vector and apply the discounted recursion. Finite-time
/// properties run exactly `horizon` iterations; infinite-time properties run
/// until the maximum Bellman residual reaches the property's tolerance, or
/// throw NonConvergence past `options.max_iterations`.
template <typename Value>
ValueFunction<Value> value_iteration(const Problem<Value>& problem,
                                     const SolverOptions& options = {}) {
    auto plan = detail::make_plan(problem.spec, problem.imdp.num_states());
    return detail::iterate(problem.imdp, problem.spec.optimization_mode(), plan, options, nullptr,
                           nullptr);
}

/// Runs value iteration and records the optimizing action of every step.
/// Finite-time properties yield a time-dependent policy (entry (s, t) is the
/// action for state s at time t, i.e. the action recorded at iteration
/// horizon - t); infinite-time properties yield the stationary policy of the
/// final step. Frozen states, where no action is optimized, are assigned
/// their first action.
template <typename Value>
std::pair<Policy, ValueFunction<Value>> control_synthesis(const Problem<Value>& problem,
                                                          const SolverOptions& options = {}) {
    auto plan = detail::make_plan(problem.spec, problem.imdp.num_states());
    const OptimizationMode mode = problem.spec.optimization_mode();
    const index_t n = problem.imdp.num_states();

    auto label_for = [&](index_t state, index_t column) -> const std::string& {
        return problem.imdp.action(column >= 0 ? column : problem.imdp.columns_begin(state));
    };

    if (plan.finite) {
        TimeDependentPolicy policy;
        policy.num_states = n;
        policy.horizon = plan.horizon;
        policy.actions.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(plan.horizon));
        auto record = [&](std::int64_t k, std::span<const index_t> cols) {
            // Iteration k computes the action to execute when k steps remain,
            // i.e. at time t = horizon - k.
            const std::int64_t t = plan.horizon - k;
            for (index_t s = 0; s < n; ++s) policy.at(s, t) = label_for(s, cols[s]);
        };
        auto vf = detail::iterate(problem.imdp, mode, plan, options, nullptr, record);
        return {Policy(std::move(policy)), std::move(vf)};
    }

    std::vector<index_t> last_columns(n, index_t{-1});
    auto record = [&](std::int64_t, std::span<const index_t> cols) {
        last_columns.assign(cols.begin(), cols.end());
    };
    auto vf = detail::iterate(problem.imdp, mode, plan, options, nullptr, record);
    StationaryPolicy policy;
    policy.actions.reserve(n);
    for (index_t s = 0; s < n; ++s) policy.actions.push_back(label_for(s, last_columns[s]));
    return {Policy(std::move(policy)), std::move(vf)};
}

/// Evaluates a fixed policy: the same iteration as `value_iteration`, but
/// with the action optimization restricted to the policy's column in every
/// state. The adversary of `spec.satisfaction_mode` still resolves the
/// intervals; `spec.strategy_mode` is irrelevant once the policy is fixed.
template <typename Value>
ValueFunction<Value> verify_policy(const IntervalMDP<Value>& mdp, const Policy& policy,
                                   const Specification<Value>& spec,
                                   const SolverOptions& options = {}) {
    const index_t n = mdp.num_states();
    auto plan = detail::make_plan(spec, n);

    auto resolve = [&](index_t state, const std::string& label) -> index_t {
        index_t col = mdp.find_action(state, label);
        if (col < 0) {
            throw InvalidPolicyAction("state " + std::to_string(state) + " has no action \"" +
                                      label + "\"");
        }
        return col;
    };

    std::function<std::vector<index_t>(std::int64_t)> choose;
    if (const auto* stationary = std::get_if<StationaryPolicy>(&policy)) {
        if (static_cast<index_t>(stationary->actions.size()) != n) {
            throw InvalidPolicyAction("stationary policy has " +
                                      std::to_string(stationary->actions.size()) +
                                      " entries for " + std::to_string(n) + " states");
        }
        std::vector<index_t> cols(n);
        for (index_t s = 0; s < n; ++s) cols[s] = resolve(s, stationary->actions[s]);
        choose = [cols](std::int64_t) { return cols; };
    } else {
        const auto& td = std::get<TimeDependentPolicy>(policy);
        if (!plan.finite) {
            throw InvalidPolicyAction(
                "a time-dependent policy cannot be evaluated against an infinite-time property");
        }
        if (td.num_states != n || td.horizon != plan.horizon) {
            throw InvalidPolicyAction("policy shape " + std::to_string(td.num_states) + "x" +
                                      std::to_string(td.horizon) + " does not match " +
                                      std::to_string(n) + " states, horizon " +
                                      std::to_string(plan.horizon));
        }
        choose = [&, n](std::int64_t k) {
            // Iteration k evaluates time step t = horizon - k.
            const std::int64_t t = plan.horizon - k;
            std::vector<index_t> cols(n);
            for (index_t s = 0; s < n; ++s) cols[s] = resolve(s, td.at(s, t));
            return cols;
        };
    }
    return detail::iterate(mdp, spec.optimization_mode(), plan, options, choose, nullptr);
}

} // namespace rimdp
