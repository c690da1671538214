#pragma once

#include "rimdp/errors.hpp"
#include "rimdp/interval.hpp"

#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace rimdp {

/// The transitions of one state: an action label per column and the interval
/// bounds with one column per action.
template <typename Value>
struct StateBlock {
    std::vector<std::string> actions;
    IntervalProbabilities<Value> probabilities;
};

/// An interval Markov decision process. Columns of the transition matrix are
/// source-action pairs; state `s` owns columns `stateptr[s] .. stateptr[s+1]-1`.
/// Instances are immutable after construction and safe to share across
/// concurrent workers.
template <typename Value>
class IntervalMDP {
public:
    IntervalMDP() = default;

    /// Builds from per-state blocks, given in state order. The number of
    /// blocks defines the state count, and every block must have that many
    /// destination rows.
    static IntervalMDP build(std::span<const StateBlock<Value>> blocks) {
        const index_t n = static_cast<index_t>(blocks.size());
        std::vector<index_t> stateptr{0};
        std::vector<std::string> actions;
        std::vector<IntervalProbabilities<Value>> probs;
        stateptr.reserve(blocks.size() + 1);
        probs.reserve(blocks.size());
        for (index_t s = 0; s < n; ++s) {
            const auto& block = blocks[s];
            if (block.probabilities.num_cols() == 0) {
                throw ModelError({ViolationKind::EmptyActionSet,
                                  "state has no actions", -1, -1, s});
            }
            if (static_cast<index_t>(block.actions.size()) != block.probabilities.num_cols()) {
                throw ModelError({ViolationKind::ShapeMismatch,
                                  "state has " + std::to_string(block.actions.size()) +
                                      " action labels for " +
                                      std::to_string(block.probabilities.num_cols()) + " columns",
                                  -1, -1, s});
            }
            if (block.probabilities.num_dest() != n) {
                throw ModelError({ViolationKind::DestinationCountMismatch,
                                  "block has " + std::to_string(block.probabilities.num_dest()) +
                                      " destinations, model has " + std::to_string(n) + " states",
                                  -1, -1, s});
            }
            actions.insert(actions.end(), block.actions.begin(), block.actions.end());
            stateptr.push_back(stateptr.back() + block.probabilities.num_cols());
            probs.push_back(block.probabilities);
        }
        IntervalMDP m;
        m.transition_ = IntervalProbabilities<Value>::horzcat(probs, n);
        m.stateptr_ = std::move(stateptr);
        m.actions_ = std::move(actions);
        m.check_or_throw();
        return m;
    }

    static IntervalMDP build(std::initializer_list<StateBlock<Value>> blocks) {
        return build(std::span<const StateBlock<Value>>(blocks.begin(), blocks.size()));
    }

    /// Builds from an already-assembled transition matrix, validating all
    /// invariants.
    static IntervalMDP from_parts(IntervalProbabilities<Value> transition,
                                  std::vector<index_t> stateptr, std::vector<std::string> actions) {
        IntervalMDP m = from_parts_unchecked(std::move(transition), std::move(stateptr),
                                             std::move(actions));
        m.check_or_throw();
        return m;
    }

    /// No validation; for tests that need intentionally broken models.
    static IntervalMDP from_parts_unchecked(IntervalProbabilities<Value> transition,
                                            std::vector<index_t> stateptr,
                                            std::vector<std::string> actions) {
        IntervalMDP m;
        m.transition_ = std::move(transition);
        m.stateptr_ = std::move(stateptr);
        m.actions_ = std::move(actions);
        return m;
    }

    index_t num_states() const { return static_cast<index_t>(stateptr_.size()) - 1; }
    index_t num_cols() const { return transition_.num_cols(); }
    index_t num_transitions() const { return transition_.nnz(); }

    const IntervalProbabilities<Value>& transition() const { return transition_; }
    std::span<const index_t> stateptr() const { return stateptr_; }
    std::span<const std::string> actions() const { return actions_; }

    index_t columns_begin(index_t state) const { return stateptr_[state]; }
    index_t columns_end(index_t state) const { return stateptr_[state + 1]; }
    index_t num_actions(index_t state) const { return stateptr_[state + 1] - stateptr_[state]; }
    const std::string& action(index_t column) const { return actions_[column]; }

    /// The column of `state` whose label is `action`, or -1.
    index_t find_action(index_t state, const std::string& action) const {
        for (index_t c = columns_begin(state); c < columns_end(state); ++c) {
            if (actions_[c] == action) return c;
        }
        return -1;
    }

    /// Recovers the per-state block, exactly inverse to `build`.
    StateBlock<Value> state_block(index_t state) const {
        StateBlock<Value> b;
        b.actions.assign(actions_.begin() + columns_begin(state),
                         actions_.begin() + columns_end(state));
        b.probabilities = transition_.slice_columns(columns_begin(state), columns_end(state));
        return b;
    }

    /// Re-checks all type invariants and returns per-violation diagnostics
    /// with state/column indices. An empty report means the model is valid.
    ValidationReport validate() const {
        ValidationReport report = transition_.validate();

        if (stateptr_.empty() || stateptr_.front() != 0) {
            report.push_back({ViolationKind::StructuralError, "stateptr must start at 0"});
            return report;
        }
        const index_t n = num_states();
        if (transition_.num_dest() != n) {
            report.push_back({ViolationKind::DestinationCountMismatch,
                              "transition matrix has " + std::to_string(transition_.num_dest()) +
                                  " destinations for " + std::to_string(n) + " states"});
        }
        if (stateptr_.back() != transition_.num_cols()) {
            report.push_back({ViolationKind::StructuralError,
                              "stateptr must end at the column count (" +
                                  std::to_string(stateptr_.back()) + " != " +
                                  std::to_string(transition_.num_cols()) + ")"});
        }
        if (static_cast<index_t>(actions_.size()) != transition_.num_cols()) {
            report.push_back({ViolationKind::StructuralError,
                              "one action label required per column"});
        }
        for (index_t s = 0; s < n; ++s) {
            if (stateptr_[s + 1] <= stateptr_[s]) {
                report.push_back({ViolationKind::EmptyActionSet,
                                  "state has no actions", -1, -1, s});
                continue;
            }
            if (stateptr_[s + 1] > static_cast<index_t>(actions_.size())) continue;
            std::unordered_set<std::string> seen;
            for (index_t c = stateptr_[s]; c < stateptr_[s + 1]; ++c) {
                if (!seen.insert(actions_[c]).second) {
                    report.push_back({ViolationKind::DuplicateActionLabel,
                                      "action \"" + actions_[c] + "\" occurs twice", c, -1, s});
                }
            }
        }
        return report;
    }

    bool operator==(const IntervalMDP&) const = default;

private:
    void check_or_throw() const {
        ValidationReport report = validate();
        if (!report.empty()) throw ModelError(report.front());
    }

    IntervalProbabilities<Value> transition_;
    std::vector<index_t> stateptr_;
    std::vector<std::string> actions_;
};

/// Checked construction from per-state (action labels, bounds) blocks.
template <typename Value>
IntervalMDP<Value> build_imdp(std::span<const StateBlock<Value>> blocks) {
    return IntervalMDP<Value>::build(blocks);
}

template <typename Value>
IntervalMDP<Value> build_imdp(std::initializer_list<StateBlock<Value>> blocks) {
    return IntervalMDP<Value>::build(blocks);
}

} // namespace rimdp
