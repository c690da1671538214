#include <doctest.h>

#include "oracle.hpp"
#include "rimdp/random_model.hpp"
#include "rimdp/solver.hpp"

#include <random>

using namespace rimdp;

namespace {

Problem<double> paper_problem(std::int64_t horizon = 100) {
    auto prob1 = IntervalProbabilities<double>::from_dense(
        {{0.0, 0.5}, {0.1, 0.3}, {0.2, 0.1}}, {{0.5, 0.7}, {0.6, 0.5}, {0.7, 0.3}});
    auto prob2 = IntervalProbabilities<double>::from_dense(
        {{0.1, 0.2}, {0.2, 0.3}, {0.3, 0.4}}, {{0.6, 0.6}, {0.5, 0.5}, {0.4, 0.4}});
    auto prob3 =
        IntervalProbabilities<double>::from_dense({{0.0}, {0.0}, {1.0}}, {{0.0}, {0.0}, {1.0}});
    std::vector<StateBlock<double>> blocks{
        {{"a1", "a2"}, prob1}, {{"a1", "a2"}, prob2}, {{"sink"}, prob3}};
    return {build_imdp<double>(blocks),
            {FiniteTimeReachability{{2}, horizon}, SatisfactionMode::Pessimistic,
             StrategyMode::Maximize}};
}

Specification<double> reach_spec(std::int64_t horizon, std::vector<index_t> goal,
                                 SatisfactionMode sat, StrategyMode strat) {
    return {FiniteTimeReachability{std::move(goal), horizon}, sat, strat};
}

} // namespace

TEST_CASE("paper model against the dense reference") {
    auto problem = paper_problem();
    auto vf = value_iteration(problem);
    CHECK(vf.iterations == 100);
    CHECK(vf.values[2] == 1.0);

    auto dense = oracle::DenseModel<double>::from(problem.imdp);
    auto expected = oracle::dense_value_iteration<double>(dense, {2}, {}, 100, true, true);
    for (index_t s = 0; s < 3; ++s) {
        CHECK(vf.values[s] == doctest::Approx(expected[s]).epsilon(1e-9));
    }
}

TEST_CASE("zero horizon returns the goal indicator") {
    auto problem = paper_problem(0);
    auto vf = value_iteration(problem);
    CHECK(vf.iterations == 0);
    CHECK(vf.values == std::vector<double>{0, 0, 1});
    CHECK(vf.residual == std::vector<double>{0, 0, 0});
}

TEST_CASE("one-state sink with itself as goal") {
    auto loop = IntervalProbabilities<double>::from_dense({{1.0}}, {{1.0}});
    std::vector<StateBlock<double>> blocks{{{"stay"}, loop}};
    Problem<double> problem{build_imdp<double>(blocks), reach_spec(25, {0},
                                                                  SatisfactionMode::Pessimistic,
                                                                  StrategyMode::Maximize)};
    auto vf = value_iteration(problem);
    CHECK(vf.values == std::vector<double>{1.0});
}

TEST_CASE("residual is exactly the last state-wise difference") {
    auto problem = paper_problem(3);
    std::vector<double> v_prev, v_last;
    SolverOptions options;
    options.on_iteration_f64 = [&](std::int64_t, std::span<const double> v) {
        v_prev = v_last;
        v_last.assign(v.begin(), v.end());
    };
    auto vf = value_iteration(problem, options);
    REQUIRE(v_prev.size() == 3);
    for (index_t s = 0; s < 3; ++s) {
        CHECK(vf.residual[s] == std::abs(v_last[s] - v_prev[s]));
    }
}

TEST_CASE("monotone convergence for reachability from below") {
    auto problem = paper_problem(60);
    std::vector<double> previous{0, 0, 1}; // V_0
    SolverOptions options;
    options.on_iteration_f64 = [&](std::int64_t, std::span<const double> v) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            CHECK(v[i] >= previous[i] - 1e-12);
            CHECK(v[i] <= 1.0 + 1e-12);
        }
        previous.assign(v.begin(), v.end());
    };
    value_iteration(problem, options);
}

TEST_CASE("duality between the mode combinations") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull}) {
        auto imdp = random_imdp<double>({.states = 15, .actions = 3, .density = 0.3, .seed = seed});
        auto run = [&](SatisfactionMode sat, StrategyMode strat) {
            Problem<double> p{imdp, reach_spec(40, {14}, sat, strat)};
            return value_iteration(p).values;
        };
        auto max_opt = run(SatisfactionMode::Optimistic, StrategyMode::Maximize);
        auto max_pess = run(SatisfactionMode::Pessimistic, StrategyMode::Maximize);
        auto min_pess = run(SatisfactionMode::Pessimistic, StrategyMode::Minimize);
        for (index_t s = 0; s < 15; ++s) {
            CHECK(max_opt[s] >= max_pess[s] - 1e-12);
            CHECK(max_pess[s] >= min_pess[s] - 1e-12);
        }
    }
}

TEST_CASE("random models match the dense reference on all four modes") {
    for (std::uint64_t seed : {10ull, 11ull, 12ull}) {
        auto imdp = random_imdp<double>({.states = 10, .actions = 2, .density = 0.4, .seed = seed});
        auto dense = oracle::DenseModel<double>::from(imdp);
        for (bool maximize : {true, false}) {
            for (bool pessimistic : {true, false}) {
                Problem<double> p{imdp, reach_spec(30, {9},
                                                   pessimistic ? SatisfactionMode::Pessimistic
                                                               : SatisfactionMode::Optimistic,
                                                   maximize ? StrategyMode::Maximize
                                                            : StrategyMode::Minimize)};
                auto vf = value_iteration(p);
                auto expected =
                    oracle::dense_value_iteration<double>(dense, {9}, {}, 30, maximize, pessimistic);
                for (index_t s = 0; s < 10; ++s) {
                    CHECK(vf.values[s] == doctest::Approx(expected[s]).epsilon(1e-9));
                }
            }
        }
    }
}

TEST_CASE("reach-avoid freezes the avoid states at zero") {
    auto imdp = random_imdp<double>({.states = 12, .actions = 2, .density = 0.5, .seed = 77});
    Problem<double> p{imdp,
                      {FiniteTimeReachAvoid{{11}, {0, 1}, 40}, SatisfactionMode::Pessimistic,
                       StrategyMode::Maximize}};
    auto vf = value_iteration(p);
    CHECK(vf.values[0] == 0.0);
    CHECK(vf.values[1] == 0.0);
    CHECK(vf.values[11] == 1.0);

    auto dense = oracle::DenseModel<double>::from(imdp);
    auto expected = oracle::dense_value_iteration<double>(dense, {11}, {0, 1}, 40, true, true);
    for (index_t s = 0; s < 12; ++s) {
        CHECK(vf.values[s] == doctest::Approx(expected[s]).epsilon(1e-9));
    }
}

TEST_CASE("degenerate intervals reduce to classical value iteration") {
    for (std::uint64_t seed : {21ull, 22ull}) {
        auto imdp =
            random_point_imdp<double>({.states = 12, .actions = 3, .density = 0.4, .seed = seed});
        auto dense = oracle::DenseModel<double>::from(imdp);
        for (bool maximize : {true, false}) {
            auto expected = oracle::classical_value_iteration<double>(dense, {11}, 25, maximize);
            for (auto sat : {SatisfactionMode::Pessimistic, SatisfactionMode::Optimistic}) {
                Problem<double> p{imdp, reach_spec(25, {11}, sat,
                                                   maximize ? StrategyMode::Maximize
                                                            : StrategyMode::Minimize)};
                auto vf = value_iteration(p);
                for (index_t s = 0; s < 12; ++s) {
                    CHECK(vf.values[s] == doctest::Approx(expected[s]).epsilon(1e-9));
                }
            }
        }
    }
}

TEST_CASE("discounted reward recursion") {
    auto problem = paper_problem();
    problem.spec.property =
        FiniteTimeReward<double>{{1.0, 2.0, 3.0}, 0.95, 1};
    auto vf = value_iteration(problem);

    // One step: V_1 = r + discount * (robust expectation of V_0 = r).
    auto dense = oracle::DenseModel<double>::from(problem.imdp);
    std::vector<double> r{1.0, 2.0, 3.0};
    for (index_t s = 0; s < 3; ++s) {
        double best = -1e300;
        for (const auto& [lo, up] : dense.actions[s]) {
            best = std::max(best, oracle::robust_expectation<double>(lo, up, r, true));
        }
        CHECK(vf.values[s] == doctest::Approx(r[s] + 0.95 * best).epsilon(1e-12));
    }

    SUBCASE("zero horizon returns the rewards") {
        problem.spec.property = FiniteTimeReward<double>{{1.0, 2.0, 3.0}, 0.95, 0};
        auto base = value_iteration(problem);
        CHECK(base.values == std::vector<double>{1.0, 2.0, 3.0});
    }

    SUBCASE("infinite-time reward converges to the discounted fixpoint") {
        problem.spec.property = InfiniteTimeReward<double>{{1.0, 2.0, 3.0}, 0.9, 1e-10};
        auto fix = value_iteration(problem);
        // fixpoint check: V = r + discount * T(V)
        for (index_t s = 0; s < 3; ++s) {
            double best = -1e300;
            for (const auto& [lo, up] : dense.actions[s]) {
                best = std::max(best,
                                oracle::robust_expectation<double>(lo, up, fix.values, true));
            }
            CHECK(fix.values[s] == doctest::Approx(1.0 * r[s] + 0.9 * best).epsilon(1e-8));
        }
    }
}

TEST_CASE("infinite-time reachability stops on the residual") {
    auto problem = paper_problem();
    problem.spec.property = InfiniteTimeReachability{{2}, 1e-8};
    auto vf = value_iteration(problem);
    CHECK(vf.max_residual() <= 1e-8);
    CHECK(vf.iterations > 1);

    SUBCASE("iteration cap raises NonConvergence") {
        SolverOptions options;
        options.max_iterations = 2;
        problem.spec.property = InfiniteTimeReachability{{2}, 1e-300};
        CHECK_THROWS_AS(value_iteration(problem, options), NonConvergence);
    }
}

TEST_CASE("property validation") {
    auto problem = paper_problem();
    SUBCASE("state out of range") {
        problem.spec.property = FiniteTimeReachability{{3}, 10};
        CHECK_THROWS_AS(value_iteration(problem), PropertyStateOutOfRange);
    }
    SUBCASE("overlapping reach and avoid") {
        problem.spec.property = FiniteTimeReachAvoid{{1}, {1}, 10};
        CHECK_THROWS_AS(value_iteration(problem), InvalidProperty);
    }
    SUBCASE("reward length mismatch") {
        problem.spec.property = FiniteTimeReward<double>{{1.0}, 0.9, 10};
        CHECK_THROWS_AS(value_iteration(problem), InvalidProperty);
    }
    SUBCASE("undiscounted infinite reward") {
        problem.spec.property = InfiniteTimeReward<double>{{1, 2, 3}, 1.0, 1e-6};
        CHECK_THROWS_AS(value_iteration(problem), InvalidProperty);
    }
}

TEST_CASE("finite-time synthesis produces the expected policy shape") {
    auto problem = paper_problem();
    auto [policy, vf] = control_synthesis(problem);
    const auto& td = std::get<TimeDependentPolicy>(policy);
    CHECK(td.num_states == 3);
    CHECK(td.horizon == 100);
    for (std::int64_t t = 0; t < td.horizon; ++t) {
        CHECK(td.at(2, t) == "sink"); // the goal state has a single action
    }
    CHECK(vf.values == value_iteration(problem).values);
}

TEST_CASE("policy consistency on random models, finite horizon") {
    for (std::uint64_t seed : {31ull, 32ull, 33ull}) {
        auto imdp = random_imdp<double>({.states = 14, .actions = 3, .density = 0.3, .seed = seed});
        Problem<double> p{imdp, reach_spec(25, {13}, SatisfactionMode::Pessimistic,
                                           StrategyMode::Maximize)};
        auto [policy, vf] = control_synthesis(p);
        auto check = verify_policy(imdp, policy, p.spec);
        for (index_t s = 0; s < 14; ++s) {
            CHECK(check.values[s] == doctest::Approx(vf.values[s]).epsilon(1e-9));
        }
    }
}

TEST_CASE("policy consistency on random models, infinite horizon") {
    for (std::uint64_t seed : {41ull, 42ull, 43ull}) {
        auto imdp = random_imdp<double>({.states = 14, .actions = 3, .density = 0.3, .seed = seed});
        Problem<double> p{imdp,
                          {InfiniteTimeReachability{{13}, 1e-6}, SatisfactionMode::Pessimistic,
                           StrategyMode::Maximize}};
        auto [policy, vf] = control_synthesis(p);
        CHECK(std::holds_alternative<StationaryPolicy>(policy));
        auto check = verify_policy(imdp, policy, p.spec);
        for (index_t s = 0; s < 14; ++s) {
            CHECK(check.values[s] == doctest::Approx(vf.values[s]).epsilon(1e-9));
        }
    }
}

TEST_CASE("a strictly dominating action is chosen at every time index") {
    // action "good" goes straight to the goal, action "bad" stays put
    auto good_bad = IntervalProbabilities<double>::from_dense({{0.0, 1.0}, {1.0, 0.0}},
                                                              {{0.0, 1.0}, {1.0, 0.0}});
    auto sink = IntervalProbabilities<double>::from_dense({{0.0}, {1.0}}, {{0.0}, {1.0}});
    std::vector<StateBlock<double>> blocks{{{"good", "bad"}, good_bad}, {{"sink"}, sink}};
    Problem<double> p{build_imdp<double>(blocks),
                      reach_spec(10, {1}, SatisfactionMode::Pessimistic, StrategyMode::Maximize)};
    auto [policy, vf] = control_synthesis(p);
    const auto& td = std::get<TimeDependentPolicy>(policy);
    for (std::int64_t t = 0; t < 10; ++t) CHECK(td.at(0, t) == "good");
}

TEST_CASE("verify_policy input validation") {
    auto problem = paper_problem();
    SUBCASE("unknown action label") {
        StationaryPolicy policy{{"a1", "nope", "sink"}};
        CHECK_THROWS_AS(verify_policy(problem.imdp, Policy(policy), problem.spec),
                        InvalidPolicyAction);
    }
    SUBCASE("wrong length") {
        StationaryPolicy policy{{"a1", "a1"}};
        CHECK_THROWS_AS(verify_policy(problem.imdp, Policy(policy), problem.spec),
                        InvalidPolicyAction);
    }
    SUBCASE("time-dependent policy against an infinite-time property") {
        TimeDependentPolicy policy;
        policy.num_states = 3;
        policy.horizon = 5;
        policy.actions.assign(15, "a1");
        auto spec = problem.spec;
        spec.property = InfiniteTimeReachability{{2}, 1e-6};
        CHECK_THROWS_AS(verify_policy(problem.imdp, Policy(policy), spec), InvalidPolicyAction);
    }
}

TEST_CASE("rational solve of the paper model is exact") {
    auto prob1 = IntervalProbabilities<Rational>::from_dense(
        {{Rational(0), Rational(1, 2)}, {Rational(1, 10), Rational(3, 10)},
         {Rational(1, 5), Rational(1, 10)}},
        {{Rational(1, 2), Rational(7, 10)}, {Rational(3, 5), Rational(1, 2)},
         {Rational(7, 10), Rational(3, 10)}});
    auto prob2 = IntervalProbabilities<Rational>::from_dense(
        {{Rational(1, 10), Rational(1, 5)}, {Rational(1, 5), Rational(3, 10)},
         {Rational(3, 10), Rational(2, 5)}},
        {{Rational(3, 5), Rational(3, 5)}, {Rational(1, 2), Rational(1, 2)},
         {Rational(2, 5), Rational(2, 5)}});
    auto prob3 = IntervalProbabilities<Rational>::from_dense(
        {{Rational(0)}, {Rational(0)}, {Rational(1)}},
        {{Rational(0)}, {Rational(0)}, {Rational(1)}});
    std::vector<StateBlock<Rational>> blocks{
        {{"a1", "a2"}, prob1}, {{"a1", "a2"}, prob2}, {{"sink"}, prob3}};
    Problem<Rational> p{build_imdp<Rational>(blocks),
                        {FiniteTimeReachability{{2}, 8}, SatisfactionMode::Pessimistic,
                         StrategyMode::Maximize}};
    auto vf = value_iteration(p);

    auto dense = oracle::DenseModel<Rational>::from(p.imdp);
    auto expected = oracle::dense_value_iteration<Rational>(dense, {2}, {}, 8, true, true);
    CHECK(vf.values[0] == expected[0]);
    CHECK(vf.values[1] == expected[1]);
    CHECK(vf.values[2] == Rational(1));
}
