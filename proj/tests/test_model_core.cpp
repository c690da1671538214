#include <doctest.h>

#include "oracle.hpp"
#include "rimdp/imdp.hpp"
#include "rimdp/numeric.hpp"
#include "rimdp/random_model.hpp"

#include <random>

using namespace rimdp;

namespace {

IntervalMDP<double> paper_model() {
    auto prob1 = IntervalProbabilities<double>::from_dense(
        {{0.0, 0.5}, {0.1, 0.3}, {0.2, 0.1}}, {{0.5, 0.7}, {0.6, 0.5}, {0.7, 0.3}});
    auto prob2 = IntervalProbabilities<double>::from_dense(
        {{0.1, 0.2}, {0.2, 0.3}, {0.3, 0.4}}, {{0.6, 0.6}, {0.5, 0.5}, {0.4, 0.4}});
    auto prob3 =
        IntervalProbabilities<double>::from_dense({{0.0}, {0.0}, {1.0}}, {{0.0}, {0.0}, {1.0}});
    std::vector<StateBlock<double>> blocks{
        {{"a1", "a2"}, prob1}, {{"a1", "a2"}, prob2}, {{"sink"}, prob3}};
    return build_imdp<double>(blocks);
}

} // namespace

TEST_CASE("interval probabilities accept the paper matrices") {
    auto p = IntervalProbabilities<double>::from_dense(
        {{0.0, 0.5}, {0.1, 0.3}, {0.2, 0.1}}, {{0.5, 0.7}, {0.6, 0.5}, {0.7, 0.3}});
    CHECK(p.num_dest() == 3);
    CHECK(p.num_cols() == 2);
    CHECK(p.column_lower_sum(0) == doctest::Approx(0.3));
    CHECK(p.column_upper_sum(0) == doctest::Approx(1.8));
}

TEST_CASE("point distribution column is valid") {
    auto p = IntervalProbabilities<double>::from_dense({{0.0}, {0.0}, {1.0}},
                                                       {{0.0}, {0.0}, {1.0}});
    CHECK(p.num_cols() == 1);
    CHECK(p.column_lower_sum(0) == 1.0);
    CHECK(p.column_upper_sum(0) == 1.0);
}

TEST_CASE("constructor rejections") {
    SUBCASE("lower sums above one") {
        CHECK_THROWS_WITH_AS(IntervalProbabilities<double>::from_dense({{0.6}, {0.6}},
                                                                       {{0.7}, {0.7}}),
                             doctest::Contains("InfeasibleColumn"), ModelError);
    }
    SUBCASE("upper sums below one") {
        try {
            IntervalProbabilities<double>::from_dense({{0.1}, {0.1}}, {{0.3}, {0.3}});
            FAIL("expected InfeasibleColumn");
        } catch (const ModelError& e) {
            CHECK(e.kind() == ViolationKind::InfeasibleColumn);
            CHECK(e.violation().column == 0);
        }
    }
    SUBCASE("shape mismatch") {
        CHECK_THROWS_AS(IntervalProbabilities<double>::from_dense({{0.5}, {0.5}}, {{1.0}}),
                        ModelError);
    }
    SUBCASE("entry outside [0,1]") {
        try {
            IntervalProbabilities<double>::from_dense({{0.5}, {0.5}}, {{1.5}, {0.5}});
            FAIL("expected EntryOutOfRange");
        } catch (const ModelError& e) {
            CHECK(e.kind() == ViolationKind::EntryOutOfRange);
        }
    }
    SUBCASE("lower above upper") {
        try {
            IntervalProbabilities<double>::from_dense({{0.6}, {0.5}}, {{0.4}, {0.9}});
            FAIL("expected BoundOrderViolation");
        } catch (const ModelError& e) {
            CHECK(e.kind() == ViolationKind::BoundOrderViolation);
            CHECK(e.violation().row == 0);
        }
    }
    SUBCASE("positive lower where upper has a structural zero") {
        // row 1 is present only in the lower pattern
        auto lower = CscMatrix<double>::from_dense({{0.2}, {0.3}});
        auto upper = CscMatrix<double>::from_dense({{0.9}, {0.0}});
        try {
            IntervalProbabilities<double>::from_sparse(lower, upper);
            FAIL("expected BoundOrderViolation");
        } catch (const ModelError& e) {
            CHECK(e.kind() == ViolationKind::BoundOrderViolation);
            CHECK(e.violation().row == 1);
        }
    }
}

TEST_CASE("structural zero in lower with nonzero upper is permitted") {
    auto lower = CscMatrix<double>::from_dense({{0.0}, {0.5}});
    auto upper = CscMatrix<double>::from_dense({{0.6}, {0.9}});
    auto p = IntervalProbabilities<double>::from_sparse(lower, upper);
    CHECK(p.nnz() == 2); // aligned entry [0, 0.6] is kept
    auto stripped = p.lower_csc();
    CHECK(stripped.nnz() == 1); // the zero lower bound is not materialized
}

TEST_CASE("dense to CSC and back is the identity") {
    std::mt19937_64 rng(31);
    for (int rep = 0; rep < 25; ++rep) {
        const index_t rows = 1 + static_cast<index_t>(rng() % 8);
        const index_t cols = 1 + static_cast<index_t>(rng() % 8);
        DenseMatrix<double> dense(rows, std::vector<double>(cols, 0.0));
        for (auto& row : dense) {
            for (auto& x : row) {
                if (rng() % 3 == 0) x = oracle::uniform01(rng);
            }
        }
        auto csc = CscMatrix<double>::from_dense(dense);
        CHECK(csc.to_dense() == dense);
    }
}

TEST_CASE("build_imdp derives the paper stateptr") {
    auto imdp = paper_model();
    CHECK(imdp.num_states() == 3);
    CHECK(imdp.num_cols() == 5);
    CHECK(std::vector<index_t>(imdp.stateptr().begin(), imdp.stateptr().end()) ==
          std::vector<index_t>{0, 2, 4, 5});
    CHECK(imdp.action(4) == "sink");
    CHECK(imdp.find_action(0, "a2") == 1);
    CHECK(imdp.find_action(2, "a1") == -1);
}

TEST_CASE("single state point self-loop is the smallest valid model") {
    auto loop = IntervalProbabilities<double>::from_dense({{1.0}}, {{1.0}});
    std::vector<StateBlock<double>> blocks{{{"stay"}, loop}};
    auto imdp = build_imdp<double>(blocks);
    CHECK(imdp.num_states() == 1);
    CHECK(imdp.validate().empty());
}

TEST_CASE("build_imdp rejections") {
    auto good = IntervalProbabilities<double>::from_dense({{0.5}, {0.5}}, {{0.6}, {0.6}});
    SUBCASE("empty action set") {
        std::vector<StateBlock<double>> blocks{{{"a"}, good}, {{}, IntervalProbabilities<double>{}}};
        try {
            build_imdp<double>(blocks);
            FAIL("expected EmptyActionSet");
        } catch (const ModelError& e) {
            CHECK(e.kind() == ViolationKind::EmptyActionSet);
            CHECK(e.violation().state == 1);
        }
    }
    SUBCASE("destination count mismatch") {
        auto three_rows =
            IntervalProbabilities<double>::from_dense({{0.2}, {0.2}, {0.2}}, {{0.8}, {0.8}, {0.8}});
        std::vector<StateBlock<double>> blocks{{{"a"}, good}, {{"a"}, three_rows}};
        try {
            build_imdp<double>(blocks);
            FAIL("expected DestinationCountMismatch");
        } catch (const ModelError& e) {
            CHECK(e.kind() == ViolationKind::DestinationCountMismatch);
        }
    }
    SUBCASE("duplicate action label within a state") {
        auto two_cols = IntervalProbabilities<double>::from_dense({{0.5, 0.5}, {0.5, 0.5}},
                                                                  {{0.6, 0.6}, {0.6, 0.6}});
        std::vector<StateBlock<double>> blocks{{{"a", "a"}, two_cols}, {{"b"}, good}};
        try {
            build_imdp<double>(blocks);
            FAIL("expected DuplicateActionLabel");
        } catch (const ModelError& e) {
            CHECK(e.kind() == ViolationKind::DuplicateActionLabel);
        }
    }
}

TEST_CASE("splitting by stateptr recovers the blocks") {
    auto imdp = paper_model();
    auto block0 = imdp.state_block(0);
    CHECK(block0.actions == std::vector<std::string>{"a1", "a2"});
    auto prob1 = IntervalProbabilities<double>::from_dense(
        {{0.0, 0.5}, {0.1, 0.3}, {0.2, 0.1}}, {{0.5, 0.7}, {0.6, 0.5}, {0.7, 0.3}});
    CHECK(block0.probabilities == prob1);

    std::vector<StateBlock<double>> rebuilt;
    for (index_t s = 0; s < imdp.num_states(); ++s) rebuilt.push_back(imdp.state_block(s));
    CHECK(build_imdp<double>(rebuilt) == imdp);
}

TEST_CASE("validate reports all constructed violations") {
    SUBCASE("clean model") { CHECK(paper_model().validate().empty()); }

    SUBCASE("upper zeroed at a position with positive lower") {
        auto p = IntervalProbabilities<double>::from_aligned_unchecked(
            2, 1, {0, 2}, {0, 1}, {0.5, 0.5}, {0.0, 0.9});
        auto report = p.validate();
        REQUIRE(report.size() == 1);
        CHECK(report[0].kind == ViolationKind::BoundOrderViolation);
        CHECK(report[0].column == 0);
        CHECK(report[0].row == 0);
    }

    SUBCASE("stateptr not ending at the column count") {
        auto p = IntervalProbabilities<double>::from_dense({{0.4, 0.4}, {0.6, 0.6}},
                                                           {{0.4, 0.4}, {0.6, 0.6}});
        auto broken = IntervalMDP<double>::from_parts_unchecked(p, {0, 1}, {"a", "b"});
        auto report = broken.validate();
        REQUIRE(report.size() >= 1);
        bool found = false;
        for (const auto& v : report) {
            if (v.kind == ViolationKind::StructuralError) found = true;
        }
        CHECK(found);
    }

    SUBCASE("several violations are all reported") {
        auto p = IntervalProbabilities<double>::from_aligned_unchecked(
            2, 2, {0, 1, 2}, {0, 1}, {1.5, 0.2}, {0.1, 0.4});
        auto report = p.validate();
        // entry out of range, bound order violation, and both column sums
        CHECK(report.size() >= 3);
    }
}

TEST_CASE("feasible polytope is nonempty on valid columns") {
    // Witness construction: O-maximize any ordering and check feasibility.
    std::mt19937_64 rng(37);
    auto imdp = random_imdp<double>({.states = 12, .actions = 3, .density = 0.4, .seed = 99});
    for (index_t c = 0; c < imdp.num_cols(); ++c) {
        auto col = imdp.transition().column(c);
        std::vector<index_t> ordering(col.size());
        for (std::size_t i = 0; i < col.size(); ++i) ordering[i] = static_cast<index_t>(i);
        std::shuffle(ordering.begin(), ordering.end(), rng);
        auto p = omaximize_sequential<double>(ordering, col.lower, col.upper);
        double sum = 0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            CHECK(p[i] >= col.lower[i]);
            CHECK(p[i] <= col.upper[i]);
            sum += p[i];
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("rational feasibility checks are exact") {
    // 1/3 + 2/3 == 1 holds exactly; the float detour would not.
    DenseMatrix<Rational> lo{{Rational(1, 3)}, {Rational(2, 3)}};
    DenseMatrix<Rational> up{{Rational(1, 3)}, {Rational(2, 3)}};
    auto p = IntervalProbabilities<Rational>::from_dense(lo, up);
    CHECK(p.column_lower_sum(0) == Rational(1));

    // exceeding 1 by any amount is rejected, tolerance free
    DenseMatrix<Rational> bad{{Rational(1, 3)}, {Rational(2, 3) + Rational(1, 1000000000)}};
    CHECK_THROWS_AS(IntervalProbabilities<Rational>::from_dense(bad, bad), ModelError);
}

TEST_CASE("numeric round trips") {
    SUBCASE("double shortest form") {
        for (double v : {0.1, 1.0 / 3.0, 0.9999999999999962, 1e-300, 0.0, 1.0}) {
            auto s = NumericTraits<double>::to_string(v);
            auto back = NumericTraits<double>::parse(s);
            REQUIRE(back.has_value());
            CHECK(*back == v);
        }
    }
    SUBCASE("rational decimal and fraction forms") {
        CHECK(*NumericTraits<Rational>::parse("0.1") == Rational(1, 10));
        CHECK(*NumericTraits<Rational>::parse("1/3") == Rational(1, 3));
        CHECK(*NumericTraits<Rational>::parse("2.5e-3") == Rational(1, 400));
        CHECK(*NumericTraits<Rational>::parse("-0.25") == Rational(-1, 4));
        CHECK(NumericTraits<Rational>::to_string(Rational(1, 3)) == "1/3");
        CHECK(NumericTraits<Rational>::to_string(Rational(4, 2)) == "2");
        CHECK(!NumericTraits<Rational>::parse("abc").has_value());
        CHECK(!NumericTraits<Rational>::parse("1/0").has_value());
    }
    SUBCASE("float32") {
        const float v = 0.1f;
        CHECK(*NumericTraits<float>::parse(NumericTraits<float>::to_string(v)) == v);
    }
}
