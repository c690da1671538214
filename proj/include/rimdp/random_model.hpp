#pragma once

#include "rimdp/imdp.hpp"
#include "rimdp/numeric.hpp"

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace rimdp {

/// Parameters of the seeded random model generator.
///
/// Per state there are `actions` columns. Each column picks
/// ceil(density * states) distinct destinations uniformly, then draws
/// lower = u * scale and upper = min(lower + v * (1 - scale), 1) with
/// u, v uniform in [0,1), redrawing the column until the feasibility
/// condition (sum lower <= 1 <= sum upper) holds. Action labels are the
/// column's position within its state, as a decimal string.
struct RandomModelConfig {
    index_t states = 10;
    index_t actions = 2;
    double density = 0.3;
    double scale = 0.2;
    std::uint64_t seed = 1;
};

namespace detail {

/// Uniform [0,1) from raw generator bits; bit-identical across platforms,
/// unlike std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace detail

/// Generates a reproducible random IMDP. The same configuration always
/// produces the same model, independent of platform and standard library.
template <typename Value>
IntervalMDP<Value> random_imdp(const RandomModelConfig& config) {
    const index_t n = config.states;
    const index_t support =
        std::clamp<index_t>(static_cast<index_t>(std::ceil(config.density * n)), 1, n);
    std::mt19937_64 rng(config.seed);

    std::vector<index_t> colptr{0};
    std::vector<index_t> rowval;
    std::vector<Value> lower, upper;
    std::vector<std::string> actions;
    std::vector<index_t> stateptr{0};

    std::vector<index_t> pool(n);
    for (index_t i = 0; i < n; ++i) pool[i] = i;
    std::vector<index_t> rows(support);
    std::vector<Value> lo(support), up(support);

    for (index_t s = 0; s < n; ++s) {
        for (index_t a = 0; a < config.actions; ++a) {
            while (true) {
                // Partial Fisher-Yates draw of `support` distinct destinations.
                for (index_t i = 0; i < support; ++i) {
                    const index_t j =
                        i + static_cast<index_t>(rng() % static_cast<std::uint64_t>(n - i));
                    std::swap(pool[i], pool[j]);
                    rows[i] = pool[i];
                }
                std::sort(rows.begin(), rows.begin() + support);

                Value lo_sum(0), up_sum(0);
                for (index_t i = 0; i < support; ++i) {
                    const double u = detail::uniform01(rng);
                    const double v = detail::uniform01(rng);
                    double l = u * config.scale;
                    double h = std::min(l + v * (1.0 - config.scale), 1.0);
                    // a single destination forces upper = 1
                    if (support == 1) h = 1.0;
                    lo[i] = NumericTraits<Value>::from_double(l);
                    up[i] = NumericTraits<Value>::from_double(h);
                    lo_sum += lo[i];
                    up_sum += up[i];
                }
                if (lo_sum <= Value(1) && up_sum >= Value(1)) break;
            }
            rowval.insert(rowval.end(), rows.begin(), rows.begin() + support);
            lower.insert(lower.end(), lo.begin(), lo.begin() + support);
            upper.insert(upper.end(), up.begin(), up.begin() + support);
            colptr.push_back(static_cast<index_t>(rowval.size()));
            actions.push_back(std::to_string(a));
        }
        stateptr.push_back(static_cast<index_t>(colptr.size()) - 1);
    }

    const index_t num_cols = static_cast<index_t>(colptr.size()) - 1;
    auto transition = IntervalProbabilities<Value>::from_aligned(
        n, num_cols, std::move(colptr), std::move(rowval), std::move(lower), std::move(upper));
    return IntervalMDP<Value>::from_parts(std::move(transition), std::move(stateptr),
                                          std::move(actions));
}

/// Degenerate-interval variant: lower == upper == a random distribution,
/// i.e. an ordinary MDP expressed as an IMDP.
template <typename Value>
IntervalMDP<Value> random_point_imdp(const RandomModelConfig& config) {
    const index_t n = config.states;
    const index_t support =
        std::clamp<index_t>(static_cast<index_t>(std::ceil(config.density * n)), 1, n);
    std::mt19937_64 rng(config.seed);

    std::vector<index_t> colptr{0};
    std::vector<index_t> rowval;
    std::vector<Value> lower, upper;
    std::vector<std::string> actions;
    std::vector<index_t> stateptr{0};

    std::vector<index_t> pool(n);
    for (index_t i = 0; i < n; ++i) pool[i] = i;
    std::vector<index_t> rows(support);

    for (index_t s = 0; s < n; ++s) {
        for (index_t a = 0; a < config.actions; ++a) {
            for (index_t i = 0; i < support; ++i) {
                const index_t j =
                    i + static_cast<index_t>(rng() % static_cast<std::uint64_t>(n - i));
                std::swap(pool[i], pool[j]);
                rows[i] = pool[i];
            }
            std::sort(rows.begin(), rows.begin() + support);

            // Random weights normalized exactly in the value type, so the
            // column sums to 1 even for exact scalars.
            std::vector<Value> w(support);
            Value total(0);
            for (index_t i = 0; i < support; ++i) {
                w[i] = NumericTraits<Value>::from_double(detail::uniform01(rng) + 1e-3);
                total += w[i];
            }
            Value acc(0);
            for (index_t i = 0; i < support; ++i) {
                // Last entry takes the remainder so the column sums to 1.
                Value p = (i + 1 == support) ? Value(Value(1) - acc) : Value(w[i] / total);
                if (p < Value(0)) p = Value(0);
                acc += p;
                rowval.push_back(rows[i]);
                lower.push_back(p);
                upper.push_back(p);
            }
            colptr.push_back(static_cast<index_t>(rowval.size()));
            actions.push_back(std::to_string(a));
        }
        stateptr.push_back(static_cast<index_t>(colptr.size()) - 1);
    }

    const index_t num_cols = static_cast<index_t>(colptr.size()) - 1;
    auto transition = IntervalProbabilities<Value>::from_aligned(
        n, num_cols, std::move(colptr), std::move(rowval), std::move(lower), std::move(upper));
    return IntervalMDP<Value>::from_parts(std::move(transition), std::move(stateptr),
                                          std::move(actions));
}

} // namespace rimdp
