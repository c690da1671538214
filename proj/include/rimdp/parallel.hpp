#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <utility>
#include <vector>

namespace rimdp {

/// Resolves a requested worker count; 0 means one worker per hardware thread.
inline unsigned effective_workers(unsigned requested) {
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

/// Applies `fn(i)` for every i in [0, count) using `workers` threads over
/// contiguous chunks. Results are independent of the worker count as long as
/// each invocation only writes state owned by index i. If multiple
/// invocations throw, the exception from the lowest index is rethrown.
template <typename F>
void parallel_for_index(std::size_t count, unsigned workers, F&& fn) {
    workers = effective_workers(workers);
    if (count == 0) return;
    if (workers <= 1 || count == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));

    std::mutex error_mutex;
    std::size_t first_error_index = count;
    std::exception_ptr first_error;

    auto run_chunk = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (i < first_error_index) {
                    first_error_index = i;
                    first_error = std::current_exception();
                }
                return; // abandon the rest of this chunk
            }
        }
    };

    const std::size_t chunk = (count + workers - 1) / workers;
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t begin = std::min<std::size_t>(count, w * chunk);
        const std::size_t end = std::min<std::size_t>(count, begin + chunk);
        if (begin >= end) break;
        threads.emplace_back(run_chunk, begin, end);
    }
    for (auto& t : threads) t.join();

    if (first_error) std::rethrow_exception(first_error);
}

/// Evaluates a pure per-state function for every state and collects the
/// results in state order. Output is identical to the sequential loop for
/// any worker count; the first failing state's error wins deterministically.
template <typename R, typename F>
std::vector<R> parallel_map_states(std::size_t state_count, F&& fn, unsigned workers = 0) {
    std::vector<R> results(state_count);
    parallel_for_index(state_count, workers,
                       [&](std::size_t s) { results[s] = fn(s); });
    return results;
}

/// One compare-exchange of a sorting network: after application, the element
/// at `low` is not greater than the element at `high`.
struct Comparator {
    std::size_t low;
    std::size_t high;
};

/// The bitonic comparator schedule for a power-of-two size, grouped as
/// major rounds of minor rounds. Major round k (1-based) merges bitonic
/// runs of length 2^k and consists of exactly k minor rounds; comparators
/// within one minor round touch disjoint elements and may run in parallel.
inline std::vector<std::vector<std::vector<Comparator>>> bitonic_schedule(std::size_t n) {
    std::vector<std::vector<std::vector<Comparator>>> majors;
    if (n < 2) return majors;
    for (std::size_t k = 2; k <= n; k <<= 1) {
        std::vector<std::vector<Comparator>> minors;
        for (std::size_t j = k >> 1; j > 0; j >>= 1) {
            std::vector<Comparator> round;
            round.reserve(n / 2);
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t partner = i ^ j;
                if (partner <= i) continue;
                const bool ascending = (i & k) == 0;
                round.push_back(ascending ? Comparator{i, partner} : Comparator{partner, i});
            }
            minors.push_back(std::move(round));
        }
        majors.push_back(std::move(minors));
    }
    return majors;
}

namespace detail {

template <typename Value>
struct BitonicEntry {
    Value key;
    std::size_t index;
    bool sentinel; // padding slot; compares greater than everything

    // Composite key (key, index) makes the network stable; sentinels sort last.
    bool operator<(const BitonicEntry& other) const {
        if (sentinel != other.sentinel) return !sentinel;
        if (key != other.key) return key < other.key;
        return index < other.index;
    }
};

} // namespace detail

/// Sorts keys with a bitonic network and returns the permutation: entry i of
/// the result is the original position of the i-th smallest key. Equal keys
/// keep their original relative order. Non-power-of-two lengths are padded
/// internally with sentinel keys that sort last and are stripped.
///
/// Minor rounds run as a parallel-for over comparators with a barrier
/// between rounds, preserving the network's round structure on the CPU.
template <typename Value>
std::vector<std::size_t> bitonic_sort(std::span<const Value> keys, unsigned workers = 1) {
    const std::size_t n = keys.size();
    std::vector<std::size_t> perm(n);
    if (n == 0) return perm;

    const std::size_t m = std::bit_ceil(n);
    std::vector<detail::BitonicEntry<Value>> entries;
    entries.reserve(m);
    for (std::size_t i = 0; i < n; ++i) entries.push_back({keys[i], i, false});
    for (std::size_t i = n; i < m; ++i) entries.push_back({Value(0), i, true});

    for (std::size_t k = 2; k <= m; k <<= 1) {
        for (std::size_t j = k >> 1; j > 0; j >>= 1) {
            // One minor round; all pairs are disjoint.
            parallel_for_index(m / 2, workers, [&](std::size_t t) {
                // t-th index with the j bit clear: pairs (i, i^j) enumerated once.
                const std::size_t i = ((t & ~(j - 1)) << 1) | (t & (j - 1));
                const std::size_t partner = i | j;
                const bool ascending = (i & k) == 0;
                auto& a = entries[ascending ? i : partner];
                auto& b = entries[ascending ? partner : i];
                if (b < a) std::swap(a, b);
            });
        }
    }

    for (std::size_t i = 0; i < n; ++i) perm[i] = entries[i].index;
    return perm;
}

template <typename Value>
std::vector<std::size_t> bitonic_sort(const std::vector<Value>& keys, unsigned workers = 1) {
    return bitonic_sort(std::span<const Value>(keys.data(), keys.size()), workers);
}

/// Inclusive prefix sums via an up-sweep/down-sweep tree reduction. Each
/// level is a parallel-for with a barrier, mirroring the O(log2 n)-latency
/// schedule. Floating-point output differs from a left-to-right scan only
/// by summation order (documented tolerance 1e-9 relative); exact scalar
/// types match a sequential scan exactly.
template <typename Value>
std::vector<Value> tree_scan(std::span<const Value> values, unsigned workers = 1) {
    const std::size_t n = values.size();
    if (n == 0) return {};

    const std::size_t m = std::bit_ceil(n);
    std::vector<Value> tree(m, Value(0));
    std::copy(values.begin(), values.end(), tree.begin());

    // Up-sweep: partial sums climb the tree.
    for (std::size_t stride = 1; stride < m; stride <<= 1) {
        const std::size_t pairs = m / (stride << 1);
        parallel_for_index(pairs, workers, [&](std::size_t t) {
            const std::size_t right = (t + 1) * (stride << 1) - 1;
            tree[right] += tree[right - stride];
        });
    }

    // Down-sweep: convert to an exclusive scan.
    tree[m - 1] = Value(0);
    for (std::size_t stride = m >> 1; stride >= 1; stride >>= 1) {
        const std::size_t pairs = m / (stride << 1);
        parallel_for_index(pairs, workers, [&](std::size_t t) {
            const std::size_t right = (t + 1) * (stride << 1) - 1;
            Value left_value = tree[right - stride];
            tree[right - stride] = tree[right];
            tree[right] += left_value;
        });
        if (stride == 1) break;
    }

    // Inclusive = exclusive + own value.
    std::vector<Value> out(n);
    parallel_for_index(n, workers, [&](std::size_t i) { out[i] = tree[i] + values[i]; });
    return out;
}

template <typename Value>
std::vector<Value> tree_scan(const std::vector<Value>& values, unsigned workers = 1) {
    return tree_scan(std::span<const Value>(values.data(), values.size()), workers);
}

} // namespace rimdp
