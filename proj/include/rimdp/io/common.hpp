#pragma once

#include "rimdp/errors.hpp"
#include "rimdp/numeric.hpp"
#include "rimdp/property.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rimdp::io {

/// A model plus whatever the format carries alongside it: a specification
/// (PRISM, native) and/or a terminal state set (bmdp-tool).
template <typename Value>
struct FormatProblem {
    IntervalMDP<Value> imdp;
    std::optional<Specification<Value>> spec;
    std::optional<std::vector<index_t>> terminal_states;
};

namespace detail {

/// Line-oriented reader that tracks provenance for error reporting.
class LineReader {
public:
    explicit LineReader(const std::string& path) : path_(path), in_(path) {
        if (!in_) throw MissingFile(path);
    }

    bool next(std::string& line) {
        if (!std::getline(in_, line)) return false;
        ++line_number_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
    }

    /// Next line that is neither empty nor blank; false at end of file.
    bool next_content(std::string& line) {
        while (next(line)) {
            if (line.find_first_not_of(" \t") != std::string::npos) return true;
        }
        return false;
    }

    std::int64_t line_number() const { return line_number_; }
    const std::string& path() const { return path_; }

    [[noreturn]] void fail(const std::string& reason) const {
        throw ParseError(path_, line_number_, reason);
    }

private:
    std::string path_;
    std::ifstream in_;
    std::int64_t line_number_ = 0;
};

inline std::vector<std::string_view> split_whitespace(std::string_view line) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
        if (i > start) tokens.push_back(line.substr(start, i - start));
    }
    return tokens;
}

inline std::optional<std::int64_t> parse_int(std::string_view token) {
    if (token.empty()) return std::nullopt;
    std::int64_t value = 0;
    std::size_t i = 0;
    bool negative = false;
    if (token[0] == '-') {
        negative = true;
        i = 1;
        if (token.size() == 1) return std::nullopt;
    }
    for (; i < token.size(); ++i) {
        if (token[i] < '0' || token[i] > '9') return std::nullopt;
        value = value * 10 + (token[i] - '0');
        if (value > (std::int64_t(1) << 40)) return std::nullopt;
    }
    return negative ? -value : value;
}

template <typename Value>
Value parse_probability(const LineReader& reader, std::string_view token) {
    auto v = NumericTraits<Value>::parse(token);
    if (!v) reader.fail("cannot parse probability \"" + std::string(token) + "\"");
    if (*v < Value(0) || *v > Value(1)) {
        reader.fail("EntryOutOfRange: probability " + std::string(token) + " outside [0,1]");
    }
    return *v;
}

inline std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path + " for writing");
    return out;
}

/// Transition triplets accumulated by the readers, grouped into the CSC
/// transition matrix once the whole file is consumed. Columns are keyed by
/// (source, action index within the source).
template <typename Value>
class TransitionAccumulator {
public:
    TransitionAccumulator(index_t num_states, const std::string& path)
        : num_states_(num_states), path_(path), columns_(num_states) {}

    void add(const LineReader& reader, std::int64_t src, std::int64_t action_index,
             std::int64_t dst, Value lo, Value hi) {
        if (src < 0 || src >= num_states_) {
            reader.fail("DanglingStateIndex: source state " + std::to_string(src));
        }
        if (dst < 0 || dst >= num_states_) {
            reader.fail("DanglingStateIndex: destination state " + std::to_string(dst));
        }
        if (action_index < 0) reader.fail("negative action index");
        if (lo > hi) {
            reader.fail("BoundOrderViolation: lower bound exceeds upper bound");
        }
        auto& state_cols = columns_[static_cast<std::size_t>(src)];
        if (static_cast<std::size_t>(action_index) >= state_cols.size()) {
            state_cols.resize(static_cast<std::size_t>(action_index) + 1);
        }
        auto& col = state_cols[static_cast<std::size_t>(action_index)];
        for (const auto& e : col) {
            if (e.dst == dst) {
                reader.fail("DuplicateTransition: (" + std::to_string(src) + ", " +
                            std::to_string(action_index) + ", " + std::to_string(dst) + ")");
            }
        }
        col.push_back({static_cast<index_t>(dst), lo, hi});
    }

    void set_action_label(const LineReader& reader, std::int64_t src, std::int64_t action_index,
                          std::string label) {
        auto& labels = labels_[{src, action_index}];
        if (!labels.empty() && labels != label) {
            reader.fail("conflicting action labels \"" + labels + "\" and \"" + label +
                        "\" for the same source/action");
        }
        labels = std::move(label);
    }

    /// Builds the model; every state must have at least one action column.
    IntervalMDP<Value> build() {
        std::vector<index_t> colptr{0};
        std::vector<index_t> rowval;
        std::vector<Value> lower, upper;
        std::vector<index_t> stateptr{0};
        std::vector<std::string> actions;

        for (index_t s = 0; s < num_states_; ++s) {
            auto& state_cols = columns_[static_cast<std::size_t>(s)];
            for (std::size_t a = 0; a < state_cols.size(); ++a) {
                auto& col = state_cols[a];
                if (col.empty()) {
                    throw ParseError(path_, 0,
                                     "state " + std::to_string(s) + " action " +
                                         std::to_string(a) + " has no transitions");
                }
                std::sort(col.begin(), col.end(),
                          [](const Entry& x, const Entry& y) { return x.dst < y.dst; });
                for (const auto& e : col) {
                    rowval.push_back(e.dst);
                    lower.push_back(e.lo);
                    upper.push_back(e.hi);
                }
                colptr.push_back(static_cast<index_t>(rowval.size()));
                auto it = labels_.find({s, static_cast<std::int64_t>(a)});
                actions.push_back(it != labels_.end() ? it->second : std::to_string(a));
            }
            if (state_cols.empty()) {
                throw ParseError(path_, 0,
                                 "state " + std::to_string(s) + " has no transitions");
            }
            stateptr.push_back(static_cast<index_t>(colptr.size()) - 1);
        }

        const index_t num_cols = static_cast<index_t>(colptr.size()) - 1;
        auto transition = IntervalProbabilities<Value>::from_aligned(
            num_states_, num_cols, std::move(colptr), std::move(rowval), std::move(lower),
            std::move(upper));
        return IntervalMDP<Value>::from_parts(std::move(transition), std::move(stateptr),
                                              std::move(actions));
    }

private:
    struct Entry {
        index_t dst;
        Value lo;
        Value hi;
    };

    index_t num_states_;
    std::string path_;
    std::vector<std::vector<std::vector<Entry>>> columns_; // [state][action][entries]
    std::map<std::pair<std::int64_t, std::int64_t>, std::string> labels_;
};

} // namespace detail

} // namespace rimdp::io
