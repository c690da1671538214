#pragma once

#include "rimdp/csc.hpp"
#include "rimdp/errors.hpp"
#include "rimdp/numeric.hpp"

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rimdp {

/// One source-action column of an interval transition matrix: the support
/// row indices together with the lower and upper bound at each entry.
template <typename Value>
struct ColumnView {
    std::span<const index_t> rows;
    std::span<const Value> lower;
    std::span<const Value> upper;

    std::size_t size() const { return rows.size(); }
};

/// Paired lower/upper sparse transition bounds in CSC layout. Columns are
/// source-action pairs, rows are destination states.
///
/// Internally both bound matrices share one sparsity pattern: the pattern of
/// the upper bounds. An entry absent from both inputs means the interval
/// [0,0]; an entry present only in the upper bounds means [0, upper]. A
/// positive lower bound at a position with no upper bound is rejected, since
/// it would mean lower > upper = 0.
template <typename Value>
class IntervalProbabilities {
public:
    using Traits = NumericTraits<Value>;

    IntervalProbabilities() = default;

    /// Validating constructor from two equally-shaped sparse matrices.
    static IntervalProbabilities from_sparse(const CscMatrix<Value>& lower,
                                             const CscMatrix<Value>& upper) {
        if (lower.rows != upper.rows || lower.cols != upper.cols) {
            throw ModelError({ViolationKind::ShapeMismatch,
                              "lower is " + std::to_string(lower.rows) + "x" +
                                  std::to_string(lower.cols) + ", upper is " +
                                  std::to_string(upper.rows) + "x" + std::to_string(upper.cols)});
        }
        if (auto v = lower.structural_violation()) throw ModelError(*v);
        if (auto v = upper.structural_violation()) throw ModelError(*v);

        IntervalProbabilities p = align(lower, upper);
        p.check_or_throw();
        p.drop_empty_intervals();
        return p;
    }

    /// Validating constructor from two equally-shaped dense matrices.
    static IntervalProbabilities from_dense(const DenseMatrix<Value>& lower,
                                            const DenseMatrix<Value>& upper) {
        return from_sparse(CscMatrix<Value>::from_dense(lower), CscMatrix<Value>::from_dense(upper));
    }

    /// Assembles from pre-aligned arrays (one shared pattern, two value
    /// arrays), validating and canonicalizing. Used by the file readers.
    static IntervalProbabilities from_aligned(index_t num_dest, index_t num_cols,
                                              std::vector<index_t> colptr,
                                              std::vector<index_t> rowval,
                                              std::vector<Value> lower, std::vector<Value> upper) {
        IntervalProbabilities p =
            from_aligned_unchecked(num_dest, num_cols, std::move(colptr), std::move(rowval),
                                   std::move(lower), std::move(upper));
        p.check_or_throw();
        p.drop_empty_intervals();
        return p;
    }

    /// Assembles from pre-aligned arrays without validation. Intended for
    /// tests that need to build intentionally broken objects.
    static IntervalProbabilities from_aligned_unchecked(index_t num_dest, index_t num_cols,
                                                        std::vector<index_t> colptr,
                                                        std::vector<index_t> rowval,
                                                        std::vector<Value> lower,
                                                        std::vector<Value> upper) {
        IntervalProbabilities p;
        p.num_dest_ = num_dest;
        p.num_cols_ = num_cols;
        p.colptr_ = std::move(colptr);
        p.rowval_ = std::move(rowval);
        p.lower_ = std::move(lower);
        p.upper_ = std::move(upper);
        return p;
    }

    index_t num_dest() const { return num_dest_; }
    index_t num_cols() const { return num_cols_; }
    index_t nnz() const { return colptr_.empty() ? 0 : colptr_.back(); }

    ColumnView<Value> column(index_t j) const {
        const std::size_t begin = static_cast<std::size_t>(colptr_[j]);
        const std::size_t len = static_cast<std::size_t>(colptr_[j + 1]) - begin;
        return {std::span<const index_t>(rowval_.data() + begin, len),
                std::span<const Value>(lower_.data() + begin, len),
                std::span<const Value>(upper_.data() + begin, len)};
    }

    std::span<const index_t> colptr() const { return colptr_; }
    std::span<const index_t> rowval() const { return rowval_; }
    std::span<const Value> lower_values() const { return lower_; }
    std::span<const Value> upper_values() const { return upper_; }

    Value column_lower_sum(index_t j) const {
        Value s(0);
        for (index_t k = colptr_[j]; k < colptr_[j + 1]; ++k) s += lower_[k];
        return s;
    }

    Value column_upper_sum(index_t j) const {
        Value s(0);
        for (index_t k = colptr_[j]; k < colptr_[j + 1]; ++k) s += upper_[k];
        return s;
    }

    /// Lower bounds as a standalone CSC matrix (zero entries stripped).
    CscMatrix<Value> lower_csc() const { return extract(lower_); }

    /// Upper bounds as a standalone CSC matrix (zero entries stripped).
    CscMatrix<Value> upper_csc() const { return extract(upper_); }

    /// Re-checks every type invariant and returns one entry per violation.
    ValidationReport validate() const {
        ValidationReport report;
        CscMatrix<Value> pattern{num_dest_, num_cols_, colptr_, rowval_, lower_};
        if (auto v = pattern.structural_violation()) {
            report.push_back(*v);
            return report; // entry checks need a sound structure
        }
        if (upper_.size() != lower_.size()) {
            report.push_back({ViolationKind::ShapeMismatch, "lower/upper value arrays differ in length"});
            return report;
        }

        const Value tol = Traits::feasibility_tolerance();
        for (index_t j = 0; j < num_cols_; ++j) {
            Value lo_sum(0), up_sum(0);
            for (index_t k = colptr_[j]; k < colptr_[j + 1]; ++k) {
                const Value& lo = lower_[k];
                const Value& up = upper_[k];
                if (!Traits::is_finite(lo) || lo < Value(0) || lo > Value(1)) {
                    report.push_back({ViolationKind::EntryOutOfRange,
                                      "lower bound " + Traits::to_string(lo) + " outside [0,1]", j,
                                      rowval_[k]});
                }
                if (!Traits::is_finite(up) || up < Value(0) || up > Value(1)) {
                    report.push_back({ViolationKind::EntryOutOfRange,
                                      "upper bound " + Traits::to_string(up) + " outside [0,1]", j,
                                      rowval_[k]});
                }
                if (lo > up) {
                    report.push_back({ViolationKind::BoundOrderViolation,
                                      "lower bound " + Traits::to_string(lo) + " exceeds upper bound " +
                                          Traits::to_string(up),
                                      j, rowval_[k]});
                }
                lo_sum += lo;
                up_sum += up;
            }
            if (lo_sum > Value(1) + tol) {
                report.push_back({ViolationKind::InfeasibleColumn,
                                  "lower bounds sum to " + Traits::to_string(lo_sum) + " > 1", j});
            }
            if (up_sum < Value(1) - tol) {
                report.push_back({ViolationKind::InfeasibleColumn,
                                  "upper bounds sum to " + Traits::to_string(up_sum) + " < 1", j});
            }
        }
        return report;
    }

    /// Concatenates blocks column-wise. All blocks must have the same
    /// destination count.
    static IntervalProbabilities horzcat(std::span<const IntervalProbabilities> blocks,
                                         index_t num_dest) {
        IntervalProbabilities out;
        out.num_dest_ = num_dest;
        out.colptr_.push_back(0);
        for (const auto& b : blocks) {
            out.num_cols_ += b.num_cols_;
            for (index_t j = 0; j < b.num_cols_; ++j) {
                const auto col = b.column(j);
                out.rowval_.insert(out.rowval_.end(), col.rows.begin(), col.rows.end());
                out.lower_.insert(out.lower_.end(), col.lower.begin(), col.lower.end());
                out.upper_.insert(out.upper_.end(), col.upper.begin(), col.upper.end());
                out.colptr_.push_back(static_cast<index_t>(out.rowval_.size()));
            }
        }
        return out;
    }

    /// Extracts the column range [begin, end) as a standalone object.
    IntervalProbabilities slice_columns(index_t begin, index_t end) const {
        IntervalProbabilities out;
        out.num_dest_ = num_dest_;
        out.num_cols_ = end - begin;
        const index_t k0 = colptr_[begin];
        out.colptr_.reserve(out.num_cols_ + 1);
        for (index_t j = begin; j <= end; ++j) out.colptr_.push_back(colptr_[j] - k0);
        out.rowval_.assign(rowval_.begin() + k0, rowval_.begin() + colptr_[end]);
        out.lower_.assign(lower_.begin() + k0, lower_.begin() + colptr_[end]);
        out.upper_.assign(upper_.begin() + k0, upper_.begin() + colptr_[end]);
        return out;
    }

    bool operator==(const IntervalProbabilities&) const = default;

private:
    // Merges the two patterns column by column; missing entries become 0.
    static IntervalProbabilities align(const CscMatrix<Value>& lower, const CscMatrix<Value>& upper) {
        IntervalProbabilities p;
        p.num_dest_ = upper.rows;
        p.num_cols_ = upper.cols;
        p.colptr_.reserve(upper.cols + 1);
        p.colptr_.push_back(0);
        for (index_t j = 0; j < upper.cols; ++j) {
            index_t a = lower.colptr[j], a_end = lower.colptr[j + 1];
            index_t b = upper.colptr[j], b_end = upper.colptr[j + 1];
            while (a < a_end || b < b_end) {
                index_t ra = a < a_end ? lower.rowval[a] : std::numeric_limits<index_t>::max();
                index_t rb = b < b_end ? upper.rowval[b] : std::numeric_limits<index_t>::max();
                if (ra < rb) {
                    p.rowval_.push_back(ra);
                    p.lower_.push_back(lower.nzval[a]);
                    p.upper_.push_back(Value(0));
                    ++a;
                } else if (rb < ra) {
                    p.rowval_.push_back(rb);
                    p.lower_.push_back(Value(0));
                    p.upper_.push_back(upper.nzval[b]);
                    ++b;
                } else {
                    p.rowval_.push_back(ra);
                    p.lower_.push_back(lower.nzval[a]);
                    p.upper_.push_back(upper.nzval[b]);
                    ++a;
                    ++b;
                }
            }
            p.colptr_.push_back(static_cast<index_t>(p.rowval_.size()));
        }
        return p;
    }

    void check_or_throw() const {
        ValidationReport report = validate();
        if (!report.empty()) throw ModelError(report.front());
    }

    // Removes entries whose interval is exactly [0,0]; they carry no
    // information and keeping them would make equality pattern-dependent.
    void drop_empty_intervals() {
        std::vector<index_t> colptr{0};
        std::vector<index_t> rowval;
        std::vector<Value> lower, upper;
        colptr.reserve(colptr_.size());
        for (index_t j = 0; j < num_cols_; ++j) {
            for (index_t k = colptr_[j]; k < colptr_[j + 1]; ++k) {
                if (lower_[k] == Value(0) && upper_[k] == Value(0)) continue;
                rowval.push_back(rowval_[k]);
                lower.push_back(lower_[k]);
                upper.push_back(upper_[k]);
            }
            colptr.push_back(static_cast<index_t>(rowval.size()));
        }
        colptr_ = std::move(colptr);
        rowval_ = std::move(rowval);
        lower_ = std::move(lower);
        upper_ = std::move(upper);
    }

    CscMatrix<Value> extract(const std::vector<Value>& values) const {
        CscMatrix<Value> m;
        m.rows = num_dest_;
        m.cols = num_cols_;
        m.colptr.reserve(num_cols_ + 1);
        m.colptr.push_back(0);
        for (index_t j = 0; j < num_cols_; ++j) {
            for (index_t k = colptr_[j]; k < colptr_[j + 1]; ++k) {
                if (values[k] == Value(0)) continue;
                m.rowval.push_back(rowval_[k]);
                m.nzval.push_back(values[k]);
            }
            m.colptr.push_back(static_cast<index_t>(m.rowval.size()));
        }
        return m;
    }

    index_t num_dest_ = 0;
    index_t num_cols_ = 0;
    std::vector<index_t> colptr_;
    std::vector<index_t> rowval_;
    std::vector<Value> lower_;
    std::vector<Value> upper_;
};

/// Checked construction from dense or sparse bound matrices.
template <typename Value>
IntervalProbabilities<Value> build_interval_probabilities(const DenseMatrix<Value>& lower,
                                                          const DenseMatrix<Value>& upper) {
    return IntervalProbabilities<Value>::from_dense(lower, upper);
}

template <typename Value>
IntervalProbabilities<Value> build_interval_probabilities(const CscMatrix<Value>& lower,
                                                          const CscMatrix<Value>& upper) {
    return IntervalProbabilities<Value>::from_sparse(lower, upper);
}

} // namespace rimdp
