#pragma once

#include "rimdp/errors.hpp"
#include "rimdp/numeric.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace rimdp {

/// Index type for states, columns and row indices. 32 bits keep the sparse
/// storage compact; models are limited to 2^31-1 states/transitions.
using index_t = std::int32_t;

/// Dense matrix as a vector of rows (row-major), used at API boundaries.
template <typename Value>
using DenseMatrix = std::vector<std::vector<Value>>;

/// Compressed sparse column matrix. Row indices are strictly increasing
/// within each column and explicit zeros are dropped by the constructors.
template <typename Value>
struct CscMatrix {
    index_t rows = 0;
    index_t cols = 0;
    std::vector<index_t> colptr; // size cols + 1
    std::vector<index_t> rowval; // size nnz
    std::vector<Value> nzval;    // size nnz

    index_t nnz() const { return colptr.empty() ? 0 : colptr.back(); }

    /// Builds from raw CSC arrays, checking the structural invariants.
    static CscMatrix from_csc(index_t rows, index_t cols, std::vector<index_t> colptr,
                              std::vector<index_t> rowval, std::vector<Value> nzval) {
        CscMatrix m{rows, cols, std::move(colptr), std::move(rowval), std::move(nzval)};
        if (auto v = m.structural_violation()) throw ModelError(*v);
        return m;
    }

    /// Builds from a dense matrix, dropping zero entries.
    static CscMatrix from_dense(const DenseMatrix<Value>& dense) {
        CscMatrix m;
        m.rows = static_cast<index_t>(dense.size());
        m.cols = m.rows > 0 ? static_cast<index_t>(dense[0].size()) : 0;
        for (const auto& row : dense) {
            if (static_cast<index_t>(row.size()) != m.cols) {
                throw ModelError({ViolationKind::ShapeMismatch, "ragged dense matrix"});
            }
        }
        m.colptr.reserve(m.cols + 1);
        m.colptr.push_back(0);
        for (index_t j = 0; j < m.cols; ++j) {
            for (index_t i = 0; i < m.rows; ++i) {
                if (dense[i][j] != Value(0)) {
                    m.rowval.push_back(i);
                    m.nzval.push_back(dense[i][j]);
                }
            }
            m.colptr.push_back(static_cast<index_t>(m.rowval.size()));
        }
        return m;
    }

    DenseMatrix<Value> to_dense() const {
        DenseMatrix<Value> dense(rows, std::vector<Value>(cols, Value(0)));
        for (index_t j = 0; j < cols; ++j) {
            for (index_t k = colptr[j]; k < colptr[j + 1]; ++k) {
                dense[rowval[k]][j] = nzval[k];
            }
        }
        return dense;
    }

    /// Returns the first structural problem, if any: bad pointer array,
    /// out-of-range or non-increasing row indices, mismatched array sizes.
    std::optional<Violation> structural_violation() const {
        if (rows < 0 || cols < 0) {
            return Violation{ViolationKind::StructuralError, "negative dimension"};
        }
        if (static_cast<index_t>(colptr.size()) != cols + 1) {
            return Violation{ViolationKind::StructuralError, "colptr length must be cols+1"};
        }
        if (colptr.front() != 0) {
            return Violation{ViolationKind::StructuralError, "colptr must start at 0"};
        }
        if (colptr.back() != static_cast<index_t>(rowval.size()) || rowval.size() != nzval.size()) {
            return Violation{ViolationKind::StructuralError, "value arrays do not match colptr"};
        }
        for (index_t j = 0; j < cols; ++j) {
            if (colptr[j] > colptr[j + 1]) {
                return Violation{ViolationKind::StructuralError, "colptr not monotone", j};
            }
            for (index_t k = colptr[j]; k < colptr[j + 1]; ++k) {
                if (rowval[k] < 0 || rowval[k] >= rows) {
                    return Violation{ViolationKind::StructuralError, "row index out of range", j,
                                     rowval[k]};
                }
                if (k > colptr[j] && rowval[k] <= rowval[k - 1]) {
                    return Violation{ViolationKind::StructuralError,
                                     "row indices not strictly increasing within column", j,
                                     rowval[k]};
                }
            }
        }
        return std::nullopt;
    }

    bool operator==(const CscMatrix&) const = default;
};

} // namespace rimdp
