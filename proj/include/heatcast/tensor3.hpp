#pragma once

#include "heatcast/core.hpp"

namespace heatcast {

/// Dense channels x rows x cols array. Storage is row-major over (channel, row, col):
/// row c of `data` holds channel c flattened row by row.
template <typename Scalar>
struct Tensor3 {
    Index channels = 0;
    Index rows = 0;
    Index cols = 0;
    RowMatrix<Scalar> data;

    Tensor3() = default;
    Tensor3(Index c, Index r, Index k) : channels(c), rows(r), cols(k), data(RowMatrix<Scalar>::Zero(c, r * k)) {}

    Index size() const noexcept { return channels * rows * cols; }
    Index plane() const noexcept { return rows * cols; }

    Scalar& operator()(Index c, Index r, Index k) { return data(c, r * cols + k); }
    Scalar operator()(Index c, Index r, Index k) const { return data(c, r * cols + k); }

    Eigen::Map<RowMatrix<Scalar>> channel(Index c) { return {data.row(c).data(), rows, cols}; }
    Eigen::Map<const RowMatrix<Scalar>> channel(Index c) const { return {data.row(c).data(), rows, cols}; }

    /// Flat view in (channel, row, col) order.
    Eigen::Map<const Vector<Scalar>> flat() const { return {data.data(), size()}; }
    Eigen::Map<Vector<Scalar>> flat() { return {data.data(), size()}; }

    friend bool operator==(const Tensor3& a, const Tensor3& b) {
        return a.channels == b.channels && a.rows == b.rows && a.cols == b.cols && a.data == b.data;
    }
};

}  // namespace heatcast
