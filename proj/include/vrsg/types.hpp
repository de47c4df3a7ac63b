#pragma once
#include <cstdint>
#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace vrsg {

using Index = Eigen::Index;

template <class Scalar_, int Rows_ = Eigen::Dynamic>
using Vector = Eigen::Matrix<Scalar_, Rows_, 1>;

template <class Scalar_>
using RowMatrix = Eigen::Matrix<Scalar_, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Row-major so that each sample h_i is a contiguous sparse row.
template <class Scalar_>
using SparseRows = Eigen::SparseMatrix<Scalar_, Eigen::RowMajor>;

} // namespace vrsg
