#pragma once

#include <Eigen/Dense>

#include "metarl/tensor.hpp"

namespace metarl::linalg {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMat>;
using MutMap = Eigen::Map<RowMat>;

inline ConstMap as_map(const Tensor& t) { return ConstMap(t.v.data(), t.rows(), t.cols()); }
inline MutMap as_map(Tensor& t) { return MutMap(t.v.data(), t.rows(), t.cols()); }

/// out = a * b. Single kernel shared by the tape and the no-grad forward paths
/// so both routes produce bitwise-identical values.
inline Tensor matmul(const Tensor& a, const Tensor& b) {
  Tensor out = Tensor::zeros({a.rows(), b.cols()});
  as_map(out).noalias() = as_map(a) * as_map(b);
  return out;
}

/// acc += g * b^T
inline void acc_matmul_nt(Tensor& acc, const Tensor& g, const Tensor& b) {
  as_map(acc).noalias() += as_map(g) * as_map(b).transpose();
}

/// acc += a^T * g
inline void acc_matmul_tn(Tensor& acc, const Tensor& a, const Tensor& g) {
  as_map(acc).noalias() += as_map(a).transpose() * as_map(g);
}

}  // namespace metarl::linalg
