#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace metarl {

/// Dense row-major tensor of doubles. Matrices are [rows, cols], scalars [1,1].
struct Tensor {
  std::vector<int> shape;
  std::vector<double> v;

  Tensor() = default;
  Tensor(std::vector<int> sh, std::vector<double> data);

  static Tensor zeros(std::vector<int> sh);
  static Tensor full(std::vector<int> sh, double c);
  static Tensor scalar(double c);
  static Tensor row(std::vector<double> data);  // [1, n]

  int rows() const;
  int cols() const;
  size_t size() const { return v.size(); }

  double& at(int r, int c) { return v[static_cast<size_t>(r) * cols() + c]; }
  double at(int r, int c) const { return v[static_cast<size_t>(r) * cols() + c]; }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }
  bool all_finite() const;
  void fill(double c);
};

size_t shape_numel(const std::vector<int>& sh);
std::string shape_str(const std::vector<int>& sh);

}  // namespace metarl
