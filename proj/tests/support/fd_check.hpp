#pragma once

// Finite-difference gradient oracle. The analytic gradient from a tape
// backward pass is compared coordinate-by-coordinate against a central
// difference of the same scalar loss rebuilt from scratch. Below a small
// magnitude floor the comparison degrades gracefully into an absolute check,
// since relative error on near-zero gradients only measures FD noise.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "metarl/tape.hpp"

namespace testsupport {

using LossBuilder = std::function<metarl::Var(metarl::Tape&)>;

struct FdReport {
  double max_err = 0.0;
  std::string worst;
  int checked = 0;
};

inline double fd_error(double analytic, double fd, double floor = 1e-3) {
  double denom = std::max({std::fabs(analytic), std::fabs(fd), floor});
  return std::fabs(analytic - fd) / denom;
}

/// Checks d(loss)/d(param) for every coordinate of every listed parameter.
/// `build` must be deterministic given the current parameter values.
inline FdReport fd_check(const std::vector<metarl::Parameter*>& params,
                         const LossBuilder& build, double h = 1e-5) {
  for (auto* p : params) p->zero_grad();
  {
    metarl::Tape tape;
    tape.backward(build(tape));
  }
  std::vector<metarl::Tensor> analytic;
  analytic.reserve(params.size());
  for (auto* p : params) analytic.push_back(p->grad);

  auto eval = [&build]() {
    metarl::Tape tape;
    return tape.scalar(build(tape));
  };

  FdReport rep;
  for (size_t pi = 0; pi < params.size(); ++pi) {
    metarl::Parameter& p = *params[pi];
    for (size_t i = 0; i < p.value.v.size(); ++i) {
      double saved = p.value.v[i];
      p.value.v[i] = saved + h;
      double fplus = eval();
      p.value.v[i] = saved - h;
      double fminus = eval();
      p.value.v[i] = saved;
      double fd = (fplus - fminus) / (2.0 * h);
      double err = fd_error(analytic[pi].v[i], fd);
      ++rep.checked;
      if (err > rep.max_err) {
        rep.max_err = err;
        rep.worst = p.name + "[" + std::to_string(i) + "] analytic=" +
                    std::to_string(analytic[pi].v[i]) + " fd=" + std::to_string(fd);
      }
    }
  }
  return rep;
}

}  // namespace testsupport
