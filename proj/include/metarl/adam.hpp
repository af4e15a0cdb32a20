#pragma once

#include <cstdint>
#include <vector>

#include "metarl/tape.hpp"

namespace metarl {

struct AdamConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam with bias correction. Refuses to apply a non-finite gradient: that
/// always indicates an upstream bug, and silently poisoned weights are far
/// harder to trace than an immediate abort naming the parameter.
class Adam {
 public:
  Adam() = default;
  explicit Adam(std::vector<Parameter*> params, AdamConfig cfg = {});

  void zero_grad();
  void step();

  int64_t steps() const { return t_; }
  const AdamConfig& config() const { return cfg_; }
  const std::vector<Parameter*>& params() const { return params_; }

  // checkpoint access
  std::vector<Tensor>& moment1() { return m_; }
  std::vector<Tensor>& moment2() { return v_; }
  void set_steps(int64_t t) { t_ = t; }

 private:
  std::vector<Parameter*> params_;
  AdamConfig cfg_;
  int64_t t_ = 0;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
};

}  // namespace metarl
