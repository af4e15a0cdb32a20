#pragma once

#include "metarl/env.hpp"

namespace metarl {

/// Degenerate environment for protocol cross-checks: a fixed observation and
/// one constant reward component, so any policy earns exactly reward * steps.
class ConstRewardEnv : public Environment {
 public:
  explicit ConstRewardEnv(double reward = 0.05) : reward_(reward) {}

  std::string name() const override { return "const_stub"; }
  int obs_dim() const override { return 3; }
  int act_dim() const override { return 1; }
  int num_components() const override { return 1; }
  std::vector<double> action_scale() const override { return {1.0}; }

  std::vector<double> reset(uint64_t) override { return {1.0, 0.0, 0.0}; }

  StepResult step(const std::vector<double>& action) override {
    if (action.size() != 1) throw std::runtime_error("const_stub: action must have 1 dimension");
    return StepResult{{1.0, 0.0, 0.0}, {reward_}};
  }

  double reward() const { return reward_; }

 private:
  double reward_ = 0.05;
};

}  // namespace metarl
