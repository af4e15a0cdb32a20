#pragma once

#include <string>
#include <vector>

#include "metarl/nn.hpp"
#include "metarl/tape.hpp"

namespace metarl {

/// Squashed-Gaussian policy head. A single trunk outputs [means, log_stds];
/// log_std is clamped to [-20, 2]; actions are tanh(mean + std * noise) with
/// the standard change-of-variables correction
///   log pi(a) = log N(pre) - sum_a log(1 - tanh(pre_a)^2),
/// computed via the numerically stable identity
///   log(1 - tanh(x)^2) = 2*(ln 2 - x - softplus(-2x)).
/// Noise is always passed in explicitly so callers control determinism.
class GaussianPolicy {
 public:
  GaussianPolicy() = default;
  GaussianPolicy(std::string name, int input_dim, std::vector<int> hidden, int act_dim, Rng& rng);

  struct TapeSample {
    Var action;    // [B, act_dim], strictly inside (-1, 1)
    Var log_prob;  // [B, 1]
  };
  TapeSample sample(Tape& t, Var input, const Tensor& noise);

  struct Sample {
    Tensor action;
    Tensor log_prob;
  };
  Sample sample_nograd(const Tensor& input, const Tensor& noise) const;

  /// Deterministic action: tanh of the distribution mean.
  Tensor mean_action_nograd(const Tensor& input) const;

  Mlp& trunk() { return trunk_; }
  const Mlp& trunk() const { return trunk_; }
  std::vector<Parameter*> params() { return trunk_.params(); }
  int act_dim() const { return act_dim_; }

  static constexpr double kLogStdMin = -20.0;
  static constexpr double kLogStdMax = 2.0;

 private:
  Mlp trunk_;
  int act_dim_ = 0;

  void check_noise(const Tensor& input, const Tensor& noise) const;
};

}  // namespace metarl
