#include "metarl/gaussian_policy.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "metarl/scalar_ops.hpp"

namespace metarl {

GaussianPolicy::GaussianPolicy(std::string name, int input_dim, std::vector<int> hidden,
                               int act_dim, Rng& rng)
    : trunk_(std::move(name), MlpSpec{input_dim, std::move(hidden), 2 * act_dim}, rng),
      act_dim_(act_dim) {
  if (act_dim <= 0) throw std::runtime_error("policy: act_dim must be positive");
}

void GaussianPolicy::check_noise(const Tensor& input, const Tensor& noise) const {
  if (noise.rows() != input.rows() || noise.cols() != act_dim_) {
    throw std::runtime_error("policy '" + trunk_.name() + "': noise must be [" +
                             std::to_string(input.rows()) + "," + std::to_string(act_dim_) +
                             "], got " + shape_str(noise.shape));
  }
}

GaussianPolicy::TapeSample GaussianPolicy::sample(Tape& t, Var input, const Tensor& noise) {
  check_noise(t.value(input), noise);
  Var out = trunk_.forward(t, input);
  Var mean = t.slice_cols(out, 0, act_dim_);
  Var log_std = t.clamp(t.slice_cols(out, act_dim_, act_dim_), kLogStdMin, kLogStdMax);
  Var std = t.exp(log_std);
  Var pre = t.add(mean, t.mul(std, t.constant(noise)));
  // keep u = (pre - mean)/std on the tape so the log-density derivative sees
  // both the sample path and the distribution-parameter path
  Var u = t.div(t.sub(pre, mean), std);
  Var action = t.tanh_squash(pre);

  Var gauss_elem =
      t.add_scalar(t.neg(t.add(t.mul_scalar(t.square(u), 0.5), log_std)), -kHalfLog2Pi);
  Var gauss = t.sum_cols(gauss_elem);
  Var corr_elem =
      t.add_scalar(t.mul_scalar(t.add(pre, t.softplus(t.mul_scalar(pre, -2.0))), -2.0), kTwoLn2);
  Var corr = t.sum_cols(corr_elem);
  return TapeSample{action, t.sub(gauss, corr)};
}

GaussianPolicy::Sample GaussianPolicy::sample_nograd(const Tensor& input,
                                                     const Tensor& noise) const {
  check_noise(input, noise);
  Tensor out = trunk_.forward_nograd(input);
  int B = input.rows();
  Tensor action = Tensor::zeros({B, act_dim_});
  Tensor log_prob = Tensor::zeros({B, 1});
  for (int b = 0; b < B; ++b) {
    double gauss = 0.0, corr = 0.0;
    for (int a = 0; a < act_dim_; ++a) {
      double mean = out.at(b, a);
      double log_std = out.at(b, act_dim_ + a);
      if (log_std < kLogStdMin) log_std = kLogStdMin;
      if (log_std > kLogStdMax) log_std = kLogStdMax;
      double std = std::exp(log_std);
      double pre = mean + std * noise.at(b, a);
      double u = (pre - mean) / std;
      action.at(b, a) = squash_tanh(pre);
      gauss += -(0.5 * (u * u) + log_std) + -kHalfLog2Pi;
      corr += (pre + stable_softplus(pre * -2.0)) * -2.0 + kTwoLn2;
    }
    log_prob.at(b, 0) = gauss - corr;
  }
  return Sample{std::move(action), std::move(log_prob)};
}

Tensor GaussianPolicy::mean_action_nograd(const Tensor& input) const {
  Tensor out = trunk_.forward_nograd(input);
  int B = input.rows();
  Tensor action = Tensor::zeros({B, act_dim_});
  for (int b = 0; b < B; ++b) {
    for (int a = 0; a < act_dim_; ++a) action.at(b, a) = squash_tanh(out.at(b, a));
  }
  return action;
}

}  // namespace metarl
