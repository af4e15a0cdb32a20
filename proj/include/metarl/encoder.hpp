#pragma once

#include <string>
#include <utility>
#include <vector>

#include "metarl/nn.hpp"
#include "metarl/tape.hpp"

namespace metarl {

/// One environment step, and the unit of task-inference context.
struct Transition {
  std::vector<double> s;
  std::vector<double> a;
  double r = 0.0;
  std::vector<double> s_next;
};

/// Diagonal Gaussian over the task latent.
struct PosteriorGaussian {
  std::vector<double> mean;
  std::vector<double> var;
  int dim() const { return static_cast<int>(mean.size()); }
};

struct GaussianFactor {
  std::vector<double> mean;
  std::vector<double> var;
};

/// Precision-weighted product of diagonal Gaussian factors:
///   prec = sum_n 1/var_n,  var = 1/prec,  mean = var * sum_n mean_n/var_n.
PosteriorGaussian product_of_gaussians(const std::vector<GaussianFactor>& factors);

/// z = mean + sqrt(var) * noise (reparameterized draw).
std::vector<double> sample_latent(const PosteriorGaussian& post, const std::vector<double>& noise);

/// KL(N(mean, var) || N(0, I)) per dimension and total:
///   per_dim[i] = 0.5*(mean_i^2 + var_i - 1 - ln var_i).
std::pair<std::vector<double>, double> kl_to_prior(const PosteriorGaussian& post);

/// Per-transition factor network: an MLP from the flattened (s, a, r, s')
/// tuple to a factor mean and a softplus-plus-floor variance.
class TaskEncoder {
 public:
  static constexpr double kVarFloor = 1e-7;

  TaskEncoder() = default;
  TaskEncoder(std::string name, int state_dim, int act_dim, std::vector<int> hidden,
              int latent_dim, Rng& rng);

  int latent_dim() const { return latent_dim_; }
  int input_dim() const { return 2 * state_dim_ + act_dim_ + 1; }
  Mlp& trunk() { return trunk_; }
  std::vector<Parameter*> params() { return trunk_.params(); }

  GaussianFactor encode_transition(const Transition& c) const;
  std::vector<GaussianFactor> encode_context(const std::vector<Transition>& context) const;
  PosteriorGaussian posterior(const std::vector<Transition>& context) const;

  /// Mean of the factor means (the meta-test latent estimate); deliberately
  /// not the product-posterior mean.
  std::vector<double> posterior_mean_estimate(const std::vector<Transition>& context) const;

  struct TapePosterior {
    Var mean;  // [1, d]
    Var var;   // [1, d]
  };
  TapePosterior posterior_tape(Tape& t, const std::vector<Transition>& context);
  Var sample_latent_tape(Tape& t, const TapePosterior& post, const Tensor& noise);
  /// Returns (per_dim [1,d], total scalar).
  std::pair<Var, Var> kl_to_prior_tape(Tape& t, const TapePosterior& post);

  /// Flattens a context into the [N, input_dim] encoder input matrix.
  Tensor context_matrix(const std::vector<Transition>& context) const;

 private:
  int state_dim_ = 0;
  int act_dim_ = 0;
  int latent_dim_ = 0;
  Mlp trunk_;

  void check_transition(const Transition& c) const;
};

}  // namespace metarl
