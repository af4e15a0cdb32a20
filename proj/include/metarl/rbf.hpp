#pragma once

#include <string>
#include <vector>

#include "metarl/tape.hpp"
#include "metarl/tensor.hpp"

namespace metarl {

/// Per-coordinate radial-basis expansion of a latent vector:
///   out[b, i*k + j] = exp(-delta[i,j] * (z[b,i] - centers[i,j])^2)
/// with delta = exp(log_scales). Init places the k centers of every
/// coordinate evenly over [lo, hi] and picks delta = 4*ln(2)/spacing^2, which
/// makes the activation exactly 0.5 at the midpoint between adjacent centers.
class RbfLayer {
 public:
  RbfLayer() = default;
  RbfLayer(std::string name, int latent_dim, int num_centers, bool trainable,
           double lo = -5.0, double hi = 5.0);

  Var forward(Tape& t, Var z);
  Tensor forward_nograd(const Tensor& z) const;

  int latent_dim() const { return d_; }
  int num_centers() const { return k_; }
  int output_dim() const { return d_ * k_; }
  bool trainable() const { return trainable_; }

  Parameter& centers() { return centers_; }
  Parameter& log_scales() { return log_scales_; }
  const Parameter& centers() const { return centers_; }
  const Parameter& log_scales() const { return log_scales_; }

  /// Empty for the fixed variant.
  std::vector<Parameter*> trainable_params();
  /// Both tensors, trainable or not (for checkpointing / target copies).
  std::vector<Parameter*> all_params();

 private:
  int d_ = 0;
  int k_ = 0;
  bool trainable_ = false;
  Parameter centers_;
  Parameter log_scales_;
};

}  // namespace metarl
