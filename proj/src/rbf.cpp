#include "metarl/rbf.hpp"

#include <cmath>
#include <stdexcept>

namespace metarl {

RbfLayer::RbfLayer(std::string name, int latent_dim, int num_centers, bool trainable, double lo,
                   double hi)
    : d_(latent_dim), k_(num_centers), trainable_(trainable) {
  if (latent_dim <= 0) throw std::runtime_error("rbf '" + name + "': latent_dim must be positive");
  if (num_centers < 2) throw std::runtime_error("rbf '" + name + "': need at least 2 centers");
  if (!(lo < hi)) throw std::runtime_error("rbf '" + name + "': interval must satisfy lo < hi");

  double spacing = (hi - lo) / static_cast<double>(k_ - 1);
  double delta = 4.0 * std::log(2.0) / (spacing * spacing);
  Tensor c = Tensor::zeros({d_, k_});
  Tensor ls = Tensor::zeros({d_, k_});
  for (int i = 0; i < d_; ++i) {
    for (int j = 0; j < k_; ++j) {
      c.at(i, j) = lo + spacing * static_cast<double>(j);
      ls.at(i, j) = std::log(delta);
    }
  }
  centers_ = Parameter(name + ".centers", std::move(c), trainable);
  log_scales_ = Parameter(name + ".log_scales", std::move(ls), trainable);
}

Var RbfLayer::forward(Tape& t, Var z) {
  return t.rbf_expand(z, t.leaf(centers_), t.leaf(log_scales_));
}

Tensor RbfLayer::forward_nograd(const Tensor& z) const {
  if (z.cols() != d_) {
    throw std::runtime_error("rbf '" + centers_.name + "': expected " + std::to_string(d_) +
                             " latent columns, got " + shape_str(z.shape));
  }
  int B = z.rows();
  Tensor out = Tensor::zeros({B, d_ * k_});
  for (int b = 0; b < B; ++b) {
    for (int i = 0; i < d_; ++i) {
      for (int j = 0; j < k_; ++j) {
        double diff = z.at(b, i) - centers_.value.at(i, j);
        double delta = std::exp(log_scales_.value.at(i, j));
        out.at(b, i * k_ + j) = std::exp(-delta * diff * diff);
      }
    }
  }
  return out;
}

std::vector<Parameter*> RbfLayer::trainable_params() {
  if (!trainable_) return {};
  return {&centers_, &log_scales_};
}

std::vector<Parameter*> RbfLayer::all_params() { return {&centers_, &log_scales_}; }

}  // namespace metarl
