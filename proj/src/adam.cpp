#include "metarl/adam.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace metarl {

Adam::Adam(std::vector<Parameter*> params, AdamConfig cfg)
    : params_(std::move(params)), cfg_(cfg) {
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (auto* p : params_) {
    m_.push_back(Tensor::zeros(p->value.shape));
    v_.push_back(Tensor::zeros(p->value.shape));
  }
}

void Adam::zero_grad() {
  for (auto* p : params_) p->zero_grad();
}

void Adam::step() {
  ++t_;
  double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (size_t pi = 0; pi < params_.size(); ++pi) {
    Parameter& p = *params_[pi];
    if (!p.trainable) continue;
    Tensor& m = m_[pi];
    Tensor& v = v_[pi];
    for (size_t i = 0; i < p.value.v.size(); ++i) {
      double g = p.grad.v[i];
      if (!std::isfinite(g)) {
        throw std::runtime_error("non-finite gradient in parameter '" + p.name +
                                 "' (coordinate " + std::to_string(i) + ") at optimizer step " +
                                 std::to_string(t_));
      }
      m.v[i] = cfg_.beta1 * m.v[i] + (1.0 - cfg_.beta1) * g;
      v.v[i] = cfg_.beta2 * v.v[i] + (1.0 - cfg_.beta2) * g * g;
      double mhat = m.v[i] / bc1;
      double vhat = v.v[i] / bc2;
      p.value.v[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
  }
}

}  // namespace metarl
