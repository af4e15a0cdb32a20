#include "metarl/nn.hpp"

#include <cmath>
#include <stdexcept>

#include "metarl/linalg.hpp"

namespace metarl {

Mlp::Mlp(std::string name, MlpSpec spec, Rng& rng) : name_(std::move(name)), spec_(std::move(spec)) {
  if (spec_.input_dim <= 0 || spec_.output_dim <= 0) {
    throw std::runtime_error("mlp '" + name_ + "': input and output dims must be positive");
  }
  for (int h : spec_.hidden) {
    if (h <= 0) throw std::runtime_error("mlp '" + name_ + "': hidden widths must be positive");
  }
  std::vector<int> dims;
  dims.push_back(spec_.input_dim);
  dims.insert(dims.end(), spec_.hidden.begin(), spec_.hidden.end());
  dims.push_back(spec_.output_dim);
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    int fan_in = dims[l], fan_out = dims[l + 1];
    double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    Tensor w = Tensor::zeros({fan_in, fan_out});
    for (auto& x : w.v) x = rng.uniform(-bound, bound);
    Tensor b = Tensor::zeros({1, fan_out});
    for (auto& x : b.v) x = rng.uniform(-bound, bound);
    std::string ln = name_ + ".layer" + std::to_string(l);
    weights_.emplace_back(ln + ".w", std::move(w));
    biases_.emplace_back(ln + ".b", std::move(b));
  }
}

void Mlp::check_input(const Tensor& x) const {
  if (x.cols() != spec_.input_dim) {
    throw std::runtime_error("mlp '" + name_ + "' layer0 expects " +
                             std::to_string(spec_.input_dim) + " input columns, got " +
                             shape_str(x.shape));
  }
}

Var Mlp::forward(Tape& t, Var x) {
  check_input(t.value(x));
  Var h = x;
  for (size_t l = 0; l < weights_.size(); ++l) {
    h = t.add_rowvec(t.matmul(h, t.leaf(weights_[l])), t.leaf(biases_[l]));
    if (l + 1 < weights_.size()) h = t.relu(h);
  }
  return h;
}

Tensor Mlp::forward_nograd(const Tensor& x) const {
  check_input(x);
  Tensor h = x;
  for (size_t l = 0; l < weights_.size(); ++l) {
    Tensor z = linalg::matmul(h, weights_[l].value);
    const Tensor& b = biases_[l].value;
    for (int r = 0; r < z.rows(); ++r) {
      for (int c = 0; c < z.cols(); ++c) z.at(r, c) += b.at(0, c);
    }
    if (l + 1 < weights_.size()) {
      for (auto& v : z.v) v = v > 0.0 ? v : 0.0;
    }
    h = std::move(z);
  }
  return h;
}

std::vector<Parameter*> Mlp::params() {
  std::vector<Parameter*> out;
  for (size_t l = 0; l < weights_.size(); ++l) {
    out.push_back(&weights_[l]);
    out.push_back(&biases_[l]);
  }
  return out;
}

std::vector<const Parameter*> Mlp::params() const {
  std::vector<const Parameter*> out;
  for (size_t l = 0; l < weights_.size(); ++l) {
    out.push_back(&weights_[l]);
    out.push_back(&biases_[l]);
  }
  return out;
}

void Mlp::copy_values_from(const Mlp& other) {
  if (weights_.size() != other.weights_.size()) {
    throw std::runtime_error("mlp '" + name_ + "': architecture mismatch in copy_values_from");
  }
  for (size_t l = 0; l < weights_.size(); ++l) {
    if (!weights_[l].value.same_shape(other.weights_[l].value)) {
      throw std::runtime_error("mlp '" + name_ + "': layer " + std::to_string(l) +
                               " shape mismatch in copy_values_from");
    }
    weights_[l].value = other.weights_[l].value;
    biases_[l].value = other.biases_[l].value;
  }
}

}  // namespace metarl
