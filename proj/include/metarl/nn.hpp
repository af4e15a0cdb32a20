#pragma once

#include <string>
#include <vector>

#include "metarl/rng.hpp"
#include "metarl/tape.hpp"
#include "metarl/tensor.hpp"

namespace metarl {

/// Fully-connected net: ReLU hidden layers, linear output.
struct MlpSpec {
  int input_dim = 0;
  std::vector<int> hidden;
  int output_dim = 0;
};

class Mlp {
 public:
  Mlp() = default;

  /// Fan-in uniform init, U(-1/sqrt(fan_in), +1/sqrt(fan_in)) for both weights
  /// and biases. Draw order: per layer, weights row-major then bias.
  Mlp(std::string name, MlpSpec spec, Rng& rng);

  Var forward(Tape& t, Var x);
  Tensor forward_nograd(const Tensor& x) const;

  std::vector<Parameter*> params();
  std::vector<const Parameter*> params() const;
  const MlpSpec& spec() const { return spec_; }
  const std::string& name() const { return name_; }
  int layer_count() const { return static_cast<int>(weights_.size()); }

  /// Copies parameter values from a same-architecture net (target-net sync).
  void copy_values_from(const Mlp& other);

 private:
  std::string name_;
  MlpSpec spec_;
  std::vector<Parameter> weights_;
  std::vector<Parameter> biases_;

  void check_input(const Tensor& x) const;
};

}  // namespace metarl
