#pragma once

#include <functional>
#include <string>
#include <vector>

#include "metarl/tensor.hpp"

namespace metarl {

/// A named, persistent weight buffer. Gradients accumulate into `grad` when a
/// tape backward pass reaches a leaf bound to this parameter.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;
  bool trainable = true;

  Parameter() = default;
  Parameter(std::string n, Tensor v, bool train = true)
      : name(std::move(n)), value(std::move(v)), grad(Tensor::zeros(value.shape)), trainable(train) {}

  void zero_grad() { grad.fill(0.0); }
};

class Tape;

/// Handle to a node on a tape; valid only while that tape is alive.
struct Var {
  int id = -1;
};

/// Reverse-mode autodiff tape over dense double tensors. Nodes are appended in
/// topological order, so backward() is a single reverse sweep from the loss.
/// One tape per loss computation; parameters persist outside the tape.
class Tape {
 public:
  Tape() { nodes_.reserve(256); }
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // --- leaves ---
  Var leaf(Parameter& p);
  Var constant(Tensor t);
  Var constant_row(std::vector<double> data);
  Var constant_scalar(double c);

  // --- elementwise (same shape unless noted) ---
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var div(Var a, Var b);
  Var neg(Var a);
  Var add_scalar(Var a, double c);
  Var mul_scalar(Var a, double c);
  Var relu(Var a);
  Var tanh(Var a);
  /// tanh with the output nudged strictly inside (-1, 1); used by the policy head.
  Var tanh_squash(Var a);
  Var sigmoid(Var a);
  Var exp(Var a);
  Var log(Var a);
  Var sqrt(Var a);
  Var square(Var a);
  Var softplus(Var a);
  Var reciprocal(Var a);
  Var clamp(Var a, double lo, double hi);
  Var minimum(Var a, Var b);

  // --- shape / reduction ---
  Var matmul(Var a, Var w);              // [r,k] x [k,c] -> [r,c]
  Var add_rowvec(Var a, Var b);          // [r,c] + [1,c] broadcast over rows
  Var concat_cols(Var a, Var b);         // [r,c1] ++ [r,c2] -> [r,c1+c2]
  Var slice_cols(Var a, int start, int len);
  Var repeat_rows(Var a, int times);     // [1,c] -> [times,c]
  Var sum_all(Var a);                    // -> [1,1]
  Var mean_all(Var a);                   // -> [1,1]
  Var sum_cols(Var a);                   // [r,c] -> [r,1]
  Var sum_rows(Var a);                   // [r,c] -> [1,c]
  Var detach(Var a);

  /// Per-coordinate radial-basis expansion:
  /// out[b, i*k+j] = exp(-delta[i,j] * (z[b,i] - c[i,j])^2), delta = exp(log_scales).
  /// z: [B,d], centers/log_scales: [d,k] -> [B, d*k].
  Var rbf_expand(Var z, Var centers, Var log_scales);

  // --- access ---
  const Tensor& value(Var v) const;
  const Tensor& grad(Var v) const;       // valid after backward()
  double scalar(Var v) const;
  bool requires_grad(Var v) const;
  int size() const { return static_cast<int>(nodes_.size()); }

  /// Reverse sweep from a scalar loss; accumulates into bound Parameter grads.
  void backward(Var loss);

 private:
  struct Node {
    Tensor val;
    Tensor grad;
    Parameter* bound = nullptr;
    bool needs_grad = false;
    std::function<void(Tape&, int)> back;  // backward for node `id`
  };

  std::vector<Node> nodes_;
  bool backward_done_ = false;

  Var push(Tensor val, bool needs_grad, std::function<void(Tape&, int)> back);
  Node& node(Var v);
  const Node& node(Var v) const;
  void check(Var v) const;

  Var unary(Var a, const char* opname, const std::function<double(double)>& f,
            const std::function<double(double, double)>& dfdx_from_in_out);
  Var binary_same_shape(Var a, Var b, const char* opname,
                        const std::function<double(double, double)>& f,
                        const std::function<void(double, double, double, double&, double&)>& df);

  friend struct TapeTestAccess;
};

}  // namespace metarl
