#pragma once

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

namespace metarl {

struct StepResult {
  std::vector<double> obs;
  std::vector<double> components;  // raw reward components; a TaskSpec combines them
};

/// Fixed-horizon, fully seeded simulation. Episodes have no terminal flag;
/// the training loop runs a fixed number of steps per episode.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual std::string name() const = 0;
  virtual int obs_dim() const = 0;
  virtual int act_dim() const = 0;
  virtual int num_components() const = 0;
  /// Policy actions live in (-1,1); env units = policy action * scale.
  virtual std::vector<double> action_scale() const = 0;
  virtual std::vector<double> reset(uint64_t seed) = 0;
  virtual StepResult step(const std::vector<double>& action) = 0;
};

/// Clamps with an audible (but bounded) complaint: out-of-range actions are
/// tolerated but usually indicate a scaling bug upstream.
inline double clamp_action(double v, double lo, double hi, const char* what, int& warn_budget) {
  if (v < lo || v > hi) {
    if (warn_budget > 0) {
      --warn_budget;
      std::cerr << "warning: " << what << " " << v << " outside [" << lo << ", " << hi
                << "], clamped\n";
    }
    return v < lo ? lo : hi;
  }
  return v;
}

}  // namespace metarl
