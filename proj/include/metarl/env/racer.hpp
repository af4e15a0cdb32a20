#pragma once

#include <array>

#include "metarl/env.hpp"
#include "metarl/rng.hpp"
#include "metarl/tasks.hpp"

namespace metarl {

/// Wraps a coordinate onto the unit torus [0, 1).
double wrap_unit(double x);
/// Euclidean distance on the unit torus (per-axis wrapped differences).
double torus_dist(double ax, double ay, double bx, double by);
/// max_j exp(-(d - mu_j)^2 / sigma_j) over the marker's Gaussians.
double racer_reward_component(double d, const std::vector<RacerGaussian>& gaussians);
/// Mean of the three per-marker components.
double racer_total_reward(const std::vector<double>& components);

struct RacerConfig {
  double speed = 0.02;
  double omega_max = 0.3;
  std::array<std::array<double, 2>, 3> markers = {{{0.2, 0.2}, {0.8, 0.3}, {0.5, 0.8}}};
};

/// Constant-speed car on the unit torus; one action dimension steers.
/// Observation (120 floats): 100 position RBFs over a 10x10 torus grid
/// (index gx*10 + gy, centers at (gx/10, gy/10), width = half the grid
/// spacing), then 20 orientation RBFs over evenly spaced angles (width =
/// half the angular spacing); all activations exp(-d^2 / (2 width^2)).
class RacerEnv : public Environment {
 public:
  explicit RacerEnv(RacerConfig cfg = {});

  void set_task(const RacerTask& task);

  std::string name() const override { return "racer"; }
  int obs_dim() const override { return 120; }
  int act_dim() const override { return 1; }
  int num_components() const override { return 3; }
  std::vector<double> action_scale() const override { return {1.0}; }
  std::vector<double> reset(uint64_t seed) override;
  StepResult step(const std::vector<double>& action) override;

  double x() const { return x_; }
  double y() const { return y_; }
  double orientation() const { return th_; }
  const RacerConfig& config() const { return cfg_; }
  std::vector<double> encode() const;
  std::vector<double> components() const;

 private:
  RacerConfig cfg_;
  RacerTask task_;
  bool has_task_ = false;
  double x_ = 0.0, y_ = 0.0, th_ = 0.0;
  int warn_budget_ = 5;
};

}  // namespace metarl
