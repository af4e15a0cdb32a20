#include "metarl/env/racer.hpp"

#include <cmath>
#include <stdexcept>

namespace metarl {

double wrap_unit(double x) {
  double w = x - std::floor(x);
  return w < 1.0 ? w : 0.0;  // floor rounding can land exactly on 1.0
}

double torus_dist(double ax, double ay, double bx, double by) {
  double dx = std::fabs(ax - bx);
  if (dx > 0.5) dx = 1.0 - dx;
  double dy = std::fabs(ay - by);
  if (dy > 0.5) dy = 1.0 - dy;
  return std::sqrt(dx * dx + dy * dy);
}

double racer_reward_component(double d, const std::vector<RacerGaussian>& gaussians) {
  if (gaussians.empty()) throw std::runtime_error("racer reward: marker has no Gaussians");
  double best = 0.0;
  for (const auto& g : gaussians) {
    double diff = d - g.mu;
    best = std::max(best, std::exp(-diff * diff / g.sigma));
  }
  return best;
}

double racer_total_reward(const std::vector<double>& components) {
  if (components.size() != 3) {
    throw std::runtime_error("racer total reward: expected 3 components");
  }
  return (components[0] + components[1] + components[2]) / 3.0;
}

RacerEnv::RacerEnv(RacerConfig cfg) : cfg_(cfg) {}

void RacerEnv::set_task(const RacerTask& task) {
  task_ = task;
  has_task_ = true;
}

std::vector<double> RacerEnv::reset(uint64_t seed) {
  Rng rng(mix_seed(0x72616365ULL, seed));
  x_ = rng.uniform();
  y_ = rng.uniform();
  th_ = rng.uniform(0.0, 2.0 * M_PI);
  return encode();
}

StepResult RacerEnv::step(const std::vector<double>& action) {
  if (!has_task_) throw std::runtime_error("racer: no task set (call set_task before stepping)");
  if (action.size() != 1) throw std::runtime_error("racer: action must have 1 dimension");
  double a = clamp_action(action[0], -1.0, 1.0, "racer steering", warn_budget_);
  th_ += a * cfg_.omega_max;
  th_ = th_ - 2.0 * M_PI * std::floor(th_ / (2.0 * M_PI));
  x_ = wrap_unit(x_ + cfg_.speed * std::cos(th_));
  y_ = wrap_unit(y_ + cfg_.speed * std::sin(th_));
  return StepResult{encode(), components()};
}

std::vector<double> RacerEnv::components() const {
  std::vector<double> comps(3);
  for (int k = 0; k < 3; ++k) {
    double d = torus_dist(x_, y_, cfg_.markers[static_cast<size_t>(k)][0],
                          cfg_.markers[static_cast<size_t>(k)][1]);
    comps[static_cast<size_t>(k)] = racer_reward_component(d, task_.markers[static_cast<size_t>(k)]);
  }
  return comps;
}

std::vector<double> RacerEnv::encode() const {
  std::vector<double> s;
  s.reserve(120);
  const double pos_width = 0.05;  // half the 0.1 grid spacing
  for (int gx = 0; gx < 10; ++gx) {
    for (int gy = 0; gy < 10; ++gy) {
      double d = torus_dist(x_, y_, gx / 10.0, gy / 10.0);
      s.push_back(std::exp(-d * d / (2.0 * pos_width * pos_width)));
    }
  }
  const double ang_spacing = 2.0 * M_PI / 20.0;
  const double ang_width = 0.5 * ang_spacing;
  for (int k = 0; k < 20; ++k) {
    double dth = std::fabs(th_ - ang_spacing * k);
    if (dth > M_PI) dth = 2.0 * M_PI - dth;
    s.push_back(std::exp(-dth * dth / (2.0 * ang_width * ang_width)));
  }
  return s;
}

}  // namespace metarl
