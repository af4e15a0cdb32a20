#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "metarl/rng.hpp"
#include "metarl/tensor.hpp"

namespace metarl {

enum class TaskFamily { convex, reward_net, racer };

std::string family_name(TaskFamily f);

/// Random reward-combining MLP: hidden widths each in {4,5,6}, depth 1-3,
/// sigmoid hidden activation with probability 0.75 (else purely linear),
/// weights and biases U(-1, 1).
struct RewardNetSpec {
  std::vector<int> widths;
  bool sigmoid = false;
  std::vector<Tensor> weights;  // [in,w1], [w1,w2], ..., [wL,1]
  std::vector<Tensor> biases;   // [1,w1], ..., [1,1]

  double forward(const std::vector<double>& x) const;
};

struct RacerGaussian {
  double mu = 0.0;
  double sigma = 1.0;
};

/// Per-marker mixture of 1-2 Gaussian bumps over distance-to-marker.
struct RacerTask {
  std::array<std::vector<RacerGaussian>, 3> markers;
};

/// Uniform sample from the (m-1)-simplex via sorted-uniform gaps.
std::vector<double> sample_convex_weights(int m, Rng& rng);
RewardNetSpec sample_reward_net(int m, Rng& rng);
RacerTask sample_racer_task(Rng& rng);

/// A sampled reward function: maps environment reward components to a scalar.
struct TaskSpec {
  TaskFamily family = TaskFamily::convex;
  uint64_t seed = 0;
  std::vector<double> weights;  // convex family
  RewardNetSpec net;            // reward_net family
  RacerTask racer;              // racer family

  int num_components() const;
  double evaluate(const std::vector<double>& components) const;
  std::string manifest() const;
};

/// Deterministic task from (family, component count, seed).
TaskSpec sample_task(TaskFamily family, int m, uint64_t seed);

/// Task identity is the 64-bit seed; training and test ranges are disjoint by
/// construction and verified.
std::vector<uint64_t> train_task_seeds(int n);  // 0 .. n-1
std::vector<uint64_t> test_task_seeds(int n);   // 1000 .. 1000+n-1

std::vector<TaskSpec> make_task_set(TaskFamily family, int m,
                                    const std::vector<uint64_t>& seeds);

}  // namespace metarl
