#include "metarl/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "metarl/scalar_ops.hpp"

namespace metarl {

std::string family_name(TaskFamily f) {
  switch (f) {
    case TaskFamily::convex: return "convex";
    case TaskFamily::reward_net: return "reward_net";
    case TaskFamily::racer: return "racer";
  }
  return "?";
}

std::vector<double> sample_convex_weights(int m, Rng& rng) {
  if (m < 1) throw std::runtime_error("sample_convex_weights: m must be >= 1");
  if (m == 1) return {1.0};
  std::vector<double> cuts;
  cuts.reserve(static_cast<size_t>(m + 1));
  cuts.push_back(0.0);
  for (int i = 0; i < m - 1; ++i) cuts.push_back(rng.uniform());
  cuts.push_back(1.0);
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> w(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) w[static_cast<size_t>(i)] = cuts[static_cast<size_t>(i + 1)] - cuts[static_cast<size_t>(i)];
  return w;
}

RewardNetSpec sample_reward_net(int m, Rng& rng) {
  if (m < 1) throw std::runtime_error("sample_reward_net: m must be >= 1");
  RewardNetSpec spec;
  int depth = 1 + static_cast<int>(rng.uniform_int(3));
  for (int l = 0; l < depth; ++l) spec.widths.push_back(4 + static_cast<int>(rng.uniform_int(3)));
  spec.sigmoid = rng.uniform() < 0.75;
  std::vector<int> dims;
  dims.push_back(m);
  dims.insert(dims.end(), spec.widths.begin(), spec.widths.end());
  dims.push_back(1);
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    Tensor w = Tensor::zeros({dims[l], dims[l + 1]});
    for (auto& x : w.v) x = rng.uniform(-1.0, 1.0);
    Tensor b = Tensor::zeros({1, dims[l + 1]});
    for (auto& x : b.v) x = rng.uniform(-1.0, 1.0);
    spec.weights.push_back(std::move(w));
    spec.biases.push_back(std::move(b));
  }
  return spec;
}

double RewardNetSpec::forward(const std::vector<double>& x) const {
  if (weights.empty()) throw std::runtime_error("reward net: unsampled spec");
  if (static_cast<int>(x.size()) != weights[0].rows()) {
    throw std::runtime_error("reward net: expected " + std::to_string(weights[0].rows()) +
                             " components, got " + std::to_string(x.size()));
  }
  std::vector<double> h = x;
  for (size_t l = 0; l < weights.size(); ++l) {
    const Tensor& w = weights[l];
    const Tensor& b = biases[l];
    std::vector<double> out(static_cast<size_t>(w.cols()), 0.0);
    for (int c = 0; c < w.cols(); ++c) {
      double s = b.at(0, c);
      for (int r = 0; r < w.rows(); ++r) s += h[static_cast<size_t>(r)] * w.at(r, c);
      out[static_cast<size_t>(c)] = s;
    }
    bool hidden = l + 1 < weights.size();
    if (hidden && sigmoid) {
      for (auto& v : out) v = stable_sigmoid(v);
    }
    h = std::move(out);
  }
  return h[0];
}

RacerTask sample_racer_task(Rng& rng) {
  RacerTask task;
  for (int k = 0; k < 3; ++k) {
    int n = 1 + static_cast<int>(rng.uniform_int(2));
    for (int j = 0; j < n; ++j) {
      RacerGaussian g;
      g.mu = rng.uniform(0.0, 0.7);
      g.sigma = rng.uniform(0.001, 0.01);
      task.markers[static_cast<size_t>(k)].push_back(g);
    }
  }
  return task;
}

int TaskSpec::num_components() const {
  switch (family) {
    case TaskFamily::convex: return static_cast<int>(weights.size());
    case TaskFamily::reward_net: return net.weights.empty() ? 0 : net.weights[0].rows();
    case TaskFamily::racer: return 3;
  }
  return 0;
}

double TaskSpec::evaluate(const std::vector<double>& components) const {
  switch (family) {
    case TaskFamily::convex: {
      if (components.size() != weights.size()) {
        throw std::runtime_error("task " + std::to_string(seed) + ": expected " +
                                 std::to_string(weights.size()) + " components, got " +
                                 std::to_string(components.size()));
      }
      double s = 0.0;
      for (size_t i = 0; i < weights.size(); ++i) s += weights[i] * components[i];
      return s;
    }
    case TaskFamily::reward_net: return net.forward(components);
    case TaskFamily::racer: {
      if (components.size() != 3) {
        throw std::runtime_error("racer task: expected 3 components, got " +
                                 std::to_string(components.size()));
      }
      return (components[0] + components[1] + components[2]) / 3.0;
    }
  }
  throw std::runtime_error("task: unknown family");
}

std::string TaskSpec::manifest() const {
  std::ostringstream os;
  os.precision(17);
  os << "family=" << family_name(family) << " seed=" << seed;
  switch (family) {
    case TaskFamily::convex: {
      os << " weights=";
      for (size_t i = 0; i < weights.size(); ++i) os << (i ? "," : "") << weights[i];
      break;
    }
    case TaskFamily::reward_net: {
      os << " depth=" << net.widths.size() << " widths=";
      for (size_t i = 0; i < net.widths.size(); ++i) os << (i ? "," : "") << net.widths[i];
      os << " activation=" << (net.sigmoid ? "sigmoid" : "none");
      break;
    }
    case TaskFamily::racer: {
      for (int k = 0; k < 3; ++k) {
        os << " marker" << k << "=";
        const auto& gs = racer.markers[static_cast<size_t>(k)];
        for (size_t j = 0; j < gs.size(); ++j) {
          os << (j ? ";" : "") << "N(" << gs[j].mu << "," << gs[j].sigma << ")";
        }
      }
      break;
    }
  }
  return os.str();
}

TaskSpec sample_task(TaskFamily family, int m, uint64_t seed) {
  TaskSpec t;
  t.family = family;
  t.seed = seed;
  Rng rng(mix_seed(0x7461736bULL, seed));  // distinct stream from env seeds
  switch (family) {
    case TaskFamily::convex: t.weights = sample_convex_weights(m, rng); break;
    case TaskFamily::reward_net: t.net = sample_reward_net(m, rng); break;
    case TaskFamily::racer: t.racer = sample_racer_task(rng); break;
  }
  return t;
}

std::vector<uint64_t> train_task_seeds(int n) {
  std::vector<uint64_t> s;
  for (int i = 0; i < n; ++i) s.push_back(static_cast<uint64_t>(i));
  return s;
}

std::vector<uint64_t> test_task_seeds(int n) {
  std::vector<uint64_t> s;
  for (int i = 0; i < n; ++i) s.push_back(1000 + static_cast<uint64_t>(i));
  return s;
}

std::vector<TaskSpec> make_task_set(TaskFamily family, int m,
                                    const std::vector<uint64_t>& seeds) {
  std::set<uint64_t> seen;
  std::vector<TaskSpec> tasks;
  for (uint64_t s : seeds) {
    if (!seen.insert(s).second) {
      throw std::runtime_error("task seed collision: " + std::to_string(s));
    }
    tasks.push_back(sample_task(family, m, s));
  }
  return tasks;
}

}  // namespace metarl
