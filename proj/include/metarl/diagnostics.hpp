#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "metarl/encoder.hpp"
#include "metarl/rbf.hpp"
#include "metarl/replay.hpp"
#include "metarl/rng.hpp"
#include "metarl/tasks.hpp"

namespace metarl {

/// Per-dimension posterior health at one point in training, averaged over a
/// fixed probe set of training tasks.
struct CollapseRecord {
  int iteration = 0;
  long env_steps = 0;
  std::vector<double> per_dim_kl;
  std::vector<double> per_dim_var;
};

/// Fresh context sample per probe task -> posterior -> per-dim KL to the
/// prior and posterior variance, averaged across the probe set.
CollapseRecord record_collapse_metrics(const TaskEncoder& encoder,
                                       const std::vector<const TaskBuffer*>& probe_buffers,
                                       int context_size, int iteration, long env_steps, Rng& rng);

/// A dimension counts as collapsed when its KL stayed below eps for the last
/// `window` consecutive records. Shrinking eps can only shrink the set.
std::vector<int> detect_collapsed_dims(const std::vector<CollapseRecord>& history,
                                       double eps = 0.01, int window = 10);

struct LatentScatterRow {
  uint64_t task_seed = 0;
  int label = -1;  // argmax convex weight; -1 when the family has no such label
  std::vector<double> z;
};

struct LatentScatter {
  std::vector<LatentScatterRow> rows;
  std::vector<double> mean, stddev;  // over tasks, per dimension
  std::string summary;               // one "z1: m +/- s" line per dimension
};

/// One row per task: product-posterior mean of z from a fresh context sample.
LatentScatter export_latent_scatter(const TaskEncoder& encoder,
                                    const std::vector<TaskSpec>& tasks,
                                    const std::vector<const TaskBuffer*>& buffers,
                                    int context_size, Rng& rng);

struct RbfActivationMap {
  std::vector<double> grid;                      // z values for the chosen dim
  std::vector<std::vector<double>> activations;  // [grid point][center]
};

/// Evaluates the RBF responses of one input dimension over a 1-D grid.
RbfActivationMap export_rbf_activation_map(const RbfLayer& rbf, int dim,
                                           const std::vector<double>& grid);

/// Order-sensitive FNV-1a over every parameter byte; diagnostics must leave
/// this unchanged.
uint64_t params_fingerprint(const std::vector<Parameter*>& params);

void write_latent_scatter_csv(const std::string& path, const LatentScatter& scatter);
void write_collapse_csv(const std::string& path, const std::vector<CollapseRecord>& history);

}  // namespace metarl
