#pragma once

#include <string>
#include <vector>

namespace metarl {

/// One evaluation point of a training run.
struct MetricsRow {
  int iteration = 0;
  long env_steps = 0;
  double mean_test_return = 0.0;
  double std_test_return = 0.0;
  double mean_exploration_return = 0.0;
  double critic_loss = 0.0;
  double actor_loss = 0.0;
  double encoder_loss = 0.0;
  double kl_total = 0.0;
  std::vector<double> per_dim_kl;
  std::vector<double> per_dim_var;
};

/// Rewrites the whole file: "# metarl metrics v1", a run-description comment,
/// a column header, then one row per evaluation. Full rewrite keeps resumed
/// runs byte-identical to uninterrupted ones.
void write_metrics_csv(const std::string& path, const std::vector<MetricsRow>& rows,
                       const std::string& run_line);

/// Returns the rows; fills run_line (without the leading "# ") when given.
std::vector<MetricsRow> read_metrics_csv(const std::string& path, std::string* run_line = nullptr);

}  // namespace metarl
