#pragma once

#include <string>
#include <vector>

#include "metarl/metrics.hpp"

namespace metarl {

/// One run directory's metrics file, as written by training.
struct RunData {
  std::string dir;
  std::string run_line;
  std::vector<MetricsRow> rows;
};

RunData load_run_dir(const std::string& dir);

/// Value of `key` in a space-separated "k=v" line; "" when absent.
std::string run_line_field(const std::string& run_line, const std::string& key);

/// One table row per algorithm variant: the final evaluation point,
/// mean +- population std across the seeds that ran that variant.
struct VariantSummary {
  std::string variant;
  int seeds = 0;
  double final_return_mean = 0.0, final_return_std = 0.0;
  double final_exploration_mean = 0.0, final_exploration_std = 0.0;
};

std::vector<VariantSummary> summarize_runs(const std::vector<RunData>& runs);
std::string format_summary_table(const std::vector<VariantSummary>& table);

/// Per-run figures rebuilt from the run's checkpoint: posterior-collapse
/// curves, the latent scatter over training tasks (200-transition contexts by
/// default), the RBF activation map for rbf variants, and a deterministic
/// rollout trace for socialnav runs. Writes CSV + SVG pairs under out_dir.
void diagnose_run(const std::string& run_dir, const std::string& out_dir,
                  int scatter_context = 200);

/// Aggregates run directories: learning-curve SVG with an across-seed
/// mean +- std band per variant (one seed collapses the band onto the line),
/// per-variant KL/variance curves, a plain-text summary table, and
/// diagnose_run figures for the first run of each variant.
void write_report(const std::vector<std::string>& run_dirs, const std::string& out_dir);

}  // namespace metarl
