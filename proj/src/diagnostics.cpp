#include "metarl/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "metarl/checkpoint.hpp"

namespace metarl {
namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

CollapseRecord record_collapse_metrics(const TaskEncoder& encoder,
                                       const std::vector<const TaskBuffer*>& probe_buffers,
                                       int context_size, int iteration, long env_steps,
                                       Rng& rng) {
  if (probe_buffers.empty())
    throw std::runtime_error("collapse metrics: probe set is empty");
  const int d = encoder.latent_dim();
  CollapseRecord rec;
  rec.iteration = iteration;
  rec.env_steps = env_steps;
  rec.per_dim_kl.assign(static_cast<size_t>(d), 0.0);
  rec.per_dim_var.assign(static_cast<size_t>(d), 0.0);
  for (const TaskBuffer* buf : probe_buffers) {
    PosteriorGaussian post = encoder.posterior(buf->sample(static_cast<size_t>(context_size), rng));
    auto [per_dim, total] = kl_to_prior(post);
    (void)total;
    for (int i = 0; i < d; ++i) {
      rec.per_dim_kl[static_cast<size_t>(i)] += per_dim[static_cast<size_t>(i)];
      rec.per_dim_var[static_cast<size_t>(i)] += post.var[static_cast<size_t>(i)];
    }
  }
  const double n = static_cast<double>(probe_buffers.size());
  for (double& x : rec.per_dim_kl) x /= n;
  for (double& x : rec.per_dim_var) x /= n;
  return rec;
}

std::vector<int> detect_collapsed_dims(const std::vector<CollapseRecord>& history, double eps,
                                       int window) {
  if (window <= 0) throw std::runtime_error("detect_collapsed_dims: window must be positive");
  std::vector<int> out;
  if (history.size() < static_cast<size_t>(window)) return out;
  const size_t d = history.back().per_dim_kl.size();
  for (size_t i = 0; i < d; ++i) {
    bool collapsed = true;
    for (size_t j = history.size() - static_cast<size_t>(window); j < history.size(); ++j) {
      if (history[j].per_dim_kl.size() != d)
        throw std::runtime_error("detect_collapsed_dims: inconsistent latent dimension");
      if (!(history[j].per_dim_kl[i] < eps)) {
        collapsed = false;
        break;
      }
    }
    if (collapsed) out.push_back(static_cast<int>(i));
  }
  return out;
}

LatentScatter export_latent_scatter(const TaskEncoder& encoder,
                                    const std::vector<TaskSpec>& tasks,
                                    const std::vector<const TaskBuffer*>& buffers,
                                    int context_size, Rng& rng) {
  if (tasks.size() != buffers.size())
    throw std::runtime_error("latent scatter: task/buffer count mismatch");
  const size_t d = static_cast<size_t>(encoder.latent_dim());
  LatentScatter out;
  out.rows.reserve(tasks.size());
  for (size_t i = 0; i < tasks.size(); ++i) {
    PosteriorGaussian post =
        encoder.posterior(buffers[i]->sample(static_cast<size_t>(context_size), rng));
    LatentScatterRow row;
    row.task_seed = tasks[i].seed;
    if (tasks[i].family == TaskFamily::convex) {
      // first maximum wins, so ties resolve to the lowest index
      row.label = static_cast<int>(std::max_element(tasks[i].weights.begin(),
                                                    tasks[i].weights.end()) -
                                   tasks[i].weights.begin());
    }
    row.z = post.mean;
    out.rows.push_back(std::move(row));
  }
  out.mean.assign(d, 0.0);
  out.stddev.assign(d, 0.0);
  if (!out.rows.empty()) {
    const double n = static_cast<double>(out.rows.size());
    for (const auto& row : out.rows)
      for (size_t k = 0; k < d; ++k) out.mean[k] += row.z[k];
    for (double& m : out.mean) m /= n;
    for (const auto& row : out.rows)
      for (size_t k = 0; k < d; ++k) {
        double dx = row.z[k] - out.mean[k];
        out.stddev[k] += dx * dx;
      }
    for (double& s : out.stddev) s = std::sqrt(s / n);
  }
  for (size_t k = 0; k < d; ++k) {
    char line[96];
    std::snprintf(line, sizeof(line), "z%zu: %.3f ± %.3f", k + 1, out.mean[k],
                  out.stddev[k]);
    out.summary += line;
    if (k + 1 < d) out.summary += "\n";
  }
  return out;
}

RbfActivationMap export_rbf_activation_map(const RbfLayer& rbf, int dim,
                                           const std::vector<double>& grid) {
  if (dim < 0 || dim >= rbf.latent_dim())
    throw std::runtime_error("rbf activation map: dimension out of range");
  RbfActivationMap out;
  out.grid = grid;
  out.activations.reserve(grid.size());
  const int k = rbf.num_centers();
  for (double g : grid) {
    Tensor z = Tensor::zeros({1, rbf.latent_dim()});
    z.at(0, dim) = g;
    Tensor act = rbf.forward_nograd(z);
    std::vector<double> row(static_cast<size_t>(k));
    for (int j = 0; j < k; ++j) row[static_cast<size_t>(j)] = act.at(0, dim * k + j);
    out.activations.push_back(std::move(row));
  }
  return out;
}

uint64_t params_fingerprint(const std::vector<Parameter*>& params) {
  uint64_t h = 0xcbf29ce484222325ULL;
  auto mix_bytes = [&h](const void* data, size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 0x100000001b3ULL;
    }
  };
  for (const Parameter* p : params) {
    mix_bytes(p->name.data(), p->name.size());
    mix_bytes(p->value.v.data(), p->value.v.size() * sizeof(double));
    mix_bytes(p->grad.v.data(), p->grad.v.size() * sizeof(double));
  }
  return h;
}

void write_latent_scatter_csv(const std::string& path, const LatentScatter& scatter) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("latent scatter: cannot open " + path + " for writing");
  out << "# metarl latent scatter v1\n";
  const size_t d = scatter.mean.size();
  out << "task_seed,label";
  for (size_t k = 1; k <= d; ++k) out << ",z" << k;
  out << "\n";
  for (const auto& row : scatter.rows) {
    out << row.task_seed << "," << row.label;
    for (double x : row.z) out << "," << fmt(x);
    out << "\n";
  }
  std::string summary = scatter.summary;
  for (size_t pos = 0; (pos = summary.find('\n', pos)) != std::string::npos; pos += 3)
    summary.replace(pos, 1, "\n# ");
  if (!summary.empty()) out << "# " << summary << "\n";
  if (!out) throw std::runtime_error("latent scatter: write to " + path + " failed");
}

void write_collapse_csv(const std::string& path, const std::vector<CollapseRecord>& history) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("collapse csv: cannot open " + path + " for writing");
  out << "# metarl collapse v1\n";
  const size_t d = history.empty() ? 0 : history.front().per_dim_kl.size();
  out << "iteration,env_steps";
  for (size_t k = 1; k <= d; ++k) out << ",kl_z" << k;
  for (size_t k = 1; k <= d; ++k) out << ",var_z" << k;
  out << "\n";
  for (const auto& rec : history) {
    if (rec.per_dim_kl.size() != d || rec.per_dim_var.size() != d)
      throw std::runtime_error("collapse csv: inconsistent latent dimension");
    out << rec.iteration << "," << rec.env_steps;
    for (double x : rec.per_dim_kl) out << "," << fmt(x);
    for (double x : rec.per_dim_var) out << "," << fmt(x);
    out << "\n";
  }
  if (!out) throw std::runtime_error("collapse csv: write to " + path + " failed");
}

}  // namespace metarl
