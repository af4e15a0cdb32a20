#include "metarl/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "metarl/diagnostics.hpp"
#include "metarl/env/socialnav.hpp"
#include "metarl/pearl.hpp"
#include "metarl/svgplot.hpp"

namespace fs = std::filesystem;

namespace metarl {
namespace {

constexpr uint64_t kScatterSalt = 0x73636174ULL;  // "scat"
constexpr uint64_t kTrajSalt = 0x74726a31ULL;

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double pop_std_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const double m = mean_of(v);
  double s2 = 0.0;
  for (double x : v) s2 += (x - m) * (x - m);
  return std::sqrt(s2 / static_cast<double>(v.size()));
}

// Runs grouped by variant, first-appearance order, empty runs dropped.
std::vector<std::pair<std::string, std::vector<const RunData*>>> group_by_variant(
    const std::vector<RunData>& runs) {
  std::vector<std::pair<std::string, std::vector<const RunData*>>> groups;
  for (const auto& r : runs) {
    if (r.rows.empty()) {
      std::fprintf(stderr, "report: %s has no evaluation rows, skipping\n", r.dir.c_str());
      continue;
    }
    const std::string v = run_line_field(r.run_line, "variant");
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const auto& g) { return g.first == v; });
    if (it == groups.end()) {
      groups.push_back({v, {&r}});
    } else {
      it->second.push_back(&r);
    }
  }
  return groups;
}

void write_learning_curves(const std::string& path,
                           const std::vector<std::pair<std::string, std::vector<const RunData*>>>&
                               groups) {
  SvgPlot plot("Meta-test adapted return", "environment steps", "adapted return");
  size_t color = 0;
  for (const auto& [variant, runs] : groups) {
    size_t len = runs.front()->rows.size();
    for (const auto* r : runs) len = std::min(len, r->rows.size());
    SvgSeries line{variant, svg_color(color), false, {}, {}};
    SvgBand band{svg_color(color), 0.25, {}, {}, {}};
    for (size_t i = 0; i < len; ++i) {
      std::vector<double> vals;
      vals.reserve(runs.size());
      for (const auto* r : runs) vals.push_back(r->rows[i].mean_test_return);
      const double m = mean_of(vals), s = pop_std_of(vals);
      const double x = static_cast<double>(runs.front()->rows[i].env_steps);
      line.x.push_back(x);
      line.y.push_back(m);
      band.x.push_back(x);
      band.lo.push_back(m - s);
      band.hi.push_back(m + s);
    }
    plot.add_band(std::move(band));
    plot.add_series(std::move(line));
    ++color;
  }
  plot.write(path);
}

void write_kl_variance_svg(const std::string& path, const std::string& variant,
                           const std::vector<const RunData*>& runs) {
  const size_t dims = runs.front()->rows.front().per_dim_kl.size();
  size_t len = runs.front()->rows.size();
  for (const auto* r : runs) len = std::min(len, r->rows.size());

  SvgPlot plot("Posterior per-dimension KL (solid) and variance (dashed), " + variant,
               "environment steps", "value");
  for (size_t d = 0; d < dims; ++d) {
    SvgSeries kl{"KL z" + std::to_string(d + 1), svg_color(d), false, {}, {}};
    SvgSeries var{"var z" + std::to_string(d + 1), svg_color(d), true, {}, {}};
    for (size_t i = 0; i < len; ++i) {
      std::vector<double> kls, vars;
      for (const auto* r : runs) {
        kls.push_back(r->rows[i].per_dim_kl[d]);
        vars.push_back(r->rows[i].per_dim_var[d]);
      }
      const double x = static_cast<double>(runs.front()->rows[i].env_steps);
      kl.x.push_back(x);
      kl.y.push_back(mean_of(kls));
      var.x.push_back(x);
      var.y.push_back(mean_of(vars));
    }
    plot.add_series(std::move(kl));
    plot.add_series(std::move(var));
  }
  plot.write(path);
}

void write_scatter_svg(const std::string& path, const LatentScatter& sc, int components) {
  const size_t dims = sc.mean.size();
  SvgPlot plot("Task latents (posterior means)",
               dims >= 2 ? "z1" : "task index", dims >= 2 ? "z2" : "z1");
  // One scatter series per dominant-component label so colors carry meaning;
  // unlabeled families fall into a single series.
  std::map<int, SvgScatterSeries> by_label;
  for (size_t i = 0; i < sc.rows.size(); ++i) {
    const auto& row = sc.rows[i];
    auto& s = by_label[row.label];
    if (s.x.empty()) {
      s.color = row.label >= 0 ? svg_color(static_cast<size_t>(row.label)) : "#555555";
      s.label = row.label >= 0 ? "component " + std::to_string(row.label + 1) : "tasks";
      s.radius = 3.0;
    }
    if (dims >= 2) {
      s.x.push_back(row.z[0]);
      s.y.push_back(row.z[1]);
    } else {
      s.x.push_back(static_cast<double>(i));
      s.y.push_back(row.z[0]);
    }
  }
  (void)components;
  for (auto& [label, s] : by_label) plot.add_scatter(std::move(s));
  plot.write(path);
}

void write_rbf_csv(const std::string& path, const RbfActivationMap& map) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("report: cannot open " + path);
  f << "# metarl rbf activation v1\n";
  f << "z";
  for (size_t j = 0; j < map.activations.front().size(); ++j) f << ",phi" << j + 1;
  f << "\n";
  char buf[64];
  for (size_t i = 0; i < map.grid.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", map.grid[i]);
    f << buf;
    for (double a : map.activations[i]) {
      std::snprintf(buf, sizeof(buf), "%.17g", a);
      f << "," << buf;
    }
    f << "\n";
  }
}

void write_rbf_svg(const std::string& path, const RbfActivationMap& map) {
  SvgPlot plot("RBF activations over latent dimension 1", "z", "activation");
  for (size_t j = 0; j < map.activations.front().size(); ++j) {
    SvgSeries s{"", svg_color(j), false, {}, {}};
    for (size_t i = 0; i < map.grid.size(); ++i) {
      s.x.push_back(map.grid[i]);
      s.y.push_back(map.activations[i][j]);
    }
    plot.add_series(std::move(s));
  }
  plot.write(path);
}

struct TrajectoryTrace {
  double goal_x = 0.0, goal_y = 0.0;
  std::vector<double> robot_x, robot_y;
  std::vector<std::vector<double>> human_x, human_y;  // [human][step]
};

TrajectoryTrace roll_socialnav(PearlTrainer& tr, const TaskSpec& task) {
  AdaptationResult ad = tr.meta_test(task, mix_seed(tr.cfg().master_seed, kTrajSalt, task.seed));
  auto env = make_env(tr.cfg().env_name);
  auto* nav = dynamic_cast<SocialNavEnv*>(env.get());
  if (nav == nullptr) throw std::logic_error("trajectory trace needs a socialnav run");

  TrajectoryTrace trace;
  std::vector<double> obs = env->reset(task.seed);
  trace.goal_x = nav->goal_x();
  trace.goal_y = nav->goal_y();
  trace.human_x.resize(nav->humans().size());
  trace.human_y.resize(nav->humans().size());
  const std::vector<double> scale = env->action_scale();
  auto record = [&]() {
    trace.robot_x.push_back(nav->robot_x());
    trace.robot_y.push_back(nav->robot_y());
    for (size_t h = 0; h < nav->humans().size(); ++h) {
      trace.human_x[h].push_back(nav->humans()[h].x);
      trace.human_y[h].push_back(nav->humans()[h].y);
    }
  };
  record();
  for (int step = 0; step < tr.cfg().episode_len; ++step) {
    std::vector<double> a = tr.agent().nets.act_mean(obs, ad.z_hat);
    for (size_t i = 0; i < a.size(); ++i) a[i] *= scale[i];
    obs = env->step(a).obs;
    record();
  }
  return trace;
}

void write_trajectory_csv(const std::string& path, const TrajectoryTrace& t) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("report: cannot open " + path);
  char buf[64];
  auto fmt = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  f << "# metarl trajectory v1\n";
  f << "# goal " << fmt(t.goal_x) << " " << fmt(t.goal_y) << "\n";
  f << "step,robot_x,robot_y";
  for (size_t h = 0; h < t.human_x.size(); ++h) f << ",h" << h + 1 << "_x,h" << h + 1 << "_y";
  f << "\n";
  for (size_t i = 0; i < t.robot_x.size(); ++i) {
    f << i << "," << fmt(t.robot_x[i]) << "," << fmt(t.robot_y[i]);
    for (size_t h = 0; h < t.human_x.size(); ++h)
      f << "," << fmt(t.human_x[h][i]) << "," << fmt(t.human_y[h][i]);
    f << "\n";
  }
}

void write_trajectory_svg(const std::string& path, const TrajectoryTrace& t) {
  // Room-proportioned canvas so paths keep their aspect ratio.
  SvgPlot plot("Adapted rollout", "x [m]", "y [m]", 760, 560);
  plot.fix_bounds(-0.5, SocialNavEnv::kRoomW + 0.5, -0.5, SocialNavEnv::kRoomH + 0.5);
  plot.add_series({"robot", svg_color(0), false, t.robot_x, t.robot_y});
  for (size_t h = 0; h < t.human_x.size(); ++h) {
    plot.add_series({h == 0 ? "humans" : "", svg_color(1), true, t.human_x[h], t.human_y[h]});
  }
  plot.add_scatter({"goal", svg_color(2), 6.0, {t.goal_x}, {t.goal_y}});
  plot.add_scatter({"start", svg_color(3), 5.0,
                    {t.robot_x.empty() ? 0.0 : t.robot_x.front()},
                    {t.robot_y.empty() ? 0.0 : t.robot_y.front()}});
  plot.write(path);
}

}  // namespace

RunData load_run_dir(const std::string& dir) {
  RunData rd;
  rd.dir = dir;
  rd.rows = read_metrics_csv(dir + "/metrics.csv", &rd.run_line);
  return rd;
}

std::string run_line_field(const std::string& run_line, const std::string& key) {
  std::istringstream is(run_line);
  std::string tok;
  while (is >> tok) {
    if (tok.size() > key.size() + 1 && tok.compare(0, key.size(), key) == 0 &&
        tok[key.size()] == '=') {
      return tok.substr(key.size() + 1);
    }
  }
  return "";
}

std::vector<VariantSummary> summarize_runs(const std::vector<RunData>& runs) {
  std::vector<VariantSummary> table;
  for (const auto& [variant, group] : group_by_variant(runs)) {
    VariantSummary row;
    row.variant = variant;
    row.seeds = static_cast<int>(group.size());
    std::vector<double> finals, explores;
    for (const auto* r : group) {
      finals.push_back(r->rows.back().mean_test_return);
      explores.push_back(r->rows.back().mean_exploration_return);
    }
    row.final_return_mean = mean_of(finals);
    row.final_return_std = pop_std_of(finals);
    row.final_exploration_mean = mean_of(explores);
    row.final_exploration_std = pop_std_of(explores);
    table.push_back(std::move(row));
  }
  return table;
}

std::string format_summary_table(const std::vector<VariantSummary>& table) {
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-18s %5s  %24s  %24s\n", "variant", "seeds",
                "adapted return (final)", "exploration (final)");
  os << buf;
  os << std::string(18, '-') << " " << std::string(5, '-') << "  " << std::string(24, '-') << "  "
     << std::string(24, '-') << "\n";
  for (const auto& r : table) {
    char cell1[64], cell2[64];
    std::snprintf(cell1, sizeof(cell1), "%.3f +- %.3f", r.final_return_mean, r.final_return_std);
    std::snprintf(cell2, sizeof(cell2), "%.3f +- %.3f", r.final_exploration_mean,
                  r.final_exploration_std);
    std::snprintf(buf, sizeof(buf), "%-18s %5d  %24s  %24s\n", r.variant.c_str(), r.seeds, cell1,
                  cell2);
    os << buf;
  }
  return os.str();
}

void diagnose_run(const std::string& run_dir, const std::string& out_dir, int scatter_context) {
  RunData rd = load_run_dir(run_dir);
  MetaRunConfig cfg = parse_run_line(rd.run_line);
  cfg.out_dir = run_dir;
  PearlTrainer tr(cfg);
  tr.load_checkpoint(tr.checkpoint_path());
  fs::create_directories(out_dir);

  if (!tr.collapse_history().empty()) {
    write_collapse_csv(out_dir + "/collapse.csv", tr.collapse_history());
    const auto& hist = tr.collapse_history();
    const size_t dims = hist.front().per_dim_kl.size();
    SvgPlot plot("Posterior per-dimension KL (solid) and variance (dashed)",
                 "environment steps", "value");
    for (size_t d = 0; d < dims; ++d) {
      SvgSeries kl{"KL z" + std::to_string(d + 1), svg_color(d), false, {}, {}};
      SvgSeries var{"var z" + std::to_string(d + 1), svg_color(d), true, {}, {}};
      for (const auto& rec : hist) {
        kl.x.push_back(static_cast<double>(rec.env_steps));
        kl.y.push_back(rec.per_dim_kl[d]);
        var.x.push_back(static_cast<double>(rec.env_steps));
        var.y.push_back(rec.per_dim_var[d]);
      }
      plot.add_series(std::move(kl));
      plot.add_series(std::move(var));
    }
    plot.write(out_dir + "/collapse.svg");
  }

  bool have_data = true;
  for (auto& b : tr.buffers()) have_data = have_data && b.size() > 0;
  if (have_data) {
    std::vector<const TaskBuffer*> bufs;
    for (auto& b : tr.buffers()) bufs.push_back(&b);
    Rng rng(mix_seed(tr.cfg().master_seed, kScatterSalt, static_cast<uint64_t>(tr.iteration())));
    LatentScatter sc = export_latent_scatter(tr.agent().nets.task_encoder(), tr.train_tasks(),
                                             bufs, scatter_context, rng);
    write_latent_scatter_csv(out_dir + "/scatter.csv", sc);
    write_scatter_svg(out_dir + "/scatter.svg", sc, env_task_family(cfg.env_name).components);
  } else {
    std::fprintf(stderr, "diagnose: %s has empty buffers, skipping latent scatter\n",
                 run_dir.c_str());
  }

  if (cfg.sac.variant == Variant::rbf_pearl || cfg.sac.variant == Variant::rbf_pearl_fixed) {
    std::vector<double> grid;
    grid.reserve(201);
    for (int i = 0; i <= 200; ++i) grid.push_back(-5.0 + 0.05 * i);
    RbfActivationMap map = export_rbf_activation_map(tr.agent().nets.actor_lift().rbf(), 0, grid);
    write_rbf_csv(out_dir + "/rbf_activation.csv", map);
    write_rbf_svg(out_dir + "/rbf_activation.svg", map);
  }

  if (cfg.env_name == "socialnav" && !tr.test_tasks().empty() && have_data) {
    TrajectoryTrace trace = roll_socialnav(tr, tr.test_tasks().front());
    write_trajectory_csv(out_dir + "/trajectory.csv", trace);
    write_trajectory_svg(out_dir + "/trajectory.svg", trace);
  }
}

void write_report(const std::vector<std::string>& run_dirs, const std::string& out_dir) {
  if (run_dirs.empty()) throw std::invalid_argument("report: no run directories given");
  std::vector<RunData> runs;
  runs.reserve(run_dirs.size());
  for (const auto& d : run_dirs) runs.push_back(load_run_dir(d));
  fs::create_directories(out_dir);

  auto groups = group_by_variant(runs);
  if (groups.empty()) throw std::runtime_error("report: no runs with evaluation rows");

  write_learning_curves(out_dir + "/learning_curve.svg", groups);
  for (const auto& [variant, group] : groups) {
    if (!group.front()->rows.front().per_dim_kl.empty()) {
      write_kl_variance_svg(out_dir + "/kl_variance_" + variant + ".svg", variant, group);
    }
  }

  const std::string table = format_summary_table(summarize_runs(runs));
  std::ofstream tf(out_dir + "/table.txt", std::ios::binary);
  if (!tf) throw std::runtime_error("report: cannot open " + out_dir + "/table.txt");
  tf << table;
  tf.close();
  std::fputs(table.c_str(), stdout);

  for (const auto& [variant, group] : groups) {
    const std::string ckpt = group.front()->dir + "/checkpoint.bin";
    if (fs::exists(ckpt)) {
      diagnose_run(group.front()->dir, out_dir + "/" + variant);
    } else {
      std::fprintf(stderr, "report: %s has no checkpoint, skipping figures\n",
                   group.front()->dir.c_str());
    }
  }
}

}  // namespace metarl
