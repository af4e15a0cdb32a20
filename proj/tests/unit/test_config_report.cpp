#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "metarl/config.hpp"
#include "metarl/pearl.hpp"
#include "metarl/report.hpp"
#include "metarl/svgplot.hpp"

using namespace metarl;
namespace fs = std::filesystem;

namespace {

std::string tmp_dir(const std::string& leaf) {
  fs::path p = fs::temp_directory_path() / "metarl_cfg_test" / leaf;
  fs::remove_all(p);
  fs::create_directories(p);
  return p.string();
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

const char* kFullConfig = R"cfg(
# exercises every key
[run]
env = socialnav
variant = rbf_pearl_fixed
seed = 42
out = runs/everything
budget = 12345
eval_interval = 3
threads = 4

[tasks]
train_tasks = 11
test_tasks = 6

[meta]
traj_per_task = 3        # inline comment
episode_len = 50
context_size = 32
updates_per_iter = 17
task_minibatch = 5
adaptation_steps = 90
buffer_capacity = 7777
sac200_grad_steps_per_obs = 4

[sac]
latent_dim = 2
rbf_centers = 7
actor_hidden = 64,32
critic_hidden = 48
encoder_hidden = none
gamma = 0.97
tau = 0.01
alpha = 0.15
beta_kl = 0.25
lr = 1.5e-4
batch_size = 19
twin_critics = false
)cfg";

MetaRunConfig tiny_run_cfg(const std::string& out, uint64_t seed) {
  MetaRunConfig c;
  c.env_name = "const_stub";
  c.n_train_tasks = 3;
  c.n_test_tasks = 2;
  c.adaptation_steps = 7;
  c.episode_len = 5;
  c.traj_per_task = 2;
  c.context_size = 4;
  c.updates_per_iter = 2;
  c.task_minibatch = 2;
  c.buffer_capacity = 100;
  c.total_env_step_budget = 60;
  c.master_seed = seed;
  c.out_dir = out;
  c.sac.latent_dim = 1;
  c.sac.actor_hidden = {8};
  c.sac.critic_hidden = {8};
  c.sac.encoder_hidden = {8};
  c.sac.batch_size = 8;
  return c;
}

}  // namespace

TEST_CASE("config: full file maps onto every field") {
  MetaRunConfig c = parse_run_config(kFullConfig, "full.cfg");
  CHECK(c.env_name == "socialnav");
  CHECK(c.sac.variant == Variant::rbf_pearl_fixed);
  CHECK(c.master_seed == 42);
  CHECK(c.out_dir == "runs/everything");
  CHECK(c.total_env_step_budget == 12345);
  CHECK(c.eval_interval == 3);
  CHECK(c.collect_threads == 4);
  CHECK(c.n_train_tasks == 11);
  CHECK(c.n_test_tasks == 6);
  CHECK(c.traj_per_task == 3);
  CHECK(c.episode_len == 50);
  CHECK(c.context_size == 32);
  CHECK(c.updates_per_iter == 17);
  CHECK(c.task_minibatch == 5);
  CHECK(c.adaptation_steps == 90);
  CHECK(c.buffer_capacity == 7777);
  CHECK(c.sac200_grad_steps_per_obs == 4);
  CHECK(c.sac.latent_dim == 2);
  CHECK(c.sac.rbf_centers == 7);
  CHECK(c.sac.actor_hidden == std::vector<int>{64, 32});
  CHECK(c.sac.critic_hidden == std::vector<int>{48});
  CHECK(c.sac.encoder_hidden.empty());
  CHECK(c.sac.gamma == 0.97);
  CHECK(c.sac.tau == 0.01);
  CHECK(c.sac.alpha == 0.15);
  CHECK(c.sac.beta_kl == 0.25);
  CHECK(c.sac.lr == 1.5e-4);
  CHECK(c.sac.batch_size == 19);
  CHECK(c.sac.twin_critics == false);
}

TEST_CASE("config: minimal file keeps defaults, latent dim follows the env") {
  MetaRunConfig base;  // compiled-in defaults
  MetaRunConfig c = parse_run_config("[run]\nenv = racer\n", "min.cfg");
  CHECK(c.sac.latent_dim == 3);
  CHECK(c.n_train_tasks == base.n_train_tasks);
  CHECK(c.context_size == base.context_size);
  CHECK(c.sac.gamma == base.sac.gamma);
  CHECK(c.sac.batch_size == base.sac.batch_size);

  CHECK(parse_run_config("[run]\nenv = socialnav\n", "m").sac.latent_dim == 5);
  CHECK(parse_run_config("[run]\nenv = gaze_linear\n", "m").sac.latent_dim == 3);
  CHECK(parse_run_config("[run]\nenv = gaze_nonlinear\n", "m").sac.latent_dim == 3);
  CHECK(parse_run_config("[run]\nenv = const_stub\n", "m").sac.latent_dim == 1);
  // An explicit latent_dim wins over the per-env default.
  CHECK(parse_run_config("[run]\nenv = socialnav\n[sac]\nlatent_dim = 9\n", "m").sac.latent_dim ==
        9);
}

TEST_CASE("config: malformed input is rejected with the offending line") {
  auto fails_with = [](const std::string& text, const std::string& needle) {
    CHECK_THROWS_WITH_AS(parse_run_config(text, "t.cfg"), doctest::Contains(needle.c_str()),
                         ConfigError);
  };
  fails_with("[nope]\n", "t.cfg:1: unknown section");
  fails_with("[run]\nenv = racer\nwhat = 1\n", "t.cfg:3: unknown key 'what' in [run]");
  fails_with("[tasks]\nepisode_len = 5\n", "t.cfg:2: unknown key 'episode_len' in [tasks]");
  fails_with("[meta]\ngamma = 0.9\n", "t.cfg:2: unknown key 'gamma' in [meta]");
  fails_with("[sac]\nthreads = 2\n", "t.cfg:2: unknown key 'threads' in [sac]");
  fails_with("env = racer\n", "t.cfg:1: key 'env' before any [section]");
  fails_with("[run\n", "t.cfg:1: unterminated section header");
  fails_with("[run]\nno equals sign here\n", "t.cfg:2: expected 'key = value'");
  fails_with("[run]\nenv =\n", "t.cfg:2: env: empty value");
  fails_with("[run]\nbudget = 10k\n", "t.cfg:2: budget: expected integer");
  fails_with("[sac]\ngamma = fast\n", "t.cfg:2: gamma: expected number");
  fails_with("[sac]\ntwin_critics = yes\n", "t.cfg:2: twin_critics: expected true/false");
  fails_with("[sac]\nactor_hidden = 64,,32\n", "t.cfg:2: actor_hidden: expected integer");
  fails_with("[run]\nseed = 1\nseed = 2\n", "t.cfg:3: duplicate key 'seed'");
  fails_with("[run]\nenv = hoverboard\n", "t.cfg: ");  // env resolved after parsing
  fails_with("[run]\nvariant = sacx\n", "t.cfg:2: ");
}

TEST_CASE("config: file loading") {
  const std::string dir = tmp_dir("cfgfile");
  {
    std::ofstream f(dir + "/a.cfg");
    f << "[run]\nenv = const_stub\nseed = 12\n";
  }
  MetaRunConfig c = load_run_config(dir + "/a.cfg");
  CHECK(c.env_name == "const_stub");
  CHECK(c.master_seed == 12);
  CHECK_THROWS_AS((void)load_run_config(dir + "/missing.cfg"), ConfigError);
}

TEST_CASE("run line: inverse of the trainer's own description") {
  MetaRunConfig c = tiny_run_cfg("unused", 9);
  c.env_name = "racer";
  c.sac.latent_dim = 3;
  c.sac.variant = Variant::rbf_pearl;
  c.sac.lr = 1.5e-4;
  c.sac.gamma = 0.97;
  c.sac.tau = 0.012;
  c.sac.encoder_hidden = {};
  PearlTrainer tr(c);

  MetaRunConfig back = parse_run_line(tr.run_line());
  PearlTrainer tr2(back);
  CHECK(tr2.config_signature() == tr.config_signature());
  CHECK(back.total_env_step_budget == c.total_env_step_budget);
  CHECK(back.sac.lr == c.sac.lr);
  CHECK(back.sac.encoder_hidden.empty());

  CHECK_THROWS_AS((void)parse_run_line("env=racer mystery=1"), std::runtime_error);
  CHECK_THROWS_AS((void)parse_run_line("env=racer"), std::runtime_error);  // missing fields
  CHECK_THROWS_AS((void)parse_run_line("envracer"), std::runtime_error);
}

TEST_CASE("svgplot: coordinates, escaping, non-finite points") {
  SvgPlot plot("a & b", "x", "y", 400, 300);
  plot.fix_bounds(0.0, 10.0, 0.0, 2.0);
  plot.add_series({"line<1>", "#112233", false, {0.0, 10.0}, {0.0, 2.0}});
  std::string svg = plot.render();

  // Margins are 72/18/40/52 on a 400x300 canvas: x maps [0,10] -> [72,382],
  // y maps [0,2] -> [248,40].
  CHECK(svg.find("points=\"72.00,248.00 382.00,40.00 \"") != std::string::npos);
  CHECK(svg.find("a &amp; b") != std::string::npos);
  CHECK(svg.find("line&lt;1&gt;") != std::string::npos);
  CHECK(svg.find("<svg xmlns") == 0);

  SvgPlot p2("", "", "");
  double nan = std::nan("");
  p2.add_series({"", "#000000", false, {0.0, 1.0, 2.0}, {0.0, nan, 4.0}});
  std::string svg2 = p2.render();
  size_t count = 0;
  for (size_t pos = svg2.find("points=\""); ; ) {
    size_t end = svg2.find('"', pos + 8);
    std::string pts = svg2.substr(pos + 8, end - pos - 8);
    for (char ch : pts) count += ch == ',';
    break;
  }
  CHECK(count == 2);  // the NaN point is dropped

  SvgPlot p3("band", "x", "y");
  p3.add_band({"#ff0000", 0.3, {0.0, 1.0}, {0.0, 0.5}, {1.0, 1.5}});
  p3.add_scatter({"dots", "#00ff00", 3.0, {0.5}, {0.5}});
  std::string svg3 = p3.render();
  CHECK(svg3.find("fill-opacity=\"0.3\"") != std::string::npos);
  CHECK(svg3.find("<circle") != std::string::npos);

  CHECK_THROWS_AS(p3.add_series({"", "#000", false, {1.0}, {1.0, 2.0}}), std::invalid_argument);
}

TEST_CASE("report: variant grouping and across-seed statistics") {
  auto mk = [](const std::string& variant, double final_ret, double final_exp) {
    RunData r;
    r.dir = "mem";
    r.run_line = "env=const_stub variant=" + variant + " seed=0";
    MetricsRow row;
    row.mean_test_return = 1.0;  // non-final row, must be ignored
    r.rows.push_back(row);
    row.mean_test_return = final_ret;
    row.mean_exploration_return = final_exp;
    r.rows.push_back(row);
    return r;
  };
  std::vector<RunData> runs = {mk("rbf_pearl", 4.0, 1.0), mk("pearl_parity", 10.0, 3.0),
                               mk("rbf_pearl", 8.0, 3.0)};
  RunData empty;
  empty.dir = "mem";
  empty.run_line = "env=const_stub variant=rbf_pearl seed=9";
  runs.push_back(empty);  // no rows: skipped

  auto table = summarize_runs(runs);
  REQUIRE(table.size() == 2);
  CHECK(table[0].variant == "rbf_pearl");  // first-appearance order
  CHECK(table[0].seeds == 2);
  CHECK(table[0].final_return_mean == doctest::Approx(6.0));
  CHECK(table[0].final_return_std == doctest::Approx(2.0));  // population std
  CHECK(table[0].final_exploration_mean == doctest::Approx(2.0));
  CHECK(table[1].variant == "pearl_parity");
  CHECK(table[1].seeds == 1);
  CHECK(table[1].final_return_std == 0.0);  // one seed: band collapses

  std::string text = format_summary_table(table);
  CHECK(text.find("rbf_pearl") != std::string::npos);
  CHECK(text.find("6.000 +- 2.000") != std::string::npos);
  CHECK(text.find("10.000 +- 0.000") != std::string::npos);

  CHECK(run_line_field(runs[0].run_line, "variant") == "rbf_pearl");
  CHECK(run_line_field(runs[0].run_line, "env") == "const_stub");
  CHECK(run_line_field(runs[0].run_line, "nothere") == "");
}

TEST_CASE("report: end-to-end over real run directories") {
  const std::string base = tmp_dir("report_e2e");
  for (uint64_t seed : {21, 22}) {
    PearlTrainer tr(tiny_run_cfg(base + "/s" + std::to_string(seed), seed));
    tr.run(false);
  }
  const std::string out = base + "/report";
  write_report({base + "/s21", base + "/s22"}, out);

  CHECK(fs::exists(out + "/learning_curve.svg"));
  CHECK(fs::exists(out + "/kl_variance_pearl.svg"));
  CHECK(fs::exists(out + "/table.txt"));
  CHECK(fs::exists(out + "/pearl/collapse.csv"));
  CHECK(fs::exists(out + "/pearl/collapse.svg"));
  CHECK(fs::exists(out + "/pearl/scatter.csv"));
  CHECK(fs::exists(out + "/pearl/scatter.svg"));

  // Every table number must be recomputable from the metrics files alone.
  auto r21 = read_metrics_csv(base + "/s21/metrics.csv");
  auto r22 = read_metrics_csv(base + "/s22/metrics.csv");
  REQUIRE(!r21.empty());
  const double m = 0.5 * (r21.back().mean_test_return + r22.back().mean_test_return);
  const double s = std::sqrt(0.5 * (std::pow(r21.back().mean_test_return - m, 2) +
                                    std::pow(r22.back().mean_test_return - m, 2)));
  auto table = summarize_runs({load_run_dir(base + "/s21"), load_run_dir(base + "/s22")});
  REQUIRE(table.size() == 1);
  CHECK(table[0].final_return_mean == doctest::Approx(m).epsilon(1e-15));
  CHECK(table[0].final_return_std == doctest::Approx(s).epsilon(1e-15));

  char cell[64];
  std::snprintf(cell, sizeof(cell), "%.3f +- %.3f", m, s);
  CHECK(slurp(out + "/table.txt").find(cell) != std::string::npos);
}

TEST_CASE("report: rbf diagnostics include the activation map") {
  const std::string base = tmp_dir("diag_rbf");
  MetaRunConfig c = tiny_run_cfg(base + "/run", 31);
  c.env_name = "racer";
  c.sac.latent_dim = 3;
  c.sac.variant = Variant::rbf_pearl;
  c.sac.rbf_centers = 5;
  c.n_train_tasks = 3;
  c.total_env_step_budget = 30;
  c.episode_len = 5;
  c.adaptation_steps = 5;
  PearlTrainer tr(c);
  tr.run(false);

  diagnose_run(base + "/run", base + "/diag");
  CHECK(fs::exists(base + "/diag/rbf_activation.svg"));
  std::string csv = slurp(base + "/diag/rbf_activation.csv");
  CHECK(csv.rfind("# metarl rbf activation v1", 0) == 0);
  CHECK(csv.find("z,phi1,phi2,phi3,phi4,phi5") != std::string::npos);
  size_t rows = 0;
  for (char ch : csv) rows += ch == '\n';
  CHECK(rows == 2 + 201);  // header lines + grid from -5 to 5 in steps of 0.05

  // The activation grid must match a direct export from the same checkpoint.
  RunData rd = load_run_dir(base + "/run");
  MetaRunConfig back = parse_run_line(rd.run_line);
  back.out_dir = base + "/run";
  PearlTrainer tr2(back);
  tr2.load_checkpoint(tr2.checkpoint_path());
  RbfActivationMap map =
      export_rbf_activation_map(tr2.agent().nets.actor_lift().rbf(), 0, {0.0});
  std::ostringstream want;
  want << "0";
  char buf[64];
  for (double a : map.activations[0]) {
    std::snprintf(buf, sizeof(buf), "%.17g", a);
    want << "," << buf;
  }
  CHECK(csv.find(want.str()) != std::string::npos);
}

TEST_CASE("report: socialnav diagnostics include a rollout trace") {
  const std::string base = tmp_dir("diag_nav");
  MetaRunConfig c = tiny_run_cfg(base + "/run", 11);
  c.env_name = "socialnav";
  c.sac.latent_dim = 2;
  c.total_env_step_budget = 30;
  c.episode_len = 5;
  c.adaptation_steps = 5;
  PearlTrainer tr(c);
  tr.run(false);

  diagnose_run(base + "/run", base + "/diag");
  CHECK(fs::exists(base + "/diag/trajectory.svg"));
  std::string csv = slurp(base + "/diag/trajectory.csv");
  CHECK(csv.rfind("# metarl trajectory v1", 0) == 0);
  CHECK(csv.find("step,robot_x,robot_y,h1_x") != std::string::npos);
  size_t rows = 0;
  for (char ch : csv) rows += ch == '\n';
  CHECK(rows == 3 + 6);  // 2 comments + header, then episode_len+1 positions

  // Deterministic: a second export is byte-identical.
  diagnose_run(base + "/run", base + "/diag2");
  CHECK(slurp(base + "/diag2/trajectory.csv") == csv);
  CHECK(slurp(base + "/diag2/scatter.csv") == slurp(base + "/diag/scatter.csv"));
}
