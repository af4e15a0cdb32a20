#include "metarl/config.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace metarl {
namespace {

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

struct Cursor {
  const std::string& source;
  int line = 0;
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError(source + ":" + std::to_string(line) + ": " + what);
  }
};

long parse_long(const Cursor& c, const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    long x = std::stol(v, &used);
    if (used != v.size()) throw std::invalid_argument("");
    return x;
  } catch (const std::exception&) {
    c.fail(key + ": expected integer, got '" + v + "'");
  }
}

int parse_int(const Cursor& c, const std::string& key, const std::string& v) {
  long x = parse_long(c, key, v);
  if (x < -2147483647L || x > 2147483647L) c.fail(key + ": out of range '" + v + "'");
  return static_cast<int>(x);
}

uint64_t parse_u64(const Cursor& c, const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    unsigned long long x = std::stoull(v, &used);
    if (used != v.size() || v[0] == '-') throw std::invalid_argument("");
    return x;
  } catch (const std::exception&) {
    c.fail(key + ": expected unsigned integer, got '" + v + "'");
  }
}

double parse_double(const Cursor& c, const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("");
    return x;
  } catch (const std::exception&) {
    c.fail(key + ": expected number, got '" + v + "'");
  }
}

bool parse_bool(const Cursor& c, const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  c.fail(key + ": expected true/false, got '" + v + "'");
}

std::vector<int> parse_int_list(const Cursor& c, const std::string& key, const std::string& v) {
  std::vector<int> out;
  if (v == "none") return out;
  size_t pos = 0;
  while (pos <= v.size()) {
    size_t next = v.find(',', pos);
    if (next == std::string::npos) next = v.size();
    out.push_back(parse_int(c, key, trim(v.substr(pos, next - pos))));
    pos = next + 1;
  }
  return out;
}

}  // namespace

MetaRunConfig parse_run_config(const std::string& text, const std::string& source_name) {
  MetaRunConfig cfg;
  bool latent_set = false;
  std::string section;
  std::set<std::string> seen;  // "section.key", for duplicate detection
  Cursor cur{source_name, 0};

  std::istringstream is(text);
  std::string raw;
  while (std::getline(is, raw)) {
    ++cur.line;
    std::string line = raw;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') cur.fail("unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "run" && section != "tasks" && section != "meta" && section != "sac")
        cur.fail("unknown section [" + section + "]");
      continue;
    }

    size_t eq = line.find('=');
    if (eq == std::string::npos) cur.fail("expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) cur.fail("empty key");
    if (val.empty()) cur.fail(key + ": empty value");
    if (section.empty()) cur.fail("key '" + key + "' before any [section]");
    if (!seen.insert(section + "." + key).second) cur.fail("duplicate key '" + key + "'");

    if (section == "run") {
      if (key == "env") cfg.env_name = val;
      else if (key == "variant") {
        try {
          cfg.sac.variant = parse_variant(val);
        } catch (const std::exception& e) {
          cur.fail(e.what());
        }
      } else if (key == "seed") cfg.master_seed = parse_u64(cur, key, val);
      else if (key == "out") cfg.out_dir = val;
      else if (key == "budget") cfg.total_env_step_budget = parse_long(cur, key, val);
      else if (key == "eval_interval") cfg.eval_interval = parse_int(cur, key, val);
      else if (key == "threads") cfg.collect_threads = parse_int(cur, key, val);
      else cur.fail("unknown key '" + key + "' in [run]");
    } else if (section == "tasks") {
      if (key == "train_tasks") cfg.n_train_tasks = parse_int(cur, key, val);
      else if (key == "test_tasks") cfg.n_test_tasks = parse_int(cur, key, val);
      else cur.fail("unknown key '" + key + "' in [tasks]");
    } else if (section == "meta") {
      if (key == "traj_per_task") cfg.traj_per_task = parse_int(cur, key, val);
      else if (key == "episode_len") cfg.episode_len = parse_int(cur, key, val);
      else if (key == "context_size") cfg.context_size = parse_int(cur, key, val);
      else if (key == "updates_per_iter") cfg.updates_per_iter = parse_int(cur, key, val);
      else if (key == "task_minibatch") cfg.task_minibatch = parse_int(cur, key, val);
      else if (key == "adaptation_steps") cfg.adaptation_steps = parse_int(cur, key, val);
      else if (key == "buffer_capacity")
        cfg.buffer_capacity = static_cast<size_t>(parse_long(cur, key, val));
      else if (key == "sac200_grad_steps_per_obs")
        cfg.sac200_grad_steps_per_obs = parse_int(cur, key, val);
      else cur.fail("unknown key '" + key + "' in [meta]");
    } else {  // sac
      if (key == "latent_dim") {
        cfg.sac.latent_dim = parse_int(cur, key, val);
        latent_set = true;
      } else if (key == "rbf_centers") cfg.sac.rbf_centers = parse_int(cur, key, val);
      else if (key == "actor_hidden") cfg.sac.actor_hidden = parse_int_list(cur, key, val);
      else if (key == "critic_hidden") cfg.sac.critic_hidden = parse_int_list(cur, key, val);
      else if (key == "encoder_hidden") cfg.sac.encoder_hidden = parse_int_list(cur, key, val);
      else if (key == "gamma") cfg.sac.gamma = parse_double(cur, key, val);
      else if (key == "tau") cfg.sac.tau = parse_double(cur, key, val);
      else if (key == "alpha") cfg.sac.alpha = parse_double(cur, key, val);
      else if (key == "beta_kl") cfg.sac.beta_kl = parse_double(cur, key, val);
      else if (key == "lr") cfg.sac.lr = parse_double(cur, key, val);
      else if (key == "batch_size") cfg.sac.batch_size = parse_int(cur, key, val);
      else if (key == "twin_critics") cfg.sac.twin_critics = parse_bool(cur, key, val);
      else cur.fail("unknown key '" + key + "' in [sac]");
    }
  }

  EnvTaskFamily fam;
  try {
    fam = env_task_family(cfg.env_name);
  } catch (const std::exception& e) {
    throw ConfigError(source_name + ": " + e.what());
  }
  if (!latent_set) cfg.sac.latent_dim = fam.default_latent_dim;
  return cfg;
}

MetaRunConfig load_run_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("config: cannot open " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_run_config(buf.str(), path);
}

}  // namespace metarl
