#include "metarl/metrics.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace metarl {
namespace {

constexpr const char* kHeader = "# metarl metrics v1";

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);  // 17 digits: doubles survive the round trip
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

void write_metrics_csv(const std::string& path, const std::vector<MetricsRow>& rows,
                       const std::string& run_line) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("metrics: cannot open " + path + " for writing");
  out << kHeader << "\n";
  out << "# run: " << run_line << "\n";
  const size_t d = rows.empty() ? 0 : rows.front().per_dim_kl.size();
  out << "iteration,env_steps,mean_test_return,std_test_return,mean_exploration_return,"
         "critic_loss,actor_loss,encoder_loss,kl_total";
  for (size_t i = 1; i <= d; ++i) out << ",kl_z" << i;
  for (size_t i = 1; i <= d; ++i) out << ",var_z" << i;
  out << "\n";
  for (const auto& r : rows) {
    if (r.per_dim_kl.size() != d || r.per_dim_var.size() != d)
      throw std::runtime_error("metrics: inconsistent latent dimension across rows");
    out << r.iteration << "," << r.env_steps << "," << fmt(r.mean_test_return) << ","
        << fmt(r.std_test_return) << "," << fmt(r.mean_exploration_return) << ","
        << fmt(r.critic_loss) << "," << fmt(r.actor_loss) << "," << fmt(r.encoder_loss) << ","
        << fmt(r.kl_total);
    for (double x : r.per_dim_kl) out << "," << fmt(x);
    for (double x : r.per_dim_var) out << "," << fmt(x);
    out << "\n";
  }
  if (!out) throw std::runtime_error("metrics: write to " + path + " failed");
}

std::vector<MetricsRow> read_metrics_csv(const std::string& path, std::string* run_line) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("metrics: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != kHeader)
    throw std::runtime_error("metrics: " + path + " is not a metarl metrics file");
  if (!std::getline(in, line) || line.rfind("# run: ", 0) != 0)
    throw std::runtime_error("metrics: " + path + " is missing its run description");
  if (run_line) *run_line = line.substr(7);
  if (!std::getline(in, line)) throw std::runtime_error("metrics: " + path + " has no column header");
  const auto cols = split_csv(line);
  size_t d = 0;
  for (const auto& c : cols)
    if (c.rfind("kl_z", 0) == 0) ++d;
  if (cols.size() != 9 + 2 * d)
    throw std::runtime_error("metrics: unexpected column layout in " + path);

  std::vector<MetricsRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_csv(line);
    if (cells.size() != cols.size())
      throw std::runtime_error("metrics: short row in " + path + ": " + line);
    MetricsRow r;
    size_t i = 0;
    r.iteration = std::stoi(cells[i++]);
    r.env_steps = std::stol(cells[i++]);
    r.mean_test_return = std::stod(cells[i++]);
    r.std_test_return = std::stod(cells[i++]);
    r.mean_exploration_return = std::stod(cells[i++]);
    r.critic_loss = std::stod(cells[i++]);
    r.actor_loss = std::stod(cells[i++]);
    r.encoder_loss = std::stod(cells[i++]);
    r.kl_total = std::stod(cells[i++]);
    for (size_t k = 0; k < d; ++k) r.per_dim_kl.push_back(std::stod(cells[i++]));
    for (size_t k = 0; k < d; ++k) r.per_dim_var.push_back(std::stod(cells[i++]));
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace metarl
