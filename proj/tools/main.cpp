// Batch experiment runner and single-instance clustering / certification
// tool. See README.md for config and CSV schemas.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sparsekm/certificate.hpp"
#include "sparsekm/csv.hpp"
#include "sparsekm/errors.hpp"
#include "sparsekm/iterate.hpp"
#include "sparsekm/rng.hpp"
#include "sparsekm/sdp.hpp"
#include "sparsekm/simgen.hpp"
#include "sparsekm/spectral.hpp"

using json = nlohmann::json;
using namespace sparsekm;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct ExperimentConfig {
  std::string scenario = "isotropic";
  std::vector<int> p = {50};
  std::vector<double> separation = {5.0};
  std::vector<double> rho = {0.0};
  int n = 200;
  int s = 10;
  std::string algorithm = "alg2";
  int reps = 1;
  uint64_t base_seed = 1;
  StoppingPolicy stopping;
  std::string out = "results.csv";
};

json default_config_json() {
  json j;
  j["scenario"] = "isotropic";
  j["p"] = {50};
  j["separation"] = {5.0};
  j["rho"] = {0.0};
  j["n"] = 200;
  j["s"] = 10;
  j["algorithm"] = "alg2";
  j["reps"] = 1;
  j["base_seed"] = 1;
  j["stopping"] = {{"T", 100}, {"w", 10}, {"eta", 5}, {"pi_percent", 1.0}};
  j["out"] = "results.csv";
  return j;
}

ExperimentConfig parse_config(const json& j) {
  ExperimentConfig c;
  c.scenario = j.value("scenario", c.scenario);
  if (j.contains("p")) c.p = j.at("p").get<std::vector<int>>();
  if (j.contains("separation")) c.separation = j.at("separation").get<std::vector<double>>();
  if (j.contains("rho")) c.rho = j.at("rho").get<std::vector<double>>();
  c.n = j.value("n", c.n);
  c.s = j.value("s", c.s);
  c.algorithm = j.value("algorithm", c.algorithm);
  c.reps = j.value("reps", c.reps);
  c.base_seed = j.value("base_seed", c.base_seed);
  if (j.contains("stopping")) {
    const json& s = j.at("stopping");
    c.stopping.T = s.value("T", c.stopping.T);
    c.stopping.warmup = s.value("w", c.stopping.warmup);
    c.stopping.window = s.value("eta", c.stopping.window);
    c.stopping.pi_percent = s.value("pi_percent", c.stopping.pi_percent);
  }
  c.out = j.value("out", c.out);

  scenario_from_string(c.scenario);
  c.stopping.validate();
  if (c.reps < 1) throw std::invalid_argument("config: reps must be >= 1");
  if (c.p.empty() || c.separation.empty() || c.rho.empty())
    throw std::invalid_argument("config: grid lists must be non-empty");
  const std::vector<std::string> algos = {"spectral", "sdp-full", "alg2", "alg4", "alg6"};
  if (std::find(algos.begin(), algos.end(), c.algorithm) == algos.end())
    throw std::invalid_argument("config: unknown algorithm '" + c.algorithm + "'");
  return c;
}

struct RunOutcome {
  Assignment assignment;
  FeatureSet selected;
  bool has_selection = false;
  int iterations = 0;
  std::string stop_reason = "-";
};

RunOutcome run_algorithm(const std::string& algorithm, const Dataset& ds,
                         const ScenarioSpec& spec, const StoppingPolicy& policy,
                         uint64_t algo_seed) {
  RunOutcome out;
  if (algorithm == "spectral") {
    out.assignment = spectral_cluster(AffinityInput::raw_data(ds.X), 2, algo_seed);
    return out;
  }
  if (algorithm == "sdp-full") {
    SdpProblem prob;
    prob.A = symmetrized(ds.X.transpose() * ds.X);
    prob.K = 2;
    const SdpSolution sol = solve(prob);
    out.assignment = spectral_cluster(AffinityInput::membership(sol.Z), 2, algo_seed);
    out.iterations = 1;
    return out;
  }

  std::pair<Assignment, IterationTrace> res;
  if (algorithm == "alg2") {
    res = run_known_cov(ds, make_covariance(spec), policy, algo_seed);
  } else {
    const SelectRule rule = (algorithm == "alg4") ? SelectRule::IseeRate : SelectRule::IseeMaximal;
    res = run_unknown_cov(ds, policy, rule, algo_seed);
  }
  out.assignment = res.first;
  out.iterations = static_cast<int>(res.second.records.size());
  out.stop_reason = to_string(res.second.stop_reason);
  // the selection that produced the returned assignment: last non-empty
  for (auto it = res.second.records.rbegin(); it != res.second.records.rend(); ++it) {
    if (!it->selected.empty()) {
      out.selected = it->selected;
      out.has_selection = true;
      break;
    }
  }
  return out;
}

std::string sanitize_cell(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

std::string summary_path_of(const std::string& out) {
  const auto dot = out.rfind('.');
  if (dot == std::string::npos || out.find('/', dot) != std::string::npos)
    return out + "_summary";
  return out.substr(0, dot) + "_summary" + out.substr(dot);
}

struct SimRow {
  int p = 0;
  double separation = 0.0;
  double rho = 0.0;
  int rep = 0;
  std::string algorithm;
  std::optional<double> misclustering;
  std::optional<int> tp, fp;
  int iterations = 0;
  std::string stop_reason = "-";
  long wall_ms = 0;
  std::string status = "ok";
  int grid_index = 0;
};

int cmd_simulate(const std::string& config_path, std::optional<uint64_t> seed_override,
                 std::optional<std::string> out_override, int jobs) {
  json j;
  {
    std::ifstream in(config_path);
    if (!in) throw std::invalid_argument("cannot open config: " + config_path);
    in >> j;
  }
  ExperimentConfig cfg = parse_config(j);
  if (seed_override) cfg.base_seed = *seed_override;
  if (out_override) cfg.out = *out_override;

  struct GridPoint {
    int p;
    double separation;
    double rho;
  };
  std::vector<GridPoint> grid;
  for (int p : cfg.p)
    for (double sep : cfg.separation)
      for (double rho : cfg.rho) grid.push_back({p, sep, rho});

  const int total = static_cast<int>(grid.size()) * cfg.reps;
  std::vector<SimRow> rows(static_cast<size_t>(total));

  std::atomic<int> next{0};
  auto worker = [&] {
    for (int task = next.fetch_add(1); task < total; task = next.fetch_add(1)) {
      const int g = task / cfg.reps;
      const int rep = task % cfg.reps;
      const GridPoint& gp = grid[static_cast<size_t>(g)];
      SimRow& row = rows[static_cast<size_t>(task)];
      row.p = gp.p;
      row.separation = gp.separation;
      row.rho = gp.rho;
      row.rep = rep;
      row.algorithm = cfg.algorithm;
      row.grid_index = g;

      const uint64_t task_tag = (static_cast<uint64_t>(g) << 24) | static_cast<uint64_t>(rep);
      ScenarioSpec spec;
      spec.scenario = scenario_from_string(cfg.scenario);
      spec.p = gp.p;
      spec.n = cfg.n;
      spec.s = cfg.s;
      spec.separation = gp.separation;
      spec.rho = gp.rho;
      spec.seed = Rng::derive(cfg.base_seed, task_tag, 0).next_u64();
      const uint64_t algo_seed = Rng::derive(cfg.base_seed, task_tag, 1).next_u64();

      const auto t0 = std::chrono::steady_clock::now();
      try {
        const Dataset ds = generate(spec);
        const RunOutcome out = run_algorithm(cfg.algorithm, ds, spec, cfg.stopping, algo_seed);
        row.misclustering = misclustering_rate(out.assignment, *ds.truth);
        if (out.has_selection) {
          FeatureSet support;
          for (int f = 1; f <= cfg.s; ++f) support.push_back(f);
          const auto [tp, fp] = selection_confusion(out.selected, support, gp.p);
          row.tp = tp;
          row.fp = fp;
        }
        row.iterations = out.iterations;
        row.stop_reason = out.stop_reason;
      } catch (const std::exception& e) {
        row.status = sanitize_cell(e.what());
      }
      row.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
    }
  };

  const int nworkers = std::max(1, std::min(jobs, total));
  if (nworkers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < nworkers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  {
    std::ofstream out(cfg.out, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open for writing: " + cfg.out);
    out << "# schema=1\n";
    out << "p,separation,rho,rep,algorithm,misclustering,tp,fp,iterations,stop_reason,wall_ms,status\n";
    for (const auto& r : rows) {
      out << r.p << "," << format_double(r.separation) << "," << format_double(r.rho) << ","
          << r.rep << "," << r.algorithm << ",";
      if (r.misclustering) out << format_double(*r.misclustering);
      out << ",";
      if (r.tp) out << *r.tp;
      out << ",";
      if (r.fp) out << *r.fp;
      out << "," << r.iterations << "," << r.stop_reason << "," << r.wall_ms << "," << r.status
          << "\n";
    }
  }

  {
    std::ofstream out(summary_path_of(cfg.out), std::ios::binary);
    out << "# schema=1\n";
    out << "p,separation,rho,algorithm,reps_ok,mean_misclustering,mean_tp,mean_fp,"
           "mean_iterations,mean_wall_ms\n";
    for (size_t g = 0; g < grid.size(); ++g) {
      int ok = 0, with_sel = 0;
      double mis = 0, tp = 0, fp = 0, iters = 0, wall = 0;
      for (const auto& r : rows) {
        if (static_cast<size_t>(r.grid_index) != g || !r.misclustering) continue;
        ++ok;
        mis += *r.misclustering;
        iters += r.iterations;
        wall += static_cast<double>(r.wall_ms);
        if (r.tp) {
          ++with_sel;
          tp += *r.tp;
          fp += *r.fp;
        }
      }
      out << grid[g].p << "," << format_double(grid[g].separation) << ","
          << format_double(grid[g].rho) << "," << cfg.algorithm << "," << ok << ",";
      if (ok > 0) out << format_double(mis / ok);
      out << ",";
      if (with_sel > 0) out << format_double(tp / with_sel);
      out << ",";
      if (with_sel > 0) out << format_double(fp / with_sel);
      out << ",";
      if (ok > 0) out << format_double(iters / ok);
      out << ",";
      if (ok > 0) out << format_double(wall / ok);
      out << "\n";
    }
  }
  return 0;
}

int cmd_cluster(const std::string& data_path, const std::string& algorithm,
                const std::optional<std::string>& sigma_file, uint64_t seed,
                const std::string& out_path, const StoppingPolicy& policy) {
  const std::vector<std::string> algos = {"spectral", "sdp-full", "alg2", "alg4", "alg6"};
  if (std::find(algos.begin(), algos.end(), algorithm) == algos.end())
    throw std::invalid_argument("unknown algorithm '" + algorithm + "'");

  const Dataset ds = read_dataset_csv(data_path);

  Assignment assignment;
  if (algorithm == "spectral") {
    assignment = spectral_cluster(AffinityInput::raw_data(ds.X), 2, seed);
  } else if (algorithm == "sdp-full") {
    SdpProblem prob;
    prob.A = symmetrized(ds.X.transpose() * ds.X);
    prob.K = 2;
    assignment = spectral_cluster(AffinityInput::membership(solve(prob).Z), 2, seed);
  } else if (algorithm == "alg2") {
    if (!sigma_file)
      throw std::invalid_argument("--sigma-file is required for alg2 (known covariance)");
    const Matrix sigma = read_matrix_csv(*sigma_file);
    if (sigma.rows() != ds.p() || sigma.cols() != ds.p())
      throw std::invalid_argument("--sigma-file must be a p x p matrix");
    assignment = run_known_cov(ds, CovarianceModel::explicit_covariance(sigma), policy, seed).first;
  } else {
    const SelectRule rule = (algorithm == "alg4") ? SelectRule::IseeRate : SelectRule::IseeMaximal;
    assignment = run_unknown_cov(ds, policy, rule, seed).first;
  }

  write_labels_csv(assignment, out_path);
  if (ds.truth && ds.truth->K == assignment.K)
    std::cout << "misclustering " << format_double(misclustering_rate(assignment, *ds.truth))
              << "\n";
  std::cout << "labels written to " << out_path << "\n";
  return 0;
}

FeatureSet parse_support(const std::string& spec_text, int p) {
  FeatureSet out;
  if (spec_text.rfind("first:", 0) == 0) {
    const int s = std::stoi(spec_text.substr(6));
    if (s < 1 || s > p) throw std::invalid_argument("--support first:s needs 1 <= s <= p");
    for (int j = 1; j <= s; ++j) out.push_back(j);
    return out;
  }
  std::stringstream ss(spec_text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    size_t pos = 0;
    const int j = std::stoi(cell, &pos);
    if (pos != cell.size()) throw std::invalid_argument("bad support index '" + cell + "'");
    if (j < 1 || j > p) throw std::invalid_argument("support index out of {1..p}");
    out.push_back(j);
  }
  if (out.empty()) throw std::invalid_argument("empty support spec");
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

int cmd_certify(const std::string& data_path, const std::string& support_spec,
                std::optional<double> lambda, const std::optional<std::string>& out_path) {
  const Dataset ds = read_dataset_csv(data_path);
  if (!ds.truth) throw std::invalid_argument("certify needs a label column");
  Assignment truth = *ds.truth;
  truth.validate(false);
  for (int sz : truth.sizes())
    if (sz < 2) throw std::invalid_argument("certify: every cluster must have size >= 2");

  const FeatureSet support = parse_support(support_spec, ds.p());
  CertificateInput input;
  input.X_S = rows_subset(ds.X, support);
  input.truth = truth;
  if (lambda) {
    input.lambda = *lambda;
  } else {
    // plug-in lambda_dot: pooled within-cluster variance on S and the
    // minimum pairwise empirical center separation on S
    const auto groups = truth.groups();
    const Matrix pooled = pooled_covariance(input.X_S, groups);
    input.sigma2 = pooled.trace() / static_cast<double>(support.size());
    Matrix centers(input.X_S.rows(), truth.K);
    for (int k = 0; k < truth.K; ++k) {
      Vector m = Vector::Zero(input.X_S.rows());
      for (int i : groups[static_cast<size_t>(k)]) m += input.X_S.col(i);
      centers.col(k) = m / static_cast<double>(groups[static_cast<size_t>(k)].size());
    }
    double sep = std::numeric_limits<double>::infinity();
    for (int k = 0; k < truth.K; ++k)
      for (int l = k + 1; l < truth.K; ++l)
        sep = std::min(sep, (centers.col(k) - centers.col(l)).squaredNorm());
    input.s_cap_s0_sep = sep;
  }

  const CertificateReport rep = check_conditions(input);
  const char* names[5] = {"C1", "C2", "C3", "C4", "C5"};
  for (int i = 0; i < 5; ++i)
    std::cout << names[i] << " " << (rep.conditions[static_cast<size_t>(i)].pass ? "PASS" : "FAIL")
              << " margin=" << format_double(rep.conditions[static_cast<size_t>(i)].margin) << "\n";
  std::cout << "U_S " << format_double(rep.U_S) << "\n";
  std::cout << "L1_S " << format_double(rep.L1_S) << "\n";
  std::cout << "lambda " << format_double(rep.lambda_used) << "\n";
  std::cout << "W_min_eig " << format_double(rep.W_min_eig) << "\n";
  std::cout << "overall " << (rep.all_pass() ? "PASS" : "FAIL") << "\n";

  json out;
  out["conditions"] = json::array();
  for (int i = 0; i < 5; ++i)
    out["conditions"].push_back({{"name", names[i]},
                                 {"pass", rep.conditions[static_cast<size_t>(i)].pass},
                                 {"margin", rep.conditions[static_cast<size_t>(i)].margin}});
  out["U_S"] = rep.U_S;
  out["L1_S"] = rep.L1_S;
  out["lambda_used"] = rep.lambda_used;
  out["W_min_eig"] = rep.W_min_eig;
  out["all_pass"] = rep.all_pass();
  if (out_path) {
    std::ofstream f(*out_path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot open for writing: " + *out_path);
    f << out.dump(2) << "\n";
  } else {
    std::cout << out.dump(2) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparsity-aware iterative SDP K-means toolkit"};
  app.require_subcommand(0, 1);

  bool print_defaults = false;
  app.add_flag("--print-defaults", print_defaults, "Print the default simulate config and exit");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run a replicated experiment grid from a config");
  std::string config_path;
  std::optional<uint64_t> seed_override;
  std::optional<std::string> out_override;
  int jobs = 1;
  sim->add_option("--config", config_path, "JSON experiment config")->required();
  sim->add_option("--seed", seed_override, "Override base_seed");
  sim->add_option("--out", out_override, "Override output CSV path");
  sim->add_option("--jobs", jobs, "Parallel replication workers")->check(CLI::PositiveNumber);

  // cluster
  auto* clu = app.add_subcommand("cluster", "Cluster a dataset CSV");
  std::string data_path, algorithm = "alg4", labels_out = "labels.csv";
  std::optional<std::string> sigma_file;
  uint64_t seed = 1;
  int max_iter = 100;
  clu->add_option("data", data_path, "Dataset CSV (header x1..xp[,label])")->required();
  clu->add_option("--algorithm", algorithm, "spectral | sdp-full | alg2 | alg4 | alg6");
  clu->add_option("--sigma-file", sigma_file, "Known covariance CSV (required for alg2)");
  clu->add_option("--seed", seed, "RNG seed");
  clu->add_option("--out", labels_out, "Output labels CSV");
  clu->add_option("--max-iter", max_iter, "Stopping policy T")->check(CLI::PositiveNumber);

  // certify
  auto* cert = app.add_subcommand("certify", "Check the exact-recovery dual certificate");
  std::string cert_data, support_spec;
  std::optional<double> lambda;
  std::optional<std::string> cert_out;
  cert->add_option("data", cert_data, "Labeled dataset CSV")->required();
  cert->add_option("--support", support_spec, "Feature subset: 'first:s' or '1,2,11'")->required();
  cert->add_option("--lambda", lambda, "Dual trace variable (default: plug-in lambda_dot)");
  cert->add_option("--out", cert_out, "Write the JSON report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (print_defaults) {
      std::cout << default_config_json().dump(2) << "\n";
      return 0;
    }
    if (sim->parsed()) return cmd_simulate(config_path, seed_override, out_override, jobs);
    if (clu->parsed()) {
      StoppingPolicy policy;
      policy.T = max_iter;
      return cmd_cluster(data_path, algorithm, sigma_file, seed, labels_out, policy);
    }
    if (cert->parsed()) return cmd_certify(cert_data, support_spec, lambda, cert_out);
    std::cout << app.help() << "\n";
    return 0;
  } catch (const CsvError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
