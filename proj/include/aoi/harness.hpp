#pragma once

#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "aoi/bounds.hpp"
#include "aoi/config.hpp"
#include "aoi/errors.hpp"
#include "aoi/metrics.hpp"
#include "aoi/random.hpp"
#include "aoi/simulation.hpp"
#include "aoi/text.hpp"

namespace aoi {

// One (beta, gamma, policy) cell aggregated over replications.
struct ResultRow {
  std::string preset;
  std::string policy;
  double beta = 0.0;
  double gamma = 0.0;
  std::size_t n_pois = 0;
  double lambda = 0.0;
  std::string mu_summary;
  double mean_max_age = 0.0;
  double weighted_mean_age = 0.0;
  double mean_queue_sum = 0.0;
  double cost_J = 0.0;
  double poa_measured = 0.0;
  double thm1_bound = 0.0;
  double thm2_bound = 0.0;
  double age_lb = 0.0;
  double queue_lb_analytic = 0.0;
  double epsilon = 0.0;
  double B_gamma = 0.0;
  double M = 0.0;
  double stderr_poa = 0.0;
  std::uint64_t replications = 0;
  std::uint64_t seed = 0;

  // Not emitted; kept for analysis and acceptance checks.
  PoaMode poa_mode = PoaMode::None;
  BoundsReport bounds;
  double jsq_queue_sum = std::numeric_limits<double>::quiet_NaN();
  double J_lower = std::numeric_limits<double>::quiet_NaN();
  ReplicationSummary cost_summary;
  std::size_t poa_clamped = 0;
  std::vector<double> poa_per_replication;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<std::string> warnings;  // e.g. PoA clamp events
};

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// FNV-1a; stable across platforms, unlike std::hash.
inline std::uint64_t stable_hash(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Depends only on the cell's own parameters, so adding sweep points leaves
// existing cells' seeds (and results) untouched.
inline std::uint64_t replication_seed(std::uint64_t base_seed, std::string_view policy, double beta,
                                      double gamma, std::uint64_t replication) {
  const std::uint64_t cell = derive_seed(
      stable_hash(policy), {std::bit_cast<std::uint64_t>(beta), std::bit_cast<std::uint64_t>(gamma)});
  return derive_seed(base_seed, {cell, replication});
}

// "0.11x5;0.09x5" style run-length summary of the service rates.
inline std::string mu_summary(const ProcessSpec& spec) {
  std::string out;
  const auto mus = spec.mus();
  for (std::size_t i = 0; i < mus.size();) {
    std::size_t j = i;
    while (j < mus.size() && mus[j] == mus[i]) ++j;
    if (!out.empty()) out += ';';
    out += text::format_double(mus[i]) + "x" + std::to_string(j - i);
    i = j;
  }
  return out;
}

inline PoaMode resolve_poa_mode(const ExperimentConfig& c) {
  if (c.poa != PoaMode::Auto) return c.poa;
  return c.process.is_unit_deterministic() ? PoaMode::MaxAge : PoaMode::Cost;
}

// Bounds with NaN where a quantity is undefined for this configuration.
inline BoundsReport bounds_for(const ProcessSpec& spec, double beta, double gamma, double p_max) {
  BoundsReport r;
  r.epsilon = r.B_gamma = r.M = r.thm2_poa_ub = r.thm2_asymptotic_ub = r.queue_lb_analytic = kNaN;
  r.B_gamma = B_of_gamma(gamma, spec);
  r.B_gamma_conservative = B_of_gamma_conservative(gamma, spec);
  r.thm1_poa_ub = spec.size() >= 2 ? thm1_bound(beta, spec.size(), p_max) : kNaN;
  r.det_age_lb = static_cast<double>(spec.size()) - 1.0;
  r.weighted_age_lb = weighted_age_lower_bound(spec);
  r.J_upper_thm2 = J_upper_bound(beta, gamma, spec, p_max);
  if (spec.lambda() < spec.mu_sum()) {
    r.epsilon = compute_epsilon(spec);
    r.M = M_constant(r.epsilon, spec);
    r.thm2_poa_ub = thm2_bound(beta, gamma, r.epsilon, spec, p_max);
    r.queue_lb_analytic = queue_lower_bound_analytic(r.epsilon, spec);
    if (static_cast<double>(spec.size()) / spec.q() > 1.0)
      r.thm2_asymptotic_ub = thm2_asymptotic_bound(spec);
  }
  return r;
}

namespace detail {

struct Job {
  std::size_t cell = 0;
  std::uint64_t replication = 0;
};

struct JobOutput {
  RunMetrics selfish;
  double jsq_queue_sum = kNaN;
};

// Runs f(i) for i in [0, count) on `threads` workers. Exceptions are rethrown.
template <class F>
void parallel_for(std::size_t count, unsigned threads, F f) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace detail

// Runs every (beta, gamma) cell `replications` times. In Cost mode each
// replication is paired with a JSQ run on the same seed (same A[t], R_n[t])
// whose mean total queue stands in for the optimal queue cost.
inline ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto& spec = config.process;
  const PoaMode mode = resolve_poa_mode(config);
  if (mode == PoaMode::Cost) compute_epsilon(spec);  // infeasible: fail before simulating
  make_policy(config.policy, 0.0, 0.0, spec, config.tie_break);  // unknown name: fail early

  struct Cell {
    double beta;
    double gamma;
  };
  std::vector<Cell> cells;
  for (double b : config.betas)
    for (double g : config.gammas) cells.push_back({b, g});

  const double epsilon = spec.lambda() < spec.mu_sum() ? compute_epsilon(spec) : kNaN;
  const double p_max = config.prices.p_max;

  std::vector<detail::Job> jobs;
  for (std::size_t c = 0; c < cells.size(); ++c)
    for (std::uint64_t r = 0; r < config.replications; ++r) jobs.push_back({c, r});
  std::vector<detail::JobOutput> outputs(jobs.size());

  detail::parallel_for(jobs.size(), config.threads, [&](std::size_t i) {
    const auto& job = jobs[i];
    const auto& cell = cells[job.cell];
    const auto seed =
        replication_seed(config.base_seed, config.policy, cell.beta, cell.gamma, job.replication);
    SimulationOptions opt;
    opt.horizon = config.horizon;
    opt.warmup = config.warmup;
    if (!std::isnan(epsilon)) opt.cost = CostWeights{cell.beta, cell.gamma, epsilon};
    auto policy = make_policy(config.policy, cell.beta, cell.gamma, spec, config.tie_break);
    outputs[i].selfish = simulate(spec, config.prices, std::move(policy), seed, opt).metrics;
    if (mode == PoaMode::Cost) {
      SimulationOptions jsq_opt = opt;
      jsq_opt.cost.reset();
      const auto jsq =
          simulate(spec, config.prices, Policy(JoinShortestQueue{}, config.tie_break), seed, jsq_opt);
      outputs[i].jsq_queue_sum = jsq.metrics.mean_queue_sum;
    }
  });

  ExperimentResult result;
  const double n = static_cast<double>(spec.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto& cell = cells[c];
    ResultRow row;
    row.preset = config.preset;
    row.policy = config.policy;
    row.beta = cell.beta;
    row.gamma = cell.gamma;
    row.n_pois = spec.size();
    row.lambda = spec.lambda();
    row.mu_summary = mu_summary(spec);
    row.replications = config.replications;
    row.seed = config.base_seed;
    row.poa_mode = mode;
    row.bounds = bounds_for(spec, cell.beta, cell.gamma, p_max);
    row.thm1_bound = row.bounds.thm1_poa_ub;
    row.thm2_bound = row.bounds.thm2_poa_ub;
    row.age_lb = mode == PoaMode::MaxAge ? row.bounds.det_age_lb : row.bounds.weighted_age_lb;
    row.queue_lb_analytic = row.bounds.queue_lb_analytic;
    row.epsilon = row.bounds.epsilon;
    row.B_gamma = row.bounds.B_gamma;
    row.M = row.bounds.M;

    std::vector<double> max_age, wage, qsum, cost, jsq, poa;
    for (std::uint64_t r = 0; r < config.replications; ++r) {
      const auto& out = outputs[c * config.replications + r];
      const auto& m = out.selfish;
      max_age.push_back(m.mean_max_age);
      wage.push_back(m.weighted_mean_age);
      qsum.push_back(m.mean_queue_sum);
      cost.push_back(m.cost_J);
      PoaEstimate e{kNaN, false, kNaN};
      try {
        if (mode == PoaMode::MaxAge) {
          e = poa_deterministic(m.mean_max_age, spec.size());
        } else if (mode == PoaMode::Cost) {
          jsq.push_back(out.jsq_queue_sum);
          const double j_lower = cell.gamma * epsilon / n * out.jsq_queue_sum +
                                 cell.beta * row.bounds.weighted_age_lb;
          e = poa_stochastic(m.cost_J, j_lower);
        }
      } catch (const DomainError& err) {
        result.warnings.push_back("beta=" + text::format_double(cell.beta) +
                                  " gamma=" + text::format_double(cell.gamma) +
                                  ": PoA undefined (" + err.what() + ")");
      }
      if (e.clamped) {
        ++row.poa_clamped;
        result.warnings.push_back("beta=" + text::format_double(cell.beta) + " gamma=" +
                                  text::format_double(cell.gamma) + " replication " +
                                  std::to_string(r) + ": PoA " + text::format_double(e.raw) +
                                  " clamped to " + text::format_double(e.value));
      }
      poa.push_back(e.value);
    }
    row.mean_max_age = summarize(max_age).mean;
    row.weighted_mean_age = summarize(wage).mean;
    row.mean_queue_sum = summarize(qsum).mean;
    row.cost_summary = summarize(cost);
    row.cost_J = row.cost_summary.mean;
    if (!jsq.empty()) {
      row.jsq_queue_sum = summarize(jsq).mean;
      row.J_lower = cell.gamma * epsilon / n * row.jsq_queue_sum + cell.beta * row.bounds.weighted_age_lb;
    }
    const auto poa_summary = summarize(poa);
    row.poa_measured = poa_summary.mean;
    row.stderr_poa = poa_summary.std_error;
    row.poa_per_replication = std::move(poa);
    result.rows.push_back(std::move(row));
  }
  return result;
}

// ---- output -----------------------------------------------------------------

inline const std::vector<std::string>& result_columns() {
  static const std::vector<std::string> cols{
      "preset",       "policy",          "beta",         "gamma",       "N",
      "lambda",       "mu_summary",      "mean_max_age", "weighted_mean_age",
      "mean_queue_sum", "cost_J",        "poa_measured", "thm1_bound",  "thm2_bound",
      "age_lb",       "queue_lb_analytic", "epsilon",    "B_gamma",     "M",
      "stderr_poa",   "replications",    "seed"};
  return cols;
}

inline std::string format_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  const auto& cols = result_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << "\n";
  // Undefined quantities (NaN) are left empty.
  const auto num = [](double v) { return std::isfinite(v) ? text::format_double(v) : std::string(); };
  for (const auto& r : rows) {
    out << r.preset << ',' << r.policy << ',' << num(r.beta) << ',' << num(r.gamma) << ','
        << r.n_pois << ',' << num(r.lambda) << ',' << r.mu_summary << ',' << num(r.mean_max_age)
        << ',' << num(r.weighted_mean_age) << ',' << num(r.mean_queue_sum) << ','
        << num(r.cost_J) << ',' << num(r.poa_measured) << ',' << num(r.thm1_bound) << ','
        << num(r.thm2_bound) << ',' << num(r.age_lb) << ',' << num(r.queue_lb_analytic) << ','
        << num(r.epsilon) << ',' << num(r.B_gamma) << ',' << num(r.M) << ','
        << num(r.stderr_poa) << ',' << r.replications << ',' << r.seed << "\n";
  }
  return out.str();
}

inline nlohmann::ordered_json to_json(const ResultRow& r) {
  nlohmann::ordered_json j;
  const auto num = [](double v) -> nlohmann::ordered_json {
    if (std::isfinite(v)) return v;
    return nullptr;
  };
  j["preset"] = r.preset;
  j["policy"] = r.policy;
  j["beta"] = num(r.beta);
  j["gamma"] = num(r.gamma);
  j["N"] = r.n_pois;
  j["lambda"] = num(r.lambda);
  j["mu_summary"] = r.mu_summary;
  j["mean_max_age"] = num(r.mean_max_age);
  j["weighted_mean_age"] = num(r.weighted_mean_age);
  j["mean_queue_sum"] = num(r.mean_queue_sum);
  j["cost_J"] = num(r.cost_J);
  j["poa_measured"] = num(r.poa_measured);
  j["thm1_bound"] = num(r.thm1_bound);
  j["thm2_bound"] = num(r.thm2_bound);
  j["age_lb"] = num(r.age_lb);
  j["queue_lb_analytic"] = num(r.queue_lb_analytic);
  j["epsilon"] = num(r.epsilon);
  j["B_gamma"] = num(r.B_gamma);
  j["M"] = num(r.M);
  j["stderr_poa"] = num(r.stderr_poa);
  j["replications"] = r.replications;
  j["seed"] = r.seed;
  return j;
}

inline std::string format_json(const std::vector<ResultRow>& rows) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) arr.push_back(to_json(r));
  return arr.dump(2) + "\n";
}

// Writes rows to `path` ("-" for stdout is handled by callers). No file is
// created when rows is empty.
inline void emit_results(const std::vector<ResultRow>& rows, OutputFormat format,
                         const std::string& path) {
  if (rows.empty()) throw DomainError("no result rows to emit");
  const std::string body = format == OutputFormat::Csv ? format_csv(rows) : format_json(rows);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << body;
  out.close();
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace aoi
