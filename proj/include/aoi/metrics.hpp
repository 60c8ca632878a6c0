#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aoi/errors.hpp"
#include "aoi/process.hpp"
#include "aoi/state.hpp"
#include "aoi/trajectory.hpp"

namespace aoi {

// Largest epsilon with mu_n / lambda >= mu_n / mu_sum + epsilon / N for all n.
inline double compute_epsilon(const ProcessSpec& spec) {
  const double lambda = spec.lambda();
  const double mu_sum = spec.mu_sum();
  if (!(lambda < mu_sum))
    throw InfeasibleError("lambda >= mu_sum: no epsilon > 0 satisfies the stability slack");
  return static_cast<double>(spec.size()) * spec.mu_min() * (1.0 / lambda - 1.0 / mu_sum);
}

struct CostWeights {
  double beta = 0.0;
  double gamma = 0.0;
  double epsilon = 0.0;
};

struct RunMetrics {
  std::uint64_t horizon = 0;
  std::uint64_t warmup = 0;
  std::uint64_t samples = 0;
  std::vector<double> mean_queue;   // Q-bar_n
  std::vector<double> mean_age;     // Delta-bar_n
  std::vector<double> weights;      // mu_n / mu_sum
  double mean_max_age = 0.0;
  double weighted_mean_age = 0.0;   // sum_n w_n Delta-bar_n
  double mean_queue_sum = 0.0;
  std::optional<CostWeights> cost_weights;
  double cost_J = std::numeric_limits<double>::quiet_NaN();  // accumulated slot by slot
};

// Running time averages over slots warmup .. horizon-1.
class MetricsAccumulator {
 public:
  MetricsAccumulator(std::uint64_t horizon, std::uint64_t warmup, std::vector<double> weights,
                     std::optional<CostWeights> cost = std::nullopt)
      : horizon_(horizon), warmup_(warmup), weights_(std::move(weights)), cost_(cost),
        queue_sums_(weights_.size(), 0), age_sums_(weights_.size(), 0) {
    if (warmup_ >= horizon_) throw ConfigError("warmup must be smaller than the horizon");
  }

  // Observes the state at slot state.slot; slots outside [warmup, horizon) are ignored.
  void observe(const SystemState& s) {
    if (s.slot < warmup_ || s.slot >= horizon_) return;
    if (s.size() != weights_.size()) throw DomainError("state size does not match metrics");
    std::uint64_t max_age = 0;
    double queue_total = 0.0;
    double weighted_age = 0.0;
    for (std::size_t n = 0; n < s.size(); ++n) {
      const auto& p = s.pois[n];
      queue_sums_[n] += static_cast<std::uint64_t>(p.queue);
      age_sums_[n] += p.age;
      max_age = p.age > max_age ? p.age : max_age;
      if (cost_) {
        queue_total += static_cast<double>(p.queue);
        weighted_age += weights_[n] * static_cast<double>(p.age);
      }
    }
    max_age_sum_ += max_age;
    if (cost_) {
      const double n_pois = static_cast<double>(s.size());
      add_cost(cost_->gamma * cost_->epsilon / n_pois * queue_total + cost_->beta * weighted_age);
    }
    ++samples_;
  }

  RunMetrics finalize() const {
    RunMetrics m;
    m.horizon = horizon_;
    m.warmup = warmup_;
    m.samples = samples_;
    m.weights = weights_;
    m.cost_weights = cost_;
    if (samples_ == 0) return m;
    const double count = static_cast<double>(samples_);
    m.mean_queue.resize(weights_.size());
    m.mean_age.resize(weights_.size());
    for (std::size_t n = 0; n < weights_.size(); ++n) {
      m.mean_queue[n] = static_cast<double>(queue_sums_[n]) / count;
      m.mean_age[n] = static_cast<double>(age_sums_[n]) / count;
      m.mean_queue_sum += m.mean_queue[n];
      m.weighted_mean_age += weights_[n] * m.mean_age[n];
    }
    m.mean_max_age = static_cast<double>(max_age_sum_) / count;
    if (cost_) m.cost_J = (cost_sum_ + cost_compensation_) / count;
    return m;
  }

 private:
  // Neumaier summation keeps the accumulated J within ~1 ulp of the component form.
  void add_cost(double x) {
    const double t = cost_sum_ + x;
    if (std::abs(cost_sum_) >= std::abs(x))
      cost_compensation_ += (cost_sum_ - t) + x;
    else
      cost_compensation_ += (x - t) + cost_sum_;
    cost_sum_ = t;
  }

  std::uint64_t horizon_;
  std::uint64_t warmup_;
  std::vector<double> weights_;
  std::optional<CostWeights> cost_;
  std::vector<std::uint64_t> queue_sums_;
  std::vector<std::uint64_t> age_sums_;
  std::uint64_t max_age_sum_ = 0;
  std::uint64_t samples_ = 0;
  double cost_sum_ = 0.0;
  double cost_compensation_ = 0.0;
};

// J(beta, gamma) = (gamma eps / N) sum_n Q-bar_n + beta sum_n (mu_n / mu_sum) Delta-bar_n
inline double cost_J(const RunMetrics& m, double beta, double gamma, double epsilon,
                     const ProcessSpec& spec) {
  if (m.mean_queue.size() != spec.size()) throw DomainError("metrics size does not match spec");
  const auto w = spec.service_weights();
  double queue_total = 0.0;
  double weighted_age = 0.0;
  for (std::size_t n = 0; n < spec.size(); ++n) {
    queue_total += m.mean_queue[n];
    weighted_age += w[n] * m.mean_age[n];
  }
  return gamma * epsilon / static_cast<double>(spec.size()) * queue_total + beta * weighted_age;
}

struct PoaEstimate {
  double value = 0.0;
  bool clamped = false;  // raw estimate fell outside [0, 1]
  double raw = 0.0;
};

inline PoaEstimate clamp_poa(double raw) {
  PoaEstimate e{raw, false, raw};
  if (raw < 0.0) e = {0.0, true, raw};
  if (raw > 1.0) e = {1.0, true, raw};
  return e;
}

// Deterministic case: 1 - (N - 1) / mean max age, N - 1 being the optimum.
inline PoaEstimate poa_deterministic(double mean_max_age_selfish, std::size_t n_pois) {
  if (!(mean_max_age_selfish > 0.0)) throw DomainError("mean max age must be positive");
  return clamp_poa(1.0 - (static_cast<double>(n_pois) - 1.0) / mean_max_age_selfish);
}

// Stochastic case: 1 - J_lower / J_selfish.
inline PoaEstimate poa_stochastic(double j_selfish, double j_lower) {
  if (!(j_selfish > 0.0) || !(j_lower > 0.0))
    throw DomainError("PoA needs positive selfish and lower-bound costs");
  return clamp_poa(1.0 - j_lower / j_selfish);
}

struct ReplicationSummary {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t count = 0;
};

inline ReplicationSummary summarize(std::span<const double> values) {
  ReplicationSummary r;
  r.count = values.size();
  if (values.empty()) return r;
  double sum = 0.0;
  for (double v : values) sum += v;
  r.mean = sum / static_cast<double>(r.count);
  if (r.count > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - r.mean) * (v - r.mean);
    const double stdev = std::sqrt(ss / static_cast<double>(r.count - 1));
    r.std_error = stdev / std::sqrt(static_cast<double>(r.count));
  }
  return r;
}

// ---- Lyapunov drift diagnostics -------------------------------------------

enum class LyapunovFunction {
  V,   // sum_n Delta_n
  L,   // gamma/(2 lambda beta) sum_n Q_n^2 + (1/q) sum_n Delta_n
  V1,  // sum_n mu_n Delta_n
  V2,  // sum_n mu_n Delta_n^2
};

struct DriftParams {
  double beta = 1.0;
  double gamma = 0.0;
  double lambda = 1.0;
  double q = 1.0;
  std::vector<double> mus;  // V1, V2
};

struct DriftReport {
  std::vector<double> values;  // function value at each stored state
  std::vector<double> drift;   // values[t + 1] - values[t]
  double mean_drift = 0.0;
  double std_error = 0.0;
};

inline double lyapunov_value(const Trajectory& tr, std::size_t t, LyapunovFunction which,
                             const DriftParams& p) {
  const auto ages = tr.ages(t);
  double v = 0.0;
  switch (which) {
    case LyapunovFunction::V:
      for (auto a : ages) v += static_cast<double>(a);
      return v;
    case LyapunovFunction::L: {
      double q2 = 0.0;
      for (auto q : tr.queues(t)) q2 += static_cast<double>(q) * static_cast<double>(q);
      double age_sum = 0.0;
      for (auto a : ages) age_sum += static_cast<double>(a);
      return p.gamma / (2.0 * p.lambda * p.beta) * q2 + age_sum / p.q;
    }
    case LyapunovFunction::V1:
      for (std::size_t n = 0; n < ages.size(); ++n) v += p.mus.at(n) * static_cast<double>(ages[n]);
      return v;
    case LyapunovFunction::V2:
      for (std::size_t n = 0; n < ages.size(); ++n) {
        const double a = static_cast<double>(ages[n]);
        v += p.mus.at(n) * a * a;
      }
      return v;
  }
  return v;
}

inline DriftReport drift_diagnostics(const Trajectory& tr, LyapunovFunction which,
                                     const DriftParams& p) {
  if (which == LyapunovFunction::L && !(p.beta > 0.0))
    throw DomainError("L drift is undefined for beta = 0");
  if (which == LyapunovFunction::L && !(p.q > 0.0 && p.lambda > 0.0))
    throw DomainError("L drift needs q > 0 and lambda > 0");
  DriftReport r;
  const std::size_t states = tr.states();
  r.values.reserve(states);
  for (std::size_t t = 0; t < states; ++t) r.values.push_back(lyapunov_value(tr, t, which, p));
  for (std::size_t t = 0; t + 1 < states; ++t) r.drift.push_back(r.values[t + 1] - r.values[t]);
  const auto s = summarize(r.drift);
  r.mean_drift = s.mean;
  r.std_error = s.std_error;
  return r;
}

// Per-slot residual of the deterministic-case drift bound:
//   (V[t+1] - V[t]) - (N - 1 - Delta_max[t] + p_max / beta),
// non-positive on every slot under the selfish rule.
inline std::vector<double> age_drift_residuals(const Trajectory& tr, double beta, double p_max) {
  if (!(beta > 0.0)) throw DomainError("age drift bound needs beta > 0");
  const auto d = drift_diagnostics(tr, LyapunovFunction::V, {});
  const double n = static_cast<double>(tr.pois());
  std::vector<double> out(d.drift.size());
  for (std::size_t t = 0; t < d.drift.size(); ++t)
    out[t] = d.drift[t] - (n - 1.0 - static_cast<double>(tr.max_age(t)) + p_max / beta);
  return out;
}

// Per-slot residual of the stochastic drift bound on L:
//   (L[t+1] - L[t]) + gamma eps/(N beta) sum_n Q_n[t] + sum_n w_n Delta_n[t]
//     - (B/beta + N/q - 1 + p_max/beta),
// whose mean is non-positive under the selfish rule.
inline std::vector<double> cost_drift_residuals(const Trajectory& tr, const DriftParams& p,
                                                double epsilon, double b_gamma, double p_max) {
  const auto d = drift_diagnostics(tr, LyapunovFunction::L, p);
  const double n = static_cast<double>(tr.pois());
  double mu_sum = 0.0;
  for (double m : p.mus) mu_sum += m;
  const double constant = b_gamma / p.beta + n / p.q - 1.0 + p_max / p.beta;
  std::vector<double> out(d.drift.size());
  for (std::size_t t = 0; t < d.drift.size(); ++t) {
    double queue_total = 0.0;
    for (auto q : tr.queues(t)) queue_total += static_cast<double>(q);
    double weighted_age = 0.0;
    const auto ages = tr.ages(t);
    for (std::size_t k = 0; k < ages.size(); ++k)
      weighted_age += p.mus.at(k) / mu_sum * static_cast<double>(ages[k]);
    out[t] = d.drift[t] + p.gamma * epsilon / (n * p.beta) * queue_total + weighted_age - constant;
  }
  return out;
}

}  // namespace aoi
