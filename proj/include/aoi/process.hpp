#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "aoi/distribution.hpp"
#include "aoi/errors.hpp"
#include "aoi/random.hpp"

namespace aoi {

// Arrival process A[t] and per-PoI service processes R_n[t], i.i.d. over slots.
class ProcessSpec {
 public:
  ProcessSpec(Distribution arrival, std::vector<Distribution> services, int r_max = -1)
      : arrival_(std::move(arrival)), services_(std::move(services)) {
    if (services_.empty()) throw ConfigError("at least one PoI is required");
    int observed_max = 0;
    for (const auto& s : services_) observed_max = std::max(observed_max, s.max_value());
    r_max_ = r_max < 0 ? observed_max : r_max;
    if (observed_max > r_max_) throw ConfigError("service support exceeds R_max");
    if (!(arrival_.mean() > 0.0)) throw ConfigError("arrival rate lambda must be > 0");
    for (const auto& s : services_)
      if (!(s.mean() > 0.0)) throw ConfigError("every service rate mu_n must be > 0");
  }

  static ProcessSpec symmetric(Distribution arrival, Distribution service, std::size_t n) {
    return ProcessSpec(std::move(arrival), std::vector<Distribution>(n, service));
  }

  std::size_t size() const noexcept { return services_.size(); }
  const Distribution& arrival() const noexcept { return arrival_; }
  const std::vector<Distribution>& services() const noexcept { return services_; }
  const Distribution& service(std::size_t n) const { return services_.at(n); }
  int r_max() const noexcept { return r_max_; }

  double lambda() const noexcept { return arrival_.mean(); }
  double q() const noexcept { return arrival_.prob_positive(); }
  double arrival_second_moment() const noexcept { return arrival_.second_moment(); }
  double arrival_variance() const noexcept { return arrival_.variance(); }

  double mu(std::size_t n) const { return services_.at(n).mean(); }
  std::vector<double> mus() const {
    std::vector<double> out;
    out.reserve(services_.size());
    for (const auto& s : services_) out.push_back(s.mean());
    return out;
  }
  double mu_sum() const {
    double total = 0.0;
    for (const auto& s : services_) total += s.mean();
    return total;
  }
  double mu_max() const {
    double m = 0.0;
    for (const auto& s : services_) m = std::max(m, s.mean());
    return m;
  }
  double mu_min() const {
    double m = services_.front().mean();
    for (const auto& s : services_) m = std::min(m, s.mean());
    return m;
  }
  double service_second_moment_sum() const {
    double total = 0.0;
    for (const auto& s : services_) total += s.second_moment();
    return total;
  }
  double service_variance_sum() const {
    double total = 0.0;
    for (const auto& s : services_) total += s.variance();
    return total;
  }
  // Stationary weights mu_n / mu_sum.
  std::vector<double> service_weights() const {
    auto w = mus();
    const double total = mu_sum();
    for (auto& x : w) x /= total;
    return w;
  }

  // Every slot has exactly one arrival and every PoI serves exactly one user.
  bool is_unit_deterministic() const {
    const auto one = Distribution::deterministic(1);
    return arrival_ == one &&
           std::all_of(services_.begin(), services_.end(), [&](const auto& s) { return s == one; });
  }

  friend bool operator==(const ProcessSpec&, const ProcessSpec&) = default;

 private:
  Distribution arrival_;
  std::vector<Distribution> services_;
  int r_max_ = 0;
};

struct SlotInputs {
  int arrivals = 0;
  std::vector<int> services;
};

// Draws A[t] then R_1[t], ..., R_N[t] from the process stream.
inline void sample_slot_inputs(const ProcessSpec& spec, Rng& rng, SlotInputs& out) {
  out.arrivals = spec.arrival().sample(rng);
  out.services.resize(spec.size());
  for (std::size_t n = 0; n < spec.size(); ++n) out.services[n] = spec.service(n).sample(rng);
}

inline SlotInputs sample_slot_inputs(const ProcessSpec& spec, Rng& rng) {
  SlotInputs out;
  sample_slot_inputs(spec, rng, out);
  return out;
}

// Per-PoI true state ("price") process.
//
// Discrete: prices live in a finite set and, every `period` slots, each PoI
// jumps to a different value chosen uniformly from the rest of the set.
// UniformContinuous: every slot, each price is redrawn uniformly on [p_min, p_max).
struct PriceProcess {
  enum class Kind { Discrete, UniformContinuous };

  Kind kind = Kind::Discrete;
  std::vector<double> values;       // Discrete only, ascending
  std::uint64_t period = 1;         // Discrete only
  double p_min = 0.0;
  double p_max = 1.0;
  std::vector<double> initial;      // empty: drawn at random

  static PriceProcess discrete(std::vector<double> values, std::uint64_t period,
                               std::vector<double> initial = {}) {
    PriceProcess pp;
    pp.kind = Kind::Discrete;
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    if (values.empty()) throw ConfigError("price value set must be non-empty");
    if (period == 0) throw ConfigError("price change period must be positive");
    pp.values = std::move(values);
    pp.period = period;
    pp.p_min = pp.values.front();
    pp.p_max = pp.values.back();
    pp.initial = std::move(initial);
    pp.check_initial();
    if (!(pp.p_min > 0.0)) throw ConfigError("prices must be positive");
    return pp;
  }

  static PriceProcess uniform_continuous(double p_min, double p_max,
                                         std::vector<double> initial = {}) {
    if (!(p_min >= 0.0 && p_max > p_min)) throw ConfigError("need 0 <= p_min < p_max");
    PriceProcess pp;
    pp.kind = Kind::UniformContinuous;
    pp.p_min = p_min;
    pp.p_max = p_max;
    pp.initial = std::move(initial);
    pp.check_initial();
    return pp;
  }

  double draw_uniform(Rng& rng) const { return p_min + (p_max - p_min) * uniform01(rng); }

  std::vector<double> initial_prices(std::size_t n, Rng& rng) const {
    if (!initial.empty()) {
      if (initial.size() != n)
        throw ConfigError("initial price count " + std::to_string(initial.size()) +
                          " does not match N=" + std::to_string(n));
      return initial;
    }
    std::vector<double> out(n);
    for (auto& p : out)
      p = kind == Kind::Discrete ? values[uniform_index(rng, values.size())] : draw_uniform(rng);
    return out;
  }

  // Whether prices are redrawn at the start of this slot.
  bool changes_at(std::uint64_t slot) const noexcept {
    if (slot == 0) return false;
    return kind == Kind::UniformContinuous || slot % period == 0;
  }

  // New discrete price: uniform over the value set minus `current`.
  double redraw(double current, Rng& rng) const {
    if (kind == Kind::UniformContinuous) return draw_uniform(rng);
    if (values.size() < 2)
      throw ConfigError("price change due but the value set has fewer than 2 elements");
    const auto pos = std::find(values.begin(), values.end(), current);
    if (pos == values.end()) return values[uniform_index(rng, values.size())];
    const auto skip = static_cast<std::size_t>(pos - values.begin());
    auto k = uniform_index(rng, values.size() - 1);
    if (k >= skip) ++k;
    return values[k];
  }

  friend bool operator==(const PriceProcess&, const PriceProcess&) = default;

 private:
  void check_initial() const {
    for (double p : initial) {
      if (!(p >= p_min && p <= p_max)) throw ConfigError("initial price outside [p_min, p_max]");
    }
  }
};

}  // namespace aoi
