#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "aoi/errors.hpp"
#include "aoi/metrics.hpp"
#include "aoi/process.hpp"
#include "aoi/random.hpp"

namespace aoi {

// Deterministic-case PoA bound: p_max / ((N - 1) beta + p_max).
inline double thm1_bound(double beta, std::size_t n_pois, double p_max) {
  if (n_pois < 2) throw DomainError("deterministic PoA bound needs N >= 2");
  if (!(beta >= 0.0)) throw DomainError("beta must be >= 0");
  if (!(p_max > 0.0)) throw DomainError("p_max must be > 0");
  return p_max / ((static_cast<double>(n_pois) - 1.0) * beta + p_max);
}

// B(gamma) = gamma / (2 lambda) (E[A^2] + sum_n E[R_n^2])
inline double B_of_gamma(double gamma, const ProcessSpec& spec) {
  return gamma / (2.0 * spec.lambda()) *
         (spec.arrival_second_moment() + spec.service_second_moment_sum());
}

// Looser variant with N R_max^2 in place of sum_n E[R_n^2].
inline double B_of_gamma_conservative(double gamma, const ProcessSpec& spec) {
  const double r_max = spec.r_max();
  return gamma / (2.0 * spec.lambda()) *
         (spec.arrival_second_moment() + static_cast<double>(spec.size()) * r_max * r_max);
}

// M = eps / (2 N (mu_sum - lambda)) (Var A + sum_n Var R_n + (mu_sum - lambda)^2) - eps R_max / 2
inline double M_constant(double epsilon, const ProcessSpec& spec) {
  const double gap = spec.mu_sum() - spec.lambda();
  if (!(gap > 0.0)) throw DomainError("M needs lambda < mu_sum");
  const double n = static_cast<double>(spec.size());
  return epsilon / (2.0 * n * gap) *
             (spec.arrival_variance() + spec.service_variance_sum() + gap * gap) -
         0.5 * epsilon * static_cast<double>(spec.r_max());
}

// Stochastic-case upper bound on J under the selfish rule: B + beta (N/q - 1) + p_max.
inline double J_upper_bound(double beta, double gamma, const ProcessSpec& spec, double p_max) {
  const double q = spec.q();
  if (!(q > 0.0)) throw DomainError("q must be > 0");
  return B_of_gamma(gamma, spec) + beta * (static_cast<double>(spec.size()) / q - 1.0) + p_max;
}

inline double thm2_bound(double beta, double gamma, double epsilon, const ProcessSpec& spec,
                         double p_max) {
  const double q = spec.q();
  if (!(q > 0.0)) throw DomainError("q must be > 0");
  if (!(beta >= 0.0)) throw DomainError("beta must be >= 0");
  const double n = static_cast<double>(spec.size());
  const double b = B_of_gamma(gamma, spec);
  const double m = M_constant(epsilon, spec);
  const double age_term = n / q - spec.mu_sum() / (2.0 * q * spec.mu_max()) - 0.5;
  const double denom = b + beta * (n / q - 1.0) + p_max;
  return (b - gamma * m + p_max + beta * age_term) / denom;
}

// beta -> infinity limit of thm2_bound: 1 - (1/2)(mu_sum/(q mu_max) - 1)/(N/q - 1).
inline double thm2_asymptotic_bound(const ProcessSpec& spec) {
  const double q = spec.q();
  const double n = static_cast<double>(spec.size());
  if (!(q > 0.0)) throw DomainError("q must be > 0");
  if (!(n / q - 1.0 > 0.0)) throw DomainError("asymptotic bound undefined for N/q = 1");
  return 1.0 - 0.5 * (spec.mu_sum() / (q * spec.mu_max()) - 1.0) / (n / q - 1.0);
}

// Lower bound on sum_n (mu_n / mu_sum) Delta-bar_n under any policy.
inline double weighted_age_lower_bound(const ProcessSpec& spec) {
  const double q = spec.q();
  if (!(q > 0.0)) throw DomainError("q must be > 0");
  return 0.5 * (spec.mu_sum() / (q * spec.mu_max()) - 1.0);
}

// Lower bound M N / eps on sum_n Q-bar_n. May be <= 0 (vacuous).
inline double queue_lower_bound_analytic(double epsilon, const ProcessSpec& spec) {
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be > 0");
  return M_constant(epsilon, spec) * static_cast<double>(spec.size()) / epsilon;
}

struct BoundsReport {
  double epsilon = 0.0;
  double B_gamma = 0.0;
  double B_gamma_conservative = 0.0;
  double M = 0.0;
  double thm1_poa_ub = 0.0;
  double thm2_poa_ub = 0.0;
  double thm2_asymptotic_ub = 0.0;
  double det_age_lb = 0.0;
  double weighted_age_lb = 0.0;
  double queue_lb_analytic = 0.0;
  double J_upper_thm2 = 0.0;
};

// Every closed-form quantity for one (beta, gamma) cell. epsilon is the maximal feasible one.
inline BoundsReport evaluate_bounds(const ProcessSpec& spec, double beta, double gamma,
                                    double p_max) {
  BoundsReport r;
  r.epsilon = compute_epsilon(spec);
  r.B_gamma = B_of_gamma(gamma, spec);
  r.B_gamma_conservative = B_of_gamma_conservative(gamma, spec);
  r.M = M_constant(r.epsilon, spec);
  r.thm1_poa_ub = spec.size() >= 2 ? thm1_bound(beta, spec.size(), p_max) : 1.0;
  r.thm2_poa_ub = thm2_bound(beta, gamma, r.epsilon, spec, p_max);
  r.thm2_asymptotic_ub =
      spec.size() / spec.q() > 1.0 ? thm2_asymptotic_bound(spec) : 0.0;
  r.det_age_lb = static_cast<double>(spec.size()) - 1.0;
  r.weighted_age_lb = weighted_age_lower_bound(spec);
  r.queue_lb_analytic = queue_lower_bound_analytic(r.epsilon, spec);
  r.J_upper_thm2 = J_upper_bound(beta, gamma, spec, p_max);
  return r;
}

// Single-server queue fed by A[t] and served by sum_n R_n[t]:
//   Phi[t+1] = max(Phi[t] + A[t] - sum_n R_n[t], 0), Phi[0] = 0.
class PooledQueue {
 public:
  std::int64_t value() const noexcept { return phi_; }

  void step(int arrivals, std::span<const int> services) {
    std::int64_t served = 0;
    for (int r : services) served += r;
    phi_ = std::max<std::int64_t>(phi_ + arrivals - served, 0);
  }

 private:
  std::int64_t phi_ = 0;
};

struct PooledQueueRun {
  std::vector<std::int64_t> trajectory;  // Phi[0..horizon]
  double mean = 0.0;                      // over slots 0..horizon-1
};

// Draws inputs exactly as a system run on the same process stream would.
inline PooledQueueRun pooled_queue_run(const ProcessSpec& spec, std::uint64_t horizon, Rng& rng) {
  PooledQueueRun out;
  out.trajectory.reserve(horizon + 1);
  PooledQueue phi;
  SlotInputs in;
  double sum = 0.0;
  for (std::uint64_t t = 0; t < horizon; ++t) {
    out.trajectory.push_back(phi.value());
    sum += static_cast<double>(phi.value());
    sample_slot_inputs(spec, rng, in);
    phi.step(in.arrivals, in.services);
  }
  out.trajectory.push_back(phi.value());
  out.mean = horizon ? sum / static_cast<double>(horizon) : 0.0;
  return out;
}

}  // namespace aoi
