#pragma once

#include <cstdint>
#include <optional>

#include "aoi/bounds.hpp"
#include "aoi/dynamics.hpp"
#include "aoi/metrics.hpp"
#include "aoi/policy.hpp"
#include "aoi/process.hpp"
#include "aoi/random.hpp"
#include "aoi/state.hpp"
#include "aoi/trajectory.hpp"

namespace aoi {

struct SimulationOptions {
  std::uint64_t horizon = 10000;
  std::uint64_t warmup = 1000;
  std::optional<CostWeights> cost;  // enables the slot-by-slot J accumulator
  bool record_trajectory = false;
  bool couple_pooled_queue = false;  // track Phi[t] on the same A[t], R_n[t]
};

struct PooledCoupling {
  std::uint64_t violations = 0;  // slots with Phi[t] > sum_n Q_n[t]
  double mean_phi = 0.0;
};

struct RunResult {
  RunMetrics metrics;
  SystemState final_state;
  std::optional<Trajectory> trajectory;
  std::optional<PooledCoupling> pooled;
};

// One seeded run. Identical (inputs, seed) give bit-identical results; runs
// with the same seed share A[t], R_n[t] and prices regardless of the policy.
inline RunResult simulate(const ProcessSpec& spec, const PriceProcess& prices, Policy policy,
                          std::uint64_t seed, const SimulationOptions& opt) {
  RunStreams streams(seed);
  const std::size_t n = spec.size();
  SystemState state = make_initial_state(prices, n, streams.price);
  MetricsAccumulator acc(opt.horizon, opt.warmup, spec.service_weights(), opt.cost);

  RunResult result;
  if (opt.record_trajectory) result.trajectory.emplace(n);
  PooledQueue phi;
  PooledCoupling coupling;
  double phi_sum = 0.0;

  SlotInputs in;
  SlotOutcome out;
  for (std::uint64_t t = 0; t < opt.horizon; ++t) {
    advance_price(prices, state, streams.price);
    acc.observe(state);
    if (opt.couple_pooled_queue) {
      if (phi.value() > state.queue_sum()) ++coupling.violations;
      phi_sum += static_cast<double>(phi.value());
    }
    sample_slot_inputs(spec, streams.process, in);
    if (opt.couple_pooled_queue) phi.step(in.arrivals, in.services);
    if (result.trajectory) {
      const SystemState before = state;
      step(state, policy, in, streams.policy, out);
      result.trajectory->record(before, out);
    } else {
      step(state, policy, in, streams.policy, out);
    }
  }
  if (result.trajectory) result.trajectory->close(state);
  if (opt.couple_pooled_queue) {
    if (phi.value() > state.queue_sum()) ++coupling.violations;
    coupling.mean_phi = opt.horizon ? phi_sum / static_cast<double>(opt.horizon) : 0.0;
    result.pooled = coupling;
  }
  result.metrics = acc.finalize();
  result.final_state = std::move(state);
  return result;
}

}  // namespace aoi
