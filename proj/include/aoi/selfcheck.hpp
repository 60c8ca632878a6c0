#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "aoi/bounds.hpp"
#include "aoi/config.hpp"
#include "aoi/harness.hpp"
#include "aoi/simulation.hpp"

namespace aoi {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace detail {

inline ProcessSpec random_process(Rng& rng, std::size_t n) {
  const double lambda = 0.2 + 0.7 * uniform01(rng);
  std::vector<Distribution> services;
  for (std::size_t i = 0; i < n; ++i) services.push_back(Distribution::bernoulli(0.05 + 0.9 * uniform01(rng)));
  if (uniform01(rng) < 0.5) return ProcessSpec(Distribution::bernoulli(lambda), std::move(services));
  // Arrivals in {0, 1, 2} with mean lambda.
  const double p2 = 0.25 * lambda * uniform01(rng);
  const double p1 = lambda - 2.0 * p2;
  return ProcessSpec(Distribution::general({1.0 - p1 - p2, p1, p2}), std::move(services));
}

inline Policy random_policy(Rng& rng, const ProcessSpec& spec) {
  switch (uniform_index(rng, 6)) {
    case 0: return Policy(SelfishLinear{2.0 * uniform01(rng), 2.0 * uniform01(rng)});
    case 1: return Policy(PriceGreedy{uniform01(rng)});
    case 2: return Policy(RoundRobin{});
    case 3: return Policy(JoinShortestQueue{});
    case 4: return Policy(MaxAge{});
    default: return Policy::stationary_randomized(spec);
  }
}

}  // namespace detail

// Quick sample-path checks of the model's structural invariants.
inline std::vector<CheckResult> run_selfcheck(std::uint64_t seed = 7) {
  std::vector<CheckResult> out;
  Rng rng(seed);
  const auto prices = PriceProcess::discrete(default_price_set(), 100);

  {
    // Age reconstruction, record staleness and one-hot selection along random runs.
    bool ok = true;
    std::string detail;
    for (int trial = 0; trial < 20 && ok; ++trial) {
      const std::size_t n = 2 + uniform_index(rng, 9);
      const auto spec = detail::random_process(rng, n);
      auto policy = detail::random_policy(rng, spec);
      RunStreams streams(rng());
      auto state = make_initial_state(prices, n, streams.price);
      std::vector<std::vector<double>> history;
      SlotInputs in;
      SlotOutcome o;
      for (std::uint64_t t = 0; t < 2000 && ok; ++t) {
        advance_price(prices, state, streams.price);
        std::vector<double> p;
        for (const auto& poi : state.pois) p.push_back(poi.price);
        history.push_back(std::move(p));
        for (std::size_t k = 0; k < n; ++k) {
          const auto& poi = state.pois[k];
          if (poi.age != state.slot - poi.last_update) ok = false, detail = "age != t - u";
          if (poi.record != history[poi.reported_at][k]) ok = false, detail = "stale record mismatch";
        }
        sample_slot_inputs(spec, streams.process, in);
        step(state, policy, in, streams.policy, o);
        int ones = 0;
        for (auto s : o.selection) ones += s;
        if (ones != 1) ok = false, detail = "selection not one-hot";
      }
    }
    out.push_back({"age reconstruction / record staleness / one-hot selection", ok, detail});
  }

  {
    std::uint64_t violations = 0;
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t n = 2 + uniform_index(rng, 9);
      const auto spec = detail::random_process(rng, n);
      SimulationOptions opt;
      opt.horizon = 2000;
      opt.warmup = 0;
      opt.couple_pooled_queue = true;
      violations += simulate(spec, prices, detail::random_policy(rng, spec), rng(), opt).pooled->violations;
    }
    out.push_back({"pooled queue dominance Phi[t] <= sum Q[t]", violations == 0,
                   std::to_string(violations) + " violations"});
  }

  {
    const auto one = Distribution::deterministic(1);
    const auto spec = ProcessSpec::symmetric(one, one, 10);
    SimulationOptions opt;
    opt.horizon = 2000;
    opt.warmup = 200;
    const auto rr = simulate(spec, prices, Policy(RoundRobin{}), seed, opt);
    out.push_back({"round robin mean max age = N - 1 (deterministic case)",
                   rr.metrics.mean_max_age == 9.0,
                   "measured " + text::format_double(rr.metrics.mean_max_age)});
    out.push_back({"no queueing in the deterministic case", rr.metrics.mean_queue_sum == 0.0,
                   "mean queue sum " + text::format_double(rr.metrics.mean_queue_sum)});

    opt.record_trajectory = true;
    const double beta = 0.2;
    const auto selfish = simulate(spec, prices, Policy(SelfishLinear{beta, 1.0}), seed, opt);
    double worst = -1e300;
    for (double r : age_drift_residuals(*selfish.trajectory, beta, prices.p_max))
      worst = std::max(worst, r);
    out.push_back({"age drift bound holds slot by slot (selfish, deterministic)", worst <= 1e-12,
                   "max residual " + text::format_double(worst)});
  }

  {
    bool ok = true;
    std::vector<PoiState> pois(6);
    for (int trial = 0; trial < 200 && ok; ++trial) {
      for (auto& p : pois) {
        p.age = uniform_index(rng, 20);
        p.queue = static_cast<std::int64_t>(uniform_index(rng, 5));
        p.record = default_price_set()[uniform_index(rng, 4)];
      }
      const Policy pol(SelfishLinear{0.25 * static_cast<double>(1 + uniform_index(rng, 8)), 0.5},
                       TieBreak::LowestIndex);
      auto shifted = pois;
      const double c = 0.25 * static_cast<double>(uniform_index(rng, 8));
      for (auto& p : shifted) p.record -= c;
      if (pol.argmax_set(pois) != pol.argmax_set(shifted)) ok = false;
    }
    out.push_back({"argmax invariance under common shifts", ok, ""});
  }

  {
    auto cfg = preset_fig5();
    cfg.horizon = 20'000;
    cfg.warmup = 2'000;
    cfg.replications = 2;
    cfg.betas = {1.0};
    cfg.gammas = {1.0};
    const auto a = format_csv(run_experiment(cfg).rows);
    const auto b = format_csv(run_experiment(cfg).rows);
    out.push_back({"seed determinism (identical CSV bytes)", a == b, ""});

    const double eps = compute_epsilon(cfg.process);
    SimulationOptions opt;
    opt.horizon = 20'000;
    opt.warmup = 2'000;
    opt.cost = CostWeights{2.0, 1.0, eps};
    const auto r = simulate(cfg.process, cfg.prices, Policy(SelfishLinear{2.0, 1.0}), 3, opt);
    const double recomputed = cost_J(r.metrics, 2.0, 1.0, eps, cfg.process);
    const double diff = std::abs(recomputed - r.metrics.cost_J);
    out.push_back({"J decomposition", diff <= 1e-12 * std::max(1.0, std::abs(recomputed)),
                   "difference " + text::format_double(diff)});
  }
  return out;
}

}  // namespace aoi
