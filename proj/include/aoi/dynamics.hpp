#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "aoi/policy.hpp"
#include "aoi/process.hpp"
#include "aoi/state.hpp"

namespace aoi {

struct SlotOutcome {
  int arrivals = 0;                      // A[t]
  std::size_t selected = 0;              // n*[t]
  std::vector<std::uint8_t> selection;   // S*_n[t], one-hot
  std::vector<int> services;             // R_n[t]
  std::vector<std::uint8_t> record_updated;
};

// Executes slot t = state.slot with the given inputs:
//   1. the policy observes (Delta, Q, r) and picks n*[t] (every slot);
//   2. if A[t] > 0 the chosen record is refreshed with p[t]; the fresh record
//      is first observed at t + 1, so u <- t + 1 keeps Delta = t - u;
//   3. Q_n <- max(Q_n + A[t] S*_n - R_n, 0);
//   4. Delta_n <- 0 if S*_n 1{A>0} = 1, else Delta_n + 1;
//   5. t <- t + 1.
// All A[t] arrivals join the same PoI.
inline void step(SystemState& state, Policy& policy, const SlotInputs& in, Rng& policy_rng,
                 SlotOutcome& out) {
  const std::size_t n_pois = state.pois.size();
  const std::size_t chosen = policy.select(state.pois, in.arrivals, policy_rng);
  const bool update = in.arrivals > 0;

  out.arrivals = in.arrivals;
  out.selected = chosen;
  out.selection.assign(n_pois, 0);
  out.selection[chosen] = 1;
  out.services.assign(in.services.begin(), in.services.end());
  out.record_updated.assign(n_pois, 0);

  for (std::size_t n = 0; n < n_pois; ++n) {
    auto& poi = state.pois[n];
    const bool joined = n == chosen;
    const std::int64_t next =
        poi.queue + (joined ? in.arrivals : 0) - static_cast<std::int64_t>(in.services[n]);
    poi.queue = std::max<std::int64_t>(next, 0);
    if (joined && update) {
      poi.record = poi.price;
      poi.reported_at = state.slot;
      poi.last_update = state.slot + 1;
      poi.age = 0;
      out.record_updated[n] = 1;
    } else {
      poi.age += 1;
    }
  }
  ++state.slot;
}

inline SlotOutcome step(SystemState& state, Policy& policy, const SlotInputs& in, Rng& policy_rng) {
  SlotOutcome out;
  step(state, policy, in, policy_rng, out);
  return out;
}

}  // namespace aoi
