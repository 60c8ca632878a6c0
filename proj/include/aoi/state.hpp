#pragma once

#include <cstdint>
#include <vector>

#include "aoi/process.hpp"
#include "aoi/random.hpp"

namespace aoi {

struct PoiState {
  double price = 0.0;            // p_n[t]
  double record = 0.0;           // r_n[t], the platform's stored copy
  std::int64_t queue = 0;        // Q_n[t]
  std::uint64_t age = 0;         // Delta_n[t] = t - u_n[t]
  std::uint64_t last_update = 0; // u_n[t], first slot at which the current record is visible
  std::uint64_t reported_at = 0; // slot whose true price the record holds

  friend bool operator==(const PoiState&, const PoiState&) = default;
};

struct SystemState {
  std::vector<PoiState> pois;
  std::uint64_t slot = 0;

  std::size_t size() const noexcept { return pois.size(); }

  std::uint64_t max_age() const noexcept {
    std::uint64_t m = 0;
    for (const auto& p : pois) m = m < p.age ? p.age : m;
    return m;
  }
  std::int64_t queue_sum() const noexcept {
    std::int64_t s = 0;
    for (const auto& p : pois) s += p.queue;
    return s;
  }

  friend bool operator==(const SystemState&, const SystemState&) = default;
};

// Cold start: r_n[0] = p_n[0], u_n[0] = 0, Delta_n[0] = 0, Q_n[0] = 0.
inline SystemState make_initial_state(const std::vector<double>& prices) {
  SystemState s;
  s.pois.resize(prices.size());
  for (std::size_t n = 0; n < prices.size(); ++n) {
    s.pois[n].price = prices[n];
    s.pois[n].record = prices[n];
  }
  return s;
}

inline SystemState make_initial_state(const PriceProcess& pp, std::size_t n, Rng& price_rng) {
  return make_initial_state(pp.initial_prices(n, price_rng));
}

// Call once at the start of every slot, before the policy observes the state.
inline void advance_price(const PriceProcess& pp, SystemState& state, Rng& price_rng) {
  if (!pp.changes_at(state.slot)) return;
  for (auto& poi : state.pois) poi.price = pp.redraw(poi.price, price_rng);
}

}  // namespace aoi
