#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "aoi/dynamics.hpp"
#include "aoi/state.hpp"

namespace aoi {

// Per-slot record of a run: the state observed at slot t and what happened in it.
class Trajectory {
 public:
  explicit Trajectory(std::size_t n_pois = 0) : n_(n_pois) {}

  void record(const SystemState& s, const SlotOutcome& o) {
    for (const auto& p : s.pois) {
      ages_.push_back(p.age);
      queues_.push_back(p.queue);
      records_.push_back(p.record);
    }
    arrivals_.push_back(o.arrivals);
    selected_.push_back(o.selected);
  }

  // State after the last recorded slot, so differences are defined for every slot.
  void close(const SystemState& s) {
    for (const auto& p : s.pois) {
      ages_.push_back(p.age);
      queues_.push_back(p.queue);
      records_.push_back(p.record);
    }
  }

  std::size_t pois() const noexcept { return n_; }
  // Number of slots with a recorded outcome.
  std::size_t slots() const noexcept { return arrivals_.size(); }
  // Number of stored states (slots() + 1 once closed).
  std::size_t states() const noexcept { return n_ ? ages_.size() / n_ : 0; }

  std::span<const std::uint64_t> ages(std::size_t t) const { return {ages_.data() + t * n_, n_}; }
  std::span<const std::int64_t> queues(std::size_t t) const { return {queues_.data() + t * n_, n_}; }
  std::span<const double> records(std::size_t t) const { return {records_.data() + t * n_, n_}; }
  int arrivals(std::size_t t) const { return arrivals_.at(t); }
  std::size_t selected(std::size_t t) const { return selected_.at(t); }

  std::uint64_t max_age(std::size_t t) const {
    std::uint64_t m = 0;
    for (auto a : ages(t)) m = a > m ? a : m;
    return m;
  }

 private:
  std::size_t n_;
  std::vector<std::uint64_t> ages_;
  std::vector<std::int64_t> queues_;
  std::vector<double> records_;
  std::vector<int> arrivals_;
  std::vector<std::size_t> selected_;
};

}  // namespace aoi
