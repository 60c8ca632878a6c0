#include <gtest/gtest.h>

#include "aoi/dynamics.hpp"
#include "aoi/simulation.hpp"

using namespace aoi;

namespace {

SystemState three_pois() {
  auto s = make_initial_state({0.5, 0.25, 1.0});
  s.slot = 20;
  for (std::size_t n = 0; n < 3; ++n) {
    s.pois[n].last_update = s.slot;  // age 0 before tweaks below
  }
  return s;
}

void set_age(SystemState& s, std::size_t n, std::uint64_t age) {
  s.pois[n].age = age;
  s.pois[n].last_update = s.slot - age;
}

}  // namespace

TEST(Step, QueueGrowsByJoinedArrivalsMinusService) {
  auto s = three_pois();
  s.pois[0].queue = 3;
  Policy rr(RoundRobin{0});
  Rng rng(1);
  const auto out = step(s, rr, {2, {1, 0, 0}}, rng);
  EXPECT_EQ(out.selected, 0u);
  EXPECT_EQ(s.pois[0].queue, 4);
}

TEST(Step, QueueClampsAtZero) {
  auto s = three_pois();
  Policy rr(RoundRobin{0});
  Rng rng(1);
  step(s, rr, {1, {0, 2, 0}}, rng);
  EXPECT_EQ(s.pois[1].queue, 0);
}

TEST(Step, AgeResetsOnUpdateAndGrowsOtherwise) {
  auto s = three_pois();
  set_age(s, 0, 5);
  set_age(s, 1, 7);
  s.pois[0].price = 0.75;
  Policy rr(RoundRobin{0});
  Rng rng(1);
  const auto t = s.slot;
  const auto out = step(s, rr, {1, {0, 0, 0}}, rng);
  EXPECT_EQ(s.pois[0].age, 0u);
  EXPECT_EQ(s.pois[0].record, 0.75);
  EXPECT_EQ(s.pois[0].reported_at, t);
  EXPECT_EQ(s.pois[1].age, 8u);
  EXPECT_EQ(out.record_updated, (std::vector<std::uint8_t>{1, 0, 0}));
  EXPECT_EQ(out.selection, (std::vector<std::uint8_t>{1, 0, 0}));
  EXPECT_EQ(s.slot, t + 1);
}

TEST(Step, NoArrivalsMeansNoUpdate) {
  auto s = three_pois();
  set_age(s, 2, 4);
  Policy p(MaxAge{});
  Rng rng(1);
  const auto out = step(s, p, {0, {0, 0, 0}}, rng);
  EXPECT_EQ(out.selected, 2u);
  EXPECT_EQ(s.pois[2].age, 5u);
  EXPECT_EQ(out.record_updated, (std::vector<std::uint8_t>(3, 0)));
  for (const auto& p : s.pois) EXPECT_EQ(p.queue, 0);
}

TEST(Step, AllArrivalsJoinOnePoi) {
  auto s = three_pois();
  Policy p(JoinShortestQueue{}, TieBreak::LowestIndex);
  Rng rng(1);
  step(s, p, {5, {0, 0, 0}}, rng);
  EXPECT_EQ(s.pois[0].queue, 5);
  EXPECT_EQ(s.pois[1].queue + s.pois[2].queue, 0);
}

TEST(Simulation, AgeReconstructionAndRecordStalenessOnRandomRuns) {
  Rng meta(2024);
  const auto prices = PriceProcess::discrete({0.25, 0.5, 0.75, 1.0}, 13);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + uniform_index(meta, 8);
    const auto spec = ProcessSpec::symmetric(Distribution::bernoulli(0.2 + 0.7 * uniform01(meta)),
                                             Distribution::general({0.5, 0.3, 0.2}), n);
    Policy policy(SelfishLinear{uniform01(meta), uniform01(meta)});
    RunStreams streams(meta());
    auto state = make_initial_state(prices, n, streams.price);
    std::vector<std::vector<double>> price_history;
    SlotInputs in;
    SlotOutcome out;
    for (int t = 0; t < 3000; ++t) {
      advance_price(prices, state, streams.price);
      price_history.emplace_back();
      for (const auto& p : state.pois) price_history.back().push_back(p.price);
      for (std::size_t k = 0; k < n; ++k) {
        const auto& p = state.pois[k];
        ASSERT_EQ(p.age, state.slot - p.last_update);
        ASSERT_EQ(p.record, price_history[p.reported_at][k]);
        ASSERT_GE(p.queue, 0);
      }
      sample_slot_inputs(spec, streams.process, in);
      step(state, policy, in, streams.policy, out);
      int ones = 0;
      for (auto x : out.selection) ones += x;
      ASSERT_EQ(ones, 1);
      ASSERT_EQ(out.selection[out.selected], 1);
      for (std::size_t k = 0; k < n; ++k)
        ASSERT_EQ(out.record_updated[k] == 1, k == out.selected && in.arrivals > 0);
    }
  }
}

TEST(Simulation, DeterministicCaseHasNoQueueing) {
  const auto one = Distribution::deterministic(1);
  const auto spec = ProcessSpec::symmetric(one, one, 6);
  const auto prices = PriceProcess::discrete({0.25, 0.5, 0.75, 1.0}, 100);
  SimulationOptions opt;
  opt.horizon = 5000;
  opt.warmup = 0;
  opt.record_trajectory = true;
  for (auto policy : {Policy(SelfishLinear{0.1, 1.0}), Policy(PriceGreedy{1.0}), Policy(MaxAge{})}) {
    const auto r = simulate(spec, prices, policy, 4, opt);
    for (std::size_t t = 0; t < r.trajectory->states(); ++t)
      for (auto q : r.trajectory->queues(t)) ASSERT_EQ(q, 0);
  }
}

TEST(Simulation, IdenticalSeedGivesIdenticalTrajectory) {
  const auto spec =
      ProcessSpec::symmetric(Distribution::bernoulli(0.9), Distribution::bernoulli(0.1), 10);
  const auto prices = PriceProcess::discrete({0.25, 0.5, 0.75, 1.0}, 100);
  SimulationOptions opt;
  opt.horizon = 20'000;
  opt.warmup = 2'000;
  const auto a = simulate(spec, prices, Policy(SelfishLinear{1.0, 1.0}), 77, opt);
  const auto b = simulate(spec, prices, Policy(SelfishLinear{1.0, 1.0}), 77, opt);
  EXPECT_EQ(a.final_state, b.final_state);
  EXPECT_EQ(a.metrics.mean_age, b.metrics.mean_age);
  EXPECT_EQ(a.metrics.mean_queue, b.metrics.mean_queue);
  const auto c = simulate(spec, prices, Policy(SelfishLinear{1.0, 1.0}), 78, opt);
  EXPECT_NE(a.final_state, c.final_state);
}

TEST(Simulation, SameSeedSharesInputsAcrossPolicies) {
  const auto spec =
      ProcessSpec::symmetric(Distribution::bernoulli(0.9), Distribution::bernoulli(0.1), 4);
  const auto prices = PriceProcess::discrete({0.25, 0.5, 0.75, 1.0}, 100);
  SimulationOptions opt;
  opt.horizon = 2000;
  opt.warmup = 0;
  opt.record_trajectory = true;
  const auto a = simulate(spec, prices, Policy(SelfishLinear{1.0, 1.0}), 5, opt);
  const auto b = simulate(spec, prices, Policy(JoinShortestQueue{}), 5, opt);
  for (std::size_t t = 0; t < a.trajectory->slots(); ++t)
    ASSERT_EQ(a.trajectory->arrivals(t), b.trajectory->arrivals(t));
}
