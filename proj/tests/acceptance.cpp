// End-to-end acceptance run: one PASS/FAIL line per criterion, nonzero exit on
// any failure. Uses the shipped presets at their default horizons.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "aoi/aoi.hpp"
#include "oracles.hpp"

using namespace aoi;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;

  void fail(const std::string& why) {
    if (passed) detail.clear();
    passed = false;
    detail += (detail.empty() ? "" : "; ") + why;
  }
};

std::string fmt(double v) { return text::format_double(v); }

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

int failures = 0;

void report(const char* id, const char* title, const Outcome& o, double secs) {
  std::printf("%s criterion %s: %s (%.1fs)%s%s\n", o.passed ? "PASS" : "FAIL", id, title, secs,
              o.detail.empty() ? "" : " - ", o.detail.c_str());
  std::fflush(stdout);
  if (!o.passed) ++failures;
}

void run(const char* id, const char* title, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.fail(std::string("exception: ") + e.what());
  }
  report(id, title, o, seconds_since(start));
}

ExperimentConfig with_all_cores(ExperimentConfig c) {
  c.threads = 0;
  return c;
}

// ---- 1 ----------------------------------------------------------------------

Outcome round_robin_optimality() {
  auto c = preset_fig3();
  c.policy = "round_robin";
  c.betas = {1.0};
  c.replications = 1;
  const auto start = std::chrono::steady_clock::now();
  const auto rows = run_experiment(c).rows;
  const double secs = seconds_since(start);
  Outcome o;
  o.detail = "mean max age " + fmt(rows.at(0).mean_max_age) + " over " +
             std::to_string(c.horizon - c.warmup) + " slots";
  if (rows.at(0).mean_max_age != 9.0) o.fail("mean max age " + fmt(rows[0].mean_max_age) + " != 9");
  if (secs >= 1.0) o.fail("took " + fmt(secs) + " s");
  return o;
}

// ---- 2 ----------------------------------------------------------------------

Outcome deterministic_bound() {
  const auto rows = run_experiment(with_all_cores(preset_fig3())).rows;
  Outcome o;
  double worst_slack = -1e300;
  for (const auto& r : rows) {
    const double bound = oracle::thm1(r.beta, 10, 1.0);
    worst_slack = std::max(worst_slack, r.poa_measured - bound);
    if (r.poa_measured > bound + 3.0 * r.stderr_poa)
      o.fail("beta " + fmt(r.beta) + ": poa " + fmt(r.poa_measured) + " > bound " + fmt(bound));
    if (r.beta >= 0.5 && r.poa_measured > 0.02)
      o.fail("beta " + fmt(r.beta) + ": poa " + fmt(r.poa_measured) + " > 0.02");
  }
  if (o.passed)
    o.detail = std::to_string(rows.size()) + " betas, max(poa - bound) = " + fmt(worst_slack);
  return o;
}

// ---- 3 ----------------------------------------------------------------------

Outcome greedy_instability() {
  const auto c = preset_fig2();
  SimulationOptions opt;
  opt.horizon = 10'000;
  opt.warmup = c.warmup;
  opt.record_trajectory = true;
  const auto policy = make_policy(c.policy, 0.0, c.gammas[0], c.process, c.tie_break);
  const auto r = simulate(c.process, c.prices, policy,
                          replication_seed(c.base_seed, c.policy, 0.0, c.gammas[0], 0), opt);
  std::vector<double> ages;
  for (std::size_t t = 0; t < r.trajectory->slots(); ++t)
    ages.push_back(static_cast<double>(r.trajectory->ages(t)[0]));
  const double slope = oracle::ls_slope(ages);
  Outcome o;
  o.detail = "slope " + fmt(slope);
  if (!(slope >= 0.9)) o.fail("slope " + fmt(slope) + " < 0.9");
  return o;
}

// ---- 4, 5, 6, 8d share the stochastic runs ------------------------------------

struct StochasticRuns {
  std::vector<ResultRow> fig4;
  std::vector<ResultRow> fig5;
};

const StochasticRuns& stochastic_runs() {
  static const StochasticRuns runs = [] {
    StochasticRuns r;
    r.fig4 = run_experiment(with_all_cores(preset_fig4())).rows;
    r.fig5 = run_experiment(with_all_cores(preset_fig5())).rows;
    return r;
  }();
  return runs;
}

Outcome stochastic_bound() {
  const auto& runs = stochastic_runs();
  Outcome o;
  std::size_t cells = 0;
  for (const auto* rows : {&runs.fig4, &runs.fig5}) {
    const auto sys = rows == &runs.fig4 ? oracle::asymmetric_reference() : oracle::symmetric_reference();
    const double eps = oracle::epsilon(sys);
    for (const auto& r : *rows) {
      ++cells;
      const double bound = oracle::thm2(r.beta, r.gamma, eps, sys, 1.0);
      if (r.poa_measured > bound + 3.0 * r.stderr_poa)
        o.fail(r.preset + " beta " + fmt(r.beta) + " gamma " + fmt(r.gamma) + ": poa " +
               fmt(r.poa_measured) + " > bound " + fmt(bound));
    }
  }
  if (o.passed) o.detail = std::to_string(cells) + " cells";
  return o;
}

std::vector<const ResultRow*> at_beta(const std::vector<ResultRow>& rows, double beta) {
  std::vector<const ResultRow*> out;
  for (const auto& r : rows)
    if (r.beta == beta) out.push_back(&r);
  return out;
}

Outcome symmetric_asymptote() {
  Outcome o;
  const double limit = oracle::thm2_limit(oracle::symmetric_reference());
  std::string values;
  for (const auto* r : at_beta(stochastic_runs().fig5, 50.0)) {
    values += (values.empty() ? "" : ", ") + fmt(r->poa_measured);
    if (!(r->poa_measured <= 0.05)) o.fail("gamma " + fmt(r->gamma) + ": poa " + fmt(r->poa_measured));
    if (!(r->poa_measured < limit)) o.fail("not below asymptote " + fmt(limit));
  }
  if (values.empty()) o.fail("no beta = 50 cells");
  if (o.passed) o.detail = "poa at beta 50: " + values;
  return o;
}

Outcome asymmetric_asymptote() {
  Outcome o;
  std::string values;
  for (const auto* r : at_beta(stochastic_runs().fig4, 50.0)) {
    values += (values.empty() ? "" : ", ") + fmt(r->poa_measured);
    if (!(std::abs(r->poa_measured - 0.10) <= 0.05))
      o.fail("gamma " + fmt(r->gamma) + ": poa " + fmt(r->poa_measured));
  }
  if (values.empty()) o.fail("no beta = 50 cells");
  if (o.passed) o.detail = "poa at beta 50: " + values;
  return o;
}

// ---- 7 ----------------------------------------------------------------------

Outcome constants() {
  const auto sym = make_preset("fig5").process;
  const auto asym = make_preset("fig4").process;
  const auto sym_o = oracle::symmetric_reference();
  const auto asym_o = oracle::asymmetric_reference();
  Outcome o;
  const auto check = [&](const char* what, double got, double want) {
    if (!(std::abs(got - want) <= 1e-9)) o.fail(std::string(what) + " " + fmt(got) + " vs " + fmt(want));
  };
  check("eps sym", compute_epsilon(sym), oracle::epsilon(sym_o));
  check("eps sym literal", oracle::epsilon(sym_o), 1.0 / 9.0);
  check("eps asym", compute_epsilon(asym), oracle::epsilon(asym_o));
  check("eps asym literal", oracle::epsilon(asym_o), 0.1);
  check("B(1) sym", B_of_gamma(1.0, sym), oracle::B(1.0, sym_o));
  check("B(1) asym", B_of_gamma(1.0, asym), oracle::B(1.0, asym_o));
  check("B(1) literal", oracle::B(1.0, sym_o), 1.9 / 1.8);
  check("M sym", M_constant(compute_epsilon(sym), sym), oracle::M(oracle::epsilon(sym_o), sym_o));
  check("M sym literal", oracle::M(oracle::epsilon(sym_o), sym_o), 0.0);
  check("weighted age lb sym", weighted_age_lower_bound(sym), oracle::weighted_age_lb(sym_o));
  check("weighted age lb literal", oracle::weighted_age_lb(sym_o), 0.5 * (1.0 / 0.09 - 1.0));
  if (o.passed) o.detail = "weighted age lb " + fmt(weighted_age_lower_bound(sym));
  return o;
}

// ---- 8 ----------------------------------------------------------------------

Distribution random_distribution(Rng& rng, bool arrivals) {
  switch (uniform_index(rng, 3)) {
    case 0:
      return Distribution::bernoulli(0.05 + 0.9 * uniform01(rng));
    case 1:
      return Distribution::deterministic(1 + static_cast<int>(uniform_index(rng, arrivals ? 2 : 1)));
    default: {
      std::vector<double> pmf(2 + uniform_index(rng, 3));
      double total = 0.0;
      for (auto& p : pmf) total += (p = 0.05 + uniform01(rng));
      for (auto& p : pmf) p /= total;
      return Distribution::general(pmf);
    }
  }
}

Policy random_policy(Rng& rng, const ProcessSpec& spec) {
  const auto pick = uniform_index(rng, 6);
  if (pick == 5) return Policy::stationary_randomized(spec);
  const double a = uniform01(rng), b = uniform01(rng);
  const std::vector<Policy::Kind> kinds{SelfishLinear{5.0 * a, 2.0 * b}, PriceGreedy{2.0 * b},
                                        RoundRobin{}, JoinShortestQueue{}, MaxAge{}};
  return Policy(kinds[pick]);
}

Outcome property_suite() {
  Outcome o;
  Rng meta(20261017);
  const auto prices = PriceProcess::discrete(default_price_set(), 100);

  // (a) age reconstruction and (b) pooled-queue dominance on random configurations
  std::uint64_t age_violations = 0, pooled_violations = 0;
  for (int cfg = 0; cfg < 100; ++cfg) {
    const std::size_t n = 2 + uniform_index(meta, 9);
    std::vector<Distribution> services;
    for (std::size_t k = 0; k < n; ++k) services.push_back(random_distribution(meta, false));
    const ProcessSpec spec(random_distribution(meta, true), std::move(services));
    auto policy = random_policy(meta, spec);
    RunStreams streams(meta());
    auto state = make_initial_state(prices, n, streams.price);
    PooledQueue phi;
    SlotInputs in;
    SlotOutcome out;
    for (int t = 0; t < 10'000; ++t) {
      advance_price(prices, state, streams.price);
      for (const auto& p : state.pois)
        if (p.age != state.slot - p.last_update) ++age_violations;
      if (phi.value() > state.queue_sum()) ++pooled_violations;
      sample_slot_inputs(spec, streams.process, in);
      phi.step(in.arrivals, in.services);
      step(state, policy, in, streams.policy, out);
    }
    if (phi.value() > state.queue_sum()) ++pooled_violations;
  }
  if (age_violations) o.fail("(a) " + std::to_string(age_violations) + " age mismatches");
  if (pooled_violations) o.fail("(b) " + std::to_string(pooled_violations) + " dominance violations");

  // (c) shifting every score by a common constant leaves the choice unchanged.
  // Values are dyadic so the shifted scores are exact.
  std::uint64_t shift_violations = 0;
  for (int trial = 0; trial < 10'000; ++trial) {
    const std::size_t n = 1 + uniform_index(meta, 10);
    std::vector<PoiState> base(n);
    for (auto& p : base) {
      p.age = uniform_index(meta, 20);
      p.queue = static_cast<std::int64_t>(uniform_index(meta, 5));
      p.record = 0.25 * static_cast<double>(1 + uniform_index(meta, 4));
    }
    const double beta = 0.25 * static_cast<double>(uniform_index(meta, 9));
    const double gamma = 0.5 * static_cast<double>(uniform_index(meta, 5));
    Policy policy(SelfishLinear{beta, gamma}, TieBreak::LowestIndex);
    const auto chosen = policy.select(base, 1, meta);
    auto record_shift = base;
    for (auto& p : record_shift) p.record += 2.0;
    auto age_shift = base;
    for (auto& p : age_shift) p.age += 7;
    auto queue_shift = base;
    for (auto& p : queue_shift) p.queue += 3;
    for (const auto* shifted : {&record_shift, &age_shift, &queue_shift})
      if (policy.select(*shifted, 1, meta) != chosen) ++shift_violations;
  }
  if (shift_violations) o.fail("(c) " + std::to_string(shift_violations) + " choice changes");

  // (d) J under the selfish rule stays below B + beta (N/q - 1) + p_max
  std::size_t j_cells = 0;
  const auto& runs = stochastic_runs();
  for (const auto* rows : {&runs.fig4, &runs.fig5}) {
    const auto sys = rows == &runs.fig4 ? oracle::asymmetric_reference() : oracle::symmetric_reference();
    const double q = oracle::prob_positive(sys.arrival);
    for (const auto& r : *rows) {
      ++j_cells;
      const double upper = oracle::B(r.gamma, sys) + r.beta * (sys.n() / q - 1.0) + 1.0;
      if (r.cost_summary.mean > upper + 3.0 * r.cost_summary.std_error)
        o.fail("(d) " + r.preset + " beta " + fmt(r.beta) + " gamma " + fmt(r.gamma) + ": J " +
               fmt(r.cost_summary.mean) + " > " + fmt(upper));
    }
  }

  // (e) identical config and seed give identical CSV bytes
  auto c = preset_fig4();
  c.horizon = 20'000;
  c.warmup = 2'000;
  c.replications = 3;
  c.betas = {0.1, 5.0};
  const auto first = format_csv(run_experiment(c).rows);
  const auto second = format_csv(run_experiment(c).rows);
  c.threads = 0;
  const auto parallel = format_csv(run_experiment(c).rows);
  if (first != second || first != parallel) o.fail("(e) CSV output differs between identical runs");

  if (o.passed)
    o.detail = "(a,b) 100 configs x 1e4 slots, (c) 10000 states, (d) " + std::to_string(j_cells) +
               " cells, (e) byte-identical";
  return o;
}

}  // namespace

int main() {
  run("1", "round-robin mean max age is N-1", round_robin_optimality);
  run("2", "deterministic PoA below its bound", deterministic_bound);
  run("3", "greedy age grows linearly", greedy_instability);
  run("4", "stochastic PoA below its bound", stochastic_bound);
  run("5", "symmetric PoA vanishes at large beta", symmetric_asymptote);
  run("6", "asymmetric PoA near 0.1 at large beta", asymmetric_asymptote);
  run("7", "closed-form constants match reference", constants);
  run("8", "property suite", property_suite);
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
