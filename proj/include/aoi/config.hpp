#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aoi/distribution.hpp"
#include "aoi/errors.hpp"
#include "aoi/policy.hpp"
#include "aoi/process.hpp"
#include "aoi/text.hpp"

namespace aoi {

// How a cell's PoA is measured.
enum class PoaMode {
  Auto,    // MaxAge for unit-deterministic processes, Cost otherwise
  MaxAge,  // 1 - (N - 1) / mean max age
  Cost,    // 1 - J_lower / J, J_lower from matched JSQ runs plus the age lower bound
  None,
};

enum class OutputFormat { Csv, Json };

inline const std::vector<double>& default_beta_sweep() {
  static const std::vector<double> v{0.05, 0.1, 0.2, 0.3, 0.5, 1, 2, 5, 10, 50};
  return v;
}

inline const std::vector<double>& default_gamma_grid() {
  static const std::vector<double> v{0.1, 0.5, 1, 2};
  return v;
}

inline const std::vector<double>& default_price_set() {
  static const std::vector<double> v{0.25, 0.5, 0.75, 1.0};
  return v;
}

struct ExperimentConfig {
  std::string preset;
  std::uint64_t horizon = 2'000'000;
  std::uint64_t warmup = 200'000;
  std::uint64_t replications = 10;
  std::uint64_t base_seed = 1;
  std::string policy = "selfish";
  TieBreak tie_break = TieBreak::UniformRandom;
  std::vector<double> betas = default_beta_sweep();
  std::vector<double> gammas = {1.0};
  ProcessSpec process =
      ProcessSpec::symmetric(Distribution::bernoulli(0.9), Distribution::bernoulli(0.1), 10);
  PriceProcess prices = PriceProcess::discrete(default_price_set(), 100);
  PoaMode poa = PoaMode::Auto;
  std::string output_path;
  OutputFormat format = OutputFormat::Csv;
  unsigned threads = 1;  // 0: one per hardware thread

  std::size_t n_pois() const noexcept { return process.size(); }

  void validate() const {
    if (horizon == 0 || warmup >= horizon) throw ConfigError("need horizon > warmup >= 0");
    if (replications < 1) throw ConfigError("replications must be >= 1");
    if (betas.empty() || gammas.empty()) throw ConfigError("beta and gamma lists must be non-empty");
    for (double b : betas)
      if (!(b >= 0.0)) throw ConfigError("beta values must be >= 0");
    for (double g : gammas)
      if (!(g >= 0.0)) throw ConfigError("gamma values must be >= 0");
    if (!prices.initial.empty() && prices.initial.size() != n_pois())
      throw ConfigError("price.initial has " + std::to_string(prices.initial.size()) +
                        " entries but N=" + std::to_string(n_pois()));
  }

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

// ---- presets ----------------------------------------------------------------

inline ExperimentConfig preset_fig2() {
  ExperimentConfig c;
  c.preset = "fig2";
  c.horizon = 10'000;
  c.warmup = 1'000;
  c.replications = 1;
  c.policy = "greedy";
  c.betas = {0.0};
  c.gammas = {1.0};
  const auto one = Distribution::deterministic(1);
  c.process = ProcessSpec::symmetric(one, one, 2);
  // PoI 1 starts at the top of the price range, PoI 2 well below it.
  c.prices = PriceProcess::uniform_continuous(0.0, 0.999, {0.999, 0.1});
  c.poa = PoaMode::MaxAge;
  return c;
}

inline ExperimentConfig preset_fig3() {
  ExperimentConfig c;
  c.preset = "fig3";
  const auto one = Distribution::deterministic(1);
  c.process = ProcessSpec::symmetric(one, one, 10);
  c.gammas = {1.0};
  c.poa = PoaMode::MaxAge;
  return c;
}

inline ExperimentConfig preset_fig4() {
  ExperimentConfig c;
  c.preset = "fig4";
  std::vector<Distribution> services;
  for (int n = 0; n < 10; ++n) services.push_back(Distribution::bernoulli(n < 5 ? 0.11 : 0.09));
  c.process = ProcessSpec(Distribution::bernoulli(0.9), std::move(services));
  c.gammas = default_gamma_grid();
  c.poa = PoaMode::Cost;
  return c;
}

inline ExperimentConfig preset_fig5() {
  ExperimentConfig c;
  c.preset = "fig5";
  c.process =
      ProcessSpec::symmetric(Distribution::bernoulli(0.9), Distribution::bernoulli(0.1), 10);
  c.gammas = default_gamma_grid();
  c.poa = PoaMode::Cost;
  return c;
}

inline std::vector<std::string> preset_names() { return {"fig2", "fig3", "fig4", "fig5"}; }

inline ExperimentConfig make_preset(std::string_view name) {
  if (name == "fig2") return preset_fig2();
  if (name == "fig3") return preset_fig3();
  if (name == "fig4") return preset_fig4();
  if (name == "fig5") return preset_fig5();
  std::string known;
  for (const auto& p : preset_names()) known += (known.empty() ? "" : ", ") + p;
  throw ConfigError("unknown preset '" + std::string(name) + "' (available: " + known + ")");
}

// ---- key = value text form --------------------------------------------------

inline std::string to_string(PoaMode m) {
  switch (m) {
    case PoaMode::Auto: return "auto";
    case PoaMode::MaxAge: return "max_age";
    case PoaMode::Cost: return "cost";
    case PoaMode::None: return "none";
  }
  return "auto";
}

inline PoaMode parse_poa_mode(std::string_view s) {
  if (s == "auto") return PoaMode::Auto;
  if (s == "max_age") return PoaMode::MaxAge;
  if (s == "cost") return PoaMode::Cost;
  if (s == "none") return PoaMode::None;
  throw ConfigError("poa must be auto, max_age, cost or none");
}

inline OutputFormat parse_format(std::string_view s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  throw ConfigError("format must be csv or json");
}

inline std::string to_string(OutputFormat f) { return f == OutputFormat::Csv ? "csv" : "json"; }

using ConfigEntries = std::vector<std::pair<std::string, std::string>>;

// Parses `key = value` lines; '#' starts a comment. Later duplicates win.
inline ConfigEntries parse_config_entries(std::string_view textual) {
  ConfigEntries out;
  std::istringstream in{std::string(textual)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto body = text::trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    auto key = std::string(text::trim(body.substr(0, eq)));
    auto value = std::string(text::trim(body.substr(eq + 1)));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

namespace detail {

inline std::vector<double> parse_price_initial(const std::string& v) {
  if (v == "random") return {};
  return text::parse_double_list(v);
}

}  // namespace detail

// Applies entries on top of `base` (a preset key, if present, replaces the base
// first). Structural keys are applied before the ones that depend on them.
inline ExperimentConfig apply_entries(ExperimentConfig base, const ConfigEntries& entries) {
  std::map<std::string, std::string> kv;
  for (const auto& [k, v] : entries) kv[k] = v;

  auto take = [&](const std::string& key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    auto v = it->second;
    kv.erase(it);
    return v;
  };

  ExperimentConfig c = std::move(base);
  if (auto v = take("preset")) c = make_preset(*v);

  // Process: N, common service, per-PoI overrides, arrival, R_max.
  Distribution arrival = c.process.arrival();
  std::vector<Distribution> services = c.process.services();
  int r_max = -1;
  bool process_touched = false;
  if (auto v = take("N")) {
    const auto n = text::parse_u64(*v);
    if (n < 1) throw ConfigError("N must be >= 1");
    services.resize(n, services.front());
    process_touched = true;
  }
  if (auto v = take("process.service")) {
    const auto d = Distribution::parse(*v);
    for (auto& s : services) s = d;
    process_touched = true;
  }
  for (std::size_t n = 0; n < services.size(); ++n) {
    if (auto v = take("process.service." + std::to_string(n))) {
      services[n] = Distribution::parse(*v);
      process_touched = true;
    }
  }
  if (auto v = take("process.arrival")) {
    arrival = Distribution::parse(*v);
    process_touched = true;
  }
  if (auto v = take("process.r_max")) {
    r_max = static_cast<int>(text::parse_u64(*v));
    process_touched = true;
  }
  // Without an explicit R_max the cap is the largest service value in the support.
  if (process_touched) c.process = ProcessSpec(arrival, services, r_max);

  // Prices.
  {
    auto kind = take("price.kind");
    auto values = take("price.values");
    auto period = take("price.period");
    auto pmin = take("price.min");
    auto pmax = take("price.max");
    auto initial = take("price.initial");
    if (kind || values || period || pmin || pmax || initial) {
      const bool uniform = kind ? (*kind == "uniform")
                                : c.prices.kind == PriceProcess::Kind::UniformContinuous;
      if (kind && *kind != "uniform" && *kind != "discrete")
        throw ConfigError("price.kind must be discrete or uniform");
      auto init = initial ? detail::parse_price_initial(*initial) : c.prices.initial;
      if (uniform) {
        c.prices = PriceProcess::uniform_continuous(pmin ? text::parse_double(*pmin) : c.prices.p_min,
                                                    pmax ? text::parse_double(*pmax) : c.prices.p_max,
                                                    std::move(init));
      } else {
        auto vals = values ? text::parse_double_list(*values)
                           : (c.prices.values.empty() ? default_price_set() : c.prices.values);
        c.prices = PriceProcess::discrete(std::move(vals),
                                          period ? text::parse_u64(*period) : c.prices.period,
                                          std::move(init));
      }
    }
  }

  if (auto v = take("horizon")) c.horizon = text::parse_u64(*v);
  if (auto v = take("warmup")) c.warmup = text::parse_u64(*v);
  if (auto v = take("replications")) c.replications = text::parse_u64(*v);
  if (auto v = take("seed")) c.base_seed = text::parse_u64(*v);
  if (auto v = take("policy")) c.policy = *v;
  if (auto v = take("tie_break")) {
    if (*v == "random") c.tie_break = TieBreak::UniformRandom;
    else if (*v == "lowest") c.tie_break = TieBreak::LowestIndex;
    else throw ConfigError("tie_break must be random or lowest");
  }
  if (auto v = take("beta")) c.betas = text::parse_double_list(*v);
  if (auto v = take("gamma")) c.gammas = text::parse_double_list(*v);
  if (auto v = take("poa")) c.poa = parse_poa_mode(*v);
  if (auto v = take("output.path")) c.output_path = *v;
  if (auto v = take("output.format")) c.format = parse_format(*v);
  if (auto v = take("threads")) c.threads = static_cast<unsigned>(text::parse_u64(*v));

  if (!kv.empty()) throw ConfigError("unknown config key '" + kv.begin()->first + "'");
  c.validate();
  return c;
}

inline ExperimentConfig parse_config(std::string_view textual, ExperimentConfig base = {}) {
  return apply_entries(std::move(base), parse_config_entries(textual));
}

inline ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), std::move(base));
}

// Every field written explicitly, so parse_config(serialize_config(c)) == c.
inline std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream out;
  if (!c.preset.empty()) out << "preset = " << c.preset << "\n";
  out << "N = " << c.n_pois() << "\n";
  out << "horizon = " << c.horizon << "\n";
  out << "warmup = " << c.warmup << "\n";
  out << "replications = " << c.replications << "\n";
  out << "seed = " << c.base_seed << "\n";
  out << "policy = " << c.policy << "\n";
  out << "tie_break = " << (c.tie_break == TieBreak::UniformRandom ? "random" : "lowest") << "\n";
  out << "beta = " << text::join_doubles(c.betas, ',') << "\n";
  out << "gamma = " << text::join_doubles(c.gammas, ',') << "\n";
  out << "poa = " << to_string(c.poa) << "\n";
  out << "process.arrival = " << c.process.arrival().to_string() << "\n";
  for (std::size_t n = 0; n < c.n_pois(); ++n)
    out << "process.service." << n << " = " << c.process.service(n).to_string() << "\n";
  out << "process.r_max = " << c.process.r_max() << "\n";
  if (c.prices.kind == PriceProcess::Kind::Discrete) {
    out << "price.kind = discrete\n";
    out << "price.values = " << text::join_doubles(c.prices.values, ',') << "\n";
    out << "price.period = " << c.prices.period << "\n";
  } else {
    out << "price.kind = uniform\n";
    out << "price.min = " << text::format_double(c.prices.p_min) << "\n";
    out << "price.max = " << text::format_double(c.prices.p_max) << "\n";
  }
  out << "price.initial = "
      << (c.prices.initial.empty() ? std::string("random") : text::join_doubles(c.prices.initial, ','))
      << "\n";
  if (!c.output_path.empty()) out << "output.path = " << c.output_path << "\n";
  out << "output.format = " << to_string(c.format) << "\n";
  out << "threads = " << c.threads << "\n";
  return out.str();
}

// Builds the configured policy for one (beta, gamma) cell.
inline Policy make_policy(std::string_view name, double beta, double gamma,
                          const ProcessSpec& spec, TieBreak tie_break) {
  if (name == "selfish") return Policy(SelfishLinear{beta, gamma}, tie_break);
  if (name == "greedy") return Policy(PriceGreedy{gamma}, tie_break);
  if (name == "round_robin") return Policy(RoundRobin{}, tie_break);
  if (name == "jsq") return Policy(JoinShortestQueue{}, tie_break);
  if (name == "max_age") return Policy(MaxAge{}, tie_break);
  if (name == "stationary") return Policy::stationary_randomized(spec, tie_break);
  throw ConfigError("unknown policy '" + std::string(name) +
                    "' (available: selfish, greedy, round_robin, jsq, max_age, stationary)");
}

}  // namespace aoi
