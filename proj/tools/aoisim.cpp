#include <cstdint>
#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "aoi/aoi.hpp"
#include "aoi/selfcheck.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string preset;
};

aoi::ExperimentConfig load(const CommonArgs& args, aoi::ConfigEntries overrides) {
  aoi::ConfigEntries entries;
  if (!args.config_path.empty()) {
    std::ifstream in(args.config_path);
    if (!in) throw aoi::ConfigError("cannot read config file '" + args.config_path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    entries = aoi::parse_config_entries(buf.str());
  }
  // --preset replaces any preset named in the file; other file keys still apply on top.
  if (!args.preset.empty()) entries.emplace_back("preset", args.preset);
  for (auto& e : overrides) entries.push_back(std::move(e));
  return aoi::apply_entries({}, entries);
}

void print_bounds(const aoi::ExperimentConfig& c, aoi::OutputFormat format) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (double beta : c.betas) {
    for (double gamma : c.gammas) {
      const auto b = aoi::bounds_for(c.process, beta, gamma, c.prices.p_max);
      if (format == aoi::OutputFormat::Json) {
        const auto num = [](double v) -> nlohmann::ordered_json {
          if (std::isfinite(v)) return v;
          return nullptr;
        };
        arr.push_back({{"beta", beta},
                       {"gamma", gamma},
                       {"epsilon", num(b.epsilon)},
                       {"B_gamma", num(b.B_gamma)},
                       {"B_gamma_conservative", num(b.B_gamma_conservative)},
                       {"M", num(b.M)},
                       {"thm1_poa_ub", num(b.thm1_poa_ub)},
                       {"thm2_poa_ub", num(b.thm2_poa_ub)},
                       {"thm2_asymptotic_ub", num(b.thm2_asymptotic_ub)},
                       {"det_age_lb", num(b.det_age_lb)},
                       {"weighted_age_lb", num(b.weighted_age_lb)},
                       {"queue_lb_analytic", num(b.queue_lb_analytic)},
                       {"J_upper_thm2", num(b.J_upper_thm2)}});
        continue;
      }
      using aoi::text::format_double;
      std::cout << "beta = " << format_double(beta) << ", gamma = " << format_double(gamma) << "\n"
                << "  epsilon              " << format_double(b.epsilon) << "\n"
                << "  B_gamma              " << format_double(b.B_gamma) << "\n"
                << "  B_gamma_conservative " << format_double(b.B_gamma_conservative) << "\n"
                << "  M                    " << format_double(b.M) << "\n"
                << "  thm1_poa_ub          " << format_double(b.thm1_poa_ub) << "\n"
                << "  thm2_poa_ub          " << format_double(b.thm2_poa_ub) << "\n"
                << "  thm2_asymptotic_ub   " << format_double(b.thm2_asymptotic_ub) << "\n"
                << "  det_age_lb           " << format_double(b.det_age_lb) << "\n"
                << "  weighted_age_lb      " << format_double(b.weighted_age_lb) << "\n"
                << "  queue_lb_analytic    " << format_double(b.queue_lb_analytic) << "\n"
                << "  J_upper_thm2         " << format_double(b.J_upper_thm2) << "\n";
    }
  }
  if (format == aoi::OutputFormat::Json) std::cout << arr.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Age-of-information crowd-learning simulator"};
  app.require_subcommand(1);

  CommonArgs sim_args;
  std::optional<std::string> policy, betas, gammas, out_path, format;
  std::optional<std::uint64_t> seed, replications, horizon, warmup;
  std::optional<unsigned> threads;
  auto* simulate = app.add_subcommand("simulate", "Run the configured experiment and write results");
  simulate->add_option("--config", sim_args.config_path, "key = value configuration file");
  simulate->add_option("--preset", sim_args.preset, "fig2, fig3, fig4 or fig5");
  simulate->add_option("--policy", policy, "selfish, greedy, round_robin, jsq, max_age, stationary");
  simulate->add_option("--beta", betas, "comma-separated reward rates");
  simulate->add_option("--gamma", gammas, "comma-separated congestion sensitivities");
  simulate->add_option("--seed", seed, "base seed");
  simulate->add_option("--replications", replications, "replications per cell");
  simulate->add_option("--horizon", horizon, "slots per run (warmup defaults to 10%)");
  simulate->add_option("--warmup", warmup, "slots discarded before averaging");
  simulate->add_option("--threads", threads, "worker threads, 0 = all cores");
  simulate->add_option("--out", out_path, "output file (stdout if omitted)");
  simulate->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  CommonArgs bounds_args;
  std::optional<std::string> bounds_format;
  auto* bounds = app.add_subcommand("bounds", "Print the analytical bounds without simulating");
  bounds->add_option("--config", bounds_args.config_path, "key = value configuration file");
  bounds->add_option("--preset", bounds_args.preset, "fig2, fig3, fig4 or fig5");
  bounds->add_option("--format", bounds_format, "text or json")->check(CLI::IsMember({"text", "json"}));

  std::uint64_t check_seed = 7;
  auto* selfcheck = app.add_subcommand("selfcheck", "Run the invariant suite");
  selfcheck->add_option("--seed", check_seed, "seed for the random configurations");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*simulate) {
      aoi::ConfigEntries overrides;
      if (policy) overrides.emplace_back("policy", *policy);
      if (betas) overrides.emplace_back("beta", *betas);
      if (gammas) overrides.emplace_back("gamma", *gammas);
      if (seed) overrides.emplace_back("seed", std::to_string(*seed));
      if (replications) overrides.emplace_back("replications", std::to_string(*replications));
      if (horizon) {
        overrides.emplace_back("horizon", std::to_string(*horizon));
        if (!warmup) overrides.emplace_back("warmup", std::to_string(*horizon / 10));
      }
      if (warmup) overrides.emplace_back("warmup", std::to_string(*warmup));
      if (threads) overrides.emplace_back("threads", std::to_string(*threads));
      if (out_path) overrides.emplace_back("output.path", *out_path);
      if (format) overrides.emplace_back("output.format", *format);
      const auto config = load(sim_args, std::move(overrides));

      const auto result = aoi::run_experiment(config);
      for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
      if (config.output_path.empty() || config.output_path == "-") {
        if (result.rows.empty()) throw aoi::DomainError("no result rows to emit");
        std::cout << (config.format == aoi::OutputFormat::Csv ? aoi::format_csv(result.rows)
                                                               : aoi::format_json(result.rows));
      } else {
        aoi::emit_results(result.rows, config.format, config.output_path);
      }
      return 0;
    }
    if (*bounds) {
      const auto config = load(bounds_args, {});
      print_bounds(config, bounds_format && *bounds_format == "json" ? aoi::OutputFormat::Json
                                                                     : aoi::OutputFormat::Csv);
      return 0;
    }
    if (*selfcheck) {
      bool all = true;
      for (const auto& c : aoi::run_selfcheck(check_seed)) {
        std::cout << (c.passed ? "PASS  " : "FAIL  ") << c.name;
        if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
        std::cout << "\n";
        all = all && c.passed;
      }
      return all ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
