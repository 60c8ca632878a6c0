#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "aoi/errors.hpp"
#include "aoi/process.hpp"
#include "aoi/random.hpp"
#include "aoi/state.hpp"

namespace aoi {

enum class TieBreak { LowestIndex, UniformRandom };

// argmax_n (beta * Delta_n - gamma * Q_n - r_n)
struct SelfishLinear {
  double beta = 1.0;
  double gamma = 1.0;
};

// The beta -> 0 limit: argmax_n (-gamma * Q_n - r_n).
struct PriceGreedy {
  double gamma = 1.0;
};

// Visits PoIs cyclically; the cursor moves only on slots with arrivals.
struct RoundRobin {
  std::size_t cursor = 0;
};

struct JoinShortestQueue {};

struct MaxAge {};

// Chooses n with probability mu_n / mu_sum on slots with arrivals.
struct StationaryRandomized {
  std::vector<double> weights;
};

// A PoI-selection rule. Stateful kinds (RoundRobin) belong to a single run.
class Policy {
 public:
  using Kind = std::variant<SelfishLinear, PriceGreedy, RoundRobin, JoinShortestQueue, MaxAge,
                            StationaryRandomized>;

  Policy(Kind kind, TieBreak tie_break = TieBreak::UniformRandom)
      : kind_(std::move(kind)), tie_break_(tie_break) {
    std::visit(
        [](const auto& k) {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, SelfishLinear>) {
            if (!(k.beta >= 0.0) || !(k.gamma >= 0.0))
              throw ConfigError("selfish policy needs beta >= 0 and gamma >= 0");
          } else if constexpr (std::is_same_v<T, PriceGreedy>) {
            if (!(k.gamma >= 0.0)) throw ConfigError("greedy policy needs gamma >= 0");
          } else if constexpr (std::is_same_v<T, StationaryRandomized>) {
            set_weights(k.weights);
          }
        },
        kind_);
  }

  static Policy stationary_randomized(const ProcessSpec& spec,
                                      TieBreak tie_break = TieBreak::UniformRandom) {
    return Policy(StationaryRandomized{spec.service_weights()}, tie_break);
  }

  const Kind& kind() const noexcept { return kind_; }
  TieBreak tie_break() const noexcept { return tie_break_; }

  std::string name() const {
    return std::visit(
        [](const auto& k) -> std::string {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, SelfishLinear>) return "selfish";
          else if constexpr (std::is_same_v<T, PriceGreedy>) return "greedy";
          else if constexpr (std::is_same_v<T, RoundRobin>) return "round_robin";
          else if constexpr (std::is_same_v<T, JoinShortestQueue>) return "jsq";
          else if constexpr (std::is_same_v<T, MaxAge>) return "max_age";
          else return "stationary";
        },
        kind_);
  }

  // Score maximized by the argmax kinds. Undefined for RoundRobin/StationaryRandomized.
  double score(const PoiState& p) const {
    return std::visit(
        [&](const auto& k) -> double {
          using T = std::decay_t<decltype(k)>;
          const double age = static_cast<double>(p.age);
          const double queue = static_cast<double>(p.queue);
          if constexpr (std::is_same_v<T, SelfishLinear>)
            return k.beta * age - k.gamma * queue - p.record;
          else if constexpr (std::is_same_v<T, PriceGreedy>)
            return -k.gamma * queue - p.record;
          else if constexpr (std::is_same_v<T, JoinShortestQueue>)
            return -queue;
          else if constexpr (std::is_same_v<T, MaxAge>)
            return age;
          else
            return 0.0;
        },
        kind_);
  }

  // Chosen PoI index for this slot. `arrivals` is A[t]; RoundRobin and
  // StationaryRandomized only act (advance / draw) when it is positive.
  std::size_t select(std::span<const PoiState> pois, int arrivals, Rng& rng) {
    if (pois.empty()) throw DomainError("select needs at least one PoI");
    if (auto* rr = std::get_if<RoundRobin>(&kind_)) {
      rr->cursor %= pois.size();
      const auto chosen = rr->cursor;
      if (arrivals > 0) rr->cursor = (rr->cursor + 1) % pois.size();
      return chosen;
    }
    if (auto* sr = std::get_if<StationaryRandomized>(&kind_)) {
      if (sr->weights.size() != pois.size())
        throw DomainError("stationary policy weight count does not match N");
      if (arrivals <= 0) return 0;
      const double u = uniform01(rng);
      double acc = 0.0;
      for (std::size_t n = 0; n + 1 < sr->weights.size(); ++n) {
        acc += sr->weights[n];
        if (u < acc) return n;
      }
      return sr->weights.size() - 1;
    }
    return argmax(pois, rng);
  }

  std::size_t argmax(std::span<const PoiState> pois, Rng& rng) const {
    return std::visit(
        [&](const auto& k) -> std::size_t {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, SelfishLinear>)
            return argmax_by(pois, rng, [&](const PoiState& p) {
              return k.beta * static_cast<double>(p.age) -
                     k.gamma * static_cast<double>(p.queue) - p.record;
            });
          else if constexpr (std::is_same_v<T, PriceGreedy>)
            return argmax_by(pois, rng, [&](const PoiState& p) {
              return -k.gamma * static_cast<double>(p.queue) - p.record;
            });
          else if constexpr (std::is_same_v<T, JoinShortestQueue>)
            return argmax_by(pois, rng,
                             [](const PoiState& p) { return -static_cast<double>(p.queue); });
          else if constexpr (std::is_same_v<T, MaxAge>)
            return argmax_by(pois, rng,
                             [](const PoiState& p) { return static_cast<double>(p.age); });
          else
            throw DomainError("policy kind has no argmax score");
        },
        kind_);
  }

  // All indices attaining the maximum score.
  std::vector<std::size_t> argmax_set(std::span<const PoiState> pois) const {
    std::vector<std::size_t> out;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < pois.size(); ++n) {
      const double s = score(pois[n]);
      if (s > best) {
        best = s;
        out.assign(1, n);
      } else if (s == best) {
        out.push_back(n);
      }
    }
    return out;
  }

 private:
  template <class Score>
  std::size_t argmax_by(std::span<const PoiState> pois, Rng& rng, Score score_of) const {
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_index = 0;
    std::size_t ties = 0;
    for (std::size_t n = 0; n < pois.size(); ++n) {
      const double s = score_of(pois[n]);
      if (s > best) {
        best = s;
        best_index = n;
        ties = 1;
      } else if (s == best) {
        ++ties;
      }
    }
    if (ties <= 1 || tie_break_ == TieBreak::LowestIndex) return best_index;
    auto pick = uniform_index(rng, ties);
    for (std::size_t n = best_index; n < pois.size(); ++n) {
      if (score_of(pois[n]) == best && pick-- == 0) return n;
    }
    return best_index;
  }

  static void set_weights(const std::vector<double>& w) {
    if (w.empty()) throw ConfigError("stationary policy needs weights");
    double total = 0.0;
    for (double x : w) {
      if (!(x >= 0.0)) throw ConfigError("stationary weights must be >= 0");
      total += x;
    }
    if (std::abs(total - 1.0) > 1e-9) throw ConfigError("stationary weights must sum to 1");
  }

  Kind kind_;
  TieBreak tie_break_;
};

}  // namespace aoi
