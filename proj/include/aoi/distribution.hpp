#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "aoi/errors.hpp"
#include "aoi/random.hpp"
#include "aoi/text.hpp"

namespace aoi {

// Bounded-support distribution over the non-negative integers.
//
// Three kinds are supported: Deterministic(k), Bernoulli(p), and a general
// probability mass function over {0, 1, ..., K}. Moments are computed from the
// declared parameters, never estimated.
class Distribution {
 public:
  enum class Kind { Deterministic, Bernoulli, General };

  static Distribution deterministic(int value) {
    if (value < 0) throw ConfigError("deterministic value must be >= 0");
    Distribution d(Kind::Deterministic);
    d.value_ = value;
    d.pmf_.assign(static_cast<std::size_t>(value) + 1, 0.0);
    d.pmf_.back() = 1.0;
    d.finish();
    return d;
  }

  static Distribution bernoulli(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("bernoulli parameter must lie in [0, 1]");
    Distribution d(Kind::Bernoulli);
    d.p_ = p;
    d.pmf_ = {1.0 - p, p};
    d.finish();
    return d;
  }

  // pmf[k] = Pr{X = k}. Must be non-negative and sum to 1 within 1e-9.
  static Distribution general(std::vector<double> pmf) {
    if (pmf.empty()) throw ConfigError("discrete pmf must be non-empty");
    double total = 0.0;
    for (double w : pmf) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError("discrete pmf entries must be >= 0");
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-9) throw ConfigError("discrete pmf must sum to 1");
    Distribution d(Kind::General);
    d.pmf_ = std::move(pmf);
    d.finish();
    return d;
  }

  // Accepts "deterministic(k)", "bernoulli(p)", "discrete(p0,p1,...)".
  static Distribution parse(std::string_view s) {
    s = text::trim(s);
    const auto open = s.find('(');
    if (open == std::string_view::npos || s.back() != ')')
      throw ConfigError("bad distribution '" + std::string(s) + "'");
    const auto name = text::trim(s.substr(0, open));
    const auto args = s.substr(open + 1, s.size() - open - 2);
    if (name == "deterministic") {
      const double v = text::parse_double(args);
      if (v != std::floor(v)) throw ConfigError("deterministic value must be an integer");
      return deterministic(static_cast<int>(v));
    }
    if (name == "bernoulli") return bernoulli(text::parse_double(args));
    if (name == "discrete") return general(text::parse_double_list(args));
    throw ConfigError("unknown distribution kind '" + std::string(name) + "'");
  }

  std::string to_string() const {
    switch (kind_) {
      case Kind::Deterministic: return "deterministic(" + std::to_string(value_) + ")";
      case Kind::Bernoulli: return "bernoulli(" + text::format_double(p_) + ")";
      case Kind::General: return "discrete(" + text::join_doubles(pmf_) + ")";
    }
    return {};
  }

  Kind kind() const noexcept { return kind_; }
  const std::vector<double>& pmf() const noexcept { return pmf_; }

  double mean() const noexcept { return mean_; }
  double second_moment() const noexcept { return second_; }
  double variance() const noexcept { return variance_; }
  double prob_positive() const noexcept { return prob_positive_; }
  int max_value() const noexcept { return max_value_; }

  template <class URBG>
  int sample(URBG& rng) const {
    switch (kind_) {
      case Kind::Deterministic: return value_;
      case Kind::Bernoulli: return uniform01(rng) < p_ ? 1 : 0;
      case Kind::General: {
        const double u = uniform01(rng);
        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        const auto k = static_cast<int>(it - cdf_.begin());
        return std::min(k, max_value_);
      }
    }
    return 0;
  }

  friend bool operator==(const Distribution& a, const Distribution& b) {
    return a.kind_ == b.kind_ && a.pmf_ == b.pmf_;
  }

 private:
  explicit Distribution(Kind kind) : kind_(kind) {}

  void finish() {
    mean_ = second_ = 0.0;
    max_value_ = 0;
    prob_positive_ = 0.0;
    cdf_.resize(pmf_.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < pmf_.size(); ++k) {
      const double x = static_cast<double>(k);
      mean_ += x * pmf_[k];
      second_ += x * x * pmf_[k];
      if (k > 0) prob_positive_ += pmf_[k];
      if (pmf_[k] > 0.0) max_value_ = static_cast<int>(k);
      acc += pmf_[k];
      cdf_[k] = acc;
    }
    if (kind_ == Kind::Bernoulli) {
      mean_ = second_ = prob_positive_ = p_;
      variance_ = p_ * (1.0 - p_);
    } else if (kind_ == Kind::Deterministic) {
      mean_ = value_;
      second_ = static_cast<double>(value_) * value_;
      prob_positive_ = value_ > 0 ? 1.0 : 0.0;
      variance_ = 0.0;
    } else {
      variance_ = std::max(0.0, second_ - mean_ * mean_);
    }
  }

  Kind kind_;
  int value_ = 0;
  double p_ = 0.0;
  std::vector<double> pmf_;
  std::vector<double> cdf_;
  double mean_ = 0.0, second_ = 0.0, variance_ = 0.0, prob_positive_ = 0.0;
  int max_value_ = 0;
};

}  // namespace aoi
