#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace chanrate {

/// Raised when a model, configuration or input file violates its contract.
class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A (channel, rate) decision. Indices are zero-based internally; every
/// file format and report prints them one-based.
struct DecisionPair {
  int channel = 0;
  int rate = 0;

  friend auto operator<=>(const DecisionPair&, const DecisionPair&) = default;
};

std::string to_string(const DecisionPair& d);

/// Dense row-major channels x rates matrix.
class Grid {
 public:
  Grid() = default;
  Grid(int channels, int rates, double fill = 0.0);
  Grid(int channels, int rates, std::vector<double> values);

  int channels() const { return channels_; }
  int rates() const { return rates_; }
  std::size_t size() const { return values_.size(); }

  double operator()(int c, int k) const { return values_[index(c, k)]; }
  double& operator()(int c, int k) { return values_[index(c, k)]; }
  double operator()(const DecisionPair& d) const { return (*this)(d.channel, d.rate); }

  const std::vector<double>& values() const { return values_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t index(int c, int k) const {
    return static_cast<std::size_t>(c) * static_cast<std::size_t>(rates_) +
           static_cast<std::size_t>(k);
  }

  int channels_ = 0;
  int rates_ = 0;
  std::vector<double> values_;
};

/// Strictly increasing list of positive transmission rates.
class RateSet {
 public:
  explicit RateSet(std::vector<double> rates);

  int size() const { return static_cast<int>(rates_.size()); }
  double operator[](int k) const { return rates_[static_cast<std::size_t>(k)]; }
  double lowest() const { return rates_.front(); }
  double highest() const { return rates_.back(); }
  const std::vector<double>& values() const { return rates_; }

  friend bool operator==(const RateSet&, const RateSet&) = default;

 private:
  std::vector<double> rates_;
};

/// Rate set, success probabilities and optional per-channel occupancy.
class LinkModel {
 public:
  LinkModel(RateSet rates, Grid theta, std::optional<std::vector<double>> occupancy = std::nullopt);

  const RateSet& rates() const { return rates_; }
  const Grid& theta() const { return theta_; }
  const std::optional<std::vector<double>>& occupancy() const { return occupancy_; }

  int channels() const { return theta_.channels(); }
  int rate_count() const { return theta_.rates(); }
  int pair_count() const { return channels() * rate_count(); }

  /// Success probability seen by the transmitter: (1 - zeta_c) * theta_ck.
  double effective_theta(int c, int k) const;
  Grid effective_theta() const;

  /// Same rates, occupancy-adjusted probabilities and no occupancy vector.
  LinkModel effective() const;

  bool contains(const DecisionPair& d) const {
    return d.channel >= 0 && d.channel < channels() && d.rate >= 0 && d.rate < rate_count();
  }

 private:
  RateSet rates_;
  Grid theta_;
  std::optional<std::vector<double>> occupancy_;
};

struct ChannelOptimum {
  int rate = 0;         // k_c*, smallest index on ties
  double mu = 0.0;      // mu_c*
  bool unique = true;
  int first_needed = 0; // k_0c; equals K when N_c is empty
  std::vector<int> needed;      // N_c
  std::vector<int> neighbours;  // M_c = N_c ∩ {k_c* - 1, k_c* + 1}
};

struct OptimaSummary {
  Grid mu;
  double mu_star = 0.0;
  DecisionPair best;
  bool unique_global = true;
  int first_needed = 0;     // k_0; equals K when N is empty
  std::vector<int> needed;  // N = {k : mu* <= r_k}
  std::vector<int> neighbours;  // M = N ∩ {k* - 1, k* + 1}
  std::vector<ChannelOptimum> per_channel;

  bool all_channels_unique() const;
};

Grid throughput_matrix(const LinkModel& model);
OptimaSummary compute_optima(const LinkModel& model);

/// Optima of a raw throughput matrix; exposed for environments that
/// evaluate time-varying matrices without rebuilding a LinkModel.
DecisionPair best_pair(const Grid& mu);

}  // namespace chanrate
