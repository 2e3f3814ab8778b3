#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "chanrate/model.hpp"

namespace chanrate {

/// Piece of a trace: theta holds from `start` until the next segment.
struct TraceSegment {
  std::uint64_t start = 0;
  Grid theta;
};

/// Piecewise-constant success probabilities over steps [0, horizon).
struct TraceTable {
  std::vector<TraceSegment> segments;
  std::uint64_t horizon = 0;

  /// Throws ModelError unless starts increase strictly from 0, every matrix
  /// has the same shape with entries in [0,1], and the horizon covers the
  /// last start.
  void validate() const;
};

/// Compresses time by an integer factor: starts and horizon are divided
/// (floor) and segments that collapse onto one start keep the later matrix.
TraceTable accelerate(const TraceTable& trace, std::uint64_t factor);

/// Bernoulli outcome generator. draw() is a pure function of
/// (seed, pair, step), so every policy sees the same outcome for the same
/// query (common random numbers).
class Environment {
 public:
  static constexpr std::uint64_t kUnbounded = ~std::uint64_t{0};

  Environment(RateSet rates, TraceTable trace, std::uint64_t seed = 0,
              std::optional<std::vector<double>> occupancy = std::nullopt);

  const RateSet& rates() const { return data_->rates; }
  int channels() const { return data_->channels; }
  int rate_count() const { return rates().size(); }
  std::uint64_t seed() const { return seed_; }
  /// Steps the environment is defined for; kUnbounded when stationary.
  std::uint64_t horizon() const { return data_->horizon; }
  bool stationary() const { return data_->segments.size() == 1; }

  /// Same environment with a different outcome stream.
  Environment reseeded(std::uint64_t seed) const;

  /// Effective (occupancy-adjusted) success probabilities at 0-based step n.
  const Grid& theta_at(std::uint64_t n) const { return segment(n).theta; }
  const Grid& mu_at(std::uint64_t n) const { return segment(n).mu; }
  DecisionPair best_pair_at(std::uint64_t n) const { return segment(n).best; }
  double mu_star_at(std::uint64_t n) const { return segment(n).mu_star; }

  /// Outcome of transmitting on `d` at step n.
  bool draw(const DecisionPair& d, std::uint64_t n) const;

  struct Segment {
    std::uint64_t start = 0;
    std::uint64_t end = 0;  // exclusive
    Grid theta;
    Grid mu;
    DecisionPair best;
    double mu_star = 0.0;
  };
  const std::vector<Segment>& segments() const { return data_->segments; }
  const Segment& segment(std::uint64_t n) const;

 private:
  struct Data {
    RateSet rates;
    int channels = 0;
    std::uint64_t horizon = 0;
    std::vector<Segment> segments;
  };

  std::shared_ptr<const Data> data_;
  std::uint64_t seed_ = 0;
};

Environment stationary_env(const LinkModel& model, std::uint64_t seed = 0);
Environment trace_env(const RateSet& rates, const TraceTable& trace, std::uint64_t seed = 0);

/// Synthetic slowly drifting channels: each channel carries a latent
/// quality following a reflected Gaussian random walk, and rate k succeeds
/// with probability 1 / (1 + exp((threshold_k - quality) / slope)).
/// Thresholds increase with the rate, so every row is nonincreasing in k.
struct SyntheticDriftSpec {
  std::vector<double> rates;
  int channels = 1;
  std::uint64_t horizon = 1;
  std::uint64_t interval = 1;  // steps between walk updates
  double step_stddev = 0.0;
  double lower = 0.0;  // reflection bounds of the latent quality
  double upper = 30.0;
  std::vector<double> initial;     // per-channel starting quality; drawn when empty
  std::vector<double> thresholds;  // per rate, strictly increasing
  double slope = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Success probabilities for a latent quality under `spec`.
std::vector<double> drift_row(const SyntheticDriftSpec& spec, double quality);

TraceTable synth_drift_trace(const SyntheticDriftSpec& spec);
Environment synth_drift_env(const SyntheticDriftSpec& spec, std::uint64_t outcome_seed = 0);

/// Uniform [0,1) variate addressed by (seed, stream, index).
double hashed_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

}  // namespace chanrate
