#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "chanrate/model.hpp"

namespace chanrate {

/// Bernoulli Kullback-Leibler divergence I(p, q) with 0 log 0 = 0.
/// Returns +inf when q = 0 < p or p < q = 1. Throws ModelError outside [0,1].
double kl_bernoulli(double p, double q);

/// Exploration allowance log(n) + 3 log(max(log n, 1)); defined for n >= 1.
double allowance(std::uint64_t n);

/// Sufficient statistics of one (channel, rate) pair.
struct ArmStats {
  std::uint64_t pulls = 0;
  std::uint64_t successes = 0;

  /// Empirical success frequency, 0 when the pair was never pulled.
  double frequency() const {
    return pulls == 0 ? 0.0 : static_cast<double>(successes) / static_cast<double>(pulls);
  }
  /// Empirical throughput r_k * successes / pulls.
  double mean(double rate) const { return rate * frequency(); }

  friend bool operator==(const ArmStats&, const ArmStats&) = default;
};

/// Largest q in [mean, rate] with pulls * I(mean/rate, q/rate) <= budget;
/// `rate` when the pair was never pulled.
double ucb_index(const ArmStats& stats, double rate, double budget);

/// Smallest q in [0, mean] with pulls * I(mean/rate, q/rate) <= budget;
/// 0 when the pair was never pulled.
double lcb_index(const ArmStats& stats, double rate, double budget);

/// True iff ucb_index(stats, rate, budget) > level, decided with a single
/// divergence evaluation instead of a root search.
bool ucb_exceeds(const ArmStats& stats, double rate, double budget, double level);

/// True iff ucb_index(stats, rate, budget) <= level.
inline bool ucb_at_most(const ArmStats& stats, double rate, double budget, double level) {
  return !ucb_exceeds(stats, rate, budget, level);
}

/// Full-history statistics for every pair of a C x K problem.
class HistoryStats {
 public:
  HistoryStats(int channels, int rates);

  void record(const DecisionPair& d, bool success);
  const ArmStats& at(const DecisionPair& d) const { return arms_[slot(d)]; }
  void clear();

  int channels() const { return channels_; }
  int rates() const { return rates_; }

 private:
  std::size_t slot(const DecisionPair& d) const {
    return static_cast<std::size_t>(d.channel * rates_ + d.rate);
  }

  int channels_;
  int rates_;
  std::vector<ArmStats> arms_;
};

/// Statistics over the last `window` global steps. Each step occupies one
/// slot of the ring buffer whether or not a pair was played.
class WindowStats {
 public:
  WindowStats(int channels, int rates, int window);

  void record(const DecisionPair& d, bool success);
  /// A step on which no pair was observed; still ages the window.
  void record_idle();
  const ArmStats& at(const DecisionPair& d) const { return arms_[slot(d)]; }
  void clear();

  int window() const { return window_; }
  /// Number of occupied slots, min(steps so far, window).
  int filled() const { return filled_; }
  int channels() const { return channels_; }
  int rates() const { return rates_; }

 private:
  struct Entry {
    int pair = -1;  // -1 marks an idle step
    bool success = false;
  };

  std::size_t slot(const DecisionPair& d) const {
    return static_cast<std::size_t>(d.channel * rates_ + d.rate);
  }
  void push(Entry e);

  int channels_;
  int rates_;
  int window_;
  std::vector<Entry> ring_;
  int head_ = 0;
  int filled_ = 0;
  std::vector<ArmStats> arms_;
};

/// q^tau index: ucb_index on windowed statistics with budget allowance(tau).
double window_ucb_index(const WindowStats& ws, const DecisionPair& d, double rate);

}  // namespace chanrate
