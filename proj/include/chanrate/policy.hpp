#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "chanrate/graph.hpp"
#include "chanrate/kl.hpp"
#include "chanrate/model.hpp"

namespace chanrate {

enum class PolicyKind { KlUcb, CrsT, KlUcbU, Oracle, Static };

std::string to_string(PolicyKind kind);
PolicyKind parse_policy_kind(const std::string& name);

struct PolicyOptions {
  /// Sliding-window size tau; full history when empty.
  std::optional<int> window;
  /// KL-UCB-U only: maximise over N(l) instead of N(l) ∪ {l}.
  bool strict_neighbourhood = false;
  /// Replaces the exploration allowance by a constant budget. Used to run
  /// windowed and full-history variants with matched budgets.
  std::optional<double> fixed_budget;
};

/// Sequential (channel, rate) selection: select() chooses the pair for the
/// next transmission, update() ingests its binary outcome.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual DecisionPair select() = 0;
  virtual void update(const DecisionPair& d, bool success) = 0;
  virtual void reset() = 0;
  virtual std::unique_ptr<Policy> clone() const = 0;
  virtual std::string name() const = 0;

  /// Completed transmissions so far.
  virtual std::uint64_t steps() const = 0;
};

/// Per-pair statistics, either full history or a sliding window.
class Observations {
 public:
  Observations(int channels, int rates, std::optional<int> window);

  const ArmStats& at(const DecisionPair& d) const;
  void record(const DecisionPair& d, bool success);
  void clear();

  bool windowed() const { return std::holds_alternative<WindowStats>(table_); }
  int window() const;

 private:
  std::variant<HistoryStats, WindowStats> table_;
};

/// Shared machinery of the index policies: round-robin initialisation,
/// select/update alternation and statistics bookkeeping.
class IndexPolicy : public Policy {
 public:
  DecisionPair select() final;
  void update(const DecisionPair& d, bool success) final;
  void reset() override;
  std::uint64_t steps() const final { return steps_; }

  const Observations& observations() const { return stats_; }
  const RateSet& rates() const { return rates_; }
  int channels() const { return channels_; }

 protected:
  IndexPolicy(RateSet rates, int channels, PolicyOptions options);

  /// Decision for transmission steps()+1 once every pair has been tried.
  virtual DecisionPair choose() = 0;

  /// Exploration budget for the q / lower-q indexes at the current step.
  double budget() const;
  double mean(const DecisionPair& d) const { return stats_.at(d).mean(rates_[d.rate]); }
  /// Lexicographically smallest pair of channel c with the largest empirical mean.
  int channel_leader(int c) const;
  /// Lexicographically smallest pair with the largest empirical mean.
  DecisionPair global_leader() const;

  RateSet rates_;
  int channels_;
  PolicyOptions options_;
  Observations stats_;

 private:
  std::uint64_t steps_ = 0;
  std::optional<DecisionPair> pending_;
};

/// KL-UCB: arg max of the q index over all pairs.
class KlUcbPolicy final : public IndexPolicy {
 public:
  KlUcbPolicy(RateSet rates, int channels, PolicyOptions options = {});
  std::unique_ptr<Policy> clone() const override;
  std::string name() const override;

 protected:
  DecisionPair choose() override;
};

/// CRS-T: per-channel leaders with a lower/upper confidence test against
/// adjacent rates; KL-UCB over the leaders once every test passes.
class CrsTPolicy final : public IndexPolicy {
 public:
  CrsTPolicy(RateSet rates, int channels, PolicyOptions options = {});
  std::unique_ptr<Policy> clone() const override;
  std::string name() const override;

  /// U_c at the current step (1 when the leader of c beats its rate neighbours).
  bool leader_confirmed(int c) const;

 protected:
  DecisionPair choose() override;
};

/// KL-UCB-U: leader-centred exploration over the neighbourhood graph with
/// forced leader plays every gamma leaderships.
class KlUcbUPolicy final : public IndexPolicy {
 public:
  KlUcbUPolicy(RateSet rates, int channels, PolicyOptions options = {});
  std::unique_ptr<Policy> clone() const override;
  std::string name() const override;
  void reset() override;

  const NeighborhoodGraph& graph() const { return graph_; }
  /// v_d: times d has been the global leader (within the window if windowed).
  std::uint64_t leader_count(const DecisionPair& d) const { return leaders_.at(d).pulls; }

 protected:
  DecisionPair choose() override;

 private:
  NeighborhoodGraph graph_;
  std::vector<std::vector<DecisionPair>> candidates_;  // sorted lexicographically
  Observations leaders_;
};

/// Plays the best pair of the current step; needs knowledge of theta(n).
class OraclePolicy final : public Policy {
 public:
  using BestPairFn = std::function<DecisionPair(std::uint64_t step)>;

  explicit OraclePolicy(BestPairFn best);

  DecisionPair select() override;
  void update(const DecisionPair& d, bool success) override;
  void reset() override { steps_ = 0; }
  std::unique_ptr<Policy> clone() const override;
  std::string name() const override { return "oracle"; }
  std::uint64_t steps() const override { return steps_; }

 private:
  BestPairFn best_;
  std::uint64_t steps_ = 0;
};

/// Always plays one pair.
class FixedPolicy final : public Policy {
 public:
  explicit FixedPolicy(DecisionPair pair) : pair_(pair) {}

  DecisionPair select() override { return pair_; }
  void update(const DecisionPair& d, bool success) override;
  void reset() override { steps_ = 0; }
  std::unique_ptr<Policy> clone() const override { return std::make_unique<FixedPolicy>(*this); }
  std::string name() const override { return "static"; }
  std::uint64_t steps() const override { return steps_; }

 private:
  DecisionPair pair_;
  std::uint64_t steps_ = 0;
};

/// Builds one of the three learning policies.
std::unique_ptr<Policy> make_policy(PolicyKind kind, const RateSet& rates, int channels,
                                    const PolicyOptions& options = {});

/// Sliding-window variant of a learning policy.
std::unique_ptr<Policy> make_windowed(PolicyKind kind, int window, const RateSet& rates, int channels,
                                      PolicyOptions options = {});

/// The round-robin pair for 0-based step n < C*K, n = K*c' + k'.
DecisionPair round_robin_pair(std::uint64_t n, int rates);

}  // namespace chanrate
