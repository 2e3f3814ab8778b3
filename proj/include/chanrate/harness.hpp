#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "chanrate/bounds.hpp"
#include "chanrate/environment.hpp"
#include "chanrate/policy.hpp"

namespace chanrate {

struct PolicySpec {
  PolicyKind kind = PolicyKind::KlUcb;
  PolicyOptions options;
  std::string label;  // defaults to the policy name
};

enum class Accounting { Alternative, Original, Both };

struct ExperimentConfig {
  std::vector<double> rates;

  // Exactly one outcome source.
  std::optional<Grid> theta;
  std::optional<std::vector<double>> occupancy;
  std::optional<TraceTable> trace;
  std::optional<SyntheticDriftSpec> synth;
  std::uint64_t accelerate = 1;

  std::vector<PolicySpec> policies;
  std::uint64_t horizon = 0;  // slots
  std::vector<std::uint64_t> seeds;
  Accounting accounting = Accounting::Alternative;
  /// Time budget of the original system; floor((horizon - 1) / r_K) when unset.
  std::optional<double> original_time;
  std::uint64_t decisions_stride = 1;
  unsigned threads = 0;  // 0: hardware concurrency
  std::filesystem::path out_dir = "results";

  /// Throws ModelError describing the first violated requirement.
  void validate() const;
};

/// Reads a config object. Relative file paths resolve against `base_dir`.
ExperimentConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

Environment build_environment(const ExperimentConfig& config);

struct DecisionRecord {
  std::uint64_t step = 0;  // 1-based transmission number
  DecisionPair chosen;
  DecisionPair best;
};

/// One (policy, seed) run.
struct RunRecord {
  std::uint64_t seed = 0;
  std::vector<double> regret;           // alternative system, at ExperimentResult::checkpoints
  std::vector<double> original_regret;  // original system, at ExperimentResult::time_checkpoints
  double expected_reward = 0.0;         // sum of mu of the chosen pairs
  double realized_reward = 0.0;         // sum of r_k over successes
  std::vector<std::uint64_t> pulls;     // t_ck(T), row-major
  std::vector<std::uint64_t> packets;   // s_ck(T) in the original system, row-major
  double time_used = 0.0;               // sum of s_ck / r_k
  std::vector<DecisionRecord> decisions;
};

struct PolicyResult {
  std::string label;
  std::vector<RunRecord> runs;  // ordered as ExperimentConfig::seeds
  std::vector<double> mean_regret;
  std::vector<double> stddev_regret;
  std::vector<double> mean_original_regret;
  std::vector<double> stddev_original_regret;
  double mean_efficiency = 0.0;
  double stderr_efficiency = 0.0;
};

struct ExperimentResult {
  std::uint64_t horizon = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<std::uint64_t> checkpoints;  // slots
  std::vector<double> time_checkpoints;    // original-system time
  std::optional<double> original_time;
  std::vector<PolicyResult> policies;
  double oracle_reward = 0.0;
  double static_reward = 0.0;
  DecisionPair static_pair;
  std::optional<BoundReport> bounds;  // stationary runs only

  const PolicyResult& policy(const std::string& label) const;
  /// Index of a slot checkpoint; throws when absent.
  std::size_t checkpoint_index(std::uint64_t slot) const;
};

/// Slot checkpoints {2^j <= horizon} ∪ {horizon} ∪ extra, sorted and unique.
std::vector<std::uint64_t> make_checkpoints(std::uint64_t horizon, const std::vector<std::uint64_t>& extra = {});

/// Time spent by the original system: sum over pairs of s_ck / r_k, in row-major order.
double transmission_time(const std::vector<std::uint64_t>& packets, const RateSet& rates);

/// Runs one policy for one seed; `env` must already carry that seed.
RunRecord run_single(const PolicySpec& spec, const Environment& env, const ExperimentConfig& config,
                     const std::vector<std::uint64_t>& checkpoints, const std::vector<double>& time_checkpoints,
                     bool keep_decisions);

ExperimentResult run_experiment(const ExperimentConfig& config);

struct AccountingReport {
  struct Entry {
    std::string label;
    double lower = 0.0;       // mean R(floor(T r_1))
    double middle = 0.0;      // mean R_1(T)
    double upper = 0.0;       // mean R(ceil(T r_K))
    double tolerance = 0.0;   // 3 Monte Carlo standard errors
    bool lower_holds = false;
    bool upper_holds = false;
    bool budget_holds = false;  // sum s_ck / r_k <= T in every run
  };
  std::vector<Entry> entries;
  bool ok() const;
};

/// Checks R(floor(T r_1)) <= R_1(T) <= R(ceil(T r_K)) on seed averages and
/// the original-system time budget on every run.
AccountingReport accounting_check(const ExperimentResult& result, const RateSet& rates);

/// Writes regret.csv, decisions.csv, summary.json and, for stationary runs, bounds.json.
void emit_outputs(const ExperimentResult& result, const std::filesystem::path& dir);

nlohmann::json summary_json(const ExperimentResult& result);

}  // namespace chanrate
