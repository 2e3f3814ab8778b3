#include "chanrate/policy.hpp"

#include <algorithm>
#include <cmath>

namespace chanrate {

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::KlUcb:
      return "kl-ucb";
    case PolicyKind::CrsT:
      return "crs-t";
    case PolicyKind::KlUcbU:
      return "kl-ucb-u";
    case PolicyKind::Oracle:
      return "oracle";
    case PolicyKind::Static:
      return "static";
  }
  return "unknown";
}

PolicyKind parse_policy_kind(const std::string& name) {
  for (auto k : {PolicyKind::KlUcb, PolicyKind::CrsT, PolicyKind::KlUcbU, PolicyKind::Oracle,
                 PolicyKind::Static})
    if (to_string(k) == name) return k;
  throw ModelError("unknown policy kind '" + name + "'");
}

DecisionPair round_robin_pair(std::uint64_t n, int rates) {
  const auto k = static_cast<std::uint64_t>(rates);
  return {static_cast<int>(n / k), static_cast<int>(n % k)};
}

// ---------------------------------------------------------------------------

namespace {

std::variant<HistoryStats, WindowStats> make_table(int channels, int rates, std::optional<int> window) {
  if (window) return WindowStats(channels, rates, *window);
  return HistoryStats(channels, rates);
}

// Any index within this distance of the running best is evaluated exactly,
// so the cheap divergence test never decides a near-tie.
double prune_level(double best) { return best - 1e-9 * std::max(1.0, std::abs(best)); }

}  // namespace

Observations::Observations(int channels, int rates, std::optional<int> window)
    : table_(make_table(channels, rates, window)) {}

const ArmStats& Observations::at(const DecisionPair& d) const {
  return std::visit([&](const auto& t) -> const ArmStats& { return t.at(d); }, table_);
}

void Observations::record(const DecisionPair& d, bool success) {
  std::visit([&](auto& t) { t.record(d, success); }, table_);
}

void Observations::clear() {
  std::visit([](auto& t) { t.clear(); }, table_);
}

int Observations::window() const {
  if (const auto* w = std::get_if<WindowStats>(&table_)) return w->window();
  return 0;
}

// ---------------------------------------------------------------------------

IndexPolicy::IndexPolicy(RateSet rates, int channels, PolicyOptions options)
    : rates_(std::move(rates)),
      channels_(channels),
      options_(options),
      stats_(channels, rates_.size(), options.window) {
  if (channels < 1) throw ModelError("policy needs at least one channel");
  if (options_.fixed_budget && !(*options_.fixed_budget >= 0.0))
    throw ModelError("fixed budget must be nonnegative");
}

DecisionPair IndexPolicy::select() {
  const auto pairs = static_cast<std::uint64_t>(channels_) * static_cast<std::uint64_t>(rates_.size());
  const DecisionPair d = steps_ < pairs ? round_robin_pair(steps_, rates_.size()) : choose();
  pending_ = d;
  return d;
}

void IndexPolicy::update(const DecisionPair& d, bool success) {
  if (!pending_ || *pending_ != d)
    throw ModelError("update for " + to_string(d) + " does not match the last selected pair");
  pending_.reset();
  stats_.record(d, success);
  ++steps_;
}

void IndexPolicy::reset() {
  stats_.clear();
  steps_ = 0;
  pending_.reset();
}

double IndexPolicy::budget() const {
  if (options_.fixed_budget) return *options_.fixed_budget;
  if (stats_.windowed()) return allowance(static_cast<std::uint64_t>(stats_.window()));
  return allowance(std::max<std::uint64_t>(steps_, 1));
}

int IndexPolicy::channel_leader(int c) const {
  int best = 0;
  for (int k = 1; k < rates_.size(); ++k)
    if (mean({c, k}) > mean({c, best})) best = k;
  return best;
}

DecisionPair IndexPolicy::global_leader() const {
  DecisionPair best{0, 0};
  double best_mean = mean(best);
  for (int c = 0; c < channels_; ++c) {
    for (int k = 0; k < rates_.size(); ++k) {
      const double m = mean({c, k});
      if (m > best_mean) {
        best = {c, k};
        best_mean = m;
      }
    }
  }
  return best;
}

// ---------------------------------------------------------------------------

KlUcbPolicy::KlUcbPolicy(RateSet rates, int channels, PolicyOptions options)
    : IndexPolicy(std::move(rates), channels, options) {}

std::unique_ptr<Policy> KlUcbPolicy::clone() const { return std::make_unique<KlUcbPolicy>(*this); }

std::string KlUcbPolicy::name() const {
  return stats_.windowed() ? "kl-ucb/w" + std::to_string(stats_.window()) : "kl-ucb";
}

DecisionPair KlUcbPolicy::choose() {
  const double f = budget();
  // Starting from the empirical leader lets most pairs be discarded by the
  // one-evaluation divergence test.
  const DecisionPair seed = global_leader();
  DecisionPair best = seed;
  double best_q = ucb_index(stats_.at(seed), rates_[seed.rate], f);
  for (int c = 0; c < channels_; ++c) {
    for (int k = 0; k < rates_.size(); ++k) {
      const DecisionPair d{c, k};
      if (d == seed) continue;
      const auto& s = stats_.at(d);
      if (!ucb_exceeds(s, rates_[k], f, prune_level(best_q))) continue;
      const double q = ucb_index(s, rates_[k], f);
      if (q > best_q || (q == best_q && d < best)) {
        best = d;
        best_q = q;
      }
    }
  }
  return best;
}

// ---------------------------------------------------------------------------

CrsTPolicy::CrsTPolicy(RateSet rates, int channels, PolicyOptions options)
    : IndexPolicy(std::move(rates), channels, options) {}

std::unique_ptr<Policy> CrsTPolicy::clone() const { return std::make_unique<CrsTPolicy>(*this); }

std::string CrsTPolicy::name() const {
  return stats_.windowed() ? "crs-t/w" + std::to_string(stats_.window()) : "crs-t";
}

bool CrsTPolicy::leader_confirmed(int c) const {
  const double f = budget();
  const int l = channel_leader(c);
  const double lower = lcb_index(stats_.at({c, l}), rates_[l], f);
  for (int k : {l - 1, l + 1}) {
    if (k < 0 || k >= rates_.size()) continue;
    if (ucb_exceeds(stats_.at({c, k}), rates_[k], f, lower)) return false;
  }
  return true;
}

DecisionPair CrsTPolicy::choose() {
  for (int c = 0; c < channels_; ++c) {
    if (leader_confirmed(c)) continue;
    const int l = channel_leader(c);
    int pick = std::max(l - 1, 0);
    for (int k = pick + 1; k <= std::min(l + 1, rates_.size() - 1); ++k)
      if (stats_.at({c, k}).pulls < stats_.at({c, pick}).pulls) pick = k;
    return {c, pick};
  }
  // Every leader is confirmed: KL-UCB restricted to the channel leaders.
  const double f = budget();
  DecisionPair best{0, channel_leader(0)};
  double best_q = ucb_index(stats_.at(best), rates_[best.rate], f);
  for (int c = 1; c < channels_; ++c) {
    const DecisionPair d{c, channel_leader(c)};
    const auto& s = stats_.at(d);
    if (!ucb_exceeds(s, rates_[d.rate], f, prune_level(best_q))) continue;
    const double q = ucb_index(s, rates_[d.rate], f);
    if (q > best_q) {
      best = d;
      best_q = q;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------

KlUcbUPolicy::KlUcbUPolicy(RateSet rates, int channels, PolicyOptions options)
    : IndexPolicy(std::move(rates), channels, options),
      graph_(channels, rates_.size()),
      leaders_(channels, rates_.size(), options.window) {
  candidates_.resize(static_cast<std::size_t>(graph_.vertex_count()));
  for (int c = 0; c < channels; ++c) {
    for (int k = 0; k < rates_.size(); ++k) {
      auto set = graph_.neighbours({c, k});
      if (!options_.strict_neighbourhood) set.push_back({c, k});
      std::sort(set.begin(), set.end());
      candidates_[static_cast<std::size_t>(c * rates_.size() + k)] = std::move(set);
    }
  }
}

std::unique_ptr<Policy> KlUcbUPolicy::clone() const { return std::make_unique<KlUcbUPolicy>(*this); }

std::string KlUcbUPolicy::name() const {
  std::string n = "kl-ucb-u";
  if (options_.strict_neighbourhood) n += "/strict";
  if (stats_.windowed()) n += "/w" + std::to_string(stats_.window());
  return n;
}

void KlUcbUPolicy::reset() {
  IndexPolicy::reset();
  leaders_.clear();
}

DecisionPair KlUcbUPolicy::choose() {
  const DecisionPair leader = global_leader();
  leaders_.record(leader, false);
  const std::uint64_t v = leaders_.at(leader).pulls;
  const auto gamma = static_cast<std::uint64_t>(graph_.gamma());
  if (gamma == 0 || (v - 1) % gamma == 0) return leader;

  const double f = options_.fixed_budget ? *options_.fixed_budget : allowance(v);
  const auto& cand = candidates_[static_cast<std::size_t>(leader.channel * rates_.size() + leader.rate)];
  DecisionPair best = cand.front();
  double best_b = ucb_index(stats_.at(best), rates_[best.rate], f);
  for (std::size_t i = 1; i < cand.size(); ++i) {
    const DecisionPair& d = cand[i];
    const auto& s = stats_.at(d);
    if (!ucb_exceeds(s, rates_[d.rate], f, prune_level(best_b))) continue;
    const double b = ucb_index(s, rates_[d.rate], f);
    if (b > best_b) {
      best = d;
      best_b = b;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------

OraclePolicy::OraclePolicy(BestPairFn best) : best_(std::move(best)) {
  if (!best_) throw ModelError("oracle needs a best-pair function");
}

DecisionPair OraclePolicy::select() { return best_(steps_); }

void OraclePolicy::update(const DecisionPair&, bool) { ++steps_; }

std::unique_ptr<Policy> OraclePolicy::clone() const { return std::make_unique<OraclePolicy>(*this); }

void FixedPolicy::update(const DecisionPair& d, bool) {
  if (d != pair_) throw ModelError("update for " + to_string(d) + " does not match the fixed pair");
  ++steps_;
}

// ---------------------------------------------------------------------------

std::unique_ptr<Policy> make_policy(PolicyKind kind, const RateSet& rates, int channels,
                                    const PolicyOptions& options) {
  switch (kind) {
    case PolicyKind::KlUcb:
      return std::make_unique<KlUcbPolicy>(rates, channels, options);
    case PolicyKind::CrsT:
      return std::make_unique<CrsTPolicy>(rates, channels, options);
    case PolicyKind::KlUcbU:
      return std::make_unique<KlUcbUPolicy>(rates, channels, options);
    case PolicyKind::Oracle:
    case PolicyKind::Static:
      break;
  }
  throw ModelError(to_string(kind) + " is a baseline and needs environment knowledge");
}

std::unique_ptr<Policy> make_windowed(PolicyKind kind, int window, const RateSet& rates, int channels,
                                      PolicyOptions options) {
  if (window < 1) throw ModelError("window size must be at least 1");
  options.window = window;
  return make_policy(kind, rates, channels, options);
}

}  // namespace chanrate
