#include "chanrate/kl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace chanrate {

namespace {

constexpr int kMaxBisections = 80;
constexpr double kResidualTolerance = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_budget(double budget) {
  if (!(budget >= 0.0)) throw ModelError("index budget must be nonnegative");
}

}  // namespace

double kl_bernoulli(double p, double q) {
  if (!(p >= 0.0 && p <= 1.0) || !(q >= 0.0 && q <= 1.0))
    throw ModelError("KL divergence arguments must lie in [0,1]");
  if (p == q) return 0.0;
  double d = 0.0;
  if (p > 0.0) {
    if (q == 0.0) return kInf;
    d += p * std::log(p / q);
  }
  if (p < 1.0) {
    if (q == 1.0) return kInf;
    d += (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
  }
  return std::max(d, 0.0);
}

double allowance(std::uint64_t n) {
  if (n == 0) throw ModelError("allowance is defined for n >= 1");
  const double l = std::log(static_cast<double>(n));
  return l + 3.0 * std::log(std::max(l, 1.0));
}

double ucb_index(const ArmStats& stats, double rate, double budget) {
  require_budget(budget);
  if (stats.pulls == 0) return rate;
  const double p = stats.frequency();
  if (budget <= 0.0 || p == 1.0) return p * rate;
  const double t = static_cast<double>(stats.pulls);
  // t * I(p, q) increases on [p, 1] from 0 to +inf (p < 1).
  double lo = p;
  double hi = 1.0;
  for (int i = 0; i < kMaxBisections; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double g = t * kl_bernoulli(p, mid) - budget;
    if (std::abs(g) < kResidualTolerance) return mid * rate;
    if (g > 0.0)
      hi = mid;
    else
      lo = mid;
  }
  return lo * rate;
}

double lcb_index(const ArmStats& stats, double rate, double budget) {
  require_budget(budget);
  if (stats.pulls == 0) return 0.0;
  const double p = stats.frequency();
  if (budget <= 0.0 || p == 0.0) return p * rate;
  const double t = static_cast<double>(stats.pulls);
  // t * I(p, q) decreases on [0, p] from +inf (p > 0) to 0.
  double lo = 0.0;
  double hi = p;
  for (int i = 0; i < kMaxBisections; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double g = t * kl_bernoulli(p, mid) - budget;
    if (std::abs(g) < kResidualTolerance) return mid * rate;
    if (g > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return hi * rate;
}

bool ucb_exceeds(const ArmStats& stats, double rate, double budget, double level) {
  require_budget(budget);
  if (stats.pulls == 0) return rate > level;
  if (level >= rate) return false;
  const double p = stats.frequency();
  if (level < p * rate) return true;
  if (budget <= 0.0 || p == 1.0) return false;
  const double t = static_cast<double>(stats.pulls);
  return t * kl_bernoulli(p, level / rate) < budget;
}

HistoryStats::HistoryStats(int channels, int rates)
    : channels_(channels),
      rates_(rates),
      arms_(static_cast<std::size_t>(channels) * static_cast<std::size_t>(rates)) {}

void HistoryStats::record(const DecisionPair& d, bool success) {
  auto& a = arms_[slot(d)];
  ++a.pulls;
  if (success) ++a.successes;
}

void HistoryStats::clear() { std::fill(arms_.begin(), arms_.end(), ArmStats{}); }

WindowStats::WindowStats(int channels, int rates, int window)
    : channels_(channels),
      rates_(rates),
      window_(window),
      arms_(static_cast<std::size_t>(channels) * static_cast<std::size_t>(rates)) {
  if (window < 1) throw ModelError("window size must be at least 1");
  ring_.resize(static_cast<std::size_t>(window));
}

void WindowStats::push(Entry e) {
  auto& oldest = ring_[static_cast<std::size_t>(head_)];
  if (filled_ == window_ && oldest.pair >= 0) {
    auto& a = arms_[static_cast<std::size_t>(oldest.pair)];
    --a.pulls;
    if (oldest.success) --a.successes;
  }
  oldest = e;
  if (e.pair >= 0) {
    auto& a = arms_[static_cast<std::size_t>(e.pair)];
    ++a.pulls;
    if (e.success) ++a.successes;
  }
  head_ = (head_ + 1) % window_;
  filled_ = std::min(filled_ + 1, window_);
}

void WindowStats::record(const DecisionPair& d, bool success) {
  push({static_cast<int>(slot(d)), success});
}

void WindowStats::record_idle() { push({}); }

void WindowStats::clear() {
  std::fill(ring_.begin(), ring_.end(), Entry{});
  std::fill(arms_.begin(), arms_.end(), ArmStats{});
  head_ = 0;
  filled_ = 0;
}

double window_ucb_index(const WindowStats& ws, const DecisionPair& d, double rate) {
  return ucb_index(ws.at(d), rate, allowance(static_cast<std::uint64_t>(ws.window())));
}

}  // namespace chanrate
