#include "chanrate/environment.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace chanrate {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

double hashed_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ stream);
  h = splitmix64(h ^ index);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

void TraceTable::validate() const {
  if (segments.empty()) throw ModelError("trace has no segments");
  if (segments.front().start != 0) throw ModelError("first trace segment must start at step 0");
  const int channels = segments.front().theta.channels();
  const int rates = segments.front().theta.rates();
  if (channels < 1 || rates < 1) throw ModelError("trace matrices must be non-empty");
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& s = segments[i];
    if (i > 0 && s.start <= segments[i - 1].start)
      throw ModelError("trace segment starts must be strictly increasing");
    if (s.theta.channels() != channels || s.theta.rates() != rates)
      throw ModelError("trace matrices must share one shape");
    for (double p : s.theta.values())
      if (!(p >= 0.0 && p <= 1.0)) throw ModelError("trace probabilities must lie in [0,1]");
  }
  if (horizon <= segments.back().start) throw ModelError("trace horizon must exceed the last segment start");
}

TraceTable accelerate(const TraceTable& trace, std::uint64_t factor) {
  if (factor < 1) throw ModelError("acceleration factor must be at least 1");
  trace.validate();
  TraceTable out;
  out.horizon = std::max<std::uint64_t>(trace.horizon / factor, 1);
  for (const auto& s : trace.segments) {
    const std::uint64_t start = s.start / factor;
    if (!out.segments.empty() && out.segments.back().start == start)
      out.segments.back().theta = s.theta;
    else
      out.segments.push_back({start, s.theta});
  }
  return out;
}

Environment::Environment(RateSet rates, TraceTable trace, std::uint64_t seed,
                         std::optional<std::vector<double>> occupancy)
    : seed_(seed) {
  trace.validate();
  auto data = std::make_shared<Data>(Data{std::move(rates), trace.segments.front().theta.channels(),
                                          trace.horizon, {}});
  if (trace.segments.front().theta.rates() != data->rates.size())
    throw ModelError("trace matrices do not match the rate count");
  for (std::size_t i = 0; i < trace.segments.size(); ++i) {
    const auto& s = trace.segments[i];
    const LinkModel model(data->rates, s.theta, occupancy);
    Segment seg;
    seg.start = s.start;
    seg.end = i + 1 < trace.segments.size() ? trace.segments[i + 1].start : trace.horizon;
    seg.theta = model.effective_theta();
    seg.mu = throughput_matrix(model);
    seg.best = best_pair(seg.mu);
    seg.mu_star = seg.mu(seg.best);
    data->segments.push_back(std::move(seg));
  }
  data_ = std::move(data);
}

Environment Environment::reseeded(std::uint64_t seed) const {
  Environment e = *this;
  e.seed_ = seed;
  return e;
}

const Environment::Segment& Environment::segment(std::uint64_t n) const {
  if (n >= data_->horizon)
    throw ModelError("step " + std::to_string(n) + " is beyond the environment horizon " +
                     std::to_string(data_->horizon));
  const auto& segs = data_->segments;
  auto it = std::upper_bound(segs.begin(), segs.end(), n,
                             [](std::uint64_t v, const Segment& s) { return v < s.start; });
  return *std::prev(it);
}

bool Environment::draw(const DecisionPair& d, std::uint64_t n) const {
  const double p = theta_at(n)(d);
  const auto stream = static_cast<std::uint64_t>(d.channel) * static_cast<std::uint64_t>(rate_count()) +
                      static_cast<std::uint64_t>(d.rate);
  return hashed_uniform(seed_, stream, n) < p;
}

Environment stationary_env(const LinkModel& model, std::uint64_t seed) {
  TraceTable t;
  t.segments.push_back({0, model.theta()});
  t.horizon = Environment::kUnbounded;
  return Environment(model.rates(), std::move(t), seed, model.occupancy());
}

Environment trace_env(const RateSet& rates, const TraceTable& trace, std::uint64_t seed) {
  return Environment(rates, trace, seed);
}

// ---------------------------------------------------------------------------

void SyntheticDriftSpec::validate() const {
  const RateSet check(rates);
  if (channels < 1) throw ModelError("synthetic spec needs at least one channel");
  if (horizon < 1 || interval < 1) throw ModelError("synthetic horizon and interval must be positive");
  if (!(step_stddev >= 0.0)) throw ModelError("synthetic step_stddev must be nonnegative");
  if (!(lower < upper)) throw ModelError("synthetic bounds must satisfy lower < upper");
  if (!(slope > 0.0)) throw ModelError("synthetic slope must be positive");
  if (thresholds.size() != rates.size()) throw ModelError("synthetic spec needs one threshold per rate");
  for (std::size_t k = 1; k < thresholds.size(); ++k)
    if (!(thresholds[k - 1] < thresholds[k])) throw ModelError("synthetic thresholds must increase");
  if (!initial.empty()) {
    if (static_cast<int>(initial.size()) != channels)
      throw ModelError("synthetic spec needs one initial quality per channel");
    for (double x : initial)
      if (!(x >= lower && x <= upper)) throw ModelError("initial quality outside the reflection bounds");
  }
}

std::vector<double> drift_row(const SyntheticDriftSpec& spec, double quality) {
  std::vector<double> row;
  row.reserve(spec.thresholds.size());
  for (double thr : spec.thresholds) row.push_back(1.0 / (1.0 + std::exp((thr - quality) / spec.slope)));
  return row;
}

namespace {

double reflect(double x, double lo, double hi) {
  const double width = hi - lo;
  double y = std::fmod(x - lo, 2.0 * width);
  if (y < 0) y += 2.0 * width;
  return y <= width ? lo + y : hi - (y - width);
}

}  // namespace

TraceTable synth_drift_trace(const SyntheticDriftSpec& spec) {
  spec.validate();
  std::mt19937_64 gen(spec.seed);
  std::vector<double> quality = spec.initial;
  if (quality.empty()) {
    std::uniform_real_distribution<double> start(spec.lower, spec.upper);
    for (int c = 0; c < spec.channels; ++c) quality.push_back(start(gen));
  }
  std::normal_distribution<double> step(0.0, 1.0);
  const int rates = static_cast<int>(spec.rates.size());

  TraceTable t;
  t.horizon = spec.horizon;
  for (std::uint64_t start = 0; start < spec.horizon; start += spec.interval) {
    if (start > 0 && spec.step_stddev > 0.0)
      for (auto& q : quality) q = reflect(q + spec.step_stddev * step(gen), spec.lower, spec.upper);
    Grid theta(spec.channels, rates);
    for (int c = 0; c < spec.channels; ++c) {
      const auto row = drift_row(spec, quality[static_cast<std::size_t>(c)]);
      for (int k = 0; k < rates; ++k) theta(c, k) = row[static_cast<std::size_t>(k)];
    }
    if (!t.segments.empty() && t.segments.back().theta == theta) continue;
    t.segments.push_back({start, std::move(theta)});
  }
  return t;
}

Environment synth_drift_env(const SyntheticDriftSpec& spec, std::uint64_t outcome_seed) {
  return Environment(RateSet(spec.rates), synth_drift_trace(spec), outcome_seed);
}

}  // namespace chanrate
