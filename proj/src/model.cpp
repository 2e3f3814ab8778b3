#include "chanrate/model.hpp"

#include <cmath>
#include <sstream>

namespace chanrate {

std::string to_string(const DecisionPair& d) {
  std::ostringstream os;
  os << '(' << d.channel + 1 << ',' << d.rate + 1 << ')';
  return os.str();
}

Grid::Grid(int channels, int rates, double fill)
    : channels_(channels), rates_(rates) {
  if (channels < 0 || rates < 0) throw ModelError("grid dimensions must be nonnegative");
  values_.assign(static_cast<std::size_t>(channels) * static_cast<std::size_t>(rates), fill);
}

Grid::Grid(int channels, int rates, std::vector<double> values)
    : channels_(channels), rates_(rates), values_(std::move(values)) {
  if (channels < 0 || rates < 0) throw ModelError("grid dimensions must be nonnegative");
  if (values_.size() != static_cast<std::size_t>(channels) * static_cast<std::size_t>(rates))
    throw ModelError("grid value count does not match its dimensions");
}

RateSet::RateSet(std::vector<double> rates) : rates_(std::move(rates)) {
  if (rates_.empty()) throw ModelError("rate set must contain at least one rate");
  for (std::size_t k = 0; k < rates_.size(); ++k) {
    if (!std::isfinite(rates_[k]) || rates_[k] <= 0.0)
      throw ModelError("rates must be finite and positive");
    if (k > 0 && !(rates_[k - 1] < rates_[k]))
      throw ModelError("rates must be strictly increasing");
  }
}

LinkModel::LinkModel(RateSet rates, Grid theta, std::optional<std::vector<double>> occupancy)
    : rates_(std::move(rates)), theta_(std::move(theta)), occupancy_(std::move(occupancy)) {
  if (theta_.channels() < 1) throw ModelError("model needs at least one channel");
  if (theta_.rates() != rates_.size())
    throw ModelError("theta has " + std::to_string(theta_.rates()) + " rate columns but " +
                     std::to_string(rates_.size()) + " rates are configured");
  for (double p : theta_.values())
    if (!(p >= 0.0 && p <= 1.0)) throw ModelError("success probabilities must lie in [0,1]");
  if (occupancy_) {
    if (static_cast<int>(occupancy_->size()) != theta_.channels())
      throw ModelError("occupancy needs one probability per channel");
    for (double z : *occupancy_)
      if (!(z >= 0.0 && z <= 1.0)) throw ModelError("occupancy probabilities must lie in [0,1]");
  }
}

double LinkModel::effective_theta(int c, int k) const {
  const double p = theta_(c, k);
  if (!occupancy_) return p;
  return (1.0 - (*occupancy_)[static_cast<std::size_t>(c)]) * p;
}

Grid LinkModel::effective_theta() const {
  Grid out(channels(), rate_count());
  for (int c = 0; c < channels(); ++c)
    for (int k = 0; k < rate_count(); ++k) out(c, k) = effective_theta(c, k);
  return out;
}

LinkModel LinkModel::effective() const { return LinkModel(rates_, effective_theta()); }

bool OptimaSummary::all_channels_unique() const {
  for (const auto& ch : per_channel)
    if (!ch.unique) return false;
  return true;
}

Grid throughput_matrix(const LinkModel& model) {
  Grid mu(model.channels(), model.rate_count());
  for (int c = 0; c < model.channels(); ++c)
    for (int k = 0; k < model.rate_count(); ++k)
      mu(c, k) = model.rates()[k] * model.effective_theta(c, k);
  return mu;
}

DecisionPair best_pair(const Grid& mu) {
  DecisionPair best;
  for (int c = 0; c < mu.channels(); ++c)
    for (int k = 0; k < mu.rates(); ++k)
      if (mu(c, k) > mu(best)) best = {c, k};
  return best;
}

namespace {

// Suffix {first,...,K-1} of rates whose nominal value reaches `level`.
int first_rate_reaching(const RateSet& rates, double level) {
  int k = rates.size();
  while (k > 0 && level <= rates[k - 1]) --k;
  return k;
}

std::vector<int> suffix(int first, int count) {
  std::vector<int> out;
  for (int k = first; k < count; ++k) out.push_back(k);
  return out;
}

std::vector<int> adjacent_within(const std::vector<int>& set, int centre) {
  std::vector<int> out;
  for (int k : set)
    if (k == centre - 1 || k == centre + 1) out.push_back(k);
  return out;
}

}  // namespace

OptimaSummary compute_optima(const LinkModel& model) {
  OptimaSummary s;
  s.mu = throughput_matrix(model);
  const int channels = model.channels();
  const int rates = model.rate_count();

  s.best = best_pair(s.mu);
  s.mu_star = s.mu(s.best);
  int ties = 0;
  for (double v : s.mu.values())
    if (v == s.mu_star) ++ties;
  s.unique_global = ties == 1;

  s.first_needed = first_rate_reaching(model.rates(), s.mu_star);
  s.needed = suffix(s.first_needed, rates);
  s.neighbours = adjacent_within(s.needed, s.best.rate);

  s.per_channel.reserve(static_cast<std::size_t>(channels));
  for (int c = 0; c < channels; ++c) {
    ChannelOptimum ch;
    for (int k = 1; k < rates; ++k)
      if (s.mu(c, k) > s.mu(c, ch.rate)) ch.rate = k;
    ch.mu = s.mu(c, ch.rate);
    int channel_ties = 0;
    for (int k = 0; k < rates; ++k)
      if (s.mu(c, k) == ch.mu) ++channel_ties;
    ch.unique = channel_ties == 1;
    ch.first_needed = first_rate_reaching(model.rates(), ch.mu);
    ch.needed = suffix(ch.first_needed, rates);
    ch.neighbours = adjacent_within(ch.needed, ch.rate);
    s.per_channel.push_back(std::move(ch));
  }
  return s;
}

}  // namespace chanrate
