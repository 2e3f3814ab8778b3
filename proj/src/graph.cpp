#include "chanrate/graph.hpp"

#include <algorithm>

namespace chanrate {

NeighborhoodGraph::NeighborhoodGraph(int channels, int rates) : channels_(channels), rates_(rates) {
  if (channels < 1 || rates < 1) throw ModelError("graph needs at least one channel and one rate");
  adjacency_.resize(static_cast<std::size_t>(channels) * static_cast<std::size_t>(rates));
  for (int c = 0; c < channels; ++c) {
    for (int k = 0; k < rates; ++k) {
      auto& out = adjacency_[static_cast<std::size_t>(c * rates + k)];
      if (k > 0) out.push_back({c, k - 1});
      if (k + 1 < rates) out.push_back({c, k + 1});
      for (int other = 0; other < channels; ++other) {
        if (other == c) continue;
        out.push_back({other, k});
        if (k + 1 < rates) out.push_back({other, k + 1});
      }
      gamma_ = std::max(gamma_, static_cast<int>(out.size()));
    }
  }
}

NeighborhoodGraph build_graph(int channels, int rates) { return NeighborhoodGraph(channels, rates); }

std::vector<bool> check_monotone(const LinkModel& model) {
  std::vector<bool> out(static_cast<std::size_t>(model.channels()), true);
  for (int c = 0; c < model.channels(); ++c)
    for (int k = 1; k < model.rate_count(); ++k)
      if (model.effective_theta(c, k) > model.effective_theta(c, k - 1)) out[c] = false;
  return out;
}

namespace {

bool unimodal_row(const Grid& mu, int c, bool allow_zero_tail) {
  const int rates = mu.rates();
  int k = 0;
  while (k + 1 < rates && mu(c, k) < mu(c, k + 1)) ++k;
  // k is the peak; the remainder must fall strictly, except that a relaxed
  // check lets the row sit at zero once it got there.
  for (; k + 1 < rates; ++k) {
    const double here = mu(c, k);
    const double next = mu(c, k + 1);
    if (next < here) continue;
    if (allow_zero_tail && here == 0.0 && next == 0.0) continue;
    return false;
  }
  return true;
}

}  // namespace

UnimodalReport check_unimodal(const LinkModel& model) {
  const Grid mu = throughput_matrix(model);
  UnimodalReport r;
  for (int c = 0; c < model.channels(); ++c) {
    r.strict.push_back(unimodal_row(mu, c, false));
    r.relaxed.push_back(unimodal_row(mu, c, true));
  }
  return r;
}

GraphUnimodality check_graphically_unimodal(const LinkModel& model, const NeighborhoodGraph& graph) {
  if (graph.channels() != model.channels() || graph.rates() != model.rate_count())
    throw ModelError("graph dimensions do not match the model");
  const OptimaSummary opt = compute_optima(model);
  if (!opt.unique_global)
    throw NonUniqueOptimum("graphical unimodality needs a unique best pair");
  for (int c = 0; c < model.channels(); ++c) {
    for (int k = 0; k < model.rate_count(); ++k) {
      const DecisionPair d{c, k};
      if (d == opt.best) continue;
      const auto& nb = graph.neighbours(d);
      const bool ascends = std::any_of(nb.begin(), nb.end(),
                                       [&](const DecisionPair& e) { return opt.mu(e) > opt.mu(d); });
      if (!ascends) return {false, d};
    }
  }
  return {true, std::nullopt};
}

}  // namespace chanrate
