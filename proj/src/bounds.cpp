#include "chanrate/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chanrate/kl.hpp"

namespace chanrate {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

BoundValue undefined(std::string reason) {
  BoundValue b;
  b.reason = std::move(reason);
  return b;
}

std::string channel_label(int c) { return "channel " + std::to_string(c + 1); }

// Appends gap / divergence; returns false when the divergence vanishes,
// which only happens when the pair ties with the optimum.
bool add_term(BoundValue& b, const DecisionPair& d, std::string role, double gap, double divergence) {
  if (divergence == 0.0) {
    b.terms.clear();
    b.reason = "zero divergence at " + to_string(d);
    return false;
  }
  const double contribution = std::isinf(divergence) ? 0.0 : gap / divergence;
  b.terms.push_back({d, std::move(role), gap, divergence, contribution});
  return true;
}

void finish(BoundValue& b) {
  double sum = 0.0;
  for (const auto& t : b.terms) sum += t.contribution;
  b.value = sum;
}

}  // namespace

double divergence_to(double p, double target) {
  if (target > 1.0 || target < 0.0) return kInf;
  return kl_bernoulli(p, target);
}

BoundValue c_I(const LinkModel& model) {
  const LinkModel eff = model.effective();
  const OptimaSummary opt = compute_optima(eff);
  if (!opt.unique_global) return undefined("non-unique optimum");
  BoundValue b;
  for (int c = 0; c < eff.channels(); ++c) {
    for (int k : opt.needed) {
      const DecisionPair d{c, k};
      if (d == opt.best) continue;
      const double r = eff.rates()[k];
      if (!add_term(b, d, c == opt.best.channel ? "optimal-channel" : "other-channel",
                    opt.mu_star - opt.mu(d), divergence_to(eff.theta()(d), opt.mu_star / r)))
        return b;
    }
  }
  finish(b);
  return b;
}

double channel_margin(const OptimaSummary& opt, int channel) {
  const auto& ch = opt.per_channel[static_cast<std::size_t>(channel)];
  double margin = kInf;
  for (int k : {ch.rate - 1, ch.rate + 1}) {
    if (k < 0 || k >= opt.mu.rates()) continue;
    margin = std::min(margin, (ch.mu - opt.mu(channel, k)) / 2.0);
  }
  return margin;
}

BoundValue c_U_prime(const LinkModel& model) {
  const LinkModel eff = model.effective();
  const OptimaSummary opt = compute_optima(eff);
  if (!opt.unique_global) return undefined("non-unique optimum");
  for (int c = 0; c < eff.channels(); ++c) {
    if (c == opt.best.channel) continue;
    const auto& ch = opt.per_channel[static_cast<std::size_t>(c)];
    if (!ch.unique || !(channel_margin(opt, c) > 0.0)) return undefined("degenerate " + channel_label(c));
  }

  const auto& rates = eff.rates();
  const Grid& theta = eff.theta();
  BoundValue b;
  for (int k : opt.neighbours) {
    const DecisionPair d{opt.best.channel, k};
    if (!add_term(b, d, "optimal-channel", opt.mu_star - opt.mu(d),
                  divergence_to(theta(d), opt.mu_star / rates[k])))
      return b;
  }
  for (int c = 0; c < eff.channels(); ++c) {
    if (c == opt.best.channel) continue;
    const auto& ch = opt.per_channel[static_cast<std::size_t>(c)];
    const double margin = channel_margin(opt, c);
    const DecisionPair top{c, ch.rate};
    const double r_top = rates[ch.rate];
    const double denom = std::min(divergence_to(theta(top), opt.mu_star / r_top),
                                  divergence_to(theta(top), theta(top) - margin / r_top));
    if (!add_term(b, top, "channel-optimum", opt.mu_star - ch.mu, denom)) return b;
    for (int k : ch.neighbours) {
      const DecisionPair d{c, k};
      if (!add_term(b, d, "channel-neighbour", opt.mu_star - opt.mu(d),
                    divergence_to(theta(d), theta(d) + margin / rates[k])))
        return b;
    }
  }
  finish(b);
  return b;
}

BoundValue c_GU(const LinkModel& model, const NeighborhoodGraph& graph) {
  const LinkModel eff = model.effective();
  const OptimaSummary opt = compute_optima(eff);
  if (!opt.unique_global) return undefined("non-unique optimum");
  const GraphUnimodality gu = check_graphically_unimodal(eff, graph);
  if (!gu.holds) return undefined("not graphically unimodal: no ascent from " + to_string(*gu.witness));

  auto pairs = graph.neighbours(opt.best);
  std::sort(pairs.begin(), pairs.end());
  BoundValue b;
  for (const auto& d : pairs) {
    if (d.rate < opt.first_needed) continue;
    if (!add_term(b, d, "neighbour", opt.mu_star - opt.mu(d),
                  divergence_to(eff.theta()(d), opt.mu_star / eff.rates()[d.rate])))
      return b;
  }
  finish(b);
  return b;
}

CrsTConstants crst_constants(const LinkModel& model) {
  const LinkModel eff = model.effective();
  const OptimaSummary opt = compute_optima(eff);
  const int rates = eff.rate_count();
  const Grid& theta = eff.theta();

  CrsTConstants out;
  out.delta = kInf;
  for (int c = 0; c < eff.channels(); ++c)
    for (int k = 0; k + 1 < rates; ++k)
      out.delta = std::min(out.delta, std::abs(opt.mu(c, k) - opt.mu(c, k + 1)));
  out.degenerate = out.delta == 0.0;

  std::string failure;
  BoundValue& total = out.constant;
  for (int c = 0; c < eff.channels(); ++c) {
    const auto& ch = opt.per_channel[static_cast<std::size_t>(c)];
    const int lo = std::max(ch.rate - 1, 0);
    const int hi = std::min(ch.rate + 1, rates - 1);

    // A missing adjacent rate counts as zero throughput.
    double adjacent = 0.0;
    bool any_adjacent = false;
    for (int k : {ch.rate - 1, ch.rate + 1}) {
      if (k < 0 || k >= rates) continue;
      adjacent = any_adjacent ? std::max(adjacent, opt.mu(c, k)) : opt.mu(c, k);
      any_adjacent = true;
    }
    CrsTChannel info;
    info.mu_tilde = (ch.mu + adjacent) / 2.0;
    info.tau = kInf;
    for (int k = lo; k <= hi; ++k)
      info.tau = std::min(info.tau, divergence_to(theta(c, k), info.mu_tilde / eff.rates()[k]));
    if (c == opt.best.channel)
      info.tau_dropped_optimum_term = true;
    else
      info.tau = std::min(info.tau, divergence_to(theta(c, ch.rate), opt.mu_star / eff.rates()[ch.rate]));
    out.channels.push_back(info);

    if (!failure.empty()) continue;
    if (!ch.unique) {
      failure = "non-unique optimum on " + channel_label(c);
      continue;
    }
    double gap = 0.0;
    for (int k = lo; k <= hi; ++k) gap += opt.mu_star - opt.mu(c, k);
    if (info.tau == 0.0) {
      failure = "tau vanishes on " + channel_label(c);
      continue;
    }
    total.terms.push_back({{c, ch.rate}, "channel", gap, info.tau, std::isinf(info.tau) ? 0.0 : gap / info.tau});
  }
  if (!opt.unique_global && failure.empty()) failure = "non-unique optimum";
  if (failure.empty()) {
    finish(total);
  } else {
    total.terms.clear();
    total.reason = failure;
  }
  return out;
}

BoundReport compute_bounds(const LinkModel& model) {
  BoundReport r;
  r.c_I = c_I(model);
  r.c_U_prime = c_U_prime(model);
  r.c_GU = c_GU(model, build_graph(model.channels(), model.rate_count()));
  r.crst = crst_constants(model);
  const OptimaSummary opt = compute_optima(model.effective());
  for (int c = 0; c < model.channels(); ++c) r.margins.push_back(channel_margin(opt, c));
  return r;
}

}  // namespace chanrate
