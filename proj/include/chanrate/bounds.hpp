#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chanrate/graph.hpp"
#include "chanrate/model.hpp"

namespace chanrate {

/// One summand (gap / divergence) of a regret constant.
struct BoundTerm {
  DecisionPair pair;
  std::string role;
  double gap = 0.0;
  double divergence = 0.0;
  double contribution = 0.0;  // gap / divergence, 0 when the divergence is infinite
};

/// A regret constant, or the reason it is undefined for the given model.
struct BoundValue {
  std::optional<double> value;
  std::string reason;
  std::vector<BoundTerm> terms;

  bool defined() const { return value.has_value(); }
};

/// Lower-bound constant for the unstructured problem.
BoundValue c_I(const LinkModel& model);

/// Explicit upper estimate of the unimodal lower-bound constant; grows with
/// the number of channels but not with the number of rates.
BoundValue c_U_prime(const LinkModel& model);

/// Lower-bound constant for the graphically unimodal problem.
BoundValue c_GU(const LinkModel& model, const NeighborhoodGraph& graph);

/// Gap used by c_U_prime: half the distance from mu_c* to its best adjacent
/// rate, +inf when k_c* has no adjacent rate.
double channel_margin(const OptimaSummary& opt, int channel);

struct CrsTChannel {
  double mu_tilde = 0.0;
  double tau = 0.0;
  bool tau_dropped_optimum_term = false;
};

struct CrsTConstants {
  double delta = 0.0;  // smallest throughput gap between adjacent rates
  bool degenerate = false;  // delta == 0
  std::vector<CrsTChannel> channels;
  BoundValue constant;  // c^CRS-T
};

/// Finite-time constants of the CRS-T regret guarantee (diagnostics only).
CrsTConstants crst_constants(const LinkModel& model);

struct BoundReport {
  BoundValue c_I;
  BoundValue c_U_prime;
  BoundValue c_GU;
  CrsTConstants crst;
  std::vector<double> margins;  // delta_c per channel
};

BoundReport compute_bounds(const LinkModel& model);

/// Divergence I(p, target) where a target beyond [0,1] cannot be reached by
/// any parameter and yields +inf.
double divergence_to(double p, double target);

}  // namespace chanrate
