#pragma once

#include <optional>
#include <vector>

#include "chanrate/model.hpp"

namespace chanrate {

/// Directed neighbourhood graph over all (channel, rate) pairs. From (c,k)
/// edges lead to (c,k-1), (c,k+1), (c',k) and (c',k+1) for every other
/// channel c'; out-of-range rates are dropped and duplicates stored once.
class NeighborhoodGraph {
 public:
  NeighborhoodGraph(int channels, int rates);

  int channels() const { return channels_; }
  int rates() const { return rates_; }
  int vertex_count() const { return channels_ * rates_; }

  /// Out-neighbours of d: rate neighbours first, then other channels in
  /// ascending order, each contributing (c',k) before (c',k+1).
  const std::vector<DecisionPair>& neighbours(const DecisionPair& d) const {
    return adjacency_[static_cast<std::size_t>(d.channel * rates_ + d.rate)];
  }
  /// Maximum out-degree.
  int gamma() const { return gamma_; }

 private:
  int channels_;
  int rates_;
  std::vector<std::vector<DecisionPair>> adjacency_;
  int gamma_ = 0;
};

NeighborhoodGraph build_graph(int channels, int rates);

/// Per channel: theta_c1 >= theta_c2 >= ... >= theta_cK (effective theta).
std::vector<bool> check_monotone(const LinkModel& model);

struct UnimodalReport {
  std::vector<bool> strict;   // strictly up to a single peak, strictly down after
  std::vector<bool> relaxed;  // as strict, but zero-throughput tails may tie
};

UnimodalReport check_unimodal(const LinkModel& model);

/// Thrown by checks that need a unique best pair.
class NonUniqueOptimum : public ModelError {
 public:
  using ModelError::ModelError;
};

struct GraphUnimodality {
  bool holds = false;
  /// A non-optimal pair with no strictly better neighbour, when `holds` is false.
  std::optional<DecisionPair> witness;
};

/// Every non-optimal pair must have a neighbour with strictly larger
/// throughput; on a finite graph this is equivalent to the existence of a
/// strictly increasing path to the optimum.
GraphUnimodality check_graphically_unimodal(const LinkModel& model, const NeighborhoodGraph& graph);

}  // namespace chanrate
