#ifndef CHARGENET_TRAFFIC_HPP
#define CHARGENET_TRAFFIC_HPP

#include <cmath>

#include "chargenet/network.hpp"

namespace chargenet {

/// Shape of the volume-delay term. The linear form is the default; the
/// textbook fourth-power curve is available for comparison runs.
enum class BprCurve { Linear, Quartic };

/// Link travel time in minutes: t0 * (1 + 0.15 * (flow / capacity)^power).
inline double bpr_travel_time(const HighwayGraph& graph, NodeId i, NodeId j, double flow,
                              BprCurve curve = BprCurve::Linear) {
  const auto& arc = graph.arc(i, j);
  if (!arc) {
    throw ArgumentError("bpr_travel_time: no edge " + std::to_string(i) + "->" +
                        std::to_string(j));
  }
  if (!(flow >= 0.0)) {
    throw ArgumentError("bpr_travel_time: flow must be nonnegative");
  }
  const double ratio = flow / arc->link_capacity;
  const double term = curve == BprCurve::Linear ? ratio : std::pow(ratio, 4);
  return arc->free_flow_minutes * (1.0 + 0.15 * term);
}

inline double bpr_travel_time(const HighwayGraph& graph, EdgeIndex h, double flow,
                              BprCurve curve = BprCurve::Linear) {
  const auto [i, j] = decode_edge(h, graph.size());
  return bpr_travel_time(graph, i, j, flow, curve);
}

}  // namespace chargenet

#endif
