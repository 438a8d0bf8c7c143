#ifndef CHARGENET_NETWORK_HPP
#define CHARGENET_NETWORK_HPP

#include <algorithm>
#include <compare>
#include <cstddef>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "chargenet/errors.hpp"

namespace chargenet {

/// Node ids are 1-based throughout, as in scenario files.
using NodeId = std::size_t;

/// Row-major index of the ordered pair (i, j) in an N x N edge grid:
/// h = (i - 1) * N + j, so h ranges over [1, N^2].
struct EdgeIndex {
  std::size_t value = 0;

  friend constexpr auto operator<=>(EdgeIndex, EdgeIndex) = default;
};

inline EdgeIndex edge_index(NodeId i, NodeId j, std::size_t n) {
  if (n == 0 || i < 1 || i > n || j < 1 || j > n) {
    throw ArgumentError("edge_index: node pair (" + std::to_string(i) + "," + std::to_string(j) +
                        ") out of range for N=" + std::to_string(n));
  }
  return EdgeIndex{(i - 1) * n + j};
}

inline std::pair<NodeId, NodeId> decode_edge(EdgeIndex h, std::size_t n) {
  if (n == 0 || h.value < 1 || h.value > n * n) {
    throw ArgumentError("decode_edge: index " + std::to_string(h.value) + " out of range for N=" +
                        std::to_string(n));
  }
  return {(h.value - 1) / n + 1, (h.value - 1) % n + 1};
}

/// One traversable direction of a road segment.
struct Arc {
  double miles = 0.0;
  double free_flow_minutes = 0.0;
  double link_capacity = 0.0;
  bool one_way = false;
};

struct Station {
  int capacity = 0;
  double preferred_capacity = 0.0;
};

class HighwayGraph {
public:
  HighwayGraph() = default;

  explicit HighwayGraph(std::size_t n) : n_(n), stations_(n), arcs_(n * n) {}

  [[nodiscard]] std::size_t size() const noexcept { return n_; }

  /// preferred_capacity defaults to the charger count when omitted.
  void set_station(NodeId i, int capacity, std::optional<double> preferred_capacity = std::nullopt) {
    check_node(i);
    stations_[i - 1] = Station{capacity, preferred_capacity.value_or(static_cast<double>(capacity))};
  }

  /// Sets a single direction i -> j. Most callers want add_road().
  void set_arc(NodeId i, NodeId j, const Arc& arc) {
    check_node(i);
    check_node(j);
    arcs_[(i - 1) * n_ + (j - 1)] = arc;
  }

  void remove_arc(NodeId i, NodeId j) {
    check_node(i);
    check_node(j);
    arcs_[(i - 1) * n_ + (j - 1)].reset();
  }

  /// Two-way road unless one_way, in which case only i -> j is traversable.
  void add_road(NodeId i, NodeId j, double miles, double free_flow_minutes, double link_capacity,
                bool one_way = false) {
    const Arc arc{miles, free_flow_minutes, link_capacity, one_way};
    set_arc(i, j, arc);
    if (!one_way) {
      set_arc(j, i, arc);
    }
  }

  [[nodiscard]] const std::optional<Arc>& arc(NodeId i, NodeId j) const {
    check_node(i);
    check_node(j);
    return arcs_[(i - 1) * n_ + (j - 1)];
  }

  [[nodiscard]] const std::optional<Arc>& arc(EdgeIndex h) const {
    const auto [i, j] = decode_edge(h, n_);
    return arc(i, j);
  }

  [[nodiscard]] bool has_arc(NodeId i, NodeId j) const { return arc(i, j).has_value(); }

  /// a^ij: 1 for a traversable pair, 0 otherwise.
  [[nodiscard]] double adjacency(NodeId i, NodeId j) const { return has_arc(i, j) ? 1.0 : 0.0; }

  /// e^ij in miles, 0 when i -> j is not traversable.
  [[nodiscard]] double length(NodeId i, NodeId j) const {
    const auto& a = arc(i, j);
    return a ? a->miles : 0.0;
  }

  [[nodiscard]] double length(EdgeIndex h) const {
    const auto& a = arc(h);
    return a ? a->miles : 0.0;
  }

  [[nodiscard]] const Station& station(NodeId i) const {
    check_node(i);
    return stations_[i - 1];
  }

  [[nodiscard]] double max_edge_length() const {
    double longest = 0.0;
    for (const auto& a : arcs_) {
      if (a) {
        longest = std::max(longest, a->miles);
      }
    }
    return longest;
  }

  [[nodiscard]] bool valid_node(NodeId i) const noexcept { return i >= 1 && i <= n_; }

  void check_node(NodeId i) const {
    if (!valid_node(i)) {
      throw ArgumentError("node id " + std::to_string(i) + " out of range [1, " +
                          std::to_string(n_) + "]");
    }
  }

private:
  std::size_t n_ = 0;
  std::vector<Station> stations_;
  std::vector<std::optional<Arc>> arcs_;
};

/// N_i = { j | e^ij > 0 }, ascending. Never contains i.
inline std::vector<NodeId> neighbors(const HighwayGraph& graph, NodeId i) {
  graph.check_node(i);
  std::vector<NodeId> out;
  for (NodeId j = 1; j <= graph.size(); ++j) {
    if (j != i && graph.length(i, j) > 0.0) {
      out.push_back(j);
    }
  }
  return out;
}

struct ValidationReport {
  std::vector<std::string> violations;

  [[nodiscard]] bool ok() const noexcept { return violations.empty(); }

  [[nodiscard]] bool mentions(const std::string& fragment) const {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const std::string& v) { return v.find(fragment) != std::string::npos; });
  }
};

namespace detail {

inline std::vector<bool> reachable_from(const HighwayGraph& g, NodeId start, bool reverse) {
  std::vector<bool> seen(g.size() + 1, false);
  std::queue<NodeId> frontier;
  frontier.push(start);
  seen[start] = true;
  while (!frontier.empty()) {
    const NodeId u = frontier.front();
    frontier.pop();
    for (NodeId v = 1; v <= g.size(); ++v) {
      const bool linked = reverse ? g.has_arc(v, u) : g.has_arc(u, v);
      if (linked && !seen[v]) {
        seen[v] = true;
        frontier.push(v);
      }
    }
  }
  return seen;
}

inline std::string pair_name(NodeId i, NodeId j) {
  return std::to_string(i) + "->" + std::to_string(j);
}

}  // namespace detail

/// Lists every broken HighwayGraph invariant. Connectivity is checked in the
/// strong sense: every node must be reachable from every other node.
inline ValidationReport validate_graph(const HighwayGraph& graph) {
  ValidationReport report;
  auto& out = report.violations;
  const std::size_t n = graph.size();
  if (n == 0) {
    out.emplace_back("empty graph: no nodes");
    return report;
  }
  for (NodeId i = 1; i <= n; ++i) {
    const Station& s = graph.station(i);
    if (s.capacity < 0) {
      out.push_back("negative station capacity at node " + std::to_string(i));
    }
    if (s.preferred_capacity < 0.0) {
      out.push_back("negative preferred capacity at node " + std::to_string(i));
    }
    if (graph.has_arc(i, i)) {
      out.push_back("nonzero diagonal at node " + std::to_string(i));
    }
  }
  for (NodeId i = 1; i <= n; ++i) {
    for (NodeId j = 1; j <= n; ++j) {
      const auto& a = graph.arc(i, j);
      if (!a || i == j) {
        continue;
      }
      const std::string name = detail::pair_name(i, j);
      if (!(a->miles > 0.0)) {
        out.push_back("nonpositive edge length on " + name);
      }
      if (!(a->free_flow_minutes > 0.0)) {
        out.push_back("nonpositive free-flow time on " + name);
      }
      if (!(a->link_capacity > 0.0)) {
        out.push_back("nonpositive link capacity on " + name);
      }
      if (!a->one_way) {
        const auto& back = graph.arc(j, i);
        if (!back || back->one_way || back->miles != a->miles ||
            back->free_flow_minutes != a->free_flow_minutes ||
            back->link_capacity != a->link_capacity) {
          const std::string msg =
              "asymmetric undirected edge " + detail::pair_name(std::min(i, j), std::max(i, j));
          if (std::find(out.begin(), out.end(), msg) == out.end()) {
            out.push_back(msg);
          }
        }
      }
    }
  }
  const auto fwd = detail::reachable_from(graph, 1, false);
  const auto bwd = detail::reachable_from(graph, 1, true);
  for (NodeId i = 1; i <= n; ++i) {
    if (!fwd[i] || !bwd[i]) {
      out.emplace_back("not connected");
      break;
    }
  }
  return report;
}

/// Length of the longest simple path (miles). Exponential; only meant for the
/// small graphs this model targets. Returns nullopt above max_nodes.
inline std::optional<double> longest_simple_path(const HighwayGraph& graph,
                                                 std::size_t max_nodes = 14) {
  const std::size_t n = graph.size();
  if (n > max_nodes) {
    return std::nullopt;
  }
  double best = 0.0;
  std::vector<bool> on_path(n + 1, false);
  auto dfs = [&](auto&& self, NodeId u, double length) -> void {
    best = std::max(best, length);
    on_path[u] = true;
    for (NodeId v = 1; v <= n; ++v) {
      if (!on_path[v] && v != u && graph.has_arc(u, v)) {
        self(self, v, length + graph.length(u, v));
      }
    }
    on_path[u] = false;
  };
  for (NodeId s = 1; s <= n; ++s) {
    dfs(dfs, s, 0.0);
  }
  return best;
}

}  // namespace chargenet

#endif
