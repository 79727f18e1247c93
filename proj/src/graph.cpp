#include "snls/graph.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>
#include <utility>

#include "snls/errors.hpp"

namespace snls {

namespace {

void finalize_adjacency(int n_nodes, const std::vector<Edge>& edges,
                        std::vector<int>& offsets, std::vector<Neighbor>& adjacency) {
  std::vector<int> degree(n_nodes, 0);
  for (const auto& e : edges) {
    ++degree[e.a];
    ++degree[e.b];
  }
  offsets.assign(n_nodes + 1, 0);
  for (int i = 0; i < n_nodes; ++i) offsets[i + 1] = offsets[i] + degree[i];
  adjacency.assign(offsets.back(), Neighbor{});
  std::vector<int> cursor(offsets.begin(), offsets.end() - 1);
  for (int k = 0; k < static_cast<int>(edges.size()); ++k) {
    const auto& e = edges[k];
    adjacency[cursor[e.a]++] = Neighbor{e.b, k, 1.0};
    adjacency[cursor[e.b]++] = Neighbor{e.a, k, -1.0};
  }
}

bool connected(int n_nodes, const std::vector<int>& offsets,
               const std::vector<Neighbor>& adjacency) {
  std::vector<char> seen(n_nodes, 0);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!frontier.empty()) {
    const int i = frontier.front();
    frontier.pop();
    for (int k = offsets[i]; k < offsets[i + 1]; ++k) {
      const int j = adjacency[k].node;
      if (!seen[j]) {
        seen[j] = 1;
        ++reached;
        frontier.push(j);
      }
    }
  }
  return reached == n_nodes;
}

}  // namespace

std::span<const Neighbor> Graph::neighbors(int node) const {
  if (node < 0 || node >= n_nodes_) fail(ErrorKind::kIndexOutOfRange, "node " + std::to_string(node));
  return {adjacency_.data() + offsets_[node], adjacency_.data() + offsets_[node + 1]};
}

int Graph::degree(int node) const { return static_cast<int>(neighbors(node).size()); }

std::optional<int> Graph::edge_index(int i, int j) const {
  for (const auto& nb : neighbors(i)) {
    if (nb.node == j) return nb.edge;
  }
  return std::nullopt;
}

double Graph::omega(int i, int j) const {
  const auto e = edge_index(i, j);
  return e ? edges_[*e].omega : 0.0;
}

double Graph::omega_tilde(int i, int j) const {
  const auto e = edge_index(i, j);
  return e ? edges_[*e].omega_tilde : 0.0;
}

double Graph::edge_displacement(int edge) const {
  if (!ring_) fail(ErrorKind::kNotALattice, "edge displacement requires a ring lattice");
  const auto& e = edges_.at(edge);
  // Ring edges are (j, j+1) except the seam (0, N-1), which points backwards.
  return (e.b == e.a + 1) ? dx_ : -dx_;
}

Graph build_graph(int n_nodes, std::span<const EdgeSpec> edges,
                  std::span<const EdgeSpec> omega_tilde_overrides) {
  if (n_nodes < 1) fail(ErrorKind::kTooFewNodes, "graph needs at least one node");
  Graph g;
  g.n_nodes_ = n_nodes;
  std::vector<std::pair<int, int>> seen;
  for (const auto& spec : edges) {
    if (spec.i < 0 || spec.i >= n_nodes || spec.j < 0 || spec.j >= n_nodes) {
      fail(ErrorKind::kIndexOutOfRange,
           "edge (" + std::to_string(spec.i) + "," + std::to_string(spec.j) + ")");
    }
    if (spec.i == spec.j) fail(ErrorKind::kSelfLoop, "node " + std::to_string(spec.i));
    if (!(spec.weight > 0.0) || !std::isfinite(spec.weight)) {
      fail(ErrorKind::kNonpositiveWeight,
           "edge (" + std::to_string(spec.i) + "," + std::to_string(spec.j) + ")");
    }
    const auto key = std::minmax(spec.i, spec.j);
    if (std::find(seen.begin(), seen.end(), std::pair<int, int>(key)) != seen.end()) {
      fail(ErrorKind::kDuplicateEdge,
           "edge (" + std::to_string(key.first) + "," + std::to_string(key.second) + ")");
    }
    seen.emplace_back(key);
    g.edges_.push_back(Edge{key.first, key.second, spec.weight, spec.weight});
  }
  finalize_adjacency(n_nodes, g.edges_, g.offsets_, g.adjacency_);
  if (!connected(n_nodes, g.offsets_, g.adjacency_)) {
    fail(ErrorKind::kDisconnectedGraph, "not every node is reachable from node 0");
  }
  for (const auto& o : omega_tilde_overrides) {
    const auto e = g.edge_index(o.i, o.j);
    if (!e) {
      fail(ErrorKind::kIndexOutOfRange, "omega_tilde override on missing edge (" +
                                            std::to_string(o.i) + "," + std::to_string(o.j) + ")");
    }
    if (!(o.weight > 0.0) || !std::isfinite(o.weight)) {
      fail(ErrorKind::kNonpositiveWeight, "omega_tilde override");
    }
    g.edges_[*e].omega_tilde = o.weight;
  }
  return g;
}

double lattice_weight(double dtheta_drho, int neighbor_count, double dx) {
  return 1.0 / (dtheta_drho * neighbor_count * dx * dx);
}

Graph build_ring_lattice(const LatticeSpec& spec) {
  if (!spec.periodic) fail(ErrorKind::kNotALattice, "only periodic rings are supported");
  if (spec.n_nodes < 3) fail(ErrorKind::kTooFewNodes, "periodic ring needs N >= 3");
  if (!(spec.dx > 0.0)) fail(ErrorKind::kInvalidArgument, "lattice spacing must be positive");
  const double w = lattice_weight(0.5, 2, spec.dx);
  std::vector<EdgeSpec> edges;
  edges.reserve(spec.n_nodes);
  for (int j = 0; j + 1 < spec.n_nodes; ++j) edges.push_back({j, j + 1, w});
  edges.push_back({spec.n_nodes - 1, 0, w});
  Graph g = build_graph(spec.n_nodes, edges);
  g.ring_ = true;
  g.dx_ = spec.dx;
  g.coords_.resize(spec.n_nodes);
  for (int j = 0; j < spec.n_nodes; ++j) g.coords_[j] = j * spec.dx;
  return g;
}

}  // namespace snls
