#pragma once

#include <optional>
#include <span>
#include <vector>

namespace snls {

// One undirected edge given as (i, j, weight). Order of i and j is irrelevant.
struct EdgeSpec {
  int i = 0;
  int j = 0;
  double weight = 0.0;
};

// Canonical edge storage: a < b, both weight families kept side by side so
// omega_ab == omega_ba holds by construction.
struct Edge {
  int a = 0;
  int b = 0;
  double omega = 0.0;
  double omega_tilde = 0.0;
};

// Adjacency entry seen from one endpoint. `sign` is +1 when the owning node is
// the edge's `a` endpoint and -1 otherwise; antisymmetric edge quantities are
// obtained as sign * value(edge).
struct Neighbor {
  int node = 0;
  int edge = 0;
  double sign = 1.0;
};

struct LatticeSpec {
  int n_nodes = 0;
  double dx = 1.0;
  bool periodic = true;
};

// Immutable finite weighted graph. Connected, no self loops, no multi-edges.
class Graph {
 public:
  int n_nodes() const noexcept { return n_nodes_; }
  int n_edges() const noexcept { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::span<const Neighbor> neighbors(int node) const;
  int degree(int node) const;

  // Zero for non-adjacent pairs.
  double omega(int i, int j) const;
  double omega_tilde(int i, int j) const;
  std::optional<int> edge_index(int i, int j) const;

  // Lattice metadata; empty coords for general graphs.
  const std::vector<double>& coords() const noexcept { return coords_; }
  bool is_ring_lattice() const noexcept { return ring_; }
  double spacing() const noexcept { return dx_; }
  // Edge displacement x_b - x_a along the ring, wrapping across the seam.
  double edge_displacement(int edge) const;

 private:
  friend Graph build_graph(int, std::span<const EdgeSpec>, std::span<const EdgeSpec>);
  friend Graph build_ring_lattice(const LatticeSpec&);

  int n_nodes_ = 0;
  std::vector<Edge> edges_;
  std::vector<int> offsets_;
  std::vector<Neighbor> adjacency_;
  std::vector<double> coords_;
  bool ring_ = false;
  double dx_ = 0.0;
};

// Validates and builds a graph. Errors: IndexOutOfRange, SelfLoop,
// DuplicateEdge, NonpositiveWeight, DisconnectedGraph. omega_tilde equals
// omega unless an override names the edge.
Graph build_graph(int n_nodes, std::span<const EdgeSpec> edges,
                  std::span<const EdgeSpec> omega_tilde_overrides = {});

// Periodic 1-D ring with x_j = j*dx and the averaged-weight lattice value
// omega = (1/2 * 2 * dx^2)^{-1} = 1/dx^2. Errors: TooFewNodes, NotALattice
// (non-periodic requests).
Graph build_ring_lattice(const LatticeSpec& spec);

// Lattice edge weight (dtheta/drho * neighbors * dx^2)^{-1}.
double lattice_weight(double dtheta_drho, int neighbor_count, double dx);

}  // namespace snls
