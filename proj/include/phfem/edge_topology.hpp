#pragma once

#include "phfem/mesh.hpp"

#include <utility>
#include <vector>

namespace phfem {

/// Global edge enumeration with per-edge element incidence.
///
/// Edges are numbered canonically: unordered node pairs (i,j), i<j, sorted
/// ascending by j then by i (the column-major upper-triangular scan). For
/// every edge, t_plus is the containing element with the smaller index and
/// edge_nodes stores that element's CCW traversal direction, so the edge
/// normal (dy, -dx)/|E| points out of t_plus.
///
/// Local edge indices are 0-based: edge k is opposite vertex k of its
/// element. For vertices (v0,v1,v2): edge (v1,v2) has index 0, (v2,v0)
/// index 1 and (v0,v1) index 2.
struct EdgeTopology {
  std::vector<std::array<int, 2>> edge_nodes;     // directed (initial, end)
  std::vector<std::array<int, 2>> edge_elements;  // {t_plus, t_minus or -1}
  std::vector<int> interior_edges;                // ascending edge ids
  std::vector<int> boundary_edges;                // ascending edge ids
  std::vector<int> local_in_tplus;                // 0..2
  std::vector<int> local_in_tminus;               // 0..2, -1 for boundary

  int edge_count() const { return static_cast<int>(edge_nodes.size()); }

  /// nodes2edge: symmetric lookup (k,l) -> edge id, -1 if not adjacent.
  int node_pair_to_edge(int k, int l) const;

  /// nodes2element: directed lookup (k,l) -> element whose CCW cycle
  /// contains k->l, -1 if none.
  int directed_pair_to_element(int k, int l) const;

  // Flat per-node adjacency tables backing the two lookups (node degrees in
  // a triangulation are small, so a short scan beats hashing).
  int node_count = 0;
  std::vector<int> pair_offsets;                     // by smaller node id
  std::vector<std::pair<int, int>> pair_entries;     // (larger node, edge id)
  std::vector<int> directed_offsets;                 // by initial node id
  std::vector<std::pair<int, int>> directed_entries;  // (end node, element)
};

/// Builds the edge topology. Throws on a non-manifold edge (shared by more
/// than two elements) or a duplicated directed edge.
EdgeTopology build_topology(const Mesh& mesh);

/// Dirichlet/Neumann edge ids and the retained (non-Neumann) edge ordering
/// that indexes the multiplier space.
struct EdgeClassification {
  std::vector<int> dirichlet_edge_ids;  // in mesh file order
  std::vector<int> neumann_edge_ids;    // in mesh file order
  std::vector<int> retained_edges;      // ascending; length L
  std::vector<int> retained_pos;        // per edge id: position in retained_edges, -1 if Neumann

  int multiplier_count() const { return static_cast<int>(retained_edges.size()); }
};

/// Resolves the mesh boundary lists through the topology. Throws when a
/// listed pair is not an edge of the mesh or resolves to an interior edge.
EdgeClassification classify_edges(const EdgeTopology& topology, const Mesh& mesh);

/// Euclidean length of every edge.
std::vector<double> edge_lengths(const Mesh& mesh, const EdgeTopology& topology);

/// Unit normal of an edge, pointing out of its t_plus element: for the
/// stored direction i->j, nu = (y_j - y_i, -(x_j - x_i)) / |E|.
Vec2 edge_normal(const Mesh& mesh, const EdgeTopology& topology, int edge_id);

}  // namespace phfem
