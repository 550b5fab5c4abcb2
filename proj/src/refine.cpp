#include "phfem/refine.hpp"

#include <stdexcept>

namespace phfem {

Mesh red_refine(const Mesh& mesh, const EdgeTopology& topology) {
  const int nc = mesh.node_count();
  const int ne = mesh.element_count();
  const int nr_edges = topology.edge_count();

  Mesh out;
  out.coordinates = mesh.coordinates;
  out.coordinates.reserve(nc + nr_edges);
  // Midpoint of edge e gets node id nc + e.
  for (int e = 0; e < nr_edges; ++e) {
    const auto& [a, b] = topology.edge_nodes[e];
    out.coordinates.push_back(0.5 * (mesh.coordinates[a] + mesh.coordinates[b]));
  }

  auto midpoint_id = [&](int a, int b) {
    const int e = topology.node_pair_to_edge(a, b);
    if (e < 0) throw std::runtime_error("red_refine: topology does not match mesh");
    return nc + e;
  };

  out.elements.reserve(4 * ne);
  for (int m = 0; m < ne; ++m) {
    const auto& [p0, p1, p2] = mesh.elements[m];
    const int m0 = midpoint_id(p1, p2);  // opposite p0
    const int m1 = midpoint_id(p2, p0);
    const int m2 = midpoint_id(p0, p1);
    out.elements.push_back({m0, m1, m2});
    out.elements.push_back({p0, m2, m1});
    out.elements.push_back({p1, m0, m2});
    out.elements.push_back({p2, m1, m0});
  }

  auto bisect = [&](const std::vector<std::array<int, 2>>& pairs) {
    std::vector<std::array<int, 2>> halves;
    halves.reserve(2 * pairs.size());
    for (const auto& [a, b] : pairs) {
      const int mid = midpoint_id(a, b);
      halves.push_back({a, mid});
      halves.push_back({mid, b});
    }
    return halves;
  };
  out.dirichlet_edges = bisect(mesh.dirichlet_edges);
  out.neumann_edges = bisect(mesh.neumann_edges);

  return out;
}

}  // namespace phfem
