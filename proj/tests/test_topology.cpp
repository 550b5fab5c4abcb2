#include "phfem/edge_topology.hpp"
#include "phfem/refine.hpp"

#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

using namespace phfem;
using namespace phfem::testing;

TEST_CASE("edge enumeration and incidence of the crisscross square") {
  const Mesh mesh = unit_square_mesh();
  const EdgeTopology topo = build_topology(mesh);
  REQUIRE(topo.edge_count() == 8);

  // Canonical numbering (1-based): 1:(1,2) 2:(1,3) 3:(2,4) 4:(3,4) 5:(1,5)
  // 6:(2,5) 7:(3,5) 8:(4,5). Rows below are 0-based
  // (initial, end, t_plus, t_minus) with the t_plus CCW direction stored.
  const std::array<std::array<int, 4>, 8> expected = {{
      {0, 1, 0, -1},  // 1 2 1 0
      {2, 0, 1, -1},  // 3 1 2 0
      {1, 3, 3, -1},  // 2 4 4 0
      {3, 2, 2, -1},  // 4 3 3 0
      {4, 0, 0, 1},   // 5 1 1 2
      {1, 4, 0, 3},   // 2 5 1 4
      {4, 2, 1, 2},   // 5 3 2 3
      {4, 3, 2, 3},   // 5 4 3 4
  }};
  for (int e = 0; e < 8; ++e) {
    CAPTURE(e);
    CHECK(topo.edge_nodes[e][0] == expected[e][0]);
    CHECK(topo.edge_nodes[e][1] == expected[e][1]);
    CHECK(topo.edge_elements[e][0] == expected[e][2]);
    CHECK(topo.edge_elements[e][1] == expected[e][3]);
  }

  CHECK(topo.interior_edges == std::vector<int>{4, 5, 6, 7});
  CHECK(topo.boundary_edges == std::vector<int>{0, 1, 2, 3});

  // Local indices (0-based here; the worked example uses 1-based).
  CHECK(topo.local_in_tplus == std::vector<int>{0, 0, 0, 0, 2, 1, 2, 2});
  CHECK(topo.local_in_tminus == std::vector<int>{-1, -1, -1, -1, 1, 2, 1, 1});
}

TEST_CASE("directed and undirected lookups match the worked example") {
  const EdgeTopology topo = build_topology(unit_square_mesh());
  // Directed edge 1->2 belongs to element 1; 3->1 to element 2 (1-based).
  CHECK(topo.directed_pair_to_element(0, 1) == 0);
  CHECK(topo.directed_pair_to_element(2, 0) == 1);
  CHECK(topo.directed_pair_to_element(1, 0) == -1);
  CHECK(topo.directed_pair_to_element(0, 3) == -1);

  // nodes2edge is symmetric.
  CHECK(topo.node_pair_to_edge(0, 1) == 0);
  CHECK(topo.node_pair_to_edge(1, 0) == 0);
  CHECK(topo.node_pair_to_edge(0, 4) == 4);
  CHECK(topo.node_pair_to_edge(4, 0) == 4);
  CHECK(topo.node_pair_to_edge(0, 3) == -1);
}

TEST_CASE("single triangle topology") {
  const EdgeTopology topo = build_topology(unit_right_triangle());
  REQUIRE(topo.edge_count() == 3);
  CHECK(topo.boundary_edges.size() == 3);
  CHECK(topo.interior_edges.empty());
  // Canonical ids: 0:(1,2), 1:(1,3), 2:(2,3); local indices opposite 2,1,0.
  CHECK(topo.local_in_tplus == std::vector<int>{2, 1, 0});
}

TEST_CASE("duplicate directed edge and non-manifold edge are rejected") {
  Mesh bad = unit_right_triangle();
  bad.coordinates.push_back(Vec2(1, 1));
  bad.elements.push_back({0, 1, 3});  // repeats directed edge 0->1
  CHECK_THROWS_WITH_AS(build_topology(bad), doctest::Contains("duplicate directed"),
                       std::runtime_error);

  Mesh pinched = unit_right_triangle();
  pinched.coordinates.push_back(Vec2(1, 1));
  pinched.coordinates.push_back(Vec2(-1, 1));
  pinched.elements.push_back({1, 0, 3});
  pinched.elements.push_back({0, 1, 4});  // third element on edge (0,1)
  CHECK_THROWS_WITH_AS(build_topology(pinched), doctest::Contains("non-manifold"),
                       std::runtime_error);
}

TEST_CASE("classification of the crisscross square") {
  const Mesh mesh = unit_square_mesh();
  const EdgeTopology topo = build_topology(mesh);
  const EdgeClassification cls = classify_edges(topo, mesh);

  CHECK(cls.dirichlet_edge_ids == std::vector<int>{0, 2});  // edges (1,2),(2,4)
  CHECK(cls.neumann_edge_ids == std::vector<int>{3, 1});    // edges (4,3),(3,1)
  CHECK(cls.retained_edges == std::vector<int>{0, 2, 4, 5, 6, 7});
  CHECK(cls.multiplier_count() == 6);
  CHECK(cls.retained_pos[0] == 0);
  CHECK(cls.retained_pos[1] == -1);
  CHECK(cls.retained_pos[7] == 5);
}

TEST_CASE("all-Dirichlet mesh retains every edge") {
  Mesh mesh = unit_square_mesh();
  mesh.dirichlet_edges.insert(mesh.dirichlet_edges.end(), mesh.neumann_edges.begin(),
                              mesh.neumann_edges.end());
  mesh.neumann_edges.clear();
  const EdgeTopology topo = build_topology(mesh);
  const EdgeClassification cls = classify_edges(topo, mesh);
  CHECK(cls.multiplier_count() == topo.edge_count());
}

TEST_CASE("classification rejects unknown and interior boundary pairs") {
  Mesh mesh = unit_square_mesh();
  mesh.neumann_edges.push_back({0, 3});  // not an edge
  const EdgeTopology topo = build_topology(mesh);
  CHECK_THROWS_WITH_AS(classify_edges(topo, mesh), doctest::Contains("not an edge"),
                       std::runtime_error);

  Mesh mesh2 = unit_square_mesh();
  mesh2.dirichlet_edges.push_back({4, 0});  // interior spoke
  const EdgeTopology topo2 = build_topology(mesh2);
  CHECK_THROWS_WITH_AS(classify_edges(topo2, mesh2), doctest::Contains("interior"),
                       std::runtime_error);
}

TEST_CASE("edge lengths of the crisscross square") {
  const Mesh mesh = unit_square_mesh();
  const EdgeTopology topo = build_topology(mesh);
  const auto lengths = edge_lengths(mesh, topo);
  CHECK(lengths[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(lengths[4] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
  for (double l : lengths) CHECK(l > 0.0);
}

TEST_CASE("edge normals of the unit right triangle") {
  const Mesh mesh = unit_right_triangle();
  const EdgeTopology topo = build_topology(mesh);
  const int hyp = topo.node_pair_to_edge(1, 2);
  const Vec2 nu = edge_normal(mesh, topo, hyp);
  CHECK(nu.x() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(nu.y() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));

  const int bottom = topo.node_pair_to_edge(0, 1);
  const Vec2 nb = edge_normal(mesh, topo, bottom);
  CHECK(nb.x() == doctest::Approx(0.0));
  CHECK(nb.y() == doctest::Approx(-1.0));
}

TEST_CASE("normals are unit length, perpendicular, and outward from t_plus") {
  Mesh mesh = unit_square_mesh();
  for (int level = 0; level < 3; ++level) {
    const EdgeTopology topo = build_topology(mesh);
    for (int e = 0; e < topo.edge_count(); ++e) {
      const auto& [a, b] = topo.edge_nodes[e];
      const Vec2 d = mesh.coordinates[b] - mesh.coordinates[a];
      const Vec2 nu = edge_normal(mesh, topo, e);
      CHECK(std::abs(nu.norm() - 1.0) < 1e-14);
      CHECK(std::abs(nu.dot(d)) < 1e-14);
      // Outward from t_plus: points away from the opposite vertex.
      const int t_plus = topo.edge_elements[e][0];
      const int opp = mesh.elements[t_plus][topo.local_in_tplus[e]];
      const Vec2 mid = 0.5 * (mesh.coordinates[a] + mesh.coordinates[b]);
      CHECK(nu.dot(mid - mesh.coordinates[opp]) > 0.0);
      // And into t_minus when present.
      if (topo.edge_elements[e][1] >= 0) {
        const int opp2 = mesh.elements[topo.edge_elements[e][1]][topo.local_in_tminus[e]];
        CHECK(nu.dot(mesh.coordinates[opp2] - mid) > 0.0);
      }
    }
    mesh = red_refine(mesh, build_topology(mesh));
  }
}

TEST_CASE("Euler identity holds across refinement levels") {
  Mesh mesh = unit_square_mesh();
  for (int level = 0; level <= 3; ++level) {
    const EdgeTopology topo = build_topology(mesh);
    CHECK(3 * mesh.element_count() ==
          2 * static_cast<int>(topo.interior_edges.size()) +
              static_cast<int>(topo.boundary_edges.size()));
    CHECK(static_cast<int>(topo.interior_edges.size() + topo.boundary_edges.size()) ==
          topo.edge_count());
    mesh = red_refine(mesh, topo);
  }
}

TEST_CASE("node-permuted mesh yields isomorphic incidence signatures") {
  const Mesh mesh = unit_square_mesh();
  Mesh permuted;
  // Relabel nodes with the cycle 0->2->1->0 and 3<->4.
  const std::array<int, 5> map = {2, 0, 1, 4, 3};
  permuted.coordinates.resize(5);
  for (int i = 0; i < 5; ++i) permuted.coordinates[map[i]] = mesh.coordinates[i];
  for (const auto& e : mesh.elements)
    permuted.elements.push_back({map[e[0]], map[e[1]], map[e[2]]});
  std::reverse(permuted.elements.begin(), permuted.elements.end());

  auto signature = [](const Mesh& m) {
    const EdgeTopology topo = build_topology(m);
    std::map<std::pair<double, bool>, int> sig;  // (length, boundary) multiset
    const auto lengths = edge_lengths(m, topo);
    for (int e = 0; e < topo.edge_count(); ++e)
      ++sig[{std::round(lengths[e] * 1e12), topo.edge_elements[e][1] < 0}];
    return sig;
  };
  CHECK(signature(mesh) == signature(permuted));
}
