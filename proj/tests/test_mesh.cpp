#include "phfem/mesh.hpp"
#include "phfem/refine.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace phfem;
using namespace phfem::testing;

namespace {

Mesh load_from_strings(const std::string& coords, const std::string& elems,
                       const std::string& diri = "", const std::string& neum = "") {
  std::istringstream c(coords), e(elems), d(diri), n(neum);
  return load_mesh(c, e, d, n);
}

}  // namespace

TEST_CASE("load_mesh reads the crisscross unit square") {
  const Mesh mesh = load_from_strings("0 0\n1 0\n0 1\n1 1\n0.5 0.5\n",
                                      "5 1 2\n5 3 1\n5 4 3\n5 2 4\n", "1 2\n2 4\n",
                                      "4 3\n3 1\n");
  CHECK(mesh.node_count() == 5);
  CHECK(mesh.element_count() == 4);
  CHECK(mesh.dirichlet_edges.size() == 2);
  CHECK(mesh.neumann_edges.size() == 2);
  CHECK(mesh.elements[0] == std::array<int, 3>{4, 0, 1});
  CHECK(validate_mesh(mesh).ok());
}

TEST_CASE("load_mesh accepts a single element and no boundary lists") {
  const Mesh mesh = load_from_strings("0 0\n1 0\n0 1\n", "1 2 3\n");
  CHECK(mesh.element_count() == 1);
  CHECK(mesh.dirichlet_edges.empty());
}

TEST_CASE("load_mesh rejects a clockwise element with its id") {
  CHECK_THROWS_WITH_AS(load_from_strings("0 0\n1 0\n0 1\n", "1 3 2\n"),
                       doctest::Contains("element 1"), std::runtime_error);
}

TEST_CASE("load_mesh rejects malformed rows and bad indices") {
  CHECK_THROWS_AS(load_from_strings("0 0 0\n1 0\n0 1\n", "1 2 3\n"), std::runtime_error);
  CHECK_THROWS_AS(load_from_strings("0 0\n1 0\n0 1\n", "1 2\n"), std::runtime_error);
  CHECK_THROWS_AS(load_from_strings("0 0\n1 0\n0 1\n", "1 2 4\n"), std::runtime_error);
  CHECK_THROWS_AS(load_from_strings("0 0\nx 0\n0 1\n", "1 2 3\n"), std::runtime_error);
  CHECK_THROWS_AS(load_from_strings("0 0\n1 0\n0 1\n", "1 2 3\n", "1 5\n"),
                  std::runtime_error);
}

TEST_CASE("load_mesh accepts scientific notation") {
  const Mesh mesh = load_from_strings("0e0 0\n1.0e0 0\n0 1e-0\n", "1 2 3\n");
  CHECK(mesh.coordinates[1].x() == 1.0);
}

TEST_CASE("load_mesh rejects non-finite coordinates") {
  CHECK_THROWS_AS(load_from_strings("0 0\nnan 0\n0 1\n", "1 2 3\n"), std::runtime_error);
  CHECK_THROWS_AS(load_from_strings("0 0\n1 0\n0 inf\n", "1 2 3\n"), std::runtime_error);
  CHECK_THROWS_AS(load_from_strings("0 0\n1e999 0\n0 1\n", "1 2 3\n"), std::runtime_error);
}

TEST_CASE("save then load is the identity and the writer is idempotent") {
  const Mesh mesh = unit_square_mesh();
  std::ostringstream c1, e1, d1, n1;
  save_mesh(mesh, c1, e1, d1, n1);

  std::istringstream ci(c1.str()), ei(e1.str()), di(d1.str()), ni(n1.str());
  const Mesh again = load_mesh(ci, ei, di, ni);
  REQUIRE(again.node_count() == mesh.node_count());
  for (int i = 0; i < mesh.node_count(); ++i)
    CHECK(again.coordinates[i] == mesh.coordinates[i]);
  CHECK(again.elements == mesh.elements);
  CHECK(again.dirichlet_edges == mesh.dirichlet_edges);
  CHECK(again.neumann_edges == mesh.neumann_edges);

  std::ostringstream c2, e2, d2, n2;
  save_mesh(again, c2, e2, d2, n2);
  CHECK(c2.str() == c1.str());
  CHECK(e2.str() == e1.str());
  CHECK(d2.str() == d1.str());
  CHECK(n2.str() == n1.str());
}

TEST_CASE("17-digit round trip preserves awkward coordinates") {
  Mesh mesh = unit_right_triangle();
  mesh.coordinates[1] = Vec2(1.0 / 3.0, 1e-17);
  mesh.coordinates[2] = Vec2(-0.1, std::nextafter(1.0, 2.0));
  std::ostringstream c, e, d, n;
  save_mesh(mesh, c, e, d, n);
  std::istringstream ci(c.str()), ei(e.str()), di(d.str()), ni(n.str());
  const Mesh again = load_mesh(ci, ei, di, ni);
  for (int i = 0; i < 3; ++i) CHECK(again.coordinates[i] == mesh.coordinates[i]);
}

TEST_CASE("reader normalizes reversed boundary pairs against element cycles") {
  const Mesh mesh = load_from_strings("0 0\n1 0\n0 1\n1 1\n0.5 0.5\n",
                                      "5 1 2\n5 3 1\n5 4 3\n5 2 4\n", "2 1\n4 2\n",
                                      "3 4\n1 3\n");
  CHECK(mesh.dirichlet_edges[0] == std::array<int, 2>{0, 1});
  CHECK(mesh.dirichlet_edges[1] == std::array<int, 2>{1, 3});
  CHECK(mesh.neumann_edges[0] == std::array<int, 2>{3, 2});
  CHECK(mesh.neumann_edges[1] == std::array<int, 2>{2, 0});
}

TEST_CASE("mesh_size is the maximum edge length") {
  CHECK(mesh_size(unit_square_mesh()) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(mesh_size(unit_right_triangle()) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK_THROWS_AS(mesh_size(Mesh{}), std::runtime_error);
}

TEST_CASE("mesh_size reaches 1/16 after four refinements") {
  Mesh mesh = unit_square_mesh();
  for (int level = 0; level < 4; ++level) mesh = red_refine(mesh, build_topology(mesh));
  CHECK(mesh_size(mesh) == doctest::Approx(1.0 / 16.0).epsilon(1e-14));
}

TEST_CASE("mesh_size is invariant under node and element reordering") {
  Mesh mesh = unit_square_mesh();
  // Swap nodes 0 and 3 and remap, then shuffle the element order.
  Mesh permuted;
  permuted.coordinates = {mesh.coordinates[3], mesh.coordinates[1], mesh.coordinates[2],
                          mesh.coordinates[0], mesh.coordinates[4]};
  auto remap = [](int v) { return v == 0 ? 3 : v == 3 ? 0 : v; };
  for (const auto& e : mesh.elements)
    permuted.elements.push_back({remap(e[0]), remap(e[1]), remap(e[2])});
  std::swap(permuted.elements[0], permuted.elements[2]);
  CHECK(mesh_size(permuted) == mesh_size(mesh));
}

TEST_CASE("validate_mesh reports overlap and coverage violations") {
  Mesh mesh = unit_square_mesh();
  CHECK(validate_mesh(mesh).ok());

  Mesh overlap = mesh;
  overlap.neumann_edges.push_back({0, 1});  // already Dirichlet
  const auto report = validate_mesh(overlap);
  REQUIRE_FALSE(report.ok());
  CHECK(report.violations[0].find("both dirichlet and neumann") != std::string::npos);

  Mesh uncovered = mesh;
  uncovered.neumann_edges.pop_back();
  const auto report2 = validate_mesh(uncovered);
  REQUIRE_FALSE(report2.ok());
  CHECK(report2.violations[0].find("neither boundary list") != std::string::npos);

  Mesh interior_listed = mesh;
  interior_listed.dirichlet_edges.push_back({4, 0});  // interior spoke
  CHECK_FALSE(validate_mesh(interior_listed).ok());
}

TEST_CASE("a bare triangle loads fine but validation flags uncovered boundary edges") {
  Mesh mesh = unit_right_triangle();
  const auto report = validate_mesh(mesh);
  CHECK(report.violations.size() == 3);  // all three edges unlisted

  // A pure-Dirichlet assignment with an empty Neumann list is valid.
  mesh.dirichlet_edges = {{0, 1}, {1, 2}, {2, 0}};
  CHECK(validate_mesh(mesh).ok());
}
