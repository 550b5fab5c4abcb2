#include "phfem/edge_topology.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace phfem {

namespace {

// One directed edge occurrence, in element-major emission order.
struct Directed {
  int from, to;
  int elem;
  int local;
};

// Stable counting sort of `order` by key(entry) in [0, bins).
void counting_sort(std::vector<int>& order, std::vector<int>& scratch,
                   std::vector<int>& counts, int bins, const std::vector<Directed>& entries,
                   bool by_hi) {
  counts.assign(bins + 1, 0);
  auto key = [&](int idx) {
    const Directed& d = entries[idx];
    return by_hi ? std::max(d.from, d.to) : std::min(d.from, d.to);
  };
  for (int idx : order) ++counts[key(idx) + 1];
  for (int b = 0; b < bins; ++b) counts[b + 1] += counts[b];
  scratch.resize(order.size());
  for (int idx : order) scratch[counts[key(idx)]++] = idx;
  order.swap(scratch);
}

}  // namespace

int EdgeTopology::node_pair_to_edge(int k, int l) const {
  const int lo = std::min(k, l);
  const int hi = std::max(k, l);
  if (lo < 0 || hi >= node_count) return -1;
  for (int s = pair_offsets[lo]; s < pair_offsets[lo + 1]; ++s)
    if (pair_entries[s].first == hi) return pair_entries[s].second;
  return -1;
}

int EdgeTopology::directed_pair_to_element(int k, int l) const {
  if (k < 0 || k >= node_count) return -1;
  for (int s = directed_offsets[k]; s < directed_offsets[k + 1]; ++s)
    if (directed_entries[s].first == l) return directed_entries[s].second;
  return -1;
}

EdgeTopology build_topology(const Mesh& mesh) {
  EdgeTopology topo;
  const int ne = mesh.element_count();
  const int nc = mesh.node_count();
  const int n_directed = 3 * ne;
  topo.node_count = nc;

  // Directed pairs of each CCW cycle; edge k is opposite vertex k, so the
  // local indices of (v0->v1, v1->v2, v2->v0) are (2, 0, 1).
  std::vector<Directed> directed;
  directed.reserve(n_directed);
  for (int m = 0; m < ne; ++m) {
    const auto& t = mesh.elements[m];
    directed.push_back({t[0], t[1], m, 2});
    directed.push_back({t[1], t[2], m, 0});
    directed.push_back({t[2], t[0], m, 1});
  }

  // Canonical edge order is (max node, then min node) ascending; two stable
  // counting passes sort the occurrences that way while keeping the
  // element-major emission order inside every group, so the first entry of
  // each group is the t_plus occurrence.
  std::vector<int> order(n_directed), scratch, counts;
  for (int i = 0; i < n_directed; ++i) order[i] = i;
  counting_sort(order, scratch, counts, nc, directed, /*by_hi=*/false);
  counting_sort(order, scratch, counts, nc, directed, /*by_hi=*/true);

  auto lo_of = [&](int idx) { return std::min(directed[idx].from, directed[idx].to); };
  auto hi_of = [&](int idx) { return std::max(directed[idx].from, directed[idx].to); };

  for (int g = 0; g < n_directed;) {
    const int lo = lo_of(order[g]);
    const int hi = hi_of(order[g]);
    int end = g + 1;
    while (end < n_directed && lo_of(order[end]) == lo && hi_of(order[end]) == hi) ++end;

    if (end - g > 2)
      throw std::runtime_error("build_topology: non-manifold edge (" + std::to_string(lo + 1) +
                               "," + std::to_string(hi + 1) +
                               ") shared by more than two elements");
    const Directed& first = directed[order[g]];
    if (end - g == 2) {
      const Directed& second = directed[order[g + 1]];
      if (second.from == first.from)
        throw std::runtime_error("build_topology: duplicate directed edge " +
                                 std::to_string(first.from + 1) + "->" +
                                 std::to_string(first.to + 1));
    }

    const int e = topo.edge_count();
    topo.edge_nodes.push_back({first.from, first.to});
    topo.local_in_tplus.push_back(first.local);
    if (end - g == 2) {
      const Directed& second = directed[order[g + 1]];
      topo.edge_elements.push_back({first.elem, second.elem});
      topo.local_in_tminus.push_back(second.local);
      topo.interior_edges.push_back(e);
    } else {
      topo.edge_elements.push_back({first.elem, -1});
      topo.local_in_tminus.push_back(-1);
      topo.boundary_edges.push_back(e);
    }
    g = end;
  }

  // Flat adjacency tables for the two lookups.
  const int nr_edges = topo.edge_count();
  topo.pair_offsets.assign(nc + 1, 0);
  for (int e = 0; e < nr_edges; ++e)
    ++topo.pair_offsets[std::min(topo.edge_nodes[e][0], topo.edge_nodes[e][1]) + 1];
  for (int v = 0; v < nc; ++v) topo.pair_offsets[v + 1] += topo.pair_offsets[v];
  topo.pair_entries.resize(nr_edges);
  {
    std::vector<int> cursor(topo.pair_offsets.begin(), topo.pair_offsets.end() - 1);
    for (int e = 0; e < nr_edges; ++e) {
      const int lo = std::min(topo.edge_nodes[e][0], topo.edge_nodes[e][1]);
      const int hi = std::max(topo.edge_nodes[e][0], topo.edge_nodes[e][1]);
      topo.pair_entries[cursor[lo]++] = {hi, e};
    }
  }

  topo.directed_offsets.assign(nc + 1, 0);
  for (const Directed& d : directed) ++topo.directed_offsets[d.from + 1];
  for (int v = 0; v < nc; ++v) topo.directed_offsets[v + 1] += topo.directed_offsets[v];
  topo.directed_entries.resize(n_directed);
  {
    std::vector<int> cursor(topo.directed_offsets.begin(), topo.directed_offsets.end() - 1);
    for (const Directed& d : directed) topo.directed_entries[cursor[d.from]++] = {d.to, d.elem};
  }

  return topo;
}

EdgeClassification classify_edges(const EdgeTopology& topology, const Mesh& mesh) {
  EdgeClassification cls;
  const int nr_edges = topology.edge_count();

  auto resolve = [&](const std::array<int, 2>& pair, const char* what) {
    const int e = topology.node_pair_to_edge(pair[0], pair[1]);
    if (e < 0)
      throw std::runtime_error(std::string(what) + " pair (" + std::to_string(pair[0] + 1) +
                               "," + std::to_string(pair[1] + 1) + ") is not an edge");
    if (topology.edge_elements[e][1] >= 0)
      throw std::runtime_error(std::string(what) + " pair (" + std::to_string(pair[0] + 1) +
                               "," + std::to_string(pair[1] + 1) +
                               ") resolves to an interior edge");
    return e;
  };

  for (const auto& pair : mesh.dirichlet_edges)
    cls.dirichlet_edge_ids.push_back(resolve(pair, "dirichlet"));
  for (const auto& pair : mesh.neumann_edges)
    cls.neumann_edge_ids.push_back(resolve(pair, "neumann"));

  std::vector<char> is_neumann(nr_edges, 0);
  for (int e : cls.neumann_edge_ids) is_neumann[e] = 1;

  cls.retained_pos.assign(nr_edges, -1);
  for (int e = 0; e < nr_edges; ++e)
    if (!is_neumann[e]) {
      cls.retained_pos[e] = static_cast<int>(cls.retained_edges.size());
      cls.retained_edges.push_back(e);
    }

  return cls;
}

std::vector<double> edge_lengths(const Mesh& mesh, const EdgeTopology& topology) {
  std::vector<double> lengths(topology.edge_count());
  for (int e = 0; e < topology.edge_count(); ++e) {
    const auto& [a, b] = topology.edge_nodes[e];
    lengths[e] = (mesh.coordinates[b] - mesh.coordinates[a]).norm();
  }
  return lengths;
}

Vec2 edge_normal(const Mesh& mesh, const EdgeTopology& topology, int edge_id) {
  const auto& [a, b] = topology.edge_nodes[edge_id];
  const Vec2 d = mesh.coordinates[b] - mesh.coordinates[a];
  return Vec2(d.y(), -d.x()) / d.norm();
}

}  // namespace phfem
