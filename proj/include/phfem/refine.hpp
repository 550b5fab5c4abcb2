#pragma once

#include "phfem/edge_topology.hpp"
#include "phfem/mesh.hpp"

namespace phfem {

/// Uniform red refinement: every triangle is split into four through its
/// edge midpoints and every boundary edge is bisected.
///
/// Midpoint node ids are old_node_count + edge_id (canonical edge order).
/// The four children of parent m occupy rows 4m..4m+3, central child
/// (M0,M1,M2) first, then (P0,M2,M1), (P1,M0,M2), (P2,M1,M0); all CCW.
/// Each boundary pair (a,b) becomes (a,mid),(mid,b) in the same list.
Mesh red_refine(const Mesh& mesh, const EdgeTopology& topology);

}  // namespace phfem
