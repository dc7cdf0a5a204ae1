#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "insulation/distribution.hpp"
#include "insulation/geometry.hpp"

namespace insulation {

enum class Region : std::uint8_t { Bulk, Layer };

enum class EdgeTag : std::uint8_t { Insulated, Dirichlet, Neumann, LayerOuter, LayerSide };

EdgeTag edge_tag(FacetLabel label);

/// A mesh edge on a boundary curve. For edges on the polygon the lambdas locate the
/// endpoints on `facet`; layer edges reuse the facet and lambdas of their fiber bases.
struct BoundaryEdge {
  int a = 0;
  int b = 0;
  EdgeTag tag = EdgeTag::Neumann;
  int facet = -1;
  double lambda_a = 0.0;
  double lambda_b = 0.0;

  BoundaryPoint point_a() const { return {facet, lambda_a}; }
  BoundaryPoint point_b() const { return {facet, lambda_b}; }
};

/// Nodes s + (i / n_t) t_max k(s), i = 0..n_t, above one insulated boundary node.
struct Fiber {
  int base = -1;
  BoundaryPoint point;
  Vec2 direction;
  double height = 0.0;  // eps * d(s)
  std::vector<int> nodes;
};

/// Insulated boundary edge carrying a layer column of 2 n_t triangles; level i owns
/// triangles first_triangle + 2i and first_triangle + 2i + 1.
struct InterfaceEdge {
  BoundaryEdge edge;
  int fiber_a = -1;
  int fiber_b = -1;
  int first_triangle = -1;
};

/// Triangulation of the body, optionally glued to an extruded insulating layer.
///
/// Bulk nodes and bulk triangles form stable prefixes of the node and triangle arrays;
/// extrusion only appends. `facet_edges` are the mesh edges on the polygon boundary,
/// `boundary_edges` the edges on the boundary of the (possibly glued) mesh.
struct TriMesh {
  std::uint64_t id = 0;
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> triangles;
  std::vector<Region> regions;
  std::vector<BoundaryEdge> facet_edges;
  std::vector<BoundaryEdge> boundary_edges;

  int bulk_node_count = 0;
  int bulk_triangle_count = 0;

  // layer data, empty for a bulk mesh
  double layer_epsilon = 0.0;
  int layer_levels = 0;
  std::vector<Fiber> fibers;
  std::vector<InterfaceEdge> interface_edges;
  std::vector<int> node_fiber;  // -1 off the layer
  std::vector<int> node_level;

  int node_count() const { return static_cast<int>(nodes.size()); }
  int triangle_count() const { return static_cast<int>(triangles.size()); }
  bool has_layer() const { return !fibers.empty(); }
  double signed_area(int triangle) const;
  /// Transversal distance of a node: its offset t along the fiber (0 for bulk nodes).
  double fiber_offset(int node) const;
};

std::uint64_t next_mesh_id();

/// Ear clipping of the polygon followed by uniform red refinement until every edge is
/// at most 1.5 h_target long.
TriMesh triangulate_bulk(const PolygonalDomain& domain, double h_target);

/// Glues a layer of n_t cell strips onto the insulated sides. Facets on which d vanishes
/// identically are left bare.
TriMesh extrude_layer(const TriMesh& bulk, const TransversalField& field, const InsulationDistribution& d,
                      double eps, int n_t);

double max_edge_length(const TriMesh& mesh);

/// Nodal view of the insulated boundary with lumped (trapezoidal) weights.
///
/// `weights[j]` is half the summed length of the insulated edges meeting node j and
/// `k_dot_n[j]` the weight-averaged k.n of those edges at the node, so that
/// sum_j weights[j] * k_dot_n[j] * d_j is the trapezoidal value of the integral of (k.n) d.
struct InsulatedTrace {
  std::vector<int> nodes;  // ascending mesh node ids
  std::vector<BoundaryPoint> points;
  std::vector<double> weights;
  std::vector<double> k_dot_n;
  std::vector<int> local;  // mesh node -> trace index, -1 elsewhere
  double length = 0.0;

  int size() const { return static_cast<int>(nodes.size()); }
};

/// Built from the insulated facet edges (layered or not).
InsulatedTrace insulated_trace(const TriMesh& mesh, const TransversalField& field);

/// Thickness knots taken from nodal values on the trace; facets without trace nodes
/// receive no knots.
InsulationDistribution distribution_from_trace(const TriMesh& mesh, const TransversalField& field,
                                               const InsulatedTrace& trace, std::span<const double> values,
                                               double d_min = 0.0);

}  // namespace insulation
