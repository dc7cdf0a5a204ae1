#include "insulation/mesh.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <string>
#include <unordered_map>

#include "insulation/error.hpp"

namespace insulation {

EdgeTag edge_tag(FacetLabel label) {
  switch (label) {
    case FacetLabel::Insulated: return EdgeTag::Insulated;
    case FacetLabel::Dirichlet: return EdgeTag::Dirichlet;
    case FacetLabel::Neumann: return EdgeTag::Neumann;
  }
  return EdgeTag::Neumann;
}

std::uint64_t next_mesh_id() {
  static std::atomic<std::uint64_t> counter{0};
  return ++counter;
}

double TriMesh::signed_area(int triangle) const {
  const auto& t = triangles[static_cast<std::size_t>(triangle)];
  const Vec2& p0 = nodes[static_cast<std::size_t>(t[0])];
  return 0.5 * cross(nodes[static_cast<std::size_t>(t[1])] - p0, nodes[static_cast<std::size_t>(t[2])] - p0);
}

double TriMesh::fiber_offset(int node) const {
  if (node_fiber.empty()) return 0.0;
  const int f = node_fiber[static_cast<std::size_t>(node)];
  if (f < 0) return 0.0;
  const Fiber& fiber = fibers[static_cast<std::size_t>(f)];
  return fiber.height * (static_cast<double>(node_level[static_cast<std::size_t>(node)]) / layer_levels);
}

namespace {

double corner_quality(const Vec2& a, const Vec2& b, const Vec2& c) {
  // smallest interior angle of the triangle
  auto angle = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    const Vec2 u = q - p;
    const Vec2 v = r - p;
    return std::atan2(std::abs(cross(u, v)), dot(u, v));
  };
  return std::min({angle(a, b, c), angle(b, c, a), angle(c, a, b)});
}

bool inside_or_on(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& p) {
  return cross(b - a, p - a) >= 0.0 && cross(c - b, p - b) >= 0.0 && cross(a - c, p - c) >= 0.0;
}

std::vector<std::array<int, 3>> ear_clip(const std::vector<Vec2>& pts) {
  std::vector<int> ring(pts.size());
  for (std::size_t i = 0; i < ring.size(); ++i) ring[i] = static_cast<int>(i);
  std::vector<std::array<int, 3>> tris;

  while (ring.size() > 3) {
    const std::size_t m = ring.size();
    int best = -1;
    double best_quality = -1.0;
    for (std::size_t i = 0; i < m; ++i) {
      const int ip = ring[(i + m - 1) % m];
      const int ic = ring[i];
      const int in = ring[(i + 1) % m];
      const Vec2& a = pts[static_cast<std::size_t>(ip)];
      const Vec2& b = pts[static_cast<std::size_t>(ic)];
      const Vec2& c = pts[static_cast<std::size_t>(in)];
      if (!(cross(b - a, c - b) > 0.0)) continue;  // reflex or flat
      bool blocked = false;
      for (std::size_t j = 0; j < m && !blocked; ++j) {
        const int other = ring[j];
        if (other == ip || other == ic || other == in) continue;
        blocked = inside_or_on(a, b, c, pts[static_cast<std::size_t>(other)]);
      }
      if (blocked) continue;
      const double q = corner_quality(a, b, c);
      if (q > best_quality) {
        best_quality = q;
        best = static_cast<int>(i);
      }
    }
    if (best < 0) throw Error(ErrorKind::MeshFailure, "ear clipping found no ear (polygon not simple?)");
    const std::size_t i = static_cast<std::size_t>(best);
    tris.push_back({ring[(i + m - 1) % m], ring[i], ring[(i + 1) % m]});
    ring.erase(ring.begin() + static_cast<std::ptrdiff_t>(i));
  }
  const Vec2& a = pts[static_cast<std::size_t>(ring[0])];
  const Vec2& b = pts[static_cast<std::size_t>(ring[1])];
  const Vec2& c = pts[static_cast<std::size_t>(ring[2])];
  if (!(cross(b - a, c - a) > 0.0)) throw Error(ErrorKind::MeshFailure, "degenerate final ear");
  tris.push_back({ring[0], ring[1], ring[2]});
  return tris;
}

std::uint64_t edge_key(int a, int b) {
  const auto lo = static_cast<std::uint64_t>(std::min(a, b));
  const auto hi = static_cast<std::uint64_t>(std::max(a, b));
  return (lo << 32) | hi;
}

void red_refine(TriMesh& mesh) {
  std::unordered_map<std::uint64_t, int> midpoint;
  midpoint.reserve(mesh.triangles.size() * 2);
  auto mid = [&](int a, int b) {
    const auto key = edge_key(a, b);
    const auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    const int id = static_cast<int>(mesh.nodes.size());
    mesh.nodes.push_back(0.5 * (mesh.nodes[static_cast<std::size_t>(a)] + mesh.nodes[static_cast<std::size_t>(b)]));
    midpoint.emplace(key, id);
    return id;
  };

  std::vector<std::array<int, 3>> tris;
  tris.reserve(mesh.triangles.size() * 4);
  for (const auto& t : mesh.triangles) {
    const int ab = mid(t[0], t[1]);
    const int bc = mid(t[1], t[2]);
    const int ca = mid(t[2], t[0]);
    tris.push_back({t[0], ab, ca});
    tris.push_back({ab, t[1], bc});
    tris.push_back({ca, bc, t[2]});
    tris.push_back({ab, bc, ca});
  }
  mesh.triangles = std::move(tris);

  std::vector<BoundaryEdge> edges;
  edges.reserve(mesh.facet_edges.size() * 2);
  for (const auto& e : mesh.facet_edges) {
    const int m = midpoint.at(edge_key(e.a, e.b));
    const double lm = 0.5 * (e.lambda_a + e.lambda_b);
    edges.push_back({e.a, m, e.tag, e.facet, e.lambda_a, lm});
    edges.push_back({m, e.b, e.tag, e.facet, lm, e.lambda_b});
  }
  mesh.facet_edges = std::move(edges);
}

}  // namespace

double max_edge_length(const TriMesh& mesh) {
  double h = 0.0;
  for (const auto& t : mesh.triangles) {
    for (int i = 0; i < 3; ++i) {
      h = std::max(h, norm(mesh.nodes[static_cast<std::size_t>(t[(i + 1) % 3])] - mesh.nodes[static_cast<std::size_t>(t[i])]));
    }
  }
  return h;
}

TriMesh triangulate_bulk(const PolygonalDomain& domain, double h_target) {
  if (!(h_target > 0.0) || !std::isfinite(h_target)) throw Error(ErrorKind::MeshFailure, "h_target must be positive");

  TriMesh mesh;
  mesh.nodes = domain.vertices();
  mesh.triangles = ear_clip(domain.vertices());
  for (int f = 0; f < domain.size(); ++f) {
    const Facet& facet = domain.facet(f);
    mesh.facet_edges.push_back({facet.first, facet.second, edge_tag(facet.label), f, 0.0, 1.0});
  }

  constexpr int kMaxLevels = 16;
  int level = 0;
  while (max_edge_length(mesh) > 1.5 * h_target) {
    if (++level > kMaxLevels) throw Error(ErrorKind::MeshFailure, "refinement limit reached");
    red_refine(mesh);
  }

  mesh.regions.assign(mesh.triangles.size(), Region::Bulk);
  mesh.boundary_edges = mesh.facet_edges;
  mesh.bulk_node_count = mesh.node_count();
  mesh.bulk_triangle_count = mesh.triangle_count();
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    if (!(mesh.signed_area(t) > 0.0)) throw Error(ErrorKind::MeshFailure, "inverted bulk triangle " + std::to_string(t));
  }
  mesh.id = next_mesh_id();
  return mesh;
}

TriMesh extrude_layer(const TriMesh& bulk, const TransversalField& field, const InsulationDistribution& d,
                      double eps, int n_t) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw Error(ErrorKind::NonInjectiveLayer, "eps must be positive");
  if (n_t < 1) throw Error(ErrorKind::MeshFailure, "n_t must be >= 1");
  if (bulk.has_layer()) throw Error(ErrorKind::MeshMismatch, "mesh already carries a layer");

  TriMesh mesh = bulk;
  mesh.layer_epsilon = eps;
  mesh.layer_levels = n_t;
  mesh.node_fiber.assign(static_cast<std::size_t>(bulk.node_count()), -1);
  mesh.node_level.assign(static_cast<std::size_t>(bulk.node_count()), 0);

  std::vector<bool> layered_edge(bulk.facet_edges.size(), false);
  for (std::size_t i = 0; i < bulk.facet_edges.size(); ++i) {
    const auto& e = bulk.facet_edges[i];
    layered_edge[i] = e.tag == EdgeTag::Insulated && !d.vanishes_on(e.facet);
  }

  auto make_fiber = [&](int node, const BoundaryPoint& p) {
    if (const int existing = mesh.node_fiber[static_cast<std::size_t>(node)]; existing >= 0) return existing;
    const double dv = d.at(p);
    if (!(dv > 0.0)) {
      throw Error(ErrorKind::DegenerateFiber, "zero thickness at boundary node " + std::to_string(node) +
                                                  " (facet " + std::to_string(p.facet) + ")");
    }
    Fiber fiber;
    fiber.base = node;
    fiber.point = p;
    fiber.direction = field.at(p);
    fiber.height = eps * dv;
    fiber.nodes.push_back(node);
    const Vec2 base = mesh.nodes[static_cast<std::size_t>(node)];
    for (int i = 1; i <= n_t; ++i) {
      const double t = fiber.height * (static_cast<double>(i) / n_t);
      fiber.nodes.push_back(mesh.node_count());
      mesh.nodes.push_back(base + t * fiber.direction);
      mesh.node_fiber.push_back(static_cast<int>(mesh.fibers.size()));
      mesh.node_level.push_back(i);
    }
    const int index = static_cast<int>(mesh.fibers.size());
    mesh.node_fiber[static_cast<std::size_t>(node)] = index;
    mesh.fibers.push_back(std::move(fiber));
    return index;
  };

  std::vector<int> incident(static_cast<std::size_t>(bulk.node_count()), 0);
  for (std::size_t i = 0; i < bulk.facet_edges.size(); ++i) {
    if (!layered_edge[i]) continue;
    const auto& e = bulk.facet_edges[i];
    InterfaceEdge ie;
    ie.edge = e;
    ie.fiber_a = make_fiber(e.a, e.point_a());
    ie.fiber_b = make_fiber(e.b, e.point_b());
    ie.first_triangle = mesh.triangle_count();
    const auto& fa = mesh.fibers[static_cast<std::size_t>(ie.fiber_a)].nodes;
    const auto& fb = mesh.fibers[static_cast<std::size_t>(ie.fiber_b)].nodes;
    for (int l = 0; l < n_t; ++l) {
      const auto lu = static_cast<std::size_t>(l);
      mesh.triangles.push_back({fa[lu], fa[lu + 1], fb[lu + 1]});
      mesh.triangles.push_back({fa[lu], fb[lu + 1], fb[lu]});
      mesh.regions.push_back(Region::Layer);
      mesh.regions.push_back(Region::Layer);
    }
    for (int k = ie.first_triangle; k < mesh.triangle_count(); ++k) {
      if (!(mesh.signed_area(k) > 0.0)) {
        throw Error(ErrorKind::NonInjectiveLayer, "inverted layer triangle above facet " + std::to_string(e.facet) +
                                                      " (eps = " + std::to_string(eps) + ")");
      }
    }
    ++incident[static_cast<std::size_t>(e.a)];
    ++incident[static_cast<std::size_t>(e.b)];
    mesh.interface_edges.push_back(ie);
  }

  mesh.boundary_edges.clear();
  for (std::size_t i = 0; i < bulk.facet_edges.size(); ++i) {
    if (!layered_edge[i]) mesh.boundary_edges.push_back(bulk.facet_edges[i]);
  }
  for (const auto& ie : mesh.interface_edges) {
    const auto& fa = mesh.fibers[static_cast<std::size_t>(ie.fiber_a)];
    const auto& fb = mesh.fibers[static_cast<std::size_t>(ie.fiber_b)];
    mesh.boundary_edges.push_back({fa.nodes.back(), fb.nodes.back(), EdgeTag::LayerOuter, ie.edge.facet,
                                   ie.edge.lambda_a, ie.edge.lambda_b});
  }
  // side fibers at the ends of insulated chains
  for (const auto& fiber : mesh.fibers) {
    if (incident[static_cast<std::size_t>(fiber.base)] != 1) continue;
    for (int l = 0; l < n_t; ++l) {
      mesh.boundary_edges.push_back({fiber.nodes[static_cast<std::size_t>(l)], fiber.nodes[static_cast<std::size_t>(l + 1)],
                                     EdgeTag::LayerSide, fiber.point.facet, fiber.point.lambda, fiber.point.lambda});
    }
  }

  mesh.id = next_mesh_id();
  return mesh;
}

InsulatedTrace insulated_trace(const TriMesh& mesh, const TransversalField& field) {
  InsulatedTrace trace;
  trace.local.assign(static_cast<std::size_t>(mesh.node_count()), -1);
  std::map<int, BoundaryPoint> points;
  for (const auto& e : mesh.facet_edges) {
    if (e.tag != EdgeTag::Insulated) continue;
    points.emplace(e.a, e.point_a());
    points.emplace(e.b, e.point_b());
  }
  for (const auto& [node, p] : points) {
    trace.local[static_cast<std::size_t>(node)] = trace.size();
    trace.nodes.push_back(node);
    trace.points.push_back(p);
  }
  trace.weights.assign(trace.nodes.size(), 0.0);
  std::vector<double> weighted_kn(trace.nodes.size(), 0.0);
  for (const auto& e : mesh.facet_edges) {
    if (e.tag != EdgeTag::Insulated) continue;
    const double len = norm(mesh.nodes[static_cast<std::size_t>(e.b)] - mesh.nodes[static_cast<std::size_t>(e.a)]);
    trace.length += len;
    const auto ja = static_cast<std::size_t>(trace.local[static_cast<std::size_t>(e.a)]);
    const auto jb = static_cast<std::size_t>(trace.local[static_cast<std::size_t>(e.b)]);
    trace.weights[ja] += 0.5 * len;
    trace.weights[jb] += 0.5 * len;
    weighted_kn[ja] += 0.5 * len * field.k_dot_n(e.point_a());
    weighted_kn[jb] += 0.5 * len * field.k_dot_n(e.point_b());
  }
  trace.k_dot_n.resize(trace.nodes.size());
  for (std::size_t j = 0; j < trace.nodes.size(); ++j) trace.k_dot_n[j] = weighted_kn[j] / trace.weights[j];
  return trace;
}

InsulationDistribution distribution_from_trace(const TriMesh& mesh, const TransversalField& field,
                                               const InsulatedTrace& trace, std::span<const double> values,
                                               double d_min) {
  if (static_cast<int>(values.size()) != trace.size()) throw Error(ErrorKind::MeshMismatch, "trace value count");
  const int nf = field.domain().size();
  std::vector<std::map<double, double>> per_facet(static_cast<std::size_t>(nf));
  for (const auto& e : mesh.facet_edges) {
    if (e.tag != EdgeTag::Insulated) continue;
    auto& m = per_facet[static_cast<std::size_t>(e.facet)];
    m.emplace(e.lambda_a, values[static_cast<std::size_t>(trace.local[static_cast<std::size_t>(e.a)])]);
    m.emplace(e.lambda_b, values[static_cast<std::size_t>(trace.local[static_cast<std::size_t>(e.b)])]);
  }
  std::vector<std::vector<ThicknessKnot>> knots(static_cast<std::size_t>(nf));
  for (int f = 0; f < nf; ++f) {
    for (const auto& [lambda, value] : per_facet[static_cast<std::size_t>(f)]) {
      knots[static_cast<std::size_t>(f)].push_back({lambda, value});
    }
  }
  return InsulationDistribution::from_knots(field, std::move(knots), d_min);
}

}  // namespace insulation
