#include "insulation/fem.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "insulation/error.hpp"
#include "insulation/kernels.hpp"

namespace insulation {

ScalarField ScalarField::zeros(const TriMesh& mesh) {
  return {std::vector<double>(static_cast<std::size_t>(mesh.node_count()), 0.0), mesh.id};
}

void require_same_mesh(const ScalarField& field, const TriMesh& mesh) {
  if (field.mesh_id != mesh.id || static_cast<int>(field.values.size()) != mesh.node_count()) {
    throw Error(ErrorKind::MeshMismatch, "field does not belong to this mesh");
  }
}

ProblemData ProblemData::from_domain(const PolygonalDomain& domain, double f) {
  ProblemData data;
  data.f = f;
  for (int i = 0; i < domain.size(); ++i) {
    const Facet& facet = domain.facet(i);
    if (facet.label == FacetLabel::Neumann) data.g[i] = facet.value;
    if (facet.label == FacetLabel::Dirichlet) data.u_D[i] = facet.value;
  }
  return data;
}

void ProblemData::validate(const PolygonalDomain& domain) const {
  auto check = [&](const std::map<int, double>& values, FacetLabel expected, const char* what) {
    for (const auto& [facet, value] : values) {
      if (facet < 0 || facet >= domain.size() || domain.facet(facet).label != expected) {
        throw Error(ErrorKind::UnknownLabel, std::string(what) + " given on facet " + std::to_string(facet) +
                                                 " which is not " + std::string(to_string(expected)));
      }
      if (!std::isfinite(value)) throw Error(ErrorKind::SchemaError, std::string(what) + " must be finite");
    }
  };
  check(g, FacetLabel::Neumann, "g");
  check(u_D, FacetLabel::Dirichlet, "u_D");
  if (!std::isfinite(f)) throw Error(ErrorKind::SchemaError, "f must be finite");
  for (double v : f_per_triangle) {
    if (!std::isfinite(v)) throw Error(ErrorKind::SchemaError, "f must be finite");
  }
}

double ProblemData::source_on(int triangle) const {
  if (f_per_triangle.empty()) return f;
  return f_per_triangle.at(static_cast<std::size_t>(triangle));
}

namespace {

struct P1Element {
  double area;
  std::array<Vec2, 3> grad;
};

P1Element p1_element(const TriMesh& mesh, int ti) {
  const auto& t = mesh.triangles[static_cast<std::size_t>(ti)];
  const Vec2& a = mesh.nodes[static_cast<std::size_t>(t[0])];
  const Vec2& b = mesh.nodes[static_cast<std::size_t>(t[1])];
  const Vec2& c = mesh.nodes[static_cast<std::size_t>(t[2])];
  const double twice = cross(b - a, c - a);
  P1Element e;
  e.area = 0.5 * twice;
  e.grad[0] = {(b.y - c.y) / twice, (c.x - b.x) / twice};
  e.grad[1] = {(c.y - a.y) / twice, (a.x - c.x) / twice};
  e.grad[2] = {(a.y - b.y) / twice, (b.x - a.x) / twice};
  return e;
}

double region_coefficient(const TriMesh& mesh, int ti, RegionCoefficients coeff) {
  return mesh.regions[static_cast<std::size_t>(ti)] == Region::Bulk ? coeff.bulk : coeff.layer;
}

void check_coefficients(RegionCoefficients coeff) {
  if (!(coeff.bulk >= 0.0) || !(coeff.layer >= 0.0)) {
    throw Error(ErrorKind::NonpositiveWeight, "region coefficients must be non-negative");
  }
}

SparseMatrix from_triplets(int n, std::vector<std::tuple<int, int, double>> entries) {
  std::stable_sort(entries.begin(), entries.end(), [](const auto& x, const auto& y) {
    return std::get<0>(x) != std::get<0>(y) ? std::get<0>(x) < std::get<0>(y) : std::get<1>(x) < std::get<1>(y);
  });
  SparseMatrix m;
  m.rows = n;
  m.row_ptr.assign(static_cast<std::size_t>(n) + 1, 0);
  int last_r = -1;
  int last_c = -1;
  for (const auto& [r, c, v] : entries) {
    if (r == last_r && c == last_c) {
      m.values.back() += v;
      continue;
    }
    m.cols.push_back(c);
    m.values.push_back(v);
    ++m.row_ptr[static_cast<std::size_t>(r) + 1];
    last_r = r;
    last_c = c;
  }
  for (int r = 0; r < n; ++r) m.row_ptr[static_cast<std::size_t>(r) + 1] += m.row_ptr[static_cast<std::size_t>(r)];
  return m;
}

}  // namespace

SparseMatrix assemble_stiffness(const TriMesh& mesh, RegionCoefficients coeff) {
  check_coefficients(coeff);
  SparseMatrix a = kernels::p1_pattern(mesh);
  const auto inc = kernels::node_incidence(mesh);
  kernels::assemble(a, mesh, inc, [&](int ti, kernels::ElementMatrix& ke) {
    const P1Element e = p1_element(mesh, ti);
    const double c = region_coefficient(mesh, ti, coeff) * e.area;
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) ke[i][j] = c * dot(e.grad[i], e.grad[j]);
    }
  });
  return a;
}

SparseMatrix assemble_mass(const TriMesh& mesh, RegionCoefficients coeff) {
  check_coefficients(coeff);
  SparseMatrix m = kernels::p1_pattern(mesh);
  const auto inc = kernels::node_incidence(mesh);
  kernels::assemble(m, mesh, inc, [&](int ti, kernels::ElementMatrix& ke) {
    const double c = region_coefficient(mesh, ti, coeff) * mesh.signed_area(ti) / 12.0;
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) ke[i][j] = (i == j ? 2.0 : 1.0) * c;
    }
  });
  return m;
}

SparseMatrix assemble_boundary_mass(const TriMesh& mesh, std::span<const BoundaryEdge> edges, const EdgeWeight& weight) {
  const GaussRule& rule = gauss_legendre(3);
  std::vector<std::tuple<int, int, double>> entries;
  entries.reserve(edges.size() * 4);
  for (const auto& e : edges) {
    const double len = norm(mesh.nodes[static_cast<std::size_t>(e.b)] - mesh.nodes[static_cast<std::size_t>(e.a)]);
    double maa = 0.0;
    double mab = 0.0;
    double mbb = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double xi = rule.points[q];
      const double w = weight(e, xi);
      if (!(w > 0.0) || !std::isfinite(w)) {
        throw Error(ErrorKind::NonpositiveWeight, "boundary weight " + std::to_string(w) + " on facet " +
                                                      std::to_string(e.facet));
      }
      const double s = len * rule.weights[q] * w;
      maa += s * (1.0 - xi) * (1.0 - xi);
      mab += s * (1.0 - xi) * xi;
      mbb += s * xi * xi;
    }
    entries.emplace_back(e.a, e.a, maa);
    entries.emplace_back(e.a, e.b, mab);
    entries.emplace_back(e.b, e.a, mab);
    entries.emplace_back(e.b, e.b, mbb);
  }
  return from_triplets(mesh.node_count(), std::move(entries));
}

std::vector<double> assemble_boundary_mass_lumped(const TriMesh& mesh, std::span<const BoundaryEdge> edges,
                                                  const EdgeWeight& weight) {
  return assemble_boundary_mass(mesh, edges, weight).row_sums();
}

std::vector<double> assemble_load(const TriMesh& mesh, const ProblemData& data) {
  if (!data.f_per_triangle.empty() && static_cast<int>(data.f_per_triangle.size()) != mesh.bulk_triangle_count) {
    throw Error(ErrorKind::MeshMismatch, "per-triangle source has " + std::to_string(data.f_per_triangle.size()) +
                                             " values, mesh has " + std::to_string(mesh.bulk_triangle_count) +
                                             " bulk triangles");
  }
  std::vector<double> b(static_cast<std::size_t>(mesh.node_count()), 0.0);
  for (int ti = 0; ti < mesh.bulk_triangle_count; ++ti) {
    const double share = data.source_on(ti) * mesh.signed_area(ti) / 3.0;
    for (int v : mesh.triangles[static_cast<std::size_t>(ti)]) b[static_cast<std::size_t>(v)] += share;
  }
  return b;
}

std::vector<double> assemble_neumann(const TriMesh& mesh, const ProblemData& data) {
  std::vector<double> b(static_cast<std::size_t>(mesh.node_count()), 0.0);
  for (const auto& e : mesh.facet_edges) {
    if (e.tag != EdgeTag::Neumann) continue;
    const auto it = data.g.find(e.facet);
    if (it == data.g.end() || it->second == 0.0) continue;
    const double len = norm(mesh.nodes[static_cast<std::size_t>(e.b)] - mesh.nodes[static_cast<std::size_t>(e.a)]);
    b[static_cast<std::size_t>(e.a)] += 0.5 * len * it->second;
    b[static_cast<std::size_t>(e.b)] += 0.5 * len * it->second;
  }
  return b;
}

std::map<int, double> dirichlet_constraints(const TriMesh& mesh, const ProblemData& data) {
  std::vector<const BoundaryEdge*> edges;
  for (const auto& e : mesh.facet_edges) {
    if (e.tag == EdgeTag::Dirichlet) edges.push_back(&e);
  }
  std::stable_sort(edges.begin(), edges.end(), [](const auto* x, const auto* y) { return x->facet < y->facet; });
  std::map<int, double> constraints;
  for (const auto* e : edges) {
    const auto it = data.u_D.find(e->facet);
    const double value = it == data.u_D.end() ? 0.0 : it->second;
    constraints.emplace(e->a, value);
    constraints.emplace(e->b, value);
  }
  return constraints;
}

std::vector<double> ReducedSystem::expand(std::span<const double> free_values) const {
  std::vector<double> full = lifted;
  for (std::size_t i = 0; i < free_nodes.size(); ++i) full[static_cast<std::size_t>(free_nodes[i])] = free_values[i];
  return full;
}

std::vector<double> ReducedSystem::restrict_to_free(std::span<const double> full) const {
  std::vector<double> x(free_nodes.size());
  for (std::size_t i = 0; i < free_nodes.size(); ++i) x[i] = full[static_cast<std::size_t>(free_nodes[i])];
  return x;
}

ReducedSystem apply_dirichlet(const LinearSystem& system) {
  const SparseMatrix& a = system.matrix;
  const auto n = static_cast<std::size_t>(a.rows);
  if (system.rhs.size() != n) throw Error(ErrorKind::MeshMismatch, "rhs size");
  ReducedSystem red;
  red.lifted.assign(n, 0.0);
  red.free_index.assign(n, -1);
  std::vector<bool> fixed(n, false);
  for (const auto& [node, value] : system.constraints) {
    if (node < 0 || static_cast<std::size_t>(node) >= n) throw Error(ErrorKind::MeshMismatch, "constraint node");
    fixed[static_cast<std::size_t>(node)] = true;
    red.lifted[static_cast<std::size_t>(node)] = value;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!fixed[i]) {
      red.free_index[i] = static_cast<int>(red.free_nodes.size());
      red.free_nodes.push_back(static_cast<int>(i));
    }
  }
  SparseMatrix& m = red.matrix;
  m.rows = static_cast<int>(red.free_nodes.size());
  m.row_ptr.assign(red.free_nodes.size() + 1, 0);
  red.rhs.resize(red.free_nodes.size());
  for (std::size_t fr = 0; fr < red.free_nodes.size(); ++fr) {
    const int r = red.free_nodes[fr];
    double rhs = system.rhs[static_cast<std::size_t>(r)];
    for (int k = a.row_ptr[static_cast<std::size_t>(r)]; k < a.row_ptr[static_cast<std::size_t>(r) + 1]; ++k) {
      const int c = a.cols[static_cast<std::size_t>(k)];
      const double v = a.values[static_cast<std::size_t>(k)];
      if (fixed[static_cast<std::size_t>(c)]) {
        rhs -= v * red.lifted[static_cast<std::size_t>(c)];
      } else {
        m.cols.push_back(red.free_index[static_cast<std::size_t>(c)]);
        m.values.push_back(v);
      }
    }
    red.rhs[fr] = rhs;
    m.row_ptr[fr + 1] = static_cast<int>(m.cols.size());
  }
  return red;
}

CgResult conjugate_gradient(const LinearOperator& a, std::span<const double> diagonal, std::span<const double> b,
                            const CgOptions& options, std::span<const double> x0) {
  const auto n = diagonal.size();
  if (b.size() != n) throw Error(ErrorKind::MeshMismatch, "rhs size");
  CgResult result;
  result.x.assign(n, 0.0);
  if (!x0.empty()) std::copy(x0.begin(), x0.end(), result.x.begin());
  if (n == 0) return result;

  const double bnorm = std::sqrt(kernels::dot(b, b));
  if (bnorm == 0.0 && x0.empty()) return result;
  const int max_iter = options.max_iter > 0 ? options.max_iter : static_cast<int>(10 * n);

  std::vector<double> inv_diag(diagonal.begin(), diagonal.end());
  for (double& d : inv_diag) {
    if (!(d > 0.0)) throw Error(ErrorKind::NoConvergence, "breakdown: non-positive diagonal entry");
    d = 1.0 / d;
  }

  std::vector<double> r(n), z(n), p(n), q(n);
  a(result.x, q);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
  const double scale = bnorm > 0.0 ? bnorm : 1.0;
  double rnorm = std::sqrt(kernels::dot(r, r));
  if (rnorm <= options.tol * scale) {
    result.relative_residual = rnorm / scale;
    return result;
  }
  for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
  p = z;
  double rz = kernels::dot(r, z);

  for (int it = 1; it <= max_iter; ++it) {
    a(p, q);
    const double curvature = kernels::dot(p, q);
    if (!(curvature > 0.0)) {
      throw Error(ErrorKind::NoConvergence, "breakdown: non-positive curvature p^T A p = " + std::to_string(curvature));
    }
    const double alpha = rz / curvature;
    kernels::axpy(alpha, p, result.x);
    kernels::axpy(-alpha, q, r);
    rnorm = std::sqrt(kernels::dot(r, r));
    result.iterations = it;
    if (rnorm <= options.tol * scale) {
      result.relative_residual = rnorm / scale;
      return result;
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    const double rz_new = kernels::dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  throw Error(ErrorKind::NoConvergence, "CG reached " + std::to_string(max_iter) + " iterations (relative residual " +
                                            std::to_string(rnorm / scale) + ")");
}

CgResult conjugate_gradient(const SparseMatrix& a, std::span<const double> b, const CgOptions& options,
                            std::span<const double> x0) {
  const std::vector<double> diag = a.diagonal();
  return conjugate_gradient([&a](std::span<const double> x, std::span<double> y) { kernels::spmv(a, x, y); }, diag, b,
                            options, x0);
}

ScalarField solve_spd(const LinearSystem& system, const CgOptions& options, const TriMesh& mesh) {
  const ReducedSystem red = apply_dirichlet(system);
  const CgResult cg = conjugate_gradient(red.matrix, red.rhs, options);
  return {red.expand(cg.x), mesh.id};
}

double quadratic_form(const SparseMatrix& a, std::span<const double> u) {
  std::vector<double> au(u.size());
  kernels::spmv(a, u, au);
  return 0.5 * kernels::dot(u, au);
}

double dot_product(std::span<const double> a, std::span<const double> b) { return kernels::dot(a, b); }

double boundary_l1(const ScalarField& v, const TriMesh& mesh, const InsulatedTrace& trace) {
  require_same_mesh(v, mesh);
  double s = 0.0;
  for (int j = 0; j < trace.size(); ++j) {
    s += trace.weights[static_cast<std::size_t>(j)] * std::abs(v[trace.nodes[static_cast<std::size_t>(j)]]);
  }
  return s;
}

}  // namespace insulation
