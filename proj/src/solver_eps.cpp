#include "insulation/solver_eps.hpp"

#include <algorithm>
#include <cmath>

#include "insulation/error.hpp"

namespace insulation {

namespace {

double gradient_sq(const TriMesh& mesh, const ScalarField& u, int ti) {
  const auto& t = mesh.triangles[static_cast<std::size_t>(ti)];
  const Vec2& a = mesh.nodes[static_cast<std::size_t>(t[0])];
  const Vec2& b = mesh.nodes[static_cast<std::size_t>(t[1])];
  const Vec2& c = mesh.nodes[static_cast<std::size_t>(t[2])];
  const double twice = cross(b - a, c - a);
  const double ua = u[t[0]];
  const double ub = u[t[1]];
  const double uc = u[t[2]];
  const double gx = (ua * (b.y - c.y) + ub * (c.y - a.y) + uc * (a.y - b.y)) / twice;
  const double gy = (ua * (c.x - b.x) + ub * (a.x - c.x) + uc * (b.x - a.x)) / twice;
  return gx * gx + gy * gy;
}

}  // namespace

double coercivity_norm(const ScalarField& u, const TriMesh& glued) {
  require_same_mesh(u, glued);
  const double eps = glued.layer_epsilon;
  if (!(eps > 0.0)) throw Error(ErrorKind::MeshMismatch, "mesh carries no layer");
  const SparseMatrix mass = assemble_mass(glued, {1.0, 1.0 / eps});
  const SparseMatrix stiff = assemble_stiffness(glued, {1.0, eps});
  return 2.0 * (quadratic_form(mass, u.values) + quadratic_form(stiff, u.values));
}

PoincareDiagnostic poincare_diagnostic(const ScalarField& u, const TriMesh& glued, double slack) {
  require_same_mesh(u, glued);
  PoincareDiagnostic diag;
  diag.slack = slack;
  const int nt = glued.layer_levels;
  // triangles along the segments of each fiber
  std::vector<std::vector<int>> segment_owner(glued.fibers.size());
  for (const auto& ie : glued.interface_edges) {
    segment_owner[static_cast<std::size_t>(ie.fiber_a)].push_back(ie.first_triangle);
    segment_owner[static_cast<std::size_t>(ie.fiber_b)].push_back(ie.first_triangle + 1);
  }
  for (std::size_t f = 0; f < glued.fibers.size(); ++f) {
    const Fiber& fiber = glued.fibers[f];
    const auto& owners = segment_owner[f];
    if (owners.empty()) continue;
    const double dt = fiber.height / nt;
    std::vector<double> g(static_cast<std::size_t>(nt), 0.0);
    for (int l = 0; l < nt; ++l) {
      double s = 0.0;
      for (int first : owners) s += gradient_sq(glued, u, first + 2 * l);
      g[static_cast<std::size_t>(l)] = s / static_cast<double>(owners.size());
    }
    ++diag.fibers_checked;
    double tail = 0.0;
    bool failed = false;
    for (int l = nt - 1; l >= 0; --l) {
      tail += g[static_cast<std::size_t>(l)] * dt;
      const double remaining = fiber.height - dt * l;
      const double lhs = std::pow(u[fiber.nodes[static_cast<std::size_t>(l)]], 2);
      const double rhs = remaining * tail;
      if (rhs > 0.0) {
        diag.max_ratio = std::max(diag.max_ratio, lhs / rhs);
      }
      if (lhs > (1.0 + slack) * rhs + 1e-14 * std::max(1.0, lhs)) failed = true;
    }
    if (failed) ++diag.failures;
  }
  return diag;
}

EpsSolution solve_eps(const TriMesh& glued, double eps, const ProblemData& data, const EpsOptions& options) {
  if (!(eps > 0.0)) throw Error(ErrorKind::MeshMismatch, "eps must be positive");
  if (eps != glued.layer_epsilon) {
    throw Error(ErrorKind::MeshMismatch, "eps = " + std::to_string(eps) + " but the mesh was extruded with eps = " +
                                             std::to_string(glued.layer_epsilon));
  }
  LinearSystem system;
  system.matrix = assemble_stiffness(glued, {1.0, eps});
  system.rhs = assemble_load(glued, data);
  const auto neumann = assemble_neumann(glued, data);
  for (std::size_t i = 0; i < system.rhs.size(); ++i) system.rhs[i] += neumann[i];
  system.constraints = eps_constraints(glued, data);

  const ReducedSystem red = apply_dirichlet(system);
  const CgResult cg = conjugate_gradient(red.matrix, red.rhs, options.cg);
  EpsSolution out;
  out.u = {red.expand(cg.x), glued.id};
  out.iterations = cg.iterations;
  out.relative_residual = cg.relative_residual;
  out.energy = eval_E_eps(out.u, glued, data);
  if (glued.has_layer()) {
    out.poincare = poincare_diagnostic(out.u, glued);
    out.coercivity = coercivity_norm(out.u, glued);
  }
  return out;
}

}  // namespace insulation
