#include <algorithm>
#include "insulation/solver_reduced.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "insulation/error.hpp"
#include "insulation/kernels.hpp"
#include "insulation/prox.hpp"
#include "insulation/reconstruct.hpp"
#include "insulation/solver_robin.hpp"

namespace insulation {

std::string_view to_string(ReducedMethod method) {
  return method == ReducedMethod::ProxGrad ? "prox_grad" : "alternating";
}

ReducedMethod reduced_method_from_string(std::string_view text) {
  if (text == "prox_grad") return ReducedMethod::ProxGrad;
  if (text == "alternating") return ReducedMethod::Alternating;
  throw Error(ErrorKind::SchemaError, "method: expected prox_grad or alternating, got '" + std::string(text) + "'");
}

namespace {

double norm2(std::span<const double> x) { return std::sqrt(kernels::dot(x, x)); }

double power_iteration(const SparseMatrix& a, int steps) {
  const auto n = static_cast<std::size_t>(a.rows);
  if (n == 0) return 0.0;
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::vector<double> x(n);
  std::vector<double> y(n);
  for (double& v : x) v = uni(rng);
  double lambda = 0.0;
  for (int k = 0; k < steps; ++k) {
    const double nx = norm2(x);
    if (nx == 0.0) break;
    for (double& v : x) v /= nx;
    kernels::spmv(a, x, y);
    lambda = norm2(y);
    std::swap(x, y);
  }
  return lambda;
}

/// Free-node view of the reduced objective.
struct Problem {
  ReducedSystem red;
  std::vector<int> trace_free;      // free row of each free trace node
  std::vector<double> trace_w;      // its lumped weight
  double offset = 0.0;              // weighted |u_D| of fixed trace nodes
  double mass = 1.0;

  double l1(std::span<const double> x) const {
    double s = offset;
    for (std::size_t k = 0; k < trace_free.size(); ++k) s += trace_w[k] * std::abs(x[static_cast<std::size_t>(trace_free[k])]);
    return s;
  }
  // objective from x and A x; `magnitude` receives the size of its parts, for round-off slack
  double objective(std::span<const double> x, std::span<const double> ax, double* magnitude = nullptr) const {
    double quad = 0.0;
    double lin = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      quad += 0.5 * x[i] * ax[i];
      lin += x[i] * red.rhs[i];
    }
    const double s = l1(x);
    const double j = s * s / (2.0 * mass);
    if (magnitude) *magnitude = std::abs(quad) + std::abs(lin) + j;
    return quad - lin + j;
  }
  std::vector<double> prox(std::vector<double> z, double step) const {
    std::vector<double> zt(trace_free.size());
    for (std::size_t k = 0; k < zt.size(); ++k) zt[k] = z[static_cast<std::size_t>(trace_free[k])];
    const ProxResult p = prox_sq_l1(zt, trace_w, step / mass, offset);
    for (std::size_t k = 0; k < zt.size(); ++k) z[static_cast<std::size_t>(trace_free[k])] = p.v[k];
    return z;
  }
  // || A x - b + B^T xi || with the residual-minimizing xi at zero entries
  double residual(std::span<const double> x, std::span<const double> ax) const {
    std::vector<double> r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = ax[i] - red.rhs[i];
    const double scale = l1(x) / mass;
    for (std::size_t k = 0; k < trace_free.size(); ++k) {
      const auto i = static_cast<std::size_t>(trace_free[k]);
      const double bound = scale * trace_w[k];
      if (x[i] != 0.0) {
        r[i] += std::copysign(bound, x[i]);
      } else {
        r[i] += std::clamp(-r[i], -bound, bound);
      }
    }
    return norm2(r);
  }
};

Problem build_problem(const TriMesh& mesh, const InsulatedTrace& trace, double mass, const ProblemData& data) {
  LinearSystem system;
  system.matrix = assemble_stiffness(mesh, {1.0, 0.0});
  system.rhs = assemble_load(mesh, data);
  const auto neumann = assemble_neumann(mesh, data);
  for (std::size_t i = 0; i < system.rhs.size(); ++i) system.rhs[i] += neumann[i];
  system.constraints = dirichlet_constraints(mesh, data);
  Problem p;
  p.red = apply_dirichlet(system);
  p.mass = mass;
  for (int j = 0; j < trace.size(); ++j) {
    const int node = trace.nodes[static_cast<std::size_t>(j)];
    const int row = p.red.free_index[static_cast<std::size_t>(node)];
    if (row >= 0) {
      p.trace_free.push_back(row);
      p.trace_w.push_back(trace.weights[static_cast<std::size_t>(j)]);
    } else {
      p.offset += trace.weights[static_cast<std::size_t>(j)] * std::abs(p.red.lifted[static_cast<std::size_t>(node)]);
    }
  }
  return p;
}

/// Minimizes the objective on the support and sign pattern of x, where it is smooth:
/// (A + (1/m) w w^T) x = b - (offset/m) w on the support, with w the signed weights.
/// Keeps the result only when it stays in the pattern and lowers the residual.
void polish(const Problem& p, std::vector<double>& x, std::vector<double>& ax, double& res, const CgOptions& cg) {
  const SparseMatrix& a = p.red.matrix;
  const auto n = x.size();
  std::vector<int> index(n, 0);
  std::vector<double> wh(n, 0.0);
  for (std::size_t k = 0; k < p.trace_free.size(); ++k) {
    const auto i = static_cast<std::size_t>(p.trace_free[k]);
    if (x[i] == 0.0) index[i] = -1;
    else wh[i] = std::copysign(p.trace_w[k], x[i]);
  }
  std::vector<int> rows;
  for (std::size_t i = 0; i < n; ++i) {
    if (index[i] >= 0) {
      index[i] = static_cast<int>(rows.size());
      rows.push_back(static_cast<int>(i));
    }
  }
  const auto ns = rows.size();
  SparseMatrix sub;
  sub.rows = static_cast<int>(ns);
  sub.row_ptr.assign(ns + 1, 0);
  std::vector<double> ws(ns);
  std::vector<double> rhs(ns);
  std::vector<double> diag(ns);
  for (std::size_t r = 0; r < ns; ++r) {
    const auto i = static_cast<std::size_t>(rows[r]);
    for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      const int c = index[static_cast<std::size_t>(a.cols[static_cast<std::size_t>(k)])];
      if (c < 0) continue;
      sub.cols.push_back(c);
      sub.values.push_back(a.values[static_cast<std::size_t>(k)]);
    }
    sub.row_ptr[r + 1] = static_cast<int>(sub.cols.size());
    ws[r] = wh[i];
    rhs[r] = p.red.rhs[i] - p.offset / p.mass * wh[i];
    diag[r] = sub.at(static_cast<int>(r), static_cast<int>(r)) + wh[i] * wh[i] / p.mass;
  }
  auto op = [&](std::span<const double> v, std::span<double> out) {
    kernels::spmv(sub, v, out);
    const double c = kernels::dot(ws, v) / p.mass;
    kernels::axpy(c, ws, out);
  };
  std::vector<double> start(ns);
  for (std::size_t r = 0; r < ns; ++r) start[r] = x[static_cast<std::size_t>(rows[r])];
  CgResult sol;
  try {
    sol = conjugate_gradient(op, diag, rhs, cg, start);
  } catch (const Error&) {
    return;
  }
  std::vector<double> xn(n, 0.0);
  for (std::size_t r = 0; r < ns; ++r) {
    if (ws[r] * sol.x[r] < 0.0) return;
    xn[static_cast<std::size_t>(rows[r])] = sol.x[r];
  }
  std::vector<double> axn(n);
  kernels::spmv(a, xn, axn);
  const double rn = p.residual(xn, axn);
  if (rn <= res) {
    x = std::move(xn);
    ax = std::move(axn);
    res = rn;
  }
}

ReducedSolution prox_grad(const TriMesh& mesh, const InsulatedTrace& trace, double mass, const ProblemData& data,
                          const ReducedOptions& options) {
  const Problem p = build_problem(mesh, trace, mass, data);
  const SparseMatrix& a = p.red.matrix;
  const auto n = static_cast<std::size_t>(a.rows);
  const int max_iter = options.max_iter > 0 ? options.max_iter : 200000;
  const double bnorm = norm2(p.red.rhs);
  const double scale = bnorm > 0.0 ? bnorm : 1.0;

  ReducedSolution out;
  double lip = 1.1 * power_iteration(a, 50);
  if (!(lip > 0.0)) lip = 1.0;

  std::vector<double> x(n, 0.0);
  std::vector<double> ax(n, 0.0);
  std::vector<double> y = x;
  std::vector<double> ay(n, 0.0);
  std::vector<double> grad(n);
  std::vector<double> xn(n);
  std::vector<double> axn(n);
  double magnitude = 0.0;
  double fx = p.objective(x, ax, &magnitude);
  // objective differences below this are round-off
  auto slack = [&] { return 64.0 * std::numeric_limits<double>::epsilon() * magnitude; };
  out.history.push_back(fx);
  double t = 1.0;
  double res = p.residual(x, ax);
  int it = 0;

  auto step_from = [&](const std::vector<double>& base, const std::vector<double>& abase) {
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = base[i] - (abase[i] - p.red.rhs[i]) / lip;
    xn = p.prox(std::move(z), 1.0 / lip);
    kernels::spmv(a, xn, axn);
    return p.objective(xn, axn, &magnitude);
  };

  while (res > options.tol * scale) {
    if (it >= max_iter) {
      throw Error(ErrorKind::NoConvergence, "proximal gradient reached " + std::to_string(max_iter) +
                                                " iterations (residual " + std::to_string(res / scale) + ")");
    }
    ++it;
    double fn = step_from(y, ay);
    if (fn > fx + slack()) {
      // restart from the last accepted iterate with a plain step
      t = 1.0;
      fn = step_from(x, ax);
      while (fn > fx + slack() && lip < 1e300) {
        lip *= 2.0;
        fn = step_from(x, ax);
      }
      if (fn > fx + slack()) break;
      y = xn;
      ay = axn;
    } else {
      const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      const double beta = (t - 1.0) / tn;
      for (std::size_t i = 0; i < n; ++i) {
        y[i] = xn[i] + beta * (xn[i] - x[i]);
        ay[i] = axn[i] + beta * (axn[i] - ax[i]);
      }
      t = tn;
    }
    if (fn == fx && xn == x) break;
    std::swap(x, xn);
    std::swap(ax, axn);
    fx = fn;
    out.history.push_back(fx);
    res = p.residual(x, ax);
  }
  if (res <= options.tol * scale) {
    CgOptions cg = options.cg;
    cg.tol = std::max(1e-3 * std::min(cg.tol, options.tol), 1e-14);
    polish(p, x, ax, res, cg);
  }
  out.iterations = it;
  out.residual = res / scale;
  out.lipschitz = lip;
  out.u = {p.red.expand(x), mesh.id};
  if (res > options.tol * scale) {
    throw Error(ErrorKind::NoConvergence, "proximal gradient stalled at residual " + std::to_string(res / scale));
  }
  return out;
}

constexpr double kBareRatio = 1e-14;

ReducedSolution alternating(const TriMesh& mesh, const TransversalField& field, const InsulatedTrace& trace,
                            double mass, const ProblemData& data, const ReducedOptions& options) {
  const int max_iter = options.max_iter > 0 ? options.max_iter : 1000;
  std::vector<double> d0(static_cast<std::size_t>(trace.size()));
  for (std::size_t j = 0; j < d0.size(); ++j) d0[j] = mass / trace.length / trace.k_dot_n[j];
  InsulationDistribution d = distribution_from_trace(mesh, field, trace, d0);

  RobinOptions robin;
  robin.quadrature = RobinQuadrature::Lumped;
  robin.cg = options.cg;
  robin.clamp_bare_nodes = true;

  ReducedSolution out;
  double previous = 0.0;
  for (int k = 1;; ++k) {
    LimitSolution sol = solve_limit(mesh, field, d, data, robin);
    const double value = eval_I(sol.u, mesh, field, mass, data).total;
    out.history.push_back(value);
    out.u = std::move(sol.u);
    out.iterations = k;
    if (k > 1 && std::abs(value - previous) <= options.tol * std::abs(previous)) break;
    if (k >= max_iter) {
      throw Error(ErrorKind::NoConvergence, "alternating minimization reached " + std::to_string(max_iter) + " sweeps");
    }
    previous = value;
    if (!(boundary_l1(out.u, mesh, trace) > 0.0)) break;
    // Thicknesses that decay towards zero over the sweeps would overflow the Robin
    // weight; below round-off relative to the largest value they are clamped instead.
    std::vector<double> nodal = reconstruct_distribution(out.u, mesh, field, mass).nodal;
    const double top = *std::max_element(nodal.begin(), nodal.end());
    for (double& dj : nodal) {
      if (dj < kBareRatio * top) dj = 0.0;
    }
    d = distribution_from_trace(mesh, field, trace, nodal);
  }
  return out;
}

}  // namespace

ReducedSolution solve_reduced(const TriMesh& mesh, const TransversalField& field, double mass,
                              const ProblemData& data, const ReducedOptions& options) {
  if (!(mass > 0.0) || !std::isfinite(mass)) throw Error(ErrorKind::SchemaError, "mass must be positive");
  if (mesh.has_layer()) throw Error(ErrorKind::MeshMismatch, "the reduced problem needs a bulk mesh");
  data.validate(field.domain());
  const InsulatedTrace trace = insulated_trace(mesh, field);
  if (trace.size() == 0) throw Error(ErrorKind::InvalidDomain, "no insulated boundary in the mesh");

  ReducedSolution out = options.method == ReducedMethod::ProxGrad ? prox_grad(mesh, trace, mass, data, options)
                                                                   : alternating(mesh, field, trace, mass, data, options);
  out.energy = eval_I(out.u, mesh, field, mass, data);
  if (!(boundary_l1(out.u, mesh, trace) > 0.0)) out.energy.warnings.push_back("ZeroTrace");
  return out;
}

}  // namespace insulation
