#include "insulation/gamma.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "insulation/error.hpp"
#include "insulation/solver_eps.hpp"
#include "insulation/solver_robin.hpp"

namespace insulation {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double observed_order(double e0, double e1, double eps0, double eps1) {
  if (!(e0 > 0.0) || !(e1 > 0.0)) return kNaN;
  return std::log(e0 / e1) / std::log(eps0 / eps1);
}
}  // namespace

ScalarField recovery_sequence(const ScalarField& u, const TriMesh& bulk, const TriMesh& glued) {
  require_same_mesh(u, bulk);
  if (glued.bulk_node_count != bulk.node_count() || glued.bulk_triangle_count != bulk.triangle_count()) {
    throw Error(ErrorKind::MeshMismatch, "glued mesh was not extruded from this bulk mesh");
  }
  ScalarField out = ScalarField::zeros(glued);
  std::copy(u.values.begin(), u.values.end(), out.values.begin());
  const double nt = glued.layer_levels;
  for (const auto& fiber : glued.fibers) {
    const double base = u[fiber.base];
    for (std::size_t i = 1; i < fiber.nodes.size(); ++i) {
      const double level = static_cast<double>(i);
      out.values[static_cast<std::size_t>(fiber.nodes[i])] = i + 1 == fiber.nodes.size() ? 0.0 : base * (1.0 - level / nt);
    }
  }
  return out;
}

bool GammaLevel::sandwich_ok() const {
  return std::all_of(rows.begin(), rows.end(), [](const GammaRow& r) { return r.sandwich; });
}

bool GammaLevel::coercivity_bounded() const {
  if (rows.empty()) return true;
  const double ref = rows.front().coercivity;
  return std::all_of(rows.begin(), rows.end(), [&](const GammaRow& r) { return r.coercivity <= 10.0 * ref; });
}

bool GammaLevel::gaps_decrease() const {
  const double floor = 1e-10 * (1.0 + std::abs(limit_energy));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const GammaRow& a = rows[i - 1];
    const GammaRow& b = rows[i];
    if (!(b.gap_eps < a.gap_eps || b.gap_eps <= floor)) return false;
    if (!(b.gap_recovery < a.gap_recovery || b.gap_recovery <= floor)) return false;
  }
  return true;
}

int GammaLevel::poincare_failures() const {
  int n = 0;
  for (const auto& r : rows) n += r.poincare_failures;
  return n;
}

void validate_epsilon_list(std::span<const double> eps_list) {
  if (eps_list.empty()) throw Error(ErrorKind::SchemaError, "epsilon_list: must not be empty");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0) || !std::isfinite(eps_list[i])) {
      throw Error(ErrorKind::SchemaError, "epsilon_list: entries must be positive");
    }
    if (i > 0 && !(eps_list[i] < eps_list[i - 1])) {
      throw Error(ErrorKind::SchemaError, "epsilon_list: must be strictly decreasing");
    }
  }
}

namespace {

GammaLevel sweep_level(const TransversalField& field, const InsulationDistribution& d, const ProblemData& data,
                       std::span<const double> eps_list, const GammaOptions& options, double h) {
  GammaLevel level;
  level.h = h;
  const TriMesh bulk = triangulate_bulk(field.domain(), h);
  level.nodes = bulk.node_count();
  RobinOptions robin;
  robin.quadrature = options.quadrature;
  robin.cg = options.cg;
  const LimitSolution limit = solve_limit(bulk, field, d, data, robin);
  level.limit_energy = limit.energy.total;

  EpsOptions eps_options;
  eps_options.cg = options.cg;
  for (double eps : eps_list) {
    const TriMesh glued = extrude_layer(bulk, field, d, eps, options.n_t);
    const EpsSolution sol = solve_eps(glued, eps, data, eps_options);
    const ScalarField rec = recovery_sequence(limit.u, bulk, glued);
    GammaRow row;
    row.eps = eps;
    row.energy_eps = sol.energy.total;
    row.energy_recovery = eval_E_eps(rec, glued, data).total;
    row.coercivity = sol.coercivity;
    row.area_over_eps = layer_area(field, d, eps) / eps;
    row.poincare_failures = sol.poincare.failures;
    row.poincare_max_ratio = sol.poincare.max_ratio;
    row.sandwich = row.energy_eps <= row.energy_recovery + 1e-12 * std::max(1.0, std::abs(row.energy_recovery));
    row.gap_eps = std::abs(row.energy_eps - level.limit_energy);
    row.gap_recovery = std::abs(row.energy_recovery - level.limit_energy);
    row.order_eps = kNaN;
    row.order_recovery = kNaN;
    if (!level.rows.empty()) {
      const GammaRow& prev = level.rows.back();
      row.order_eps = observed_order(prev.gap_eps, row.gap_eps, prev.eps, eps);
      row.order_recovery = observed_order(prev.gap_recovery, row.gap_recovery, prev.eps, eps);
    }
    level.rows.push_back(row);
  }
  return level;
}

}  // namespace

GammaSweepReport gamma_sweep(const TransversalField& field, const InsulationDistribution& d, const ProblemData& data,
                             std::span<const double> eps_list, const GammaOptions& options) {
  validate_epsilon_list(eps_list);
  if (!(options.h > 0.0)) throw Error(ErrorKind::SchemaError, "h must be positive");
  data.validate(field.domain());
  GammaSweepReport report;
  report.weighted_integral = weighted_thickness_integral(field, d);
  report.level = sweep_level(field, d, data, eps_list, options, options.h);
  if (options.refine_check) report.refined = sweep_level(field, d, data, eps_list, options, 0.5 * options.h);
  return report;
}

namespace {

/// Value of a P1 field at x, searched among the layer triangles of one interface column.
double eval_in_column(const ScalarField& v, const TriMesh& mesh, const InterfaceEdge& ie, const Vec2& x) {
  double best_score = -std::numeric_limits<double>::infinity();
  double best_value = 0.0;
  for (int k = 0; k < 2 * mesh.layer_levels; ++k) {
    const auto& t = mesh.triangles[static_cast<std::size_t>(ie.first_triangle + k)];
    const Vec2& a = mesh.nodes[static_cast<std::size_t>(t[0])];
    const Vec2& b = mesh.nodes[static_cast<std::size_t>(t[1])];
    const Vec2& c = mesh.nodes[static_cast<std::size_t>(t[2])];
    const double area = cross(b - a, c - a);
    const double l0 = cross(b - x, c - x) / area;
    const double l1 = cross(c - x, a - x) / area;
    const double l2 = 1.0 - l0 - l1;
    const double score = std::min({l0, l1, l2});
    if (score > best_score) {
      best_score = score;
      best_value = l0 * v[t[0]] + l1 * v[t[1]] + l2 * v[t[2]];
    }
  }
  return best_value;
}

}  // namespace

LebesgueReport lebesgue_limit_check(const ScalarField& v, const TriMesh& glued, const BoundaryWeight& a,
                                    const InsulationDistribution& d, const TransversalField& field,
                                    std::span<const double> eps_list, int p) {
  require_same_mesh(v, glued);
  if (p != 1 && p != 2) throw Error(ErrorKind::SchemaError, "p must be 1 or 2");
  validate_epsilon_list(eps_list);
  if (eps_list.front() > glued.layer_epsilon * (1.0 + 1e-12)) {
    throw Error(ErrorKind::MeshMismatch, "eps exceeds the thickness of the layer carrying v");
  }
  const GaussRule& gs = gauss_legendre(5);
  const GaussRule& gt = gauss_legendre(4);
  constexpr int kSubintervals = 8;
  auto power = [p](double x) { return p == 1 ? std::abs(x) : x * x; };

  double limit = 0.0;
  for (const auto& ie : glued.interface_edges) {
    const BoundaryEdge& e = ie.edge;
    const double len = norm(glued.nodes[static_cast<std::size_t>(e.b)] - glued.nodes[static_cast<std::size_t>(e.a)]);
    for (std::size_t q = 0; q < gs.points.size(); ++q) {
      const double xi = gs.points[q];
      const BoundaryPoint s{e.facet, e.lambda_a + xi * (e.lambda_b - e.lambda_a)};
      const double vs = (1.0 - xi) * v[e.a] + xi * v[e.b];
      limit += len * gs.weights[q] * field.k_dot_n(s) * d.at(s) * a(s) * power(vs);
    }
  }

  LebesgueReport report;
  for (double eps : eps_list) {
    double total = 0.0;
    for (const auto& ie : glued.interface_edges) {
      const BoundaryEdge& e = ie.edge;
      const double len = norm(glued.nodes[static_cast<std::size_t>(e.b)] - glued.nodes[static_cast<std::size_t>(e.a)]);
      for (std::size_t q = 0; q < gs.points.size(); ++q) {
        const BoundaryPoint s{e.facet, e.lambda_a + gs.points[q] * (e.lambda_b - e.lambda_a)};
        const double height = eps * d.at(s);
        const double as = a(s);
        double fiber = 0.0;
        for (int sub = 0; sub < kSubintervals; ++sub) {
          for (std::size_t r = 0; r < gt.points.size(); ++r) {
            const double t = height * (sub + gt.points[r]) / kSubintervals;
            const double value = eval_in_column(v, glued, ie, layer_point(field, s, t));
            fiber += gt.weights[r] / kSubintervals * height * power(value) * layer_jacobian(field, s, t);
          }
        }
        total += len * gs.weights[q] * as * fiber;
      }
    }
    LebesgueRow row;
    row.eps = eps;
    row.layer_value = total / eps;
    row.limit = limit;
    row.error = std::abs(row.layer_value - limit);
    row.order = kNaN;
    if (!report.rows.empty()) row.order = observed_order(report.rows.back().error, row.error, report.rows.back().eps, eps);
    report.rows.push_back(row);
  }

  const double floor = 1e-12 * (1.0 + std::abs(limit));
  report.min_order = kNaN;
  bool ok = true;
  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    const LebesgueRow& r = report.rows[i];
    if (r.error <= floor) continue;
    if (std::isnan(report.min_order) || r.order < report.min_order) report.min_order = r.order;
    if (!(r.order >= 0.9)) ok = false;
  }
  report.converged = ok;
  return report;
}

}  // namespace insulation
