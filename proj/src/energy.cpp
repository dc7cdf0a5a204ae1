#include "insulation/energy.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "insulation/error.hpp"

namespace insulation {

std::string_view to_string(RobinQuadrature q) { return q == RobinQuadrature::Consistent ? "consistent" : "lumped"; }

RobinQuadrature robin_quadrature_from_string(std::string_view text) {
  if (text == "consistent") return RobinQuadrature::Consistent;
  if (text == "lumped") return RobinQuadrature::Lumped;
  throw Error(ErrorKind::SchemaError, "robin_quadrature: expected consistent or lumped, got '" + std::string(text) + "'");
}

double EnergyReport::term(std::string_view name) const {
  for (const auto& [key, value] : terms) {
    if (key == name) return value;
  }
  throw std::out_of_range("no energy term " + std::string(name));
}

std::vector<BoundaryEdge> insulated_edges(const TriMesh& mesh) {
  std::vector<BoundaryEdge> out;
  for (const auto& e : mesh.facet_edges) {
    if (e.tag == EdgeTag::Insulated) out.push_back(e);
  }
  return out;
}

EdgeWeight robin_weight(const TransversalField& field, const InsulationDistribution& d) {
  return [&field, &d](const BoundaryEdge& e, double xi) {
    const BoundaryPoint p{e.facet, e.lambda_a + xi * (e.lambda_b - e.lambda_a)};
    return 1.0 / (field.k_dot_n(p) * d.at(p));
  };
}

std::map<int, double> eps_constraints(const TriMesh& glued, const ProblemData& data) {
  std::map<int, double> c = dirichlet_constraints(glued, data);
  for (const auto& e : glued.boundary_edges) {
    if (e.tag == EdgeTag::LayerOuter || e.tag == EdgeTag::Insulated) {
      c.emplace(e.a, 0.0);
      c.emplace(e.b, 0.0);
    }
  }
  return c;
}

std::vector<double> lumped_robin_weights(const InsulatedTrace& trace, const InsulationDistribution& d) {
  std::vector<double> r(static_cast<std::size_t>(trace.size()), 0.0);
  for (std::size_t j = 0; j < r.size(); ++j) {
    const double dj = d.at(trace.points[j]);
    if (dj > 0.0) r[j] = trace.weights[j] / (trace.k_dot_n[j] * dj);
  }
  return r;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_constraints(EnergyReport& report, const ScalarField& u, const std::map<int, double>& constraints) {
  for (const auto& [node, value] : constraints) {
    if (std::abs(u[node] - value) > 1e-12 * std::max(1.0, std::abs(value))) {
      report.total = kInf;
      report.warnings.push_back("constraint violated at node " + std::to_string(node));
      return;
    }
  }
}

void add_data_terms(EnergyReport& report, const ScalarField& u, const TriMesh& mesh, const ProblemData& data) {
  report.terms.emplace_back("SOURCE", -dot_product(assemble_load(mesh, data), u.values));
  report.terms.emplace_back("NEUMANN", -dot_product(assemble_neumann(mesh, data), u.values));
}

void sum_terms(EnergyReport& report) {
  report.total = 0.0;
  for (const auto& [name, value] : report.terms) report.total += value;
}

}  // namespace

EnergyReport eval_E_limit(const ScalarField& u, const TriMesh& mesh, const TransversalField& field,
                          const InsulationDistribution& d, const ProblemData& data, RobinQuadrature quadrature) {
  require_same_mesh(u, mesh);
  EnergyReport report;
  report.functional = "E_LIMIT";
  report.terms.emplace_back("GRADIENT", quadratic_form(assemble_stiffness(mesh, {1.0, 0.0}), u.values));
  double interface = 0.0;
  bool bare_violation = false;
  if (quadrature == RobinQuadrature::Consistent) {
    const auto edges = insulated_edges(mesh);
    interface = quadratic_form(assemble_boundary_mass(mesh, edges, robin_weight(field, d)), u.values);
  } else {
    const InsulatedTrace trace = insulated_trace(mesh, field);
    const auto r = lumped_robin_weights(trace, d);
    for (int j = 0; j < trace.size(); ++j) {
      const double v = u[trace.nodes[static_cast<std::size_t>(j)]];
      if (r[static_cast<std::size_t>(j)] > 0.0) {
        interface += 0.5 * r[static_cast<std::size_t>(j)] * v * v;
      } else if (v != 0.0) {
        bare_violation = true;
      }
    }
  }
  report.terms.emplace_back("INTERFACE", interface);
  add_data_terms(report, u, mesh, data);
  sum_terms(report);
  if (bare_violation) {
    report.total = kInf;
    report.warnings.push_back("nonzero trace where the thickness vanishes");
  }
  check_constraints(report, u, dirichlet_constraints(mesh, data));
  return report;
}

EnergyReport eval_E_eps(const ScalarField& u, const TriMesh& glued, const ProblemData& data) {
  require_same_mesh(u, glued);
  EnergyReport report;
  report.functional = "E_EPS";
  report.terms.emplace_back("GRADIENT_BULK", quadratic_form(assemble_stiffness(glued, {1.0, 0.0}), u.values));
  report.terms.emplace_back("GRADIENT_LAYER",
                            quadratic_form(assemble_stiffness(glued, {0.0, glued.layer_epsilon}), u.values));
  add_data_terms(report, u, glued, data);
  sum_terms(report);
  check_constraints(report, u, eps_constraints(glued, data));
  return report;
}

EnergyReport eval_I(const ScalarField& u, const TriMesh& mesh, const TransversalField& field, double mass,
                    const ProblemData& data) {
  require_same_mesh(u, mesh);
  if (!(mass > 0.0)) throw Error(ErrorKind::SchemaError, "mass must be positive");
  EnergyReport report;
  report.functional = "I_REDUCED";
  report.terms.emplace_back("GRADIENT", quadratic_form(assemble_stiffness(mesh, {1.0, 0.0}), u.values));
  const double l1 = boundary_l1(u, mesh, insulated_trace(mesh, field));
  report.terms.emplace_back("L1_SQUARED", l1 * l1 / (2.0 * mass));
  add_data_terms(report, u, mesh, data);
  sum_terms(report);
  check_constraints(report, u, dirichlet_constraints(mesh, data));
  return report;
}

}  // namespace insulation
