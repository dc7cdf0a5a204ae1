#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "insulation/config.hpp"
#include "insulation/error.hpp"
#include "insulation/gamma.hpp"
#include "insulation/kernels.hpp"
#include "insulation/output.hpp"
#include "insulation/reconstruct.hpp"
#include "insulation/solver_eps.hpp"
#include "insulation/solver_reduced.hpp"
#include "insulation/solver_robin.hpp"

using namespace insulation;

namespace {

/// Everything a command produces; nothing touches the disk until the command succeeded.
struct Outcome {
  std::vector<std::pair<std::string, double>> terms;
  std::vector<std::pair<std::string, std::string>> files;
  std::vector<std::string> warnings;
  int status = 0;

  void term(const std::string& name, double value) { terms.emplace_back(name, value); }
  void file(const std::string& path, std::string content) {
    if (!path.empty()) files.emplace_back(path, std::move(content));
  }
  void report(const EnergyReport& e) {
    for (const auto& [name, value] : e.terms) term(name, value);
    term(e.functional, e.total);
    warnings.insert(warnings.end(), e.warnings.begin(), e.warnings.end());
  }
};

struct Setup {
  RunConfig cfg;
  PolygonalDomain domain;
  TransversalField field;
  ProblemData data;
  TriMesh bulk;
  CgOptions cg;

  explicit Setup(RunConfig c)
      : cfg(std::move(c)),
        domain(make_domain(cfg)),
        field(TransversalField::build(domain, cfg.field_mode)),
        data(ProblemData::from_domain(domain, cfg.f)),
        bulk(triangulate_bulk(domain, cfg.solver.h)) {
    cg.tol = cfg.solver.tol;
    cg.max_iter = cfg.solver.max_iter;
    if (!cfg.f_csv.empty()) {
      const NumericCsv csv = parse_numeric_csv(read_file(cfg.f_csv), cfg.f_csv);
      const std::size_t tc = csv.column("triangle");
      const std::size_t fc = csv.column("f");
      data.f_per_triangle.assign(static_cast<std::size_t>(bulk.bulk_triangle_count), cfg.f);
      for (const auto& row : csv.rows) {
        const auto t = static_cast<long>(row[tc]);
        if (t < 0 || t >= bulk.bulk_triangle_count || static_cast<double>(t) != row[tc]) {
          throw Error(ErrorKind::MeshMismatch, cfg.f_csv + ": triangle index out of range");
        }
        data.f_per_triangle[static_cast<std::size_t>(t)] = row[fc];
      }
    }
    data.validate(domain);
  }

  ReducedOptions reduced_options() const {
    ReducedOptions o;
    o.method = cfg.solver.method;
    o.tol = cfg.solver.tol;
    o.max_iter = cfg.solver.max_iter;
    o.cg = cg;
    return o;
  }

  RobinOptions robin_options() const {
    RobinOptions o;
    o.quadrature = cfg.solver.robin_quadrature;
    o.cg = cg;
    o.clamp_bare_nodes = cfg.solver.robin_quadrature == RobinQuadrature::Lumped;
    return o;
  }

  InsulationDistribution distribution(Outcome& out) const {
    const auto& dc = cfg.distribution;
    if (dc.kind == "constant") return InsulationDistribution::constant(field, dc.value, cfg.d_min);
    if (dc.kind == "nodal_csv") {
      const NumericCsv csv = parse_numeric_csv(read_file(dc.path), dc.path);
      const std::size_t fc = csv.column("facet");
      const std::size_t lc = csv.column("lambda");
      const std::size_t vc = csv.column("value");
      std::vector<std::vector<ThicknessKnot>> knots(static_cast<std::size_t>(domain.size()));
      for (const auto& row : csv.rows) {
        const auto f = static_cast<long>(row[fc]);
        if (f < 0 || f >= domain.size()) throw Error(ErrorKind::InvalidDistribution, dc.path + ": facet out of range");
        knots[static_cast<std::size_t>(f)].push_back({row[lc], row[vc]});
      }
      for (auto& k : knots) {
        std::stable_sort(k.begin(), k.end(), [](const auto& a, const auto& b) { return a.lambda < b.lambda; });
      }
      return InsulationDistribution::from_knots(field, std::move(knots), cfg.d_min);
    }
    const ReducedSolution red = solve_reduced(bulk, field, *cfg.mass, data, reduced_options());
    Reconstruction rec = reconstruct_distribution(red.u, bulk, field, *cfg.mass, cfg.d_min);
    out.warnings.insert(out.warnings.end(), rec.warnings.begin(), rec.warnings.end());
    return std::move(rec.distribution);
  }

  std::string field_csv(const TriMesh& mesh, const ScalarField& u) const {
    CsvTable t{{"node", "x", "y", "u"}, {}};
    for (int i = 0; i < mesh.node_count(); ++i) {
      const Vec2& p = mesh.nodes[static_cast<std::size_t>(i)];
      t.add({std::to_string(i), format_double(p.x), format_double(p.y), format_double(u[i])});
    }
    return t.str();
  }

  /// Polyline through the insulated trace in facet order.
  std::string trace_vtk(const InsulatedTrace& trace, const std::vector<NamedField>& fields) const {
    std::vector<Vec2> pts;
    for (int node : trace.nodes) pts.push_back(bulk.nodes[static_cast<std::size_t>(node)]);
    std::vector<std::pair<int, int>> segments;
    for (const auto& e : bulk.facet_edges) {
      if (e.tag == EdgeTag::Insulated) {
        segments.emplace_back(trace.local[static_cast<std::size_t>(e.a)], trace.local[static_cast<std::size_t>(e.b)]);
      }
    }
    return vtk_polyline(pts, segments, fields);
  }
};

std::vector<double> trace_values(const InsulatedTrace& trace, const ScalarField& u) {
  std::vector<double> v;
  for (int node : trace.nodes) v.push_back(u[node]);
  return v;
}

std::string eps_tag(double eps) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "@%.6g", eps);
  return buf;
}

Outcome cmd_mesh(Setup& s) {
  Outcome out;
  out.term("KAPPA", s.field.kappa());
  out.term("BULK_NODES", s.bulk.node_count());
  out.term("BULK_TRIANGLES", s.bulk.triangle_count());
  out.term("MAX_EDGE", max_edge_length(s.bulk));
  if (s.cfg.solver.epsilon) {
    const double eps = *s.cfg.solver.epsilon;
    const InsulationDistribution d = s.distribution(out);
    const TriMesh glued = extrude_layer(s.bulk, s.field, d, eps, s.cfg.solver.n_t);
    out.term("NODES", glued.node_count());
    out.term("TRIANGLES", glued.triangle_count());
    out.term("LAYER_AREA", layer_area(s.field, d, eps));
    std::vector<double> psi(static_cast<std::size_t>(glued.node_count()));
    for (int i = 0; i < glued.node_count(); ++i) psi[static_cast<std::size_t>(i)] = glued.fiber_offset(i);
    out.file(s.cfg.output.vtk, vtk_mesh(glued, {{"psi", psi}}));
  } else {
    out.term("NODES", s.bulk.node_count());
    out.term("TRIANGLES", s.bulk.triangle_count());
    out.file(s.cfg.output.vtk, vtk_mesh(s.bulk, {}));
  }
  return out;
}

Outcome cmd_solve_limit(Setup& s) {
  Outcome out;
  const InsulationDistribution d = s.distribution(out);
  const LimitSolution sol = solve_limit(s.bulk, s.field, d, s.data, s.robin_options());
  out.report(sol.energy);
  out.term("CG_ITERATIONS", sol.iterations);
  out.file(s.cfg.output.vtk, vtk_mesh(s.bulk, {{"u", sol.u.values}}));
  out.file(s.cfg.output.csv, s.field_csv(s.bulk, sol.u));
  if (!s.cfg.output.boundary_vtk.empty()) {
    const InsulatedTrace trace = insulated_trace(s.bulk, s.field);
    std::vector<double> dv;
    for (const auto& p : trace.points) dv.push_back(d.at(p));
    out.file(s.cfg.output.boundary_vtk,
             s.trace_vtk(trace, {{"u", trace_values(trace, sol.u)}, {"d", dv}, {"d_normal", to_normal_thickness(d, trace)}}));
  }
  return out;
}

Outcome cmd_solve_eps(Setup& s) {
  Outcome out;
  const double eps = *s.cfg.solver.epsilon;
  const InsulationDistribution d = s.distribution(out);
  const TriMesh glued = extrude_layer(s.bulk, s.field, d, eps, s.cfg.solver.n_t);
  EpsOptions options;
  options.cg = s.cg;
  const EpsSolution sol = solve_eps(glued, eps, s.data, options);
  out.report(sol.energy);
  out.term("CG_ITERATIONS", sol.iterations);
  out.term("POINCARE_FIBERS", sol.poincare.fibers_checked);
  out.term("POINCARE_FAILURES", sol.poincare.failures);
  out.term("POINCARE_MAX_RATIO", sol.poincare.max_ratio);
  out.term("COERCIVITY", sol.coercivity);
  std::vector<double> psi(static_cast<std::size_t>(glued.node_count()));
  for (int i = 0; i < glued.node_count(); ++i) psi[static_cast<std::size_t>(i)] = glued.fiber_offset(i);
  out.file(s.cfg.output.vtk, vtk_mesh(glued, {{"u", sol.u.values}, {"psi", psi}}));
  out.file(s.cfg.output.csv, s.field_csv(glued, sol.u));
  return out;
}

Outcome cmd_solve_reduced(Setup& s) {
  Outcome out;
  const ReducedSolution sol = solve_reduced(s.bulk, s.field, *s.cfg.mass, s.data, s.reduced_options());
  out.report(sol.energy);
  out.term("ITERATIONS", sol.iterations);
  out.term("RESIDUAL", sol.residual);
  out.file(s.cfg.output.vtk, vtk_mesh(s.bulk, {{"u", sol.u.values}}));
  out.file(s.cfg.output.csv, s.field_csv(s.bulk, sol.u));
  return out;
}

ScalarField read_field(const Setup& s, const std::string& path) {
  const NumericCsv csv = parse_numeric_csv(read_file(path), path);
  const std::size_t nc = csv.column("node");
  const std::size_t uc = csv.column("u");
  if (static_cast<int>(csv.rows.size()) != s.bulk.node_count()) {
    throw Error(ErrorKind::MeshMismatch, path + ": " + std::to_string(csv.rows.size()) + " rows for " +
                                             std::to_string(s.bulk.node_count()) + " mesh nodes");
  }
  ScalarField u = ScalarField::zeros(s.bulk);
  for (const auto& row : csv.rows) {
    const auto node = static_cast<long>(row[nc]);
    if (node < 0 || node >= s.bulk.node_count()) throw Error(ErrorKind::MeshMismatch, path + ": node out of range");
    u.values[static_cast<std::size_t>(node)] = row[uc];
  }
  return u;
}

Outcome cmd_reconstruct(Setup& s) {
  Outcome out;
  const double mass = *s.cfg.mass;
  ScalarField u = s.cfg.input_field.empty()
                      ? solve_reduced(s.bulk, s.field, mass, s.data, s.reduced_options()).u
                      : read_field(s, s.cfg.input_field);
  const Reconstruction rec = reconstruct_distribution(u, s.bulk, s.field, mass, s.cfg.d_min);
  out.warnings = rec.warnings;
  const InsulatedTrace trace = insulated_trace(s.bulk, s.field);
  std::vector<int> order(static_cast<std::size_t>(trace.size()));
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = static_cast<int>(j);
  auto arc = [&](int j) { return s.domain.insulated_arc(trace.points[static_cast<std::size_t>(j)]); };
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return arc(a) < arc(b); });
  CsvTable t{{"row", "node", "facet", "lambda", "arc", "d", "d_normal"}, {}};
  for (int j : order) {
    const auto ju = static_cast<std::size_t>(j);
    t.add({"node", std::to_string(trace.nodes[ju]), std::to_string(trace.points[ju].facet),
           format_double(trace.points[ju].lambda), format_double(arc(j)), format_double(rec.nodal[ju]),
           format_double(rec.normal[ju])});
  }
  t.add({"mass_check", "", "", "", "", "", format_double(rec.mass_check)});
  out.term("MASS", mass);
  out.term("MASS_CHECK", rec.mass_check);
  out.file(s.cfg.output.csv, t.str());
  out.file(s.cfg.output.boundary_vtk,
           s.trace_vtk(trace, {{"u", trace_values(trace, u)}, {"d", rec.nodal}, {"d_normal", rec.normal}}));
  return out;
}

Outcome cmd_gamma_sweep(Setup& s) {
  Outcome out;
  const InsulationDistribution d = s.distribution(out);
  GammaOptions options;
  options.h = s.cfg.solver.h;
  options.n_t = s.cfg.solver.n_t;
  options.refine_check = s.cfg.solver.refine_check;
  options.quadrature = s.cfg.solver.robin_quadrature;
  options.cg = s.cg;
  const GammaSweepReport report = gamma_sweep(s.field, d, s.data, s.cfg.solver.epsilon_list, options);
  out.term("WEIGHTED_INTEGRAL", report.weighted_integral);
  CsvTable t{{"h", "eps", "E_eps", "E_recovery", "E_limit", "gap_eps", "gap_recovery", "order_eps", "order_recovery",
              "coercivity", "area_over_eps", "poincare_failures", "sandwich"},
             {}};
  bool ok = true;
  auto emit = [&](const GammaLevel& level, const std::string& suffix) {
    out.term("E_LIMIT" + suffix, level.limit_energy);
    for (const auto& r : level.rows) {
      out.term("E_EPS" + suffix + eps_tag(r.eps), r.energy_eps);
      out.term("E_RECOVERY" + suffix + eps_tag(r.eps), r.energy_recovery);
      t.add({format_double(level.h), format_double(r.eps), format_double(r.energy_eps), format_double(r.energy_recovery),
             format_double(level.limit_energy), format_double(r.gap_eps), format_double(r.gap_recovery),
             format_double(r.order_eps), format_double(r.order_recovery), format_double(r.coercivity),
             format_double(r.area_over_eps), std::to_string(r.poincare_failures), r.sandwich ? "1" : "0"});
    }
    out.term("SANDWICH_OK" + suffix, level.sandwich_ok() ? 1.0 : 0.0);
    out.term("COERCIVITY_BOUNDED" + suffix, level.coercivity_bounded() ? 1.0 : 0.0);
    if (!level.sandwich_ok()) {
      out.warnings.push_back("sandwich violated at h = " + format_double(level.h));
      ok = false;
    }
  };
  emit(report.level, "");
  if (report.refined) emit(*report.refined, "_FINE");
  out.file(s.cfg.output.report, t.str());
  out.status = ok ? 0 : 3;
  return out;
}

Outcome cmd_check_lebesgue(Setup& s) {
  Outcome out;
  const auto& list = s.cfg.solver.epsilon_list;
  const InsulationDistribution d = s.distribution(out);
  const TriMesh glued = extrude_layer(s.bulk, s.field, d, list.front(), s.cfg.solver.n_t);
  ScalarField v = ScalarField::zeros(glued);
  const std::string& kind = s.cfg.lebesgue.field;
  if (kind == "ones") {
    std::fill(v.values.begin(), v.values.end(), 1.0);
  } else if (kind == "eps_solution") {
    EpsOptions options;
    options.cg = s.cg;
    v = solve_eps(glued, list.front(), s.data, options).u;
  } else {
    const LimitSolution lim = solve_limit(s.bulk, s.field, d, s.data, s.robin_options());
    std::copy(lim.u.values.begin(), lim.u.values.end(), v.values.begin());
    for (const auto& fiber : glued.fibers) {
      for (int node : fiber.nodes) v.values[static_cast<std::size_t>(node)] = lim.u[fiber.base];
    }
  }
  const double a = s.cfg.lebesgue.a;
  const LebesgueReport report =
      lebesgue_limit_check(v, glued, [a](const BoundaryPoint&) { return a; }, d, s.field, list, s.cfg.lebesgue.p);
  CsvTable t{{"eps", "layer_value", "limit", "error", "order"}, {}};
  for (const auto& r : report.rows) {
    out.term("ERROR" + eps_tag(r.eps), r.error);
    t.add({format_double(r.eps), format_double(r.layer_value), format_double(r.limit), format_double(r.error),
           format_double(r.order)});
  }
  out.term("LIMIT", report.rows.front().limit);
  out.term("MIN_ORDER", report.min_order);
  out.term("CONVERGED", report.converged ? 1.0 : 0.0);
  out.file(s.cfg.output.report, t.str());
  out.status = report.converged ? 0 : 3;
  return out;
}

int run(const std::string& command, const std::string& config_path, const std::vector<std::string>& overrides) {
  std::string text;
  try {
    text = read_file(config_path);
  } catch (const Error& e) {
    throw Error(ErrorKind::SchemaError, "config: " + std::string(e.what()));
  }
  Setup setup(parse_config(text, overrides, command));
  static const std::map<std::string, Outcome (*)(Setup&)> commands = {
      {"mesh", cmd_mesh},
      {"solve-limit", cmd_solve_limit},
      {"solve-eps", cmd_solve_eps},
      {"solve-reduced", cmd_solve_reduced},
      {"reconstruct", cmd_reconstruct},
      {"gamma-sweep", cmd_gamma_sweep},
      {"check-lebesgue", cmd_check_lebesgue},
  };
  const Outcome out = commands.at(command)(setup);
  for (const auto& [path, content] : out.files) write_atomic(path, content);
  for (const auto& w : out.warnings) std::cerr << "warning: " << w << "\n";
  for (const auto& [name, value] : out.terms) std::printf("TERM=%s VALUE=%s\n", name.c_str(), format_double(value).c_str());
  return out.status;
}

}  // namespace

int main(int argc, char** argv) {
  kernels::configure_threads_from_env();
  CLI::App app{"Optimal insulation of polygonal bodies: limit, thin-layer and reduced problems"};
  app.require_subcommand(1);
  std::string config_path;
  std::vector<std::string> overrides;
  const std::vector<std::pair<std::string, std::string>> subcommands = {
      {"mesh", "triangulate the body (and the layer when solver.epsilon is set)"},
      {"solve-limit", "solve the Robin limit problem"},
      {"solve-eps", "solve the thin-layer problem at solver.epsilon"},
      {"solve-reduced", "minimize the reduced functional for the given mass"},
      {"reconstruct", "optimal thickness from the reduced minimizer"},
      {"gamma-sweep", "thin-layer energies over solver.epsilon_list against the limit"},
      {"check-lebesgue", "layer integrals over solver.epsilon_list against their boundary limit"},
  };
  for (const auto& [name, help] : subcommands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", config_path, "JSON configuration file")->required();
    sub->add_option("--set", overrides, "override a configuration key: key.path=value (repeatable)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, config_path, overrides);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
