#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "insulation/energy.hpp"
#include "insulation/solver_reduced.hpp"

namespace insulation {

struct DistributionConfig {
  std::string kind = "constant";  // constant | nodal_csv | reconstruct
  double value = 1.0;
  std::string path;
  bool operator==(const DistributionConfig&) const = default;
};

struct SolverConfig {
  double h = 0.0625;
  int n_t = 4;
  std::optional<double> epsilon;
  std::vector<double> epsilon_list;
  double tol = 1e-10;
  int max_iter = 0;
  ReducedMethod method = ReducedMethod::ProxGrad;
  RobinQuadrature robin_quadrature = RobinQuadrature::Consistent;
  bool refine_check = false;
  bool operator==(const SolverConfig&) const = default;
};

struct LebesgueConfig {
  int p = 1;
  double a = 1.0;
  std::string field = "ones";  // ones | limit_extension | eps_solution
  bool operator==(const LebesgueConfig&) const = default;
};

struct OutputConfig {
  std::string vtk;
  std::string boundary_vtk;
  std::string csv;
  std::string report;
  bool operator==(const OutputConfig&) const = default;
};

struct RunConfig {
  std::vector<Vec2> vertices;
  std::vector<FacetSpec> facets;
  FieldMode field_mode = FieldMode::Bisector;
  DistributionConfig distribution;
  std::optional<double> mass;
  double d_min = 0.0;
  double f = 0.0;
  std::string f_csv;
  std::string input_field;
  SolverConfig solver;
  LebesgueConfig lebesgue;
  OutputConfig output;
  bool operator==(const RunConfig&) const = default;
};

/// Strict JSON parse: unknown keys, wrong types and out-of-range values raise SchemaError
/// naming the offending key path. `command` adds the keys that subcommand requires.
RunConfig parse_config(std::string_view text, std::string_view command = {});

/// Same, after applying `key.path=value` overrides to the document. Values are read as
/// JSON when they parse, as strings otherwise.
RunConfig parse_config(std::string_view text, const std::vector<std::string>& overrides, std::string_view command);

std::string serialize_config(const RunConfig& config);

PolygonalDomain make_domain(const RunConfig& config);

}  // namespace insulation
