#include "insulation/reconstruct.hpp"

#include <cmath>

#include "insulation/error.hpp"

namespace insulation {

Reconstruction reconstruct_distribution(const ScalarField& v, const TriMesh& mesh, const TransversalField& field,
                                        double mass, double d_min) {
  require_same_mesh(v, mesh);
  if (!(mass > 0.0)) throw Error(ErrorKind::SchemaError, "mass must be positive");
  const InsulatedTrace trace = insulated_trace(mesh, field);
  const double l1 = boundary_l1(v, mesh, trace);
  if (!(l1 > 0.0)) throw Error(ErrorKind::ZeroTrace, "the trace on the insulated sides vanishes");

  const auto n = static_cast<std::size_t>(trace.size());
  std::vector<double> nodal(n);
  std::vector<double> normal(n);
  double mass_check = 0.0;
  std::vector<std::string> warnings;
  std::string below;
  int count_below = 0;
  for (std::size_t j = 0; j < n; ++j) {
    normal[j] = mass / l1 * std::abs(v[trace.nodes[j]]);
    nodal[j] = normal[j] / trace.k_dot_n[j];
    mass_check += trace.weights[j] * normal[j];
    if (d_min > 0.0 && nodal[j] < d_min) {
      if (count_below < 20) below += (count_below ? "," : "") + std::to_string(trace.nodes[j]);
      ++count_below;
    }
  }
  if (count_below > 0) {
    warnings.push_back("d below d_min at " + std::to_string(count_below) + " node(s): " + below +
                       (count_below > 20 ? ",..." : ""));
  }
  InsulationDistribution d = distribution_from_trace(mesh, field, trace, nodal);
  return {std::move(d), std::move(nodal), std::move(normal), mass_check, std::move(warnings)};
}

std::vector<double> to_normal_thickness(const InsulationDistribution& d, const InsulatedTrace& trace) {
  std::vector<double> out(static_cast<std::size_t>(trace.size()));
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = trace.k_dot_n[j] * d.at(trace.points[j]);
  return out;
}

}  // namespace insulation
