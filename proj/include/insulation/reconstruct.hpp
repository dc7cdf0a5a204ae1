#pragma once

#include <string>
#include <vector>

#include "insulation/fem.hpp"

namespace insulation {

struct Reconstruction {
  InsulationDistribution distribution;
  std::vector<double> nodal;   // d_j on the trace nodes
  std::vector<double> normal;  // (k.n)_j d_j
  double mass_check = 0.0;     // sum_j w_j (k.n)_j d_j
  std::vector<std::string> warnings;
};

/// d_j = (m / ||v||_1) |v_j| / (k.n)_j on the insulated trace. Nodes below `d_min` are
/// reported in the warnings, never modified. Throws ZeroTrace when ||v||_1 = 0.
Reconstruction reconstruct_distribution(const ScalarField& v, const TriMesh& mesh, const TransversalField& field,
                                        double mass, double d_min = 0.0);

/// (k.n)_j d(s_j) on the trace nodes.
std::vector<double> to_normal_thickness(const InsulationDistribution& d, const InsulatedTrace& trace);

}  // namespace insulation
