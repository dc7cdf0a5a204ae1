#pragma once

#include <array>
#include <string_view>
#include <vector>

#include "insulation/vec2.hpp"

namespace insulation {

enum class FacetLabel { Insulated, Dirichlet, Neumann };

std::string_view to_string(FacetLabel label);
FacetLabel facet_label_from_string(std::string_view text);

/// Input description of one polygon side. `value` is the Dirichlet temperature or the
/// Neumann flux of the side; it must be zero on insulated sides.
struct FacetSpec {
  std::array<int, 2> vertices{};
  FacetLabel label = FacetLabel::Neumann;
  double value = 0.0;
  bool operator==(const FacetSpec&) const = default;
};

/// Facet `i` always joins vertex `i` to vertex `i + 1` (mod n).
struct Facet {
  int first = 0;
  int second = 0;
  FacetLabel label = FacetLabel::Neumann;
  double value = 0.0;
  double length = 0.0;
  Vec2 tangent;  // unit, counter-clockwise direction
  Vec2 normal;   // unit, outward
};

/// A point on the boundary: facet index and the affine parameter along it.
struct BoundaryPoint {
  int facet = -1;
  double lambda = 0.0;
};

/// Simple counter-clockwise polygon whose sides are labelled insulated, Dirichlet or
/// Neumann. At least one side is insulated.
class PolygonalDomain {
 public:
  PolygonalDomain(std::vector<Vec2> vertices, std::vector<FacetSpec> facets);

  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<Facet>& facets() const { return facets_; }
  const Facet& facet(int i) const { return facets_[static_cast<std::size_t>(i)]; }
  int size() const { return static_cast<int>(vertices_.size()); }

  int facet_ending_at(int vertex) const { return (vertex + size() - 1) % size(); }
  int facet_starting_at(int vertex) const { return vertex; }

  Vec2 point(const BoundaryPoint& p) const;
  double area() const;
  double insulated_length() const;
  bool has_label(FacetLabel label) const;
  /// Arc-length position of a boundary point measured along the insulated sides only,
  /// in facet order. Used for tabular output.
  double insulated_arc(const BoundaryPoint& p) const;

 private:
  std::vector<Vec2> vertices_;
  std::vector<Facet> facets_;
};

enum class FieldMode { Bisector, FacetNormal };

std::string_view to_string(FieldMode mode);
FieldMode field_mode_from_string(std::string_view text);

/// Unit-length transversal vector field on the boundary. Vertex vectors are given; along
/// a facet the endpoint vectors are interpolated linearly and renormalized.
class TransversalField {
 public:
  static TransversalField build(const PolygonalDomain& domain, FieldMode mode);

  const PolygonalDomain& domain() const { return domain_; }
  FieldMode mode() const { return mode_; }
  double kappa() const { return kappa_; }
  bool defined_on(int facet) const;
  const Vec2& vertex_vector(int vertex) const { return vertex_vectors_[static_cast<std::size_t>(vertex)]; }

  Vec2 at(const BoundaryPoint& p) const;
  /// Exact derivative of the renormalized interpolant with respect to arc length.
  Vec2 arc_derivative(const BoundaryPoint& p) const;
  double k_dot_n(const BoundaryPoint& p) const;

  static constexpr int kSamplesPerFacet = 64;

 private:
  TransversalField(PolygonalDomain domain, FieldMode mode) : domain_(std::move(domain)), mode_(mode) {}
  void require_defined(int facet) const;

  PolygonalDomain domain_;
  FieldMode mode_;
  std::vector<Vec2> vertex_vectors_;
  std::vector<bool> defined_;  // per facet
  double kappa_ = 0.0;
};

class InsulationDistribution;

/// s + t k(s).
Vec2 layer_point(const TransversalField& field, const BoundaryPoint& s, double t);

/// Area density of the layer map (s, t) -> s + t k(s); equals k.n at t = 0.
/// Throws NonInjectiveLayer when the value is not positive.
double layer_jacobian(const TransversalField& field, const BoundaryPoint& s, double t);

/// Area of the layer of thickness eps*d swept along k over the insulated sides.
double layer_area(const TransversalField& field, const InsulationDistribution& d, double eps);

/// Integral of (k.n) d over the insulated sides (Gauss quadrature per knot interval).
double weighted_thickness_integral(const TransversalField& field, const InsulationDistribution& d);

/// Gauss-Legendre rule on [0, 1].
struct GaussRule {
  std::vector<double> points;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int n);

}  // namespace insulation
