#include "insulation/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "insulation/distribution.hpp"
#include "insulation/error.hpp"

namespace insulation {

std::string_view to_string(FacetLabel label) {
  switch (label) {
    case FacetLabel::Insulated: return "insulated";
    case FacetLabel::Dirichlet: return "dirichlet";
    case FacetLabel::Neumann: return "neumann";
  }
  return "unknown";
}

FacetLabel facet_label_from_string(std::string_view text) {
  if (text == "insulated") return FacetLabel::Insulated;
  if (text == "dirichlet") return FacetLabel::Dirichlet;
  if (text == "neumann") return FacetLabel::Neumann;
  throw Error(ErrorKind::UnknownLabel, "facet label '" + std::string(text) + "'");
}

std::string_view to_string(FieldMode mode) {
  return mode == FieldMode::Bisector ? "bisector" : "facet_normal";
}

FieldMode field_mode_from_string(std::string_view text) {
  if (text == "bisector") return FieldMode::Bisector;
  if (text == "facet_normal") return FieldMode::FacetNormal;
  throw Error(ErrorKind::ModeInvalid, "field mode '" + std::string(text) + "'");
}

namespace {

int orientation_sign(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double v = cross(b - a, c - a);
  return (v > 0.0) - (v < 0.0);
}

bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
  const int o1 = orientation_sign(p1, p2, q1);
  const int o2 = orientation_sign(p1, p2, q2);
  const int o3 = orientation_sign(q1, q2, p1);
  const int o4 = orientation_sign(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2)) return true;
  return false;
}

}  // namespace

PolygonalDomain::PolygonalDomain(std::vector<Vec2> vertices, std::vector<FacetSpec> facets)
    : vertices_(std::move(vertices)) {
  const int n = size();
  if (n < 3) throw Error(ErrorKind::InvalidDomain, "polygon needs at least 3 vertices");
  if (static_cast<int>(facets.size()) != n) {
    throw Error(ErrorKind::InvalidDomain, "expected one facet per polygon side (" + std::to_string(n) + ")");
  }
  for (const auto& v : vertices_) {
    if (!std::isfinite(v.x) || !std::isfinite(v.y)) throw Error(ErrorKind::InvalidDomain, "non-finite vertex");
  }

  facets_.resize(static_cast<std::size_t>(n));
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (const auto& spec : facets) {
    const int a = spec.vertices[0];
    const int b = spec.vertices[1];
    if (a < 0 || a >= n || b != (a + 1) % n) {
      throw Error(ErrorKind::InvalidDomain, "facet (" + std::to_string(a) + ", " + std::to_string(b) +
                                                ") is not a counter-clockwise polygon side (i, i+1)");
    }
    if (seen[static_cast<std::size_t>(a)]) {
      throw Error(ErrorKind::InvalidDomain, "duplicate facet starting at vertex " + std::to_string(a));
    }
    if (!std::isfinite(spec.value)) throw Error(ErrorKind::InvalidDomain, "non-finite facet value");
    if (spec.label == FacetLabel::Insulated && spec.value != 0.0) {
      throw Error(ErrorKind::InvalidDomain, "insulated facets carry no boundary value");
    }
    seen[static_cast<std::size_t>(a)] = true;
    Facet& f = facets_[static_cast<std::size_t>(a)];
    f.first = a;
    f.second = b;
    f.label = spec.label;
    f.value = spec.value;
    const Vec2 e = vertices_[static_cast<std::size_t>(b)] - vertices_[static_cast<std::size_t>(a)];
    f.length = norm(e);
    if (!(f.length > 0.0)) throw Error(ErrorKind::InvalidDomain, "zero-length facet " + std::to_string(a));
    f.tangent = {e.x / f.length, e.y / f.length};
    f.normal = right_normal(f.tangent);
  }

  if (!(area() > 0.0)) {
    throw Error(ErrorKind::InvalidDomain, "polygon must be counter-clockwise with positive area");
  }
  if (!has_label(FacetLabel::Insulated)) {
    throw Error(ErrorKind::InvalidDomain, "at least one facet must be insulated");
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      const auto& fi = facets_[static_cast<std::size_t>(i)];
      const auto& fj = facets_[static_cast<std::size_t>(j)];
      if (segments_intersect(vertices_[static_cast<std::size_t>(fi.first)], vertices_[static_cast<std::size_t>(fi.second)],
                             vertices_[static_cast<std::size_t>(fj.first)], vertices_[static_cast<std::size_t>(fj.second)])) {
        throw Error(ErrorKind::MeshFailure, "polygon is not simple: facets " + std::to_string(i) + " and " +
                                                std::to_string(j) + " intersect");
      }
    }
  }
}

Vec2 PolygonalDomain::point(const BoundaryPoint& p) const {
  const Facet& f = facet(p.facet);
  return lerp(vertices_[static_cast<std::size_t>(f.first)], vertices_[static_cast<std::size_t>(f.second)], p.lambda);
}

double PolygonalDomain::area() const {
  double twice = 0.0;
  const int n = size();
  for (int i = 0; i < n; ++i) {
    twice += cross(vertices_[static_cast<std::size_t>(i)], vertices_[static_cast<std::size_t>((i + 1) % n)]);
  }
  return 0.5 * twice;
}

double PolygonalDomain::insulated_length() const {
  double total = 0.0;
  for (const auto& f : facets_) {
    if (f.label == FacetLabel::Insulated) total += f.length;
  }
  return total;
}

bool PolygonalDomain::has_label(FacetLabel label) const {
  return std::any_of(facets_.begin(), facets_.end(), [label](const Facet& f) { return f.label == label; });
}

double PolygonalDomain::insulated_arc(const BoundaryPoint& p) const {
  double arc = 0.0;
  for (int i = 0; i < p.facet; ++i) {
    if (facets_[static_cast<std::size_t>(i)].label == FacetLabel::Insulated) arc += facets_[static_cast<std::size_t>(i)].length;
  }
  return arc + p.lambda * facet(p.facet).length;
}

// ---------------------------------------------------------------------------

TransversalField TransversalField::build(const PolygonalDomain& domain, FieldMode mode) {
  TransversalField field(domain, mode);
  const int n = domain.size();
  field.vertex_vectors_.assign(static_cast<std::size_t>(n), Vec2{});
  field.defined_.assign(static_cast<std::size_t>(n), mode == FieldMode::Bisector);

  if (mode == FieldMode::Bisector) {
    for (int v = 0; v < n; ++v) {
      const Vec2 sum = domain.facet(domain.facet_ending_at(v)).normal + domain.facet(domain.facet_starting_at(v)).normal;
      const double len = norm(sum);
      if (!(len > 1e-12)) {
        throw Error(ErrorKind::TransversalityFailure, "cusp at vertex " + std::to_string(v));
      }
      field.vertex_vectors_[static_cast<std::size_t>(v)] = {sum.x / len, sum.y / len};
    }
  } else {
    std::vector<int> owner(static_cast<std::size_t>(n), -1);
    for (int f = 0; f < n; ++f) {
      const Facet& facet = domain.facet(f);
      if (facet.label != FacetLabel::Insulated) continue;
      field.defined_[static_cast<std::size_t>(f)] = true;
      for (int v : {facet.first, facet.second}) {
        if (owner[static_cast<std::size_t>(v)] >= 0) {
          throw Error(ErrorKind::ModeInvalid, "facet_normal mode: insulated facets " +
                                                  std::to_string(owner[static_cast<std::size_t>(v)]) + " and " +
                                                  std::to_string(f) + " share vertex " + std::to_string(v));
        }
        owner[static_cast<std::size_t>(v)] = f;
        field.vertex_vectors_[static_cast<std::size_t>(v)] = facet.normal;
      }
    }
  }

  double kappa = 1.0;
  for (int f = 0; f < n; ++f) {
    if (domain.facet(f).label != FacetLabel::Insulated) continue;
    for (int i = 0; i <= kSamplesPerFacet; ++i) {
      const double lambda = static_cast<double>(i) / kSamplesPerFacet;
      kappa = std::min(kappa, field.k_dot_n({f, lambda}));
    }
  }
  if (!(kappa > 1e-6)) {
    throw Error(ErrorKind::TransversalityFailure, "sampled min k.n = " + std::to_string(kappa));
  }
  field.kappa_ = kappa;
  return field;
}

bool TransversalField::defined_on(int facet) const {
  return facet >= 0 && facet < domain_.size() && defined_[static_cast<std::size_t>(facet)];
}

void TransversalField::require_defined(int facet) const {
  if (!defined_on(facet)) {
    throw Error(ErrorKind::ModeInvalid, "transversal field is not defined on facet " + std::to_string(facet));
  }
}

Vec2 TransversalField::at(const BoundaryPoint& p) const {
  require_defined(p.facet);
  const Facet& f = domain_.facet(p.facet);
  const Vec2 q = lerp(vertex_vectors_[static_cast<std::size_t>(f.first)], vertex_vectors_[static_cast<std::size_t>(f.second)], p.lambda);
  return normalized(q);
}

Vec2 TransversalField::arc_derivative(const BoundaryPoint& p) const {
  require_defined(p.facet);
  const Facet& f = domain_.facet(p.facet);
  const Vec2& ka = vertex_vectors_[static_cast<std::size_t>(f.first)];
  const Vec2& kb = vertex_vectors_[static_cast<std::size_t>(f.second)];
  const Vec2 q = lerp(ka, kb, p.lambda);
  const double qn = norm(q);
  const Vec2 k{q.x / qn, q.y / qn};
  const Vec2 dq = (1.0 / f.length) * (kb - ka);
  // d(q/|q|) = (I - k k^T) dq / |q|
  return (1.0 / qn) * (dq - dot(k, dq) * k);
}

double TransversalField::k_dot_n(const BoundaryPoint& p) const {
  return dot(at(p), domain_.facet(p.facet).normal);
}

// ---------------------------------------------------------------------------

Vec2 layer_point(const TransversalField& field, const BoundaryPoint& s, double t) {
  const Vec2 base = field.domain().point(s);
  if (t == 0.0) return base;
  return base + t * field.at(s);
}

double layer_jacobian(const TransversalField& field, const BoundaryPoint& s, double t) {
  const Facet& f = field.domain().facet(s.facet);
  const Vec2 k = field.at(s);
  const Vec2 dk = field.arc_derivative(s);
  const double j = cross(k, f.tangent + t * dk);
  if (!(j > 0.0)) {
    throw Error(ErrorKind::NonInjectiveLayer, "layer Jacobian " + std::to_string(j) + " at facet " +
                                                  std::to_string(s.facet) + ", lambda " + std::to_string(s.lambda) +
                                                  ", t " + std::to_string(t));
  }
  return j;
}

namespace {

constexpr int kLayerGaussPoints = 12;

template <class Integrand>
double integrate_insulated(const TransversalField& field, const InsulationDistribution& d, Integrand&& integrand) {
  const auto& domain = field.domain();
  const GaussRule& rule = gauss_legendre(kLayerGaussPoints);
  double total = 0.0;
  for (int fi = 0; fi < domain.size(); ++fi) {
    const Facet& facet = domain.facet(fi);
    if (facet.label != FacetLabel::Insulated) continue;
    const auto knots = d.knots(fi);
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
      const double l0 = knots[i].lambda;
      const double l1 = knots[i + 1].lambda;
      const double ds = (l1 - l0) * facet.length;
      if (ds <= 0.0) continue;
      double piece = 0.0;
      for (std::size_t q = 0; q < rule.points.size(); ++q) {
        const double xi = rule.points[q];
        const BoundaryPoint p{fi, l0 + xi * (l1 - l0)};
        const double dv = (1.0 - xi) * knots[i].value + xi * knots[i + 1].value;
        piece += rule.weights[q] * integrand(p, dv);
      }
      total += piece * ds;
    }
  }
  return total;
}

}  // namespace

double layer_area(const TransversalField& field, const InsulationDistribution& d, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorKind::InvalidDistribution, "layer thickness scale must be positive");
  const auto& domain = field.domain();
  // positivity at the knots; the quadrature points are checked inside the integrand
  for (int fi = 0; fi < domain.size(); ++fi) {
    if (domain.facet(fi).label != FacetLabel::Insulated) continue;
    for (const auto& knot : d.knots(fi)) {
      layer_jacobian(field, {fi, knot.lambda}, 0.0);
      layer_jacobian(field, {fi, knot.lambda}, eps * knot.value);
    }
  }
  return integrate_insulated(field, d, [&](const BoundaryPoint& p, double dv) {
    const double height = eps * dv;
    const double j0 = layer_jacobian(field, p, 0.0);
    const double j_top = layer_jacobian(field, p, height);
    // the Jacobian is affine in t, so the trapezoid in t is exact
    return 0.5 * height * (j0 + j_top);
  });
}

double weighted_thickness_integral(const TransversalField& field, const InsulationDistribution& d) {
  return integrate_insulated(field, d, [&](const BoundaryPoint& p, double dv) { return field.k_dot_n(p) * dv; });
}

// ---------------------------------------------------------------------------

namespace {

GaussRule make_gauss_legendre(int n) {
  GaussRule rule;
  rule.points.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // map [-1, 1] -> [0, 1]
    rule.points[static_cast<std::size_t>(n - 1 - i)] = 0.5 * (x + 1.0);
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  static const std::vector<GaussRule> rules = [] {
    std::vector<GaussRule> r;
    r.emplace_back();
    for (int k = 1; k <= 24; ++k) r.push_back(make_gauss_legendre(k));
    return r;
  }();
  if (n < 1 || n > 24) throw Error(ErrorKind::InvalidDomain, "unsupported Gauss rule size");
  return rules[static_cast<std::size_t>(n)];
}

}  // namespace insulation
