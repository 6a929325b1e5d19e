#include "edl/geometry.hpp"

#include <cmath>
#include <numbers>

#include "edl/error.hpp"
#include "edl/numerics.hpp"

namespace edl {

double unit_sphere_area(int d) {
  return 2.0 * std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0);
}

double BoundaryComponent::curvature_at(double s) const {
  if (!curve) return mean_curvature;
  auto a = curve->d1(s);
  auto b = curve->d2(s);
  double speed = std::hypot(a[0], a[1]);
  double kappa = (a[0] * b[1] - a[1] * b[0]) / (speed * speed * speed);
  // with the domain on the left this is the curvature signed w.r.t. the domain
  return kappa;
}

namespace {

BoundaryComponent sphere(std::size_t index, int d, double radius, RobinData robin,
                         Orientation o) {
  BoundaryComponent c;
  c.index = index;
  c.surface_area = unit_sphere_area(d) * std::pow(radius, d - 1);
  c.mean_curvature = (o == Orientation::Outer ? 1.0 : -1.0) / radius;
  c.curvature_integral = c.mean_curvature * c.surface_area;
  c.robin = robin;
  c.orientation = o;
  c.radius = radius;
  return c;
}

}  // namespace

DomainSpec make_ball(int d, double R, RobinData robin) {
  if (d < 2) fail(ErrorCode::InvalidArgument, "dimension must be >= 2");
  if (!(R > 0.0)) fail(ErrorCode::BadRadii, "radius must be positive");
  DomainSpec dom;
  dom.dimension = d;
  dom.volume = unit_sphere_area(d) * std::pow(R, d) / d;
  dom.components.push_back(sphere(0, d, R, robin, Orientation::Outer));
  dom.shape = d == 2 ? Shape::Disk : Shape::Ball;
  return dom;
}

DomainSpec make_disk(double R, RobinData robin) { return make_ball(2, R, robin); }

DomainSpec make_annulus(int d, double a, double R, RobinData outer, RobinData inner) {
  if (d < 2) fail(ErrorCode::InvalidArgument, "dimension must be >= 2");
  if (!(a > 0.0 && a < R)) fail(ErrorCode::BadRadii, "annulus needs 0 < a < R");
  DomainSpec dom;
  dom.dimension = d;
  dom.volume = unit_sphere_area(d) * (std::pow(R, d) - std::pow(a, d)) / d;
  dom.components.push_back(sphere(0, d, R, outer, Orientation::Outer));
  dom.components.push_back(sphere(1, d, a, inner, Orientation::Hole));
  dom.shape = Shape::Annulus;
  return dom;
}

BoundaryComponent make_curve_component(std::size_t index, const ParametricCurve& curve,
                                       RobinData robin, Orientation orientation) {
  if (!curve.d1 || !curve.d2 || !(curve.s1 > curve.s0))
    fail(ErrorCode::InvalidArgument, "curve needs derivatives and s1 > s0");
  BoundaryComponent c;
  c.index = index;
  c.robin = robin;
  c.orientation = orientation;
  c.curve = curve;
  auto speed = [&](double s) {
    auto a = curve.d1(s);
    return std::hypot(a[0], a[1]);
  };
  c.surface_area = num::integrate(speed, curve.s0, curve.s1, 1e-12);
  c.curvature_integral = num::integrate(
      [&](double s) { return c.curvature_at(s) * speed(s); }, curve.s0, curve.s1, 1e-12);
  c.mean_curvature = c.curvature_integral / c.surface_area;
  return c;
}

void validate(const RegionParams& p) {
  if (!(p.eps > 0.0)) fail(ErrorCode::InconsistentParams, "eps must be positive");
  if (!(p.beta > 0.0 && p.beta < 0.5)) fail(ErrorCode::InconsistentParams, "beta must lie in (0, 1/2)");
  if (!(p.T > 0.0)) fail(ErrorCode::InconsistentParams, "T must be positive");
  if (!(p.T * std::sqrt(p.eps) < std::pow(p.eps, p.beta)))
    fail(ErrorCode::InconsistentParams, "T sqrt(eps) must be below eps^beta");
}

const char* to_string(Region r) {
  switch (r) {
    case Region::I: return "I";
    case Region::II: return "II";
    case Region::III: return "III";
  }
  return "?";
}

Region classify_point(const DomainSpec& domain, std::size_t k, double distance,
                      const RegionParams& params) {
  validate(params);
  if (k >= domain.components.size()) fail(ErrorCode::InvalidArgument, "no such boundary component");
  if (distance < 0.0) fail(ErrorCode::InvalidArgument, "distance must be >= 0");
  if (distance < params.T * std::sqrt(params.eps)) return Region::I;
  if (distance <= std::pow(params.eps, params.beta)) return Region::II;
  return Region::III;
}

double steiner_factor(double H, double t, double eps, int d) {
  if (t < 0.0) fail(ErrorCode::NegativeTime, "steiner factor needs t >= 0");
  return 1.0 - t * std::sqrt(eps) * (d - 1) * H;
}

}  // namespace edl
