#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "edl/profiles.hpp"

namespace edl {

enum class Orientation { Outer, Hole };
enum class Shape { Disk, Ball, Annulus, General };

// Closed plane curve r(s), s in [s0, s1], traversed with the domain on the left.
struct ParametricCurve {
  std::function<std::array<double, 2>(double)> d1;  // r'(s)
  std::function<std::array<double, 2>(double)> d2;  // r''(s)
  double s0 = 0.0;
  double s1 = 1.0;
};

struct BoundaryComponent {
  std::size_t index = 0;
  double surface_area = 0.0;
  double mean_curvature = 0.0;  // constant-curvature model; signed w.r.t. the domain
  double curvature_integral = 0.0;
  RobinData robin;
  Orientation orientation = Orientation::Outer;
  double radius = 0.0;  // radial builders only
  std::optional<ParametricCurve> curve;

  // H at a boundary point: constant model ignores s.
  double curvature_at(double s = 0.0) const;
};

struct DomainSpec {
  int dimension = 2;
  double volume = 0.0;
  std::vector<BoundaryComponent> components;
  bool separated = true;
  Shape shape = Shape::General;
};

// |S^{d-1}|
double unit_sphere_area(int d);

DomainSpec make_disk(double R, RobinData robin = {});
DomainSpec make_ball(int d, double R, RobinData robin = {});
// component 0 is the outer sphere (radius R), component 1 the hole (radius a)
DomainSpec make_annulus(int d, double a, double R, RobinData outer = {}, RobinData inner = {});
BoundaryComponent make_curve_component(std::size_t index, const ParametricCurve& curve,
                                       RobinData robin, Orientation orientation);

struct RegionParams {
  double eps = 1e-4;
  double beta = 0.25;
  double T = 5.0;
};
void validate(const RegionParams& p);

enum class Region { I, II, III };
const char* to_string(Region r);

Region classify_point(const DomainSpec& domain, std::size_t k, double distance,
                      const RegionParams& params);

// 1 - t sqrt(eps) (d - 1) H
double steiner_factor(double H, double t, double eps, int d);

}  // namespace edl
