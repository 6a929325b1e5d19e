#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "edl/asymptotics.hpp"
#include "edl/geometry.hpp"
#include "edl/nonlinearity.hpp"

namespace edl {

struct RadialGridOptions {
  double wall_spacing = 2.5e-4;  // first cell width, in units of sqrt(eps)
  double cluster_width = 4.0;    // grading length scale, in units of sqrt(eps)
  bool richardson = true;        // extrapolate from a bisected grid
  bool continuation = true;      // without a guess, walk eps down from 1e-2
  int max_newton = 80;
  double tolerance = 1e-10;      // relative to the largest term of the discrete equations
  double step_tolerance = 1e-12; // last Newton update, relative to |phi - phi*| node-wise
};

struct RadialSolveResult {
  Model model = Model::PB;
  int dimension = 2;
  double eps = 0.0;
  double inner_radius = 0.0;  // 0 for disk/ball
  double outer_radius = 1.0;
  std::vector<double> r, phi, dphi;  // dphi = d phi / dr
  std::vector<double> cell_volume;   // includes |S^{d-1}|
  int newton_iterations = 0;
  double residual_norm = 0.0;        // max scaled row residual / scale
  std::vector<int> damping_history;  // halvings per Newton step (last solve)
  double conservation_residual = 0.0;
  double refinement_change = 0.0;    // max |phi_fine - phi_coarse| on coarse nodes
  std::size_t coarse_intervals = 0;
  // CCPB
  std::vector<IonSpecies> species;
  std::vector<double> a_integrals;
  double phi_eps_star = 0.0;
  double neutrality_residual = 0.0;  // |int f_eps(phi)| / sum m |z|

  std::pair<double, double> eval(double radius) const;  // (phi, dphi/dr), cubic Hermite
  double f_eps(double phi) const;                        // CCPB charge density
};

RadialSolveResult solve_radial_dirichlet(const Nonlinearity& f, int d, double R, double phi_bd,
                                         double eps, const RadialGridOptions& opts = {},
                                         const RadialSolveResult* guess = nullptr);
RadialSolveResult solve_radial_robin_pb(const DomainSpec& domain, const Nonlinearity& f, double eps,
                                        const RadialGridOptions& opts = {},
                                        const RadialSolveResult* guess = nullptr);
RadialSolveResult solve_radial_ccpb(const DomainSpec& annulus, std::span<const IonSpecies> species,
                                    double eps, const RadialGridOptions& opts = {},
                                    const RadialSolveResult* guess = nullptr);

// |S^{d-1}| int_{r_lo}^{r_hi} r^{d-1} g(r, phi(r)) dr on the interpolated solution.
double radial_integral(const RadialSolveResult& res,
                       const std::function<double(double r, double phi)>& g, double r_lo,
                       double r_hi);

// Oracle charge in region I / II of component k: int f(phi) (PB) or f_eps(phi) (CCPB).
struct OracleRegionCharge {
  double region1 = 0.0;
  double region2 = 0.0;
};
OracleRegionCharge oracle_region_charge(const RadialSolveResult& res, const DomainSpec& domain,
                                        std::size_t k, const RegionParams& params,
                                        const Nonlinearity* f = nullptr);

struct ComponentComparison {
  std::size_t boundary = 0;
  double E1 = 0.0, E2 = 0.0;    // potential: first order, second order / sqrt(eps)
  double EF1 = 0.0, EF2 = 0.0;  // field: sqrt(eps)-scaled first order, second order
  std::size_t region1_nodes = 0, region2_nodes = 0, region3_nodes = 0;
  EnvelopeConstants envelope;   // fitted on region II
  double region3_max = 0.0;     // max |phi - reference| in region III
  double region3_bound = 0.0;   // fitted envelope at eps
};

struct ComparisonReport {
  Model model = Model::PB;
  double eps = 0.0;
  RegionParams params;
  double reference = 0.0;  // phi* or phi_eps*
  std::vector<ComponentComparison> components;
};

// curvature_sign = -1 deliberately corrupts the second-order term (negative control).
ComparisonReport compare_expansion(const RadialSolveResult& oracle, const DomainSpec& domain,
                                   std::span<const BoundaryLayer> layers,
                                   const RegionParams& params, double curvature_sign = 1.0);

std::string radial_csv(const RadialSolveResult& res);
std::string radial_json(const RadialSolveResult& res);
std::string comparison_json(const ComparisonReport& rep);

}  // namespace edl
