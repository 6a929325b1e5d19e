#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "edl/geometry.hpp"
#include "edl/nonlinearity.hpp"
#include "edl/profiles.hpp"

namespace edl {

struct Phi0Solution {
  double phi0_star = 0.0;
  std::vector<double> u0;
  std::vector<double> du0;
  bool residual_monotone = true;  // strict increase on the 64-point scan
};

struct CcpbDiagnostics {
  std::vector<double> boundary_residuals;  // boundary relation per component
  double flux_residual = 0.0;              // sum_k |dOmega_k| u_k'(0)
  double mhat_z_sum = 0.0;
  double mhat_z_relative = 0.0;
  double identity_residual = 0.0;          // (d-1) sum H_k v_k'(0) + sum |dOmega_k| w_k'(0)
  double identity_relative = 0.0;
  bool residual_monotone = true;
  std::vector<double> energy_time;         // time-space cross-check of the energies
};

struct CcpbConstants {
  std::vector<IonSpecies> species;
  double volume = 0.0;
  int dimension = 2;
  double phi0_star = 0.0;
  std::vector<double> u0, du0, energy;  // per boundary component
  std::vector<double> mhat;             // per species
  std::vector<double> bulk_conc0;       // m_i exp(z_i phi0*) / |Omega|
  double q = 0.0;
  std::vector<Profile> u, v, theta, w;
  std::optional<Nonlinearity> f0, fhat1, f1;
  CcpbDiagnostics diag;
};

Phi0Solution solve_phi0(const DomainSpec& domain, std::span<const IonSpecies> species);

std::vector<double> compute_mhat(const DomainSpec& domain, std::span<const IonSpecies> species,
                                 std::span<const Profile> u, double phi0_star);

// Q from the boundary data; energies are int_0^inf u_k'^2.
double compute_q(const DomainSpec& domain, const Nonlinearity& f0, const Nonlinearity& fhat1,
                 std::span<const double> u0, std::span<const double> du0,
                 std::span<const double> energy);

CcpbConstants ccpb_constants(const DomainSpec& domain, std::span<const IonSpecies> species,
                             const ProfileOptions& opts = {});

struct BulkCoefficient {
  double c0;           // c_i^b
  double c1;           // first-order coefficient of c_{i,eps}^b in sqrt(eps)
  double c_eps;        // c0 + sqrt(eps) c1
  double a0;           // |Omega| exp(-z_i phi0*)
  double a1;           // first-order coefficient of A_{i,eps}
  double a_eps;        // a0 + sqrt(eps) a1
};
std::vector<BulkCoefficient> bulk_expansion(const CcpbConstants& c, double eps);

std::string constants_json(const CcpbConstants& c, const DomainSpec& domain);

}  // namespace edl
