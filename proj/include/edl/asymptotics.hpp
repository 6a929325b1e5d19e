#pragma once

#include <optional>
#include <string>
#include <vector>

#include "edl/ccpb.hpp"
#include "edl/geometry.hpp"
#include "edl/nonlinearity.hpp"
#include "edl/profiles.hpp"

namespace edl {

enum class Model { PB, CCPB };
const char* to_string(Model m);

// Profiles attached to one boundary component.
struct BoundaryLayer {
  Model model = Model::PB;
  std::size_t boundary = 0;
  int dimension = 2;
  Nonlinearity f;                 // f for PB, f0 for CCPB
  std::optional<Nonlinearity> f1;  // CCPB only
  Profile u, v;
  std::optional<Profile> w;        // CCPB only
  double reference = 0.0;          // phi* or phi0*
  double q = 0.0;                  // CCPB drift
};

BoundaryLayer make_pb_layer(const Nonlinearity& f, const DomainSpec& domain, std::size_t k,
                            const ProfileOptions& opts = {});
std::vector<BoundaryLayer> make_ccpb_layers(const CcpbConstants& c);

struct ExpansionQuery {
  Model model = Model::PB;
  std::size_t boundary = 0;
  double curvature = 0.0;  // H at the boundary point
  double t = 0.0;
  double eps = 1e-4;
  int order = 2;
};

// u + sqrt(eps) [(d-1) H v (+ w)]
double potential(const ExpansionQuery& q, const BoundaryLayer& layer);
// coefficient of -nu in grad phi: u'/sqrt(eps) + (d-1) H v' (+ w')
double field_normal_component(const ExpansionQuery& q, const BoundaryLayer& layer);
double charge_density(const ExpansionQuery& q, const BoundaryLayer& layer);
// coefficient of nu in the Maxwell traction
double maxwell_traction(const ExpansionQuery& q, const BoundaryLayer& layer);

struct EnvelopeConstants {
  double M = 1.0;
  double M_prime = 1.0;
};

enum class EnvelopeKind { RegionII, RegionIII };
// Region II: M' exp(-M t). Region III: M' exp(-M eps^(beta - 1/2)); x = t or eps.
double decay_envelope(EnvelopeKind kind, const EnvelopeConstants& c, double x, double beta = 0.25);

struct RegionChargeReport {
  std::size_t boundary = 0;
  double eps = 0.0, beta = 0.0, T = 0.0;
  double region1 = 0.0;          // two-term value
  double region2 = 0.0;          // two-term value
  double region1_leading = 0.0;  // sqrt(eps) term only
  double region2_leading = 0.0;
  double region3_bound = 0.0;    // a bound, not a value
  int expected_sign = 0;
  bool sign_ok = true;
  double ratio = 0.0;            // region2 / region1
  double ratio_limit = 0.0;      // u'(T) / (u'(0) - u'(T))
};

RegionChargeReport region_charge(const DomainSpec& domain, std::size_t k,
                                 const RegionParams& params, const BoundaryLayer& layer,
                                 const EnvelopeConstants& envelope = {});

std::string region_charge_json(const RegionChargeReport& r);

}  // namespace edl
