#include "edl/asymptotics.hpp"

#include <cmath>

#include <json.hpp>

#include "edl/error.hpp"
#include "edl/numerics.hpp"

namespace edl {

const char* to_string(Model m) { return m == Model::PB ? "pb" : "ccpb"; }

BoundaryLayer make_pb_layer(const Nonlinearity& f, const DomainSpec& domain, std::size_t k,
                            const ProfileOptions& opts) {
  if (k >= domain.components.size()) fail(ErrorCode::InvalidArgument, "no such boundary component");
  const auto& robin = domain.components[k].robin;
  auto u = solve_u(f, robin, opts);
  auto v = solve_v(u, f, robin);
  return BoundaryLayer{Model::PB, k, domain.dimension, f, std::nullopt, std::move(u), std::move(v),
                       std::nullopt, f.reference(), 0.0};
}

std::vector<BoundaryLayer> make_ccpb_layers(const CcpbConstants& c) {
  std::vector<BoundaryLayer> out;
  for (std::size_t k = 0; k < c.u.size(); ++k)
    out.push_back(BoundaryLayer{Model::CCPB, k, c.dimension, *c.f0, c.f1, c.u[k], c.v[k], c.w[k],
                                c.phi0_star, c.q});
  return out;
}

namespace {

void check_query(const ExpansionQuery& q, const BoundaryLayer& layer) {
  if (!(q.eps > 0.0)) fail(ErrorCode::InvalidArgument, "eps must be positive");
  if (q.order != 1 && q.order != 2) fail(ErrorCode::InvalidArgument, "order must be 1 or 2");
  if (q.t < 0.0) fail(ErrorCode::NegativeTime, "t must be >= 0");
  if (q.model != layer.model || q.boundary != layer.boundary)
    fail(ErrorCode::ModelProfileMismatch, "query does not match the supplied profiles");
  if (q.model == Model::CCPB && (!layer.w || !layer.f1))
    fail(ErrorCode::ModelProfileMismatch, "CCPB expansion needs w and f1");
}

}  // namespace

double potential(const ExpansionQuery& q, const BoundaryLayer& layer) {
  check_query(q, layer);
  double u = layer.u.value(q.t);
  if (q.order == 1) return u;
  double corr = (layer.dimension - 1) * q.curvature * layer.v.value(q.t);
  if (q.model == Model::CCPB) corr += layer.w->value(q.t);
  return u + std::sqrt(q.eps) * corr;
}

double field_normal_component(const ExpansionQuery& q, const BoundaryLayer& layer) {
  check_query(q, layer);
  double lead = layer.u.derivative(q.t) / std::sqrt(q.eps);
  if (q.order == 1) return lead;
  double corr = (layer.dimension - 1) * q.curvature * layer.v.derivative(q.t);
  if (q.model == Model::CCPB) corr += layer.w->derivative(q.t);
  return lead + corr;
}

double charge_density(const ExpansionQuery& q, const BoundaryLayer& layer) {
  check_query(q, layer);
  double u = layer.u.value(q.t);
  double lead = layer.f.value(u);
  if (q.order == 1) return lead;
  double fp = layer.f.derivative(u);
  double corr = (layer.dimension - 1) * q.curvature * fp * layer.v.value(q.t);
  if (q.model == Model::CCPB) corr += fp * layer.w->value(q.t) + layer.f1->value(u);
  return lead + std::sqrt(q.eps) * corr;
}

double maxwell_traction(const ExpansionQuery& q, const BoundaryLayer& layer) {
  check_query(q, layer);
  double u = layer.u.value(q.t);
  double lead = -layer.f.antiderivative(u);
  if (q.order == 1) return lead;
  double up = layer.u.derivative(q.t);
  double corr = (layer.dimension - 1) * q.curvature * layer.v.derivative(q.t);
  if (q.model == Model::CCPB) corr += layer.w->derivative(q.t);
  return lead + std::sqrt(q.eps) * up * corr;
}

double decay_envelope(EnvelopeKind kind, const EnvelopeConstants& c, double x, double beta) {
  if (!(c.M > 0.0 && c.M_prime > 0.0)) fail(ErrorCode::InvalidArgument, "M and M' must be positive");
  if (kind == EnvelopeKind::RegionII) return c.M_prime * std::exp(-c.M * x);
  if (!(x > 0.0)) fail(ErrorCode::InvalidArgument, "eps must be positive");
  return c.M_prime * std::exp(-c.M * std::pow(x, beta - 0.5));
}

RegionChargeReport region_charge(const DomainSpec& domain, std::size_t k,
                                 const RegionParams& params, const BoundaryLayer& layer,
                                 const EnvelopeConstants& envelope) {
  validate(params);
  if (k >= domain.components.size() || layer.boundary != k)
    fail(ErrorCode::ModelProfileMismatch, "layer does not belong to this component");
  if (layer.model == Model::CCPB && !layer.w)
    fail(ErrorCode::ModelProfileMismatch, "CCPB region charge needs w");
  const auto& comp = domain.components[k];
  const double se = std::sqrt(params.eps), e = params.eps, T = params.T;
  const double A = comp.surface_area;
  const double HI = (domain.dimension - 1) * comp.curvature_integral;
  const double up0 = layer.u.derivative(0.0), upT = layer.u.derivative(T);
  const double vp0 = layer.v.derivative(0.0), vpT = layer.v.derivative(T);
  double wp0 = 0.0, wpT = 0.0;
  if (layer.model == Model::CCPB) {
    wp0 = layer.w->derivative(0.0);
    wpT = layer.w->derivative(T);
  }
  RegionChargeReport r;
  r.boundary = k;
  r.eps = e;
  r.beta = params.beta;
  r.T = T;
  r.region1_leading = se * A * (up0 - upT);
  r.region2_leading = se * A * upT;
  r.region1 = r.region1_leading + e * (HI * (T * upT + vp0 - vpT) + A * (wp0 - wpT));
  r.region2 = r.region2_leading + e * (HI * (-T * upT + vpT) + A * wpT);
  r.region3_bound = se * decay_envelope(EnvelopeKind::RegionIII, envelope, e, params.beta);
  double dbd = comp.robin.phi_bd - layer.reference;
  r.expected_sign = static_cast<int>(-num::sign(dbd));
  if (r.expected_sign == 0)
    r.sign_ok = r.region1 == 0.0 && r.region2 == 0.0;
  else
    r.sign_ok = num::sign(r.region1) == r.expected_sign && num::sign(r.region2) == r.expected_sign;
  r.ratio = r.region1 != 0.0 ? r.region2 / r.region1 : 0.0;
  r.ratio_limit = up0 != upT ? upT / (up0 - upT) : 0.0;
  return r;
}

std::string region_charge_json(const RegionChargeReport& r) {
  nlohmann::ordered_json j;
  j["boundary"] = r.boundary;
  j["eps"] = r.eps;
  j["beta"] = r.beta;
  j["T"] = r.T;
  j["region_I"] = {{"two_term", r.region1}, {"leading", r.region1_leading}};
  j["region_II"] = {{"two_term", r.region2}, {"leading", r.region2_leading}};
  j["region_III"] = {{"bound", r.region3_bound}};
  j["expected_sign"] = r.expected_sign;
  j["sign_ok"] = r.sign_ok;
  j["ratio"] = r.ratio;
  j["ratio_limit"] = r.ratio_limit;
  return j.dump(1) + "\n";
}

}  // namespace edl
