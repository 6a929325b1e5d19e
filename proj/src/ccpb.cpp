#include "edl/ccpb.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "edl/error.hpp"
#include "edl/numerics.hpp"

namespace edl {

using num::sign;

namespace {

void check_ccpb_input(const DomainSpec& domain, std::span<const IonSpecies> species) {
  if (species.empty()) fail(ErrorCode::InvalidArgument, "species list is empty");
  if (neutrality_defect(species) > 1e-12)
    fail(ErrorCode::NeutralityViolated, "sum m_i z_i != 0");
  if (domain.components.empty()) fail(ErrorCode::InvalidArgument, "domain has no boundary");
  double lo = domain.components.front().robin.phi_bd, hi = lo;
  for (const auto& c : domain.components) {
    lo = std::min(lo, c.robin.phi_bd);
    hi = std::max(hi, c.robin.phi_bd);
  }
  if (lo == hi) fail(ErrorCode::AllBoundaryPotentialsEqual, "boundary potentials are all equal");
}

struct Inner {
  std::vector<double> u0, du0;
  double residual = 0.0;
};

Inner inner_solve(const DomainSpec& domain, std::span<const IonSpecies> species, double s) {
  auto f0 = make_f0(species, domain.volume, s);
  Inner in;
  for (const auto& c : domain.components) {
    double u0 = solve_u0(f0, c.robin);
    double p0 = initial_slope(f0, c.robin, u0);
    in.u0.push_back(u0);
    in.du0.push_back(p0);
    in.residual += c.surface_area * p0;
  }
  return in;
}

}  // namespace

Phi0Solution solve_phi0(const DomainSpec& domain, std::span<const IonSpecies> species) {
  check_ccpb_input(domain, species);
  double lo = domain.components.front().robin.phi_bd, hi = lo;
  for (const auto& c : domain.components) {
    lo = std::min(lo, c.robin.phi_bd);
    hi = std::max(hi, c.robin.phi_bd);
  }
  auto residual = [&](double s) { return inner_solve(domain, species, s).residual; };
  Phi0Solution out;
  double prev = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < 64; ++j) {
    double r = residual(lo + (hi - lo) * (j + 0.5) / 64.0);
    if (!(r > prev)) out.residual_monotone = false;
    prev = r;
  }
  double rlo = residual(lo), rhi = residual(hi);
  if (!(rlo < 0.0 && rhi > 0.0)) fail(ErrorCode::BracketFailure, "flux residual not bracketed");
  out.phi0_star = num::bisect(residual, lo, hi, 0.0);
  auto in = inner_solve(domain, species, out.phi0_star);
  out.u0 = std::move(in.u0);
  out.du0 = std::move(in.du0);
  return out;
}

std::vector<double> compute_mhat(const DomainSpec& domain, std::span<const IonSpecies> species,
                                 std::span<const Profile> u, double phi0_star) {
  if (u.size() != domain.components.size())
    fail(ErrorCode::InvalidArgument, "one u profile per boundary component required");
  std::vector<double> mhat;
  for (const auto& sp : species) {
    const double z = sp.valence;
    double acc = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
      const Profile& p = u[k];
      if (p.metadata().du0 == 0.0) continue;
      auto t = p.t();
      std::vector<double> g(t.size()), dg(t.size());
      for (std::size_t j = 0; j < t.size(); ++j) {
        double d = p.values()[j] - phi0_star;
        g[j] = -std::expm1(-z * d);
        dg[j] = z * std::exp(-z * d) * p.derivatives()[j];
      }
      auto c = num::cumulative_hermite(t, g, dg);
      double dT = p.values().back() - phi0_star;
      double mu = p.tail().rate;
      double tail = z * dT / mu - z * z * dT * dT / (4.0 * mu);
      acc += domain.components[k].surface_area * (c.back() + tail);
    }
    mhat.push_back(sp.amount / domain.volume * acc);
  }
  return mhat;
}

double compute_q(const DomainSpec& domain, const Nonlinearity& f0, const Nonlinearity& fhat1,
                 std::span<const double> u0, std::span<const double> du0,
                 std::span<const double> energy) {
  const int d = domain.dimension;
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < domain.components.size(); ++k) {
    const auto& c = domain.components[k];
    double f = f0.value(u0[k]);
    double D = du0[k] + c.robin.gamma * f;
    if (D == 0.0) continue;  // constant layer: contributes nothing
    num += (c.surface_area * fhat1.antiderivative(u0[k]) +
            (d - 1) * c.curvature_integral * energy[k]) / D;
    double term = c.surface_area * f / D;
    if (term < 0.0) fail(ErrorCode::DegenerateDenominator, "denominator term is negative");
    den += term;
  }
  if (!(den > 0.0)) fail(ErrorCode::DegenerateDenominator, "denominator vanishes");
  return num / den;
}

CcpbConstants ccpb_constants(const DomainSpec& domain, std::span<const IonSpecies> species,
                             const ProfileOptions& opts) {
  auto phi0 = solve_phi0(domain, species);
  CcpbConstants c;
  c.species.assign(species.begin(), species.end());
  c.volume = domain.volume;
  c.dimension = domain.dimension;
  c.phi0_star = phi0.phi0_star;
  c.f0 = make_f0(species, domain.volume, c.phi0_star);
  const Nonlinearity& f0 = *c.f0;
  for (std::size_t k = 0; k < domain.components.size(); ++k) {
    const auto& comp = domain.components[k];
    c.u.push_back(solve_u(f0, comp.robin, opts));
    c.v.push_back(solve_v(c.u.back(), f0, comp.robin));
    c.theta.push_back(solve_theta(c.u.back(), f0, comp.robin));
    c.u0.push_back(c.u.back().metadata().u0);
    c.du0.push_back(c.u.back().metadata().du0);
    c.energy.push_back(energy_potential_space(f0, c.u0.back()));
    c.diag.energy_time.push_back(c.v.back().metadata().energy);
  }
  c.mhat = compute_mhat(domain, species, c.u, c.phi0_star);
  c.fhat1 = make_fhat1(species, domain.volume, c.phi0_star, c.mhat);
  c.q = compute_q(domain, f0, *c.fhat1, c.u0, c.du0, c.energy);
  c.f1 = make_f1(f0, *c.fhat1, c.q);
  for (std::size_t k = 0; k < domain.components.size(); ++k)
    c.w.push_back(solve_w(c.u[k], f0, *c.f1, c.q, domain.components[k].robin));
  for (const auto& sp : species)
    c.bulk_conc0.push_back(sp.amount * std::exp(sp.valence * c.phi0_star) / domain.volume);

  // diagnostics
  auto& dg = c.diag;
  dg.residual_monotone = phi0.residual_monotone;
  double flux = 0.0;
  for (std::size_t k = 0; k < domain.components.size(); ++k) {
    const auto& r = domain.components[k].robin;
    double u0 = c.u0[k];
    double dbd = r.phi_bd - c.phi0_star;
    dg.boundary_residuals.push_back(std::abs(
        r.phi_bd - u0 - sign(dbd) * r.gamma * std::sqrt(std::max(-2.0 * f0.antiderivative(u0), 0.0))));
    double slope = r.gamma > 0.0 ? (u0 - r.phi_bd) / r.gamma : c.du0[k];
    flux += domain.components[k].surface_area * slope;
  }
  dg.flux_residual = std::abs(flux);
  double s = 0.0, a = 0.0;
  for (std::size_t i = 0; i < species.size(); ++i) {
    s += c.mhat[i] * species[i].valence;
    a += std::abs(c.mhat[i] * species[i].valence);
  }
  dg.mhat_z_sum = s;
  dg.mhat_z_relative = a > 0.0 ? std::abs(s) / a : 0.0;
  double id = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < domain.components.size(); ++k) {
    const auto& comp = domain.components[k];
    double tv = (domain.dimension - 1) * comp.curvature_integral * c.v[k].derivatives()[0];
    double tw = comp.surface_area * c.w[k].derivatives()[0];
    id += tv + tw;
    scale += std::abs(tv) + std::abs(tw);
  }
  dg.identity_residual = id;
  dg.identity_relative = scale > 0.0 ? std::abs(id) / scale : 0.0;
  return c;
}

std::vector<BulkCoefficient> bulk_expansion(const CcpbConstants& c, double eps) {
  if (!(eps > 0.0)) fail(ErrorCode::InvalidArgument, "eps must be positive");
  std::vector<BulkCoefficient> out;
  double se = std::sqrt(eps);
  for (std::size_t i = 0; i < c.species.size(); ++i) {
    const auto& sp = c.species[i];
    double e = std::exp(sp.valence * c.phi0_star);
    BulkCoefficient b;
    b.c0 = sp.amount * e / c.volume;
    b.c1 = (sp.amount * sp.valence * c.q * e + c.mhat[i] * e) / c.volume;
    b.c_eps = b.c0 + se * b.c1;
    b.a0 = c.volume / e;
    b.a1 = -c.volume / e * (sp.valence * c.q + c.mhat[i] / sp.amount);
    b.a_eps = b.a0 + se * b.a1;
    out.push_back(b);
  }
  return out;
}

std::string constants_json(const CcpbConstants& c, const DomainSpec& domain) {
  nlohmann::ordered_json j;
  j["phi0_star"] = c.phi0_star;
  j["Q"] = c.q;
  j["volume"] = c.volume;
  j["dimension"] = c.dimension;
  auto& comps = j["components"];
  comps = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < c.u0.size(); ++k) {
    const auto& comp = domain.components[k];
    nlohmann::ordered_json e;
    e["index"] = k;
    e["area"] = comp.surface_area;
    e["curvature_integral"] = comp.curvature_integral;
    e["gamma"] = comp.robin.gamma;
    e["phi_bd"] = comp.robin.phi_bd;
    e["u0"] = c.u0[k];
    e["du0"] = c.du0[k];
    e["energy"] = c.energy[k];
    e["energy_time"] = c.diag.energy_time[k];
    e["v0"] = c.v[k].metadata().v0;
    e["dv0"] = c.v[k].derivatives()[0];
    e["w0"] = c.w[k].metadata().w0;
    e["dw0"] = c.w[k].derivatives()[0];
    e["theta_slope0"] = c.theta[k].derivatives()[0];
    e["t_star"] = c.v[k].metadata().t_star ? nlohmann::ordered_json(*c.v[k].metadata().t_star)
                                           : nlohmann::ordered_json(nullptr);
    comps.push_back(e);
  }
  auto& sp = j["species"];
  sp = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < c.species.size(); ++i)
    sp.push_back({{"z", c.species[i].valence},
                  {"m", c.species[i].amount},
                  {"mhat", c.mhat[i]},
                  {"bulk_conc0", c.bulk_conc0[i]}});
  const auto& d = c.diag;
  j["diagnostics"] = {{"boundary_residuals", d.boundary_residuals},
                      {"flux_residual", d.flux_residual},
                      {"mhat_z_sum", d.mhat_z_sum},
                      {"mhat_z_relative", d.mhat_z_relative},
                      {"identity_residual", d.identity_residual},
                      {"identity_relative", d.identity_relative},
                      {"residual_monotone", d.residual_monotone}};
  return j.dump(1) + "\n";
}

}  // namespace edl
