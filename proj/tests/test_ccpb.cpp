#include <doctest.h>

#include <chrono>
#include <cmath>
#include <numbers>

#include "edl/ccpb.hpp"
#include "edl/error.hpp"

using namespace edl;
constexpr double pi = std::numbers::pi;

namespace {

std::vector<IonSpecies> salt(double m = 1.0) {
  return {{1, m, AmountRole::Mass}, {-1, m, AmountRole::Mass}};
}

DomainSpec annulus(double gamma = 0.1) {
  return make_annulus(2, 1.0, 2.0, {gamma, 1.0}, {gamma, -1.0});
}

DomainSpec equal_areas() {
  DomainSpec d;
  d.dimension = 2;
  d.volume = 3 * pi;
  for (int k = 0; k < 2; ++k) {
    BoundaryComponent c;
    c.index = k;
    c.surface_area = 2 * pi;
    c.robin = {0.1, k == 0 ? 1.0 : -1.0};
    c.orientation = k == 0 ? Orientation::Outer : Orientation::Hole;
    d.components.push_back(c);
  }
  return d;
}

}  // namespace

TEST_CASE("annulus constants against the high-precision oracle") {
  auto t0 = std::chrono::steady_clock::now();
  auto c = ccpb_constants(annulus(), salt());
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(secs < 5.0);
  CHECK(c.phi0_star == doctest::Approx(0.31342077213908809).epsilon(1e-12));
  CHECK(c.u0[0] == doctest::Approx(0.96924456307997471).epsilon(1e-12));
  CHECK(c.u0[1] == doctest::Approx(-0.93848912615994941).epsilon(1e-12));
  CHECK(c.du0[0] == doctest::Approx(-0.30755436920025295).epsilon(1e-10));
  CHECK(c.du0[1] == doctest::Approx(0.6151087384005059).epsilon(1e-10));
  CHECK(c.energy[0] == doctest::Approx(0.099956673654664641).epsilon(1e-10));
  CHECK(c.energy[1] == doctest::Approx(0.37293229473164601).epsilon(1e-10));
  CHECK(c.mhat[0] == doctest::Approx(-0.89982383033842819).epsilon(1e-9));
  CHECK(c.mhat[1] == doctest::Approx(-0.89982383033842819).epsilon(1e-9));
  CHECK(c.q == doctest::Approx(-0.61064462027414106).epsilon(1e-9));
  for (double r : c.diag.boundary_residuals) CHECK(r <= 1e-10);
  CHECK(c.diag.flux_residual <= 1e-10);
  CHECK(c.diag.mhat_z_relative <= 1e-8);
  CHECK(c.diag.identity_relative <= 1e-8);
  CHECK(c.diag.residual_monotone);
  for (std::size_t k = 0; k < 2; ++k)
    CHECK(c.diag.energy_time[k] == doctest::Approx(c.energy[k]).epsilon(1e-8));
  CHECK(c.phi0_star > -1.0);
  CHECK(c.phi0_star < 1.0);
  CHECK((c.u0[0] - c.phi0_star) * (1.0 - c.u0[0]) > 0.0);
  CHECK((c.u0[1] - c.phi0_star) * (-1.0 - c.u0[1]) > 0.0);
}

TEST_CASE("Dirichlet limit") {
  auto c = ccpb_constants(annulus(0.0), salt());
  CHECK(c.phi0_star == doctest::Approx(0.31055009012619999).epsilon(1e-12));
  CHECK(c.q == doctest::Approx(-0.6326623753022473).epsilon(1e-9));
  CHECK(c.diag.identity_relative <= 1e-8);
}

TEST_CASE("symmetric configuration") {
  auto c = ccpb_constants(equal_areas(), salt());
  CHECK(std::abs(c.phi0_star) <= 1e-12);
  CHECK(c.u0[1] == doctest::Approx(-c.u0[0]).epsilon(1e-12));
  CHECK(c.u0[0] == doctest::Approx(0.95434957982462117).epsilon(1e-12));
  CHECK(c.energy[0] == doctest::Approx(0.21379099909838095).epsilon(1e-10));
  CHECK(c.mhat[0] == doctest::Approx(-0.67164423217109571).epsilon(1e-9));
  CHECK(c.mhat[1] == doctest::Approx(-0.67164423217109571).epsilon(1e-9));
  CHECK(std::abs(c.q) <= 1e-12);
}

TEST_CASE("rescaling invariance") {
  double lambda = 4.0;
  auto a = solve_phi0(annulus(0.1), salt());
  auto b = solve_phi0(annulus(0.1 / std::sqrt(lambda)), salt(lambda));
  CHECK(b.phi0_star == doctest::Approx(a.phi0_star).epsilon(1e-12));
  CHECK(b.u0[0] == doctest::Approx(a.u0[0]).epsilon(1e-12));
  CHECK(b.u0[1] == doctest::Approx(a.u0[1]).epsilon(1e-12));
}

TEST_CASE("input validation") {
  std::vector<IonSpecies> one{{1, 1, AmountRole::Mass}};
  try {
    solve_phi0(annulus(), one);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NeutralityViolated);
  }
  auto flat = make_annulus(2, 1.0, 2.0, {0.1, 1.0}, {0.1, 1.0});
  try {
    solve_phi0(flat, salt());
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AllBoundaryPotentialsEqual);
  }
}

TEST_CASE("mhat and Q degenerate inputs") {
  auto dom = annulus();
  std::vector<IonSpecies> sp = salt();
  auto f0 = make_f0(sp, dom.volume, 0.2);
  std::vector<Profile> u;
  for (const auto& c : dom.components) u.push_back(solve_u(f0, {c.robin.gamma, 0.2}));
  auto m = compute_mhat(dom, sp, u, 0.2);
  CHECK(m[0] == 0.0);
  CHECK(m[1] == 0.0);

  // F^_1 = 0 and no curvature: zero numerator
  DomainSpec flat = equal_areas();
  std::vector<double> zero{0, 0};
  auto fh = make_fhat1(sp, flat.volume, 0.0, zero);
  auto f00 = make_f0(sp, flat.volume, 0.0);
  std::vector<double> u0{0.9, -0.9}, du0, energy{0.2, 0.2};
  for (double x : u0) du0.push_back(initial_slope(f00, {0.1, x > 0 ? 1.0 : -1.0}, x));
  CHECK(compute_q(flat, f00, fh, u0, du0, energy) == 0.0);
}

TEST_CASE("bulk expansion") {
  CcpbConstants c;
  c.species = salt();
  c.volume = 3 * pi;
  c.mhat = {0.0, 0.0};
  auto b = bulk_expansion(c, 1e-4);
  CHECK(b[0].c0 == doctest::Approx(1.0 / (3 * pi)).epsilon(1e-15));
  CHECK(b[0].c1 == 0.0);
  CHECK(b[0].c_eps == b[0].c0);
  auto full = ccpb_constants(annulus(), salt());
  auto e = bulk_expansion(full, 1e-4);
  for (std::size_t i = 0; i < 2; ++i) {
    double z = full.species[i].valence;
    CHECK(e[i].c0 == doctest::Approx(std::exp(z * full.phi0_star) / (3 * pi)).epsilon(1e-14));
    // c = m / A to first order
    CHECK(e[i].a1 == doctest::Approx(-e[i].a0 * e[i].c1 / e[i].c0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(bulk_expansion(c, 0.0), Error);
}
