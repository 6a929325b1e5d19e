#include <doctest.h>

#include <cmath>
#include <vector>

#include "edl/error.hpp"
#include "edl/nonlinearity.hpp"
#include "edl/numerics.hpp"

using namespace edl;

namespace {
std::vector<IonSpecies> salt(double z1, double c1, double z2, double c2,
                             AmountRole role = AmountRole::Concentration) {
  return {{z1, c1, role}, {z2, c2, role}};
}
}  // namespace

TEST_CASE("classical symmetric salt is -2 sinh") {
  auto f = make_classical_pb(salt(1, 1, -1, 1));
  CHECK(f.reference() == 0.0);
  for (double x : {-3.0, -0.5, 0.0, 0.2, 2.5}) {
    CHECK(f(x) == doctest::Approx(-2 * std::sinh(x)).epsilon(1e-14));
    CHECK(f.derivative(x) == doctest::Approx(-2 * std::cosh(x)).epsilon(1e-14));
    CHECK(f.antiderivative(x) == doctest::Approx(-2 * (std::cosh(x) - 1)).epsilon(1e-13));
  }
  CHECK(f.provenance() == Provenance::Classical);
}

TEST_CASE("reference potentials of the classical examples") {
  CHECK(std::abs(make_classical_pb(salt(2, 1, -1, 2)).reference()) < 1e-13);
  auto f = make_classical_pb(salt(1, 2, -1, 1));
  CHECK(f.reference() == doctest::Approx(0.34657359027997265).epsilon(1e-14));
  CHECK(std::abs(f(f.reference())) < 1e-15);
  CHECK(find_reference_potential(f) == f.reference());
}

TEST_CASE("same-sign valences have no reference potential") {
  CHECK_THROWS_AS(make_classical_pb(salt(1, 1, 2, 1)), Error);
  try {
    make_classical_pb(salt(-1, 1, -2, 1));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AllSameSignValences);
  }
  CHECK_THROWS_AS(make_classical_pb(std::vector<IonSpecies>{}), Error);
}

TEST_CASE("F equals adaptive quadrature of f and is negative away from phi*") {
  auto f = make_classical_pb(salt(1, 2, -1, 1));
  double ref = f.reference();
  for (int j = -20; j <= 20; ++j) {
    double x = ref + 0.25 * j;
    double quad = num::integrate([&](double s) { return f(s); }, ref, x, 1e-15);
    CHECK(f.antiderivative(x) == doctest::Approx(quad).epsilon(1e-10));
    if (j != 0) CHECK(f.antiderivative(x) < 0.0);
  }
  CHECK(f.antiderivative(ref) == 0.0);
}

TEST_CASE("overflowing arguments stay finite") {
  auto f = make_classical_pb(salt(1, 1, -1, 1));
  CHECK(std::isfinite(f(800.0)));
  CHECK(f(800.0) < 0.0);
  CHECK(std::isfinite(f.derivative(-900.0)));
  CHECK(f(50.0) == doctest::Approx(-2 * std::sinh(50.0)).epsilon(1e-13));
}

TEST_CASE("f0 construction") {
  auto sp = salt(1, 1, -1, 1, AmountRole::Mass);
  auto f0 = make_f0(sp, 1.0, 0.0);
  CHECK(f0(0.7) == doctest::Approx(-2 * std::sinh(0.7)).epsilon(1e-14));
  CHECK(make_f0(sp, 1.0, 0.5)(0.5) == 0.0);
  CHECK(f0.derivative(0.0) == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK_THROWS_AS(make_f0(salt(1, 1, -1, 2, AmountRole::Mass), 1.0, 0.0), Error);
  CHECK_THROWS_AS(make_f0(sp, 0.0, 0.0), Error);
}

TEST_CASE("fhat1 and f1") {
  auto sp = salt(1, 1, -1, 1, AmountRole::Mass);
  std::vector<double> zero{0.0, 0.0};
  auto z = make_fhat1(sp, 1.0, 0.0, zero);
  CHECK(z(0.3) == 0.0);
  CHECK(z.antiderivative(0.3) == 0.0);
  std::vector<double> mhat{1.0, 1.0};
  auto fh = make_fhat1(sp, 1.0, 0.0, mhat);
  CHECK(fh(0.0) == 0.0);
  for (double x : {-1.0, 0.4, 2.0})
    CHECK(fh.antiderivative(x) == doctest::Approx(2 - std::exp(-x) - std::exp(x)).epsilon(1e-14));
  CHECK_THROWS_AS(find_reference_potential(fh), Error);

  auto f0 = make_f0(sp, 1.0, 0.0);
  auto f1 = make_f1(f0, fh, 1.0);
  CHECK(f1(0.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(make_f1(f0, fh, 0.0)(0.8) == doctest::Approx(fh(0.8)).epsilon(1e-15));
  auto f1z = make_f1(f0, z, 1.0);
  CHECK(f1z(0.0) == doctest::Approx(-f0.derivative(0.0)).epsilon(1e-15));
  CHECK(f1z(0.0) > 0.0);
  for (double x : {-0.7, 0.1, 1.3})
    CHECK(f1.derivative(x) ==
          doctest::Approx((f1(x + 1e-6) - f1(x - 1e-6)) / 2e-6).epsilon(1e-8));
  auto shifted = make_fhat1(sp, 1.0, 0.1, mhat);
  try {
    make_f1(f0, shifted, 1.0);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MismatchedReference);
  }
}

TEST_CASE("decay rate") {
  auto f = make_classical_pb(salt(1, 1, -1, 1));
  CHECK(decay_rate(f, -1, 1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(decay_rate(f, 1, 2) == doctest::Approx(1.7567473550942058).epsilon(1e-14));
  CHECK(decay_rate(f, 0.7, 0.7) == doctest::Approx(std::sqrt(2 * std::cosh(0.7))).epsilon(1e-15));
  CHECK(decay_rate(f, -0.5, 0.5) >= decay_rate(f, -2.0, 2.0));
  auto g = make_custom([](double x) { return x * x; }, [](double x) { return 2 * x; }, {}, 0.0);
  CHECK_THROWS_AS(decay_rate(g, -1, 1), Error);
  CHECK_THROWS_AS(decay_rate(f, 1, -1), Error);
}

TEST_CASE("custom nonlinearity finds its zero and integrates F") {
  auto f = make_custom([](double x) { return -x * x * x - x + 1.0; },
                       [](double x) { return -3 * x * x - 1.0; });
  double r = f.reference();
  CHECK(std::abs(-r * r * r - r + 1.0) < 1e-14);
  double x = r + 0.8;
  double exact = -(std::pow(x, 4) - std::pow(r, 4)) / 4 - (x * x - r * r) / 2 + (x - r);
  CHECK(f.antiderivative(x) == doctest::Approx(exact).epsilon(1e-12));
  CHECK(sampled_decreasing(f, -3, 3));
  auto inc = make_custom([](double x) { return std::exp(x) - std::exp(-x); },
                         [](double x) { return std::exp(x) + std::exp(-x); });
  CHECK_FALSE(sampled_decreasing(inc, -1, 1));
  CHECK_THROWS_AS(make_custom([](double) { return 1.0; }, [](double) { return 0.0; }), Error);
}

TEST_CASE("neutrality defect") {
  CHECK(neutrality_defect(salt(1, 1, -1, 1)) == 0.0);
  CHECK(neutrality_defect(salt(2, 1, -1, 1)) == doctest::Approx(1.0 / 3.0));
}
