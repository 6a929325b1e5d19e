#include <doctest.h>

#include <cmath>
#include <numbers>

#include "edl/error.hpp"
#include "edl/format.hpp"
#include "edl/numerics.hpp"

using namespace edl;

TEST_CASE("expm1 minus x matches the series and the direct form") {
  CHECK(num::expm1_minus_x(0.0) == 0.0);
  CHECK(num::expm1_minus_x(1e-6) == doctest::Approx(5.000001666667e-13).epsilon(1e-12));
  CHECK(num::expm1_minus_x(2.0) == doctest::Approx(std::exp(2.0) - 3.0).epsilon(1e-15));
  CHECK(num::expm1_minus_x(-0.3) == doctest::Approx(std::exp(-0.3) - 1.0 + 0.3).epsilon(1e-14));
}

TEST_CASE("bisection converges to machine width") {
  double r = num::bisect([](double x) { return x * x - 2.0; }, 0.0, 2.0, 0.0);
  CHECK(std::abs(r - std::sqrt(2.0)) < 4e-16);
  CHECK_THROWS_AS(num::bisect([](double x) { return x * x + 1.0; }, 0.0, 1.0, 0.0), Error);
}

TEST_CASE("cumulative Hermite quadrature is exact for cubics") {
  std::vector<double> x{0.0, 0.3, 0.7, 1.5, 2.0};
  std::vector<double> y, dy;
  for (double s : x) {
    y.push_back(s * s * s - s);
    dy.push_back(3 * s * s - 1);
  }
  auto c = num::cumulative_hermite(x, y, dy);
  CHECK(c.back() == doctest::Approx(4.0 - 2.0).epsilon(1e-14));
  auto b = num::cumulative_hermite_backward(x, y, dy, 1.0);
  CHECK(b.front() == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("Gauss-Legendre and Kronrod integrate smooth functions") {
  const auto& g = num::gauss_legendre(5);
  double s = 0.0;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) s += g.weights[i] * std::pow(g.nodes[i], 8);
  CHECK(s == doctest::Approx(2.0 / 9.0).epsilon(1e-14));
  CHECK(num::integrate([](double x) { return std::exp(x); }, 0.0, 1.0) ==
        doctest::Approx(std::numbers::e - 1.0).epsilon(1e-15));
}

TEST_CASE("tridiagonal and dense solves") {
  std::vector<double> sub{0, -1, -1}, diag{2, 2, 2}, sup{-1, -1, 0}, rhs{1, 0, 1};
  num::thomas(sub, diag, sup, rhs);
  for (double v : rhs) CHECK(v == doctest::Approx(1.0));
  std::vector<double> a{0, 1, 1, 0}, b{2, 3};
  num::dense_solve(a, b, 2);
  CHECK(b[0] == doctest::Approx(3.0));
  CHECK(b[1] == doctest::Approx(2.0));
}

TEST_CASE("half-Chebyshev grid clusters at zero") {
  auto t = num::half_chebyshev_grid(10.0, 101);
  CHECK(t.front() == 0.0);
  CHECK(t.back() == 10.0);
  CHECK(t[1] - t[0] < t[100] - t[99]);
}

TEST_CASE("shortest round-trip formatting") {
  CHECK(shortest(0.1) == "0.1");
  CHECK(shortest(1e-300) == "1e-300");
  double x = 0.34657359027997264;
  CHECK(std::stod(shortest(x)) == x);
}
