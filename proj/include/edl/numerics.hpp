#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace edl::num {

// expm1(x) - x, accurate for small |x|
double expm1_minus_x(double x);

inline double sign(double x) { return (x > 0.0) - (x < 0.0); }

// Bisection on a bracket with f(lo), f(hi) of opposite sign (or zero).
// Stops at width <= tol or when the midpoint no longer moves.
double bisect(const std::function<double(double)>& f, double lo, double hi, double tol);

// Cubic Hermite interpolant on [x0, x1].
std::pair<double, double> hermite(double x0, double x1, double y0, double y1, double d0,
                                  double d1, double x);

// Cumulative integral of y from x[0] using cubic Hermite data (exact for cubics).
std::vector<double> cumulative_hermite(std::span<const double> x, std::span<const double> y,
                                       std::span<const double> dy);

// Same, accumulated backwards from the last node: out[j] = tail + int_{x_j}^{x_n} y.
std::vector<double> cumulative_hermite_backward(std::span<const double> x,
                                                std::span<const double> y,
                                                std::span<const double> dy, double tail);

// Adaptive Gauss-Kronrod on [a, b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-13);

// n-point Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(std::size_t n);

// Tridiagonal solve; sub[0] and sup[n-1] are ignored. Overwrites rhs with the solution.
void thomas(std::vector<double> sub, std::vector<double> diag, std::vector<double> sup,
            std::vector<double>& rhs);

// Dense solve with partial pivoting (small systems). Overwrites b.
void dense_solve(std::vector<double> a, std::vector<double>& b, std::size_t n);

// t_j = T (1 - cos(pi j / (2 (n - 1)))), clustered at 0.
std::vector<double> half_chebyshev_grid(double t_max, std::size_t n);

// Least-squares line y = a + b x.
std::pair<double, double> fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace edl::num
