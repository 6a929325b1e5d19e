#include "reference_solvers.hpp"

#include "edl/numerics.hpp"

namespace edl::testing {

namespace {

std::vector<double> fd_solve(const std::function<double(double)>& a,
                             const std::function<double(double)>& b, double gamma, double y0,
                             double L, double yL, std::size_t n) {
  const double h = L / static_cast<double>(n);
  std::vector<double> sub(n + 1, 0.0), diag(n + 1, 0.0), sup(n + 1, 0.0), rhs(n + 1, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double t = h * static_cast<double>(j);
    sub[j] = 1.0 / (h * h);
    sup[j] = 1.0 / (h * h);
    diag[j] = -2.0 / (h * h) + a(t);
    rhs[j] = b(t);
  }
  // ghost value from y0 = y(0) - gamma (y1 - y_{-1}) / 2h
  if (gamma == 0.0) {
    diag[0] = 1.0;
    sup[0] = 0.0;
    rhs[0] = y0;
  } else {
    double g = 2.0 * h / gamma;  // y_{-1} = y1 - g (y0_node - y0)
    sup[0] = 2.0 / (h * h);
    diag[0] -= g / (h * h);
    rhs[0] -= g * y0 / (h * h);
  }
  sub[n] = 0.0;
  diag[n] = 1.0;
  rhs[n] = yL;
  num::thomas(sub, diag, sup, rhs);
  return rhs;
}

}  // namespace

LinearBvp solve_linear_bvp(const std::function<double(double)>& a,
                           const std::function<double(double)>& b, double gamma, double y0,
                           double L, double yL, std::size_t n) {
  auto coarse = fd_solve(a, b, gamma, y0, L, yL, n);
  auto fine = fd_solve(a, b, gamma, y0, L, yL, 2 * n);
  LinearBvp out;
  out.t.resize(n + 1);
  out.y.resize(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    out.t[j] = L * static_cast<double>(j) / static_cast<double>(n);
    out.y[j] = (4.0 * fine[2 * j] - coarse[j]) / 3.0;
  }
  return out;
}

}  // namespace edl::testing
