#include "edl/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/legendre.hpp>

#include "edl/error.hpp"

namespace edl::num {

double expm1_minus_x(double x) {
  if (std::abs(x) < 0.5) {
    // x^2/2! + x^3/3! + ... ; 20 terms reach double precision for |x| < 0.5
    double term = x * x / 2.0;
    double sum = term;
    for (int k = 3; k < 24; ++k) {
      term *= x / k;
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  return std::expm1(x) - x;
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double tol) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (sign(flo) == sign(fhi)) fail(ErrorCode::BracketFailure, "no sign change on bracket");
  for (int it = 0; it < 400; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi || std::abs(hi - lo) <= tol) break;
    double fm = f(mid);
    if (fm == 0.0) return mid;
    if (sign(fm) == sign(flo)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::pair<double, double> hermite(double x0, double x1, double y0, double y1, double d0,
                                  double d1, double x) {
  double h = x1 - x0;
  double s = (x - x0) / h;
  double s2 = s * s;
  double s3 = s2 * s;
  double h00 = 2 * s3 - 3 * s2 + 1;
  double h10 = s3 - 2 * s2 + s;
  double h01 = -2 * s3 + 3 * s2;
  double h11 = s3 - s2;
  double value = h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
  double dh00 = (6 * s2 - 6 * s) / h;
  double dh10 = 3 * s2 - 4 * s + 1;
  double dh01 = (-6 * s2 + 6 * s) / h;
  double dh11 = 3 * s2 - 2 * s;
  double deriv = dh00 * y0 + dh10 * d0 + dh01 * y1 + dh11 * d1;
  return {value, deriv};
}

namespace {
inline double hermite_cell(double h, double y0, double y1, double d0, double d1) {
  return h * (y0 + y1) / 2.0 + h * h * (d0 - d1) / 12.0;
}
}  // namespace

std::vector<double> cumulative_hermite(std::span<const double> x, std::span<const double> y,
                                       std::span<const double> dy) {
  std::vector<double> out(x.size(), 0.0);
  for (std::size_t j = 1; j < x.size(); ++j)
    out[j] = out[j - 1] + hermite_cell(x[j] - x[j - 1], y[j - 1], y[j], dy[j - 1], dy[j]);
  return out;
}

std::vector<double> cumulative_hermite_backward(std::span<const double> x,
                                                std::span<const double> y,
                                                std::span<const double> dy, double tail) {
  std::vector<double> out(x.size(), 0.0);
  if (x.empty()) return out;
  out.back() = tail;
  for (std::size_t j = x.size() - 1; j-- > 0;)
    out[j] = out[j + 1] + hermite_cell(x[j + 1] - x[j], y[j], y[j + 1], dy[j], dy[j + 1]);
  return out;
}

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol) {
  if (a == b) return 0.0;
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 10, rel_tol,
                                                                       &err);
}

const GaussRule& gauss_legendre(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, GaussRule> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  GaussRule rule;
  auto zeros = boost::math::legendre_p_zeros<double>(static_cast<int>(n));
  // zeros holds the nonnegative roots
  std::vector<double> xs;
  for (double z : zeros) {
    xs.push_back(z);
    if (z != 0.0) xs.push_back(-z);
  }
  std::sort(xs.begin(), xs.end());
  for (double x : xs) {
    double dp = boost::math::legendre_p_prime<double>(static_cast<int>(n), x);
    rule.nodes.push_back(x);
    rule.weights.push_back(2.0 / ((1 - x * x) * dp * dp));
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

void thomas(std::vector<double> sub, std::vector<double> diag, std::vector<double> sup,
            std::vector<double>& rhs) {
  std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    double m = sub[i] / diag[i - 1];
    diag[i] -= m * sup[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - sup[i] * rhs[i + 1]) / diag[i];
}

void dense_solve(std::vector<double> a, std::vector<double>& b, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a[i * n + k]) > std::abs(a[p * n + k])) p = i;
    if (a[p * n + k] == 0.0) fail(ErrorCode::DegenerateDenominator, "singular dense system");
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[p * n + j]);
      std::swap(b[k], b[p]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      double m = a[i * n + k] / a[k * n + k];
      for (std::size_t j = k; j < n; ++j) a[i * n + j] -= m * a[k * n + j];
      b[i] -= m * b[k];
    }
  }
  for (std::size_t k = n; k-- > 0;) {
    double s = b[k];
    for (std::size_t j = k + 1; j < n; ++j) s -= a[k * n + j] * b[j];
    b[k] = s / a[k * n + k];
  }
}

std::vector<double> half_chebyshev_grid(double t_max, std::size_t n) {
  std::vector<double> t(n);
  for (std::size_t j = 0; j < n; ++j)
    t[j] = t_max * (1.0 - std::cos(std::numbers::pi * static_cast<double>(j) /
                                   (2.0 * static_cast<double>(n - 1))));
  t.front() = 0.0;
  t.back() = t_max;
  return t;
}

std::pair<double, double> fit_line(std::span<const double> x, std::span<const double> y) {
  double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  double b = sxx > 0 ? sxy / sxx : 0.0;
  return {my - b * mx, b};
}

}  // namespace edl::num
