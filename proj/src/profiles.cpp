#include "edl/profiles.hpp"

#include <algorithm>
#include <cmath>

#include "edl/error.hpp"
#include "edl/numerics.hpp"

namespace edl {

using num::sign;

const char* to_string(ProfileKind k) {
  switch (k) {
    case ProfileKind::U: return "u";
    case ProfileKind::V: return "v";
    case ProfileKind::W: return "w";
    case ProfileKind::Theta: return "theta";
  }
  return "?";
}

Profile::Profile(ProfileKind kind, std::vector<double> t, std::vector<double> value,
                 std::vector<double> deriv, TailModel tail, ProfileMetadata meta)
    : kind_(kind), t_(std::move(t)), value_(std::move(value)), deriv_(std::move(deriv)),
      tail_(tail), meta_(meta) {
  if (t_.size() < 2 || value_.size() != t_.size() || deriv_.size() != t_.size())
    fail(ErrorCode::InvalidArgument, "profile samples are inconsistent");
}

std::pair<double, double> Profile::eval(double t) const {
  if (t < 0.0 || std::isnan(t)) fail(ErrorCode::NegativeTime, "profile evaluated at t < 0");
  if (t > t_.back()) {
    double e = tail_.amplitude * std::exp(-tail_.rate * t);
    return {tail_.limit + e, -tail_.rate * e};
  }
  auto it = std::upper_bound(t_.begin(), t_.end(), t);
  std::size_t j = std::min<std::size_t>(static_cast<std::size_t>(it - t_.begin()), t_.size() - 1);
  if (j == 0) j = 1;
  std::size_t i = j - 1;
  if (t == t_[i]) return {value_[i], deriv_[i]};
  if (t == t_[j]) return {value_[j], deriv_[j]};
  return num::hermite(t_[i], t_[j], value_[i], value_[j], deriv_[i], deriv_[j], t);
}

namespace {

// U0 - reference, solving delta_bd - d = sgn * gamma * sqrt(-2F(d)) between 0 and delta_bd
double boundary_offset(const Nonlinearity& f, RobinData robin) {
  double dbd = robin.phi_bd - f.reference();
  if (dbd == 0.0 || robin.gamma == 0.0) return dbd;
  double s = sign(dbd);
  auto g = [&](double d) {
    return dbd - d - s * robin.gamma * std::sqrt(std::max(-2.0 * f.antiderivative_at_offset(d), 0.0));
  };
  double lo = 0.0, hi = dbd;
  if (!(sign(g(lo)) * sign(g(hi)) < 0.0))
    fail(ErrorCode::RootBracketFailure, "boundary relation has no sign change");
  return num::bisect(g, lo, hi, 0.0);
}

double slope_at_offset(const Nonlinearity& f, double dbd, double d0) {
  return -sign(dbd) * std::sqrt(std::max(-2.0 * f.antiderivative_at_offset(d0), 0.0));
}

// Least-squares fit of log|y - L| = log|c| - rate t over the last tenth of the samples.
TailModel fit_tail(std::span<const double> t, std::span<const double> y, double limit,
                   std::optional<double> fixed_rate) {
  std::size_t n = t.size();
  std::size_t start = n - std::max<std::size_t>(n / 10, 2);
  std::vector<double> xs, ys;
  double s = 0.0;
  for (std::size_t j = start; j < n; ++j) {
    double d = y[j] - limit;
    if (d == 0.0) continue;
    s = sign(d);
    xs.push_back(t[j]);
    ys.push_back(std::log(std::abs(d)));
  }
  TailModel tail;
  tail.limit = limit;
  tail.rate = fixed_rate.value_or(1.0);
  if (xs.size() < 2) return tail;
  if (fixed_rate) {
    double acc = 0.0;
    for (std::size_t j = 0; j < xs.size(); ++j) acc += ys[j] + *fixed_rate * xs[j];
    tail.amplitude = s * std::exp(acc / static_cast<double>(xs.size()));
  } else {
    auto [a, b] = num::fit_line(xs, ys);
    tail.rate = b < 0.0 ? -b : (fixed_rate ? *fixed_rate : 1.0);
    tail.amplitude = s * std::exp(a);
  }
  return tail;
}

Profile constant_profile(ProfileKind kind, double value, double rate, ProfileMetadata meta,
                         std::size_t n) {
  auto t = num::half_chebyshev_grid(1.0, std::max<std::size_t>(n, 5));
  std::vector<double> v(t.size(), value), d(t.size(), 0.0);
  return Profile(kind, std::move(t), std::move(v), std::move(d), TailModel{value, 0.0, rate}, meta);
}

double max_rate_on_hull(const Nonlinearity& f, double a, double b) {
  double lo = std::min(a, b), hi = std::max(a, b);
  double worst = 0.0;
  for (int j = 0; j <= 64; ++j) worst = std::min(worst, f.derivative(lo + (hi - lo) * j / 64.0));
  return std::sqrt(-worst);
}

}  // namespace

double solve_u0(const Nonlinearity& f, RobinData robin) {
  return f.reference() + boundary_offset(f, robin);
}

double initial_slope(const Nonlinearity& f, RobinData robin, double u0) {
  return slope_at_offset(f, robin.phi_bd - f.reference(), u0 - f.reference());
}

Profile solve_u(const Nonlinearity& f, RobinData robin, const ProfileOptions& opts) {
  if (!f.monotone_contract())
    fail(ErrorCode::UnsupportedProvenance, "u needs a decreasing nonlinearity");
  if (robin.gamma < 0.0) fail(ErrorCode::InvalidArgument, "gamma must be >= 0");
  if (opts.nodes < 5) fail(ErrorCode::GridTooCoarse, "at least 5 nodes required");
  const double ref = f.reference();
  const double mu = std::sqrt(-f.derivative(ref));
  ProfileMetadata meta;
  meta.gamma = robin.gamma;
  meta.phi_bd = robin.phi_bd;
  meta.reference = ref;
  const double dbd = robin.phi_bd - ref;
  if (dbd == 0.0) {
    meta.u0 = ref;
    return constant_profile(ProfileKind::U, ref, mu, meta, opts.nodes);
  }
  const double s = sign(dbd);
  const double d0 = boundary_offset(f, robin);
  const double p0 = slope_at_offset(f, dbd, d0);
  meta.u0 = ref + d0;
  meta.du0 = p0;
  meta.denominator = p0 + robin.gamma * f.value_at_offset(d0);

  const double m_f = decay_rate(f, std::min(ref, robin.phi_bd), std::max(ref, robin.phi_bd));
  const double h_max = 0.0025 / std::max(max_rate_on_hull(f, ref, robin.phi_bd), 1e-3);

  auto project = [&](double d) {
    return -s * std::sqrt(std::max(-2.0 * f.antiderivative_at_offset(d), 0.0));
  };
  auto rk4 = [&](double& d, double& p, double h) {
    auto acc = [&](double x) { return -f.value_at_offset(x); };
    double k1d = p, k1p = acc(d);
    double k2d = p + 0.5 * h * k1p, k2p = acc(d + 0.5 * h * k1d);
    double k3d = p + 0.5 * h * k2p, k3p = acc(d + 0.5 * h * k2d);
    double k4d = p + h * k3p, k4p = acc(d + h * k3d);
    d += h / 6.0 * (k1d + 2 * k2d + 2 * k3d + k4d);
    double p_rk = p + h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
    if (s * d <= 0.0) fail(ErrorCode::NonMonotoneTrajectory, "u crossed the reference potential");
    p = project(d);
    if (std::abs(p_rk - p) > 1e-4 * std::abs(p) + 1e-300)
      fail(ErrorCode::NonMonotoneTrajectory, "first-integral drift beyond tolerance");
  };

  // pass 1: locate T_max
  const double cap = opts.cap_factor / m_f;
  double t_max = cap;
  {
    double d = d0, p = p0, t = 0.0;
    const double target = opts.decay_threshold * std::abs(d0);
    while (t < cap) {
      double h = std::min(h_max, cap - t);
      rk4(d, p, h);
      t += h;
      if (std::abs(d) < target) {
        t_max = t;
        break;
      }
    }
  }

  // pass 2: march over the clustered grid
  auto t = num::half_chebyshev_grid(t_max, opts.nodes);
  std::vector<double> off(t.size()), val(t.size()), der(t.size());
  double d = d0, p = p0;
  off[0] = d;
  der[0] = p;
  for (std::size_t j = 1; j < t.size(); ++j) {
    double span = t[j] - t[j - 1];
    int steps = std::max(1, static_cast<int>(std::ceil(span / h_max)));
    double h = span / steps;
    for (int k = 0; k < steps; ++k) rk4(d, p, h);
    off[j] = d;
    der[j] = p;
  }
  for (std::size_t j = 0; j < t.size(); ++j) val[j] = ref + off[j];
  TailModel tail = fit_tail(t, off, 0.0, mu);
  tail.limit = ref;
  return Profile(ProfileKind::U, std::move(t), std::move(val), std::move(der), tail, meta);
}

double energy_potential_space(const Nonlinearity& f, double u0) {
  double d0 = u0 - f.reference();
  if (d0 == 0.0) return 0.0;
  double s = sign(d0);
  auto g = [&](double x) {
    return std::sqrt(std::max(-2.0 * f.antiderivative_at_offset(s * x), 0.0));
  };
  return num::integrate(g, 0.0, std::abs(d0), 1e-14);
}

namespace {

// I(t) = int_t^inf u'^2, backward from the closed-form tail value.
std::vector<double> tail_energy(const Profile& u, const Nonlinearity& f) {
  auto t = u.t();
  auto p = u.derivatives();
  auto val = u.values();
  std::vector<double> y(t.size()), dy(t.size());
  for (std::size_t j = 0; j < t.size(); ++j) {
    y[j] = p[j] * p[j];
    dy[j] = -2.0 * p[j] * f.value(val[j]);
  }
  const auto& tail = u.tail();
  double e = tail.amplitude * std::exp(-tail.rate * t.back());
  double start = tail.rate * e * e / 2.0;
  return num::cumulative_hermite_backward(t, y, dy, start);
}

bool is_constant(const Profile& u) { return u.metadata().du0 == 0.0; }

std::optional<double> locate_extremum(std::span<const double> t, std::span<const double> v,
                                      std::span<const double> dv, std::span<const double> d2v) {
  for (std::size_t j = 0; j + 1 < t.size(); ++j) {
    if (dv[j] == 0.0 && j > 0) return t[j];
    if (sign(dv[j]) * sign(dv[j + 1]) < 0.0) {
      auto slope = [&](double x) {
        return num::hermite(t[j], t[j + 1], dv[j], dv[j + 1], d2v[j], d2v[j + 1], x).first;
      };
      (void)v;
      return num::bisect(slope, t[j], t[j + 1], 0.0);
    }
  }
  return std::nullopt;
}

}  // namespace

double energy_time_space(const Profile& u, const Nonlinearity& f) {
  if (is_constant(u)) return 0.0;
  return tail_energy(u, f).front();
}

Profile solve_v(const Profile& u, const Nonlinearity& f, RobinData robin) {
  ProfileMetadata meta = u.metadata();
  if (is_constant(u)) return constant_profile(ProfileKind::V, 0.0, u.tail().rate, meta, u.size());
  auto t = u.t();
  auto p = u.derivatives();
  auto val = u.values();
  const std::size_t n = t.size();
  auto I = tail_energy(u, f);
  const double p0 = p[0];
  const double D = p0 + robin.gamma * f.value(val[0]);
  if (!(std::abs(D) > 1e-300) || sign(D) != sign(p0))
    fail(ErrorCode::DenominatorNearZero, "U'(0) + gamma f(U0) vanishes");
  std::vector<double> fu(n), q(n), dq(n);
  for (std::size_t j = 0; j < n; ++j) {
    fu[j] = f.value(val[j]);
    q[j] = I[j] / (p[j] * p[j]);
    dq[j] = -1.0 + 2.0 * I[j] * fu[j] / (p[j] * p[j] * p[j]);
  }
  auto J = num::cumulative_hermite(t, q, dq);
  const double V0 = -robin.gamma * I[0] / D;
  std::vector<double> v(n), dv(n), d2v(n);
  for (std::size_t j = 0; j < n; ++j) {
    double a = V0 / p0 - J[j];
    v[j] = p[j] * a;
    dv[j] = -fu[j] * a - I[j] / p[j];
    d2v[j] = p[j] - f.derivative(val[j]) * v[j];
  }
  meta.v0 = V0;
  meta.denominator = D;
  meta.energy = I[0];
  meta.t_star = locate_extremum(t, v, dv, d2v);
  TailModel tail = fit_tail(t, v, 0.0, std::nullopt);
  std::vector<double> tt(t.begin(), t.end());
  return Profile(ProfileKind::V, std::move(tt), std::move(v), std::move(dv), tail, meta);
}

Profile solve_theta(const Profile& u, const Nonlinearity& f0, RobinData robin) {
  ProfileMetadata meta = u.metadata();
  if (is_constant(u)) return constant_profile(ProfileKind::Theta, 1.0, u.tail().rate, meta, u.size());
  auto t = u.t();
  auto p = u.derivatives();
  auto val = u.values();
  const double D = p[0] + robin.gamma * f0.value(val[0]);
  if (!(std::abs(D) > 1e-300))
    fail(ErrorCode::DenominatorNearZero, "U'(0) + gamma f0(U0) vanishes");
  std::vector<double> th(t.size()), dth(t.size());
  for (std::size_t j = 0; j < t.size(); ++j) {
    th[j] = 1.0 - p[j] / D;
    dth[j] = f0.value(val[j]) / D;
  }
  meta.denominator = D;
  const auto& ut = u.tail();
  TailModel tail{1.0, ut.rate * (ut.amplitude) / D, ut.rate};
  std::vector<double> tt(t.begin(), t.end());
  return Profile(ProfileKind::Theta, std::move(tt), std::move(th), std::move(dth), tail, meta);
}

Profile solve_w(const Profile& u, const Nonlinearity& f0, const Nonlinearity& f1, double q,
                RobinData robin) {
  if (f1.provenance() != Provenance::F1 || f1.reference() != f0.reference())
    fail(ErrorCode::MismatchedReference, "f1 must be built from this f0");
  ProfileMetadata meta = u.metadata();
  meta.q = q;
  const double ref = f0.reference();
  auto fhat1 = [&](double phi) { return f1.value(phi) + q * f0.derivative(phi); };
  auto Fhat1 = [&](double phi) { return f1.antiderivative(phi) + q * f0.value(phi); };
  if (is_constant(u)) {
    double limit = q - fhat1(ref) / f0.derivative(ref);
    meta.w0 = limit;
    return constant_profile(ProfileKind::W, limit, u.tail().rate, meta, u.size());
  }
  auto t = u.t();
  auto p = u.derivatives();
  auto val = u.values();
  const std::size_t n = t.size();
  const double p0 = p[0];
  const double D = p0 + robin.gamma * f0.value(val[0]);
  if (!(std::abs(D) > 1e-300))
    fail(ErrorCode::DenominatorNearZero, "U'(0) + gamma f0(U0) vanishes");
  const double w0 = -robin.gamma * f1.antiderivative(val[0]) / D;
  std::vector<double> fu(n), Fh(n), k(n), dk(n);
  for (std::size_t j = 0; j < n; ++j) {
    fu[j] = f0.value(val[j]);
    Fh[j] = Fhat1(val[j]);
    double p2 = p[j] * p[j];
    k[j] = -Fh[j] / p2;
    dk[j] = -fhat1(val[j]) / p[j] - 2.0 * Fh[j] * fu[j] / (p2 * p[j]);
  }
  auto K = num::cumulative_hermite(t, k, dk);
  std::vector<double> w(n), dw(n);
  const double c = (w0 - q) / p0;
  for (std::size_t j = 0; j < n; ++j) {
    w[j] = q + p[j] * (c + K[j]);
    dw[j] = -fu[j] * (c + K[j]) - Fh[j] / p[j];
  }
  w[0] = w0;
  meta.w0 = w0;
  meta.denominator = D;
  TailModel tail = fit_tail(t, w, q, std::nullopt);
  std::vector<double> tt(t.begin(), t.end());
  return Profile(ProfileKind::W, std::move(tt), std::move(w), std::move(dw), tail, meta);
}

EquationSpec u_equation(const Nonlinearity& f) {
  return {"u'' = -f(u)", [f](double, double y) { return -f.value(y); }};
}

EquationSpec v_equation(const Profile& u, const Nonlinearity& f) {
  return {"v'' + f'(u) v = u'", [u, f](double t, double y) {
            auto [uv, ud] = u.eval(t);
            return ud - f.derivative(uv) * y;
          }};
}

EquationSpec theta_equation(const Profile& u, const Nonlinearity& f0) {
  return {"theta'' + f0'(u) theta = f0'(u)", [u, f0](double t, double y) {
            return f0.derivative(u.value(t)) * (1.0 - y);
          }};
}

EquationSpec w_equation(const Profile& u, const Nonlinearity& f0, const Nonlinearity& f1) {
  return {"w'' + f0'(u) w = -f1(u)", [u, f0, f1](double t, double y) {
            double uv = u.value(t);
            return -f1.value(uv) - f0.derivative(uv) * y;
          }};
}

double ode_residual(const Profile& p, const EquationSpec& eq) {
  auto t = p.t();
  auto y = p.values();
  auto dy = p.derivatives();
  const std::size_t n = t.size();
  if (n < 5) fail(ErrorCode::GridTooCoarse, "ode_residual needs >= 5 nodes");
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    // y'' from the five-point interpolant of the stored y' (fourth order on the
    // clustered grid; differencing values instead loses ~1e-16 |y| / h^2 near t = 0)
    std::size_t lo = std::clamp<std::size_t>(i, 2, n - 3) - 2;
    double d2 = 0.0;
    for (std::size_t k = lo; k < lo + 5; ++k) {
      double wk = 0.0;
      for (std::size_t m = lo; m < lo + 5; ++m) {
        if (m == k) continue;
        double term = 1.0 / (t[k] - t[m]);
        for (std::size_t l = lo; l < lo + 5; ++l)
          if (l != k && l != m) term *= (t[i] - t[l]) / (t[k] - t[l]);
        wk += term;
      }
      d2 += wk * dy[k];
    }
    worst = std::max(worst, std::abs(d2 - eq.second_derivative(t[i], y[i])));
  }
  return worst;
}

}  // namespace edl
