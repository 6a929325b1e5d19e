#include "edl/radial_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include <json.hpp>

#include "edl/error.hpp"
#include "edl/format.hpp"
#include "edl/numerics.hpp"

namespace edl {

namespace {

// Boundary-graded radial grid with node-centred finite-volume cells.
struct Grid {
  int d = 2;
  double a = 0.0;  // inner radius (0 with a centre)
  double R = 1.0;
  bool center = true;
  std::vector<double> r;
  std::vector<double> V;  // radial measure of cell j (without |S^{d-1}|)
  std::vector<double> c;  // r_{j+1/2}^{d-1} / (r_{j+1} - r_j), size N
};

struct Wall {
  double gamma = 0.0;
  double phi_bd = 0.0;
};

struct Bc {
  std::optional<Wall> inner;  // empty: symmetry centre
  Wall outer;
};

double pw(double x, int k) {
  double y = 1.0;
  for (int i = 0; i < k; ++i) y *= x;
  return y;
}

Grid build_grid(int d, double a, double R, bool center, double eps, const RadialGridOptions& o,
                int refine) {
  const double se = std::sqrt(eps);
  const double delta0 = o.cluster_width * se;
  const double h_wall = o.wall_spacing * se;
  Grid g;
  g.d = d;
  g.a = a;
  g.R = R;
  g.center = center;
  std::size_t n = 0;
  std::function<double(double)> map;
  if (center) {
    // distance to the wall: delta0 (e^{kappa sigma} - 1), sigma = 1 - s
    double kappa = std::log1p(R / delta0);
    double slope = delta0 * kappa;
    n = static_cast<std::size_t>(std::ceil(slope / h_wall));
    n = std::max<std::size_t>(n, static_cast<std::size_t>(std::ceil(256.0 * (1 + delta0 / R) * kappa)));
    map = [=](double s) { return R - delta0 * std::expm1(kappa * (1.0 - s)); };
  } else {
    double L = R - a;
    double kappa = std::max(std::log(L / delta0), 0.5);
    double th = std::tanh(kappa / 2);
    double slope = L * kappa * (1 - th * th) / (2 * th);
    n = static_cast<std::size_t>(std::ceil(slope / h_wall));
    n = std::max<std::size_t>(n, 256);
    map = [=](double s) { return a + L * 0.5 * (1.0 + std::tanh(kappa * (s - 0.5)) / th); };
  }
  n *= static_cast<std::size_t>(refine);
  g.r.resize(n + 1);
  for (std::size_t j = 0; j <= n; ++j) g.r[j] = map(static_cast<double>(j) / static_cast<double>(n));
  g.r.front() = center ? 0.0 : a;
  g.r.back() = R;
  g.V.assign(n + 1, 0.0);
  g.c.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double rf = 0.5 * (g.r[j] + g.r[j + 1]);
    g.c[j] = pw(rf, d - 1) / (g.r[j + 1] - g.r[j]);
    double shell = (pw(rf, d) - pw(j == 0 ? g.r[0] : 0.5 * (g.r[j - 1] + g.r[j]), d)) / d;
    g.V[j] = shell;
  }
  g.V[n] = (pw(R, d) - pw(0.5 * (g.r[n - 1] + g.r[n]), d)) / d;
  // layer resolution: at least 8 nodes within sqrt(eps) of every wall
  auto count = [&](auto pred) { return std::count_if(g.r.begin(), g.r.end(), pred); };
  if (count([&](double x) { return R - x <= se; }) < 8 ||
      (!center && count([&](double x) { return x - a <= se; }) < 8))
    fail(ErrorCode::GridTooCoarse, "fewer than 8 nodes per sqrt(eps) layer");
  return g;
}

// Local charge density and its derivative at each node.
using Source = std::function<void(std::span<const double> phi, std::vector<double>& s,
                                  std::vector<double>& ds)>;

struct Residual {
  std::vector<double> R;
  double interior = 0.0;   // max_j |R_j| / V_j over flux-balance rows
  double dirichlet = 0.0;  // max |phi - phi_bd| over Dirichlet rows
  double scale = 0.0;      // max_j of the term magnitudes per unit volume
  double merit = 0.0;      // sum R_j^2 / V_j over flux-balance rows
  double dmerit = 0.0;     // sum of squared Dirichlet rows

  double norm() const { return std::max(interior / std::max(scale, 1e-300), dirichlet); }
  double weighted(double ref) const { return merit / std::max(ref * ref, 1e-300) + dmerit; }
};

double wall_flux_out(const Grid& g, const Wall& w, double phiN, double se) {
  return pw(g.R, g.d - 1) * (w.phi_bd - phiN) / (w.gamma * se);
}
double wall_flux_in(const Grid& g, const Wall& w, double phi0, double se) {
  return pw(g.a, g.d - 1) * (phi0 - w.phi_bd) / (w.gamma * se);
}

// Row j: eps (G_{j+1/2} - G_{j-1/2}) + V_j s_j; Dirichlet walls replace their row.
Residual residual(const Grid& g, const Bc& bc, double eps, std::span<const double> phi,
                  std::span<const double> s) {
  const std::size_t n = g.r.size() - 1;
  const double se = std::sqrt(eps);
  Residual out;
  out.R.assign(n + 1, 0.0);
  std::vector<double> G(n + 2, 0.0);  // G[j] = flux at face j - 1/2
  for (std::size_t j = 0; j < n; ++j) G[j + 1] = g.c[j] * (phi[j + 1] - phi[j]);
  if (bc.inner && bc.inner->gamma > 0.0) G[0] = wall_flux_in(g, *bc.inner, phi[0], se);
  if (bc.outer.gamma > 0.0) G[n + 1] = wall_flux_out(g, bc.outer, phi[n], se);
  bool dir_in = bc.inner && bc.inner->gamma == 0.0;
  bool dir_out = bc.outer.gamma == 0.0;
  for (std::size_t j = 0; j <= n; ++j) {
    if ((j == 0 && dir_in) || (j == n && dir_out)) {
      double w = j == 0 ? bc.inner->phi_bd : bc.outer.phi_bd;
      out.R[j] = phi[j] - w;
      out.dirichlet = std::max(out.dirichlet, std::abs(out.R[j]));
      out.dmerit += out.R[j] * out.R[j];
      continue;
    }
    out.R[j] = eps * (G[j + 1] - G[j]) + g.V[j] * s[j];
    double mag = (eps * (std::abs(G[j + 1]) + std::abs(G[j]))) / g.V[j] + std::abs(s[j]);
    out.scale = std::max(out.scale, mag);
    out.interior = std::max(out.interior, std::abs(out.R[j]) / g.V[j]);
    out.merit += out.R[j] * out.R[j] / g.V[j];
  }
  return out;
}

struct Tridiag {
  std::vector<double> sub, diag, sup;
};

Tridiag jacobian(const Grid& g, const Bc& bc, double eps, std::span<const double> ds) {
  const std::size_t n = g.r.size() - 1;
  const double se = std::sqrt(eps);
  Tridiag J{std::vector<double>(n + 1, 0.0), std::vector<double>(n + 1, 0.0),
            std::vector<double>(n + 1, 0.0)};
  for (std::size_t j = 0; j <= n; ++j) {
    if (j < n) {
      J.sup[j] += eps * g.c[j];
      J.diag[j] -= eps * g.c[j];
    }
    if (j > 0) {
      J.sub[j] += eps * g.c[j - 1];
      J.diag[j] -= eps * g.c[j - 1];
    }
    J.diag[j] += g.V[j] * ds[j];
  }
  if (bc.inner) {
    if (bc.inner->gamma > 0.0) {
      J.diag[0] -= eps * pw(g.a, g.d - 1) / (bc.inner->gamma * se);
    } else {
      J.diag[0] = 1.0;
      J.sup[0] = 0.0;
    }
  }
  if (bc.outer.gamma > 0.0) {
    J.diag[n] -= eps * pw(g.R, g.d - 1) / (bc.outer.gamma * se);
  } else {
    J.diag[n] = 1.0;
    J.sub[n] = 0.0;
  }
  return J;
}

struct NewtonStats {
  int iterations = 0;
  double norm = 0.0;
  double scale = 0.0;
  std::vector<int> damping;
};

// Damped Newton with halving line search on the weighted residual.
// Extra unknowns (CCPB integrals) are handled through the bordered callbacks.
struct Bordered {
  std::size_t m = 0;
  double reference = 0.0;       // bulk value, for the node-wise step test
  double absolute_floor = 0.0;  // roundoff level of the global unknowns
  // fill source values given phi and extras
  std::function<void(std::span<const double> phi, std::span<const double> x, std::vector<double>& s,
                     std::vector<double>& ds)>
      source;
  // extra residuals G(phi, x) (relative units)
  std::function<std::vector<double>(std::span<const double> phi, std::span<const double> x)> extra;
  // Newton correction for the extras given the phi-residual, tridiagonal solver and x
  std::function<void(const Grid&, const Tridiag&, std::span<const double> phi,
                     std::span<const double> x, const std::vector<double>& R,
                     std::vector<double>& dphi, std::vector<double>& dx)>
      solve;
};

double combined_norm(const Residual& res, const std::vector<double>& ex) {
  double e = 0.0;
  for (double v : ex) e = std::max(e, std::abs(v));
  return std::max(res.norm(), e);
}

double combined_merit(const Residual& res, const std::vector<double>& ex, double ref) {
  double e = 0.0;
  for (double v : ex) e += v * v;
  return res.weighted(ref) + e;
}

void newton(const Grid& g, const Bc& bc, double eps, std::vector<double>& phi,
            std::vector<double>& x, const Bordered& sys, const RadialGridOptions& o,
            NewtonStats& st) {
  const std::size_t n = phi.size();
  std::vector<double> s(n), ds(n);
  auto evaluate = [&](std::span<const double> p, std::span<const double> xx, Residual& res,
                      std::vector<double>& ex) {
    sys.source(p, xx, s, ds);
    res = residual(g, bc, eps, p, s);
    ex = sys.extra ? sys.extra(p, xx) : std::vector<double>{};
  };
  Residual res;
  std::vector<double> ex;
  evaluate(phi, x, res, ex);
  st = NewtonStats{};
  bool settled = false;
  for (int it = 0; it <= o.max_newton; ++it) {
    double norm = combined_norm(res, ex);
    st.norm = norm;
    st.scale = res.scale;
    // the residual scale is set by the wall rows, so also insist on a settled update
    if (norm == 0.0 || (norm <= o.tolerance && settled)) return;
    if (it == o.max_newton) break;
    sys.source(phi, x, s, ds);
    Tridiag J = jacobian(g, bc, eps, ds);
    std::vector<double> dphi, dx;
    sys.solve(g, J, phi, x, res.R, dphi, dx);
    double lambda = 1.0;
    int halvings = 0;
    std::vector<double> trial(n), xt(x.size());
    Residual rt;
    std::vector<double> et;
    bool accepted = false;
    for (; halvings <= 8; ++halvings, lambda *= 0.5) {
      for (std::size_t j = 0; j < n; ++j) trial[j] = phi[j] + lambda * dphi[j];
      for (std::size_t i = 0; i < x.size(); ++i) xt[i] = x[i] + lambda * dx[i];
      evaluate(trial, xt, rt, et);
      double ref = std::max(res.scale, rt.scale);
      double m = combined_merit(rt, et, ref), merit0 = combined_merit(res, ex, ref);
      if (std::isfinite(m) && (m < merit0 || combined_norm(rt, et) <= o.tolerance)) {
        accepted = true;
        break;
      }
    }
    st.damping.push_back(halvings);
    ++st.iterations;
    if (!accepted) {
      // at the roundoff floor a full step cannot reduce the merit any further
      if (norm <= o.tolerance) return;
      fail(ErrorCode::NewtonDivergence,
           "line search failed after 8 halvings at iteration " + std::to_string(it) +
               ", scaled residual " + shortest(norm));
    }
    // node-wise: deep in the bulk phi - phi* is tiny and must still be resolved relatively
    settled = true;
    for (std::size_t j = 0; j < n && settled; ++j) {
      double allowed = o.step_tolerance * std::max(std::abs(trial[j] - sys.reference), 1e-280) +
                       sys.absolute_floor +
                       4.0 * std::numeric_limits<double>::epsilon() * std::abs(trial[j]);
      settled = std::abs(trial[j] - phi[j]) <= allowed;
    }
    for (std::size_t i = 0; i < x.size() && settled; ++i)
      settled = std::abs(xt[i] - x[i]) <= o.step_tolerance * std::abs(xt[i]);
    phi.swap(trial);
    x.swap(xt);
    res = std::move(rt);
    ex = std::move(et);
  }
  if (st.norm > o.tolerance)
    fail(ErrorCode::NewtonDivergence, "no convergence in " + std::to_string(o.max_newton) +
                                          " Newton steps, scaled residual " + shortest(st.norm));
}

Bordered pb_system(const std::function<double(double)>& f, const std::function<double(double)>& df) {
  Bordered b;
  b.source = [f, df](std::span<const double> phi, std::span<const double>, std::vector<double>& s,
                     std::vector<double>& ds) {
    for (std::size_t j = 0; j < phi.size(); ++j) {
      s[j] = f(phi[j]);
      ds[j] = df(phi[j]);
    }
  };
  b.solve = [](const Grid&, const Tridiag& J, std::span<const double>, std::span<const double>,
               const std::vector<double>& R, std::vector<double>& dphi, std::vector<double>& dx) {
    dphi.resize(R.size());
    for (std::size_t j = 0; j < R.size(); ++j) dphi[j] = -R[j];
    num::thomas(J.sub, J.diag, J.sup, dphi);
    dx.clear();
  };
  return b;
}

double clamp_exp(double x) { return std::exp(std::min(x, 700.0)); }

Bordered ccpb_system(const Grid& grid, const Bc& bc, double eps, std::vector<IonSpecies> sp) {
  const double Sd = unit_sphere_area(grid.d);
  Bordered b;
  b.m = sp.size();
  b.source = [sp](std::span<const double> phi, std::span<const double> A, std::vector<double>& s,
                  std::vector<double>& ds) {
    for (std::size_t j = 0; j < phi.size(); ++j) {
      double v = 0.0, dv = 0.0;
      for (std::size_t i = 0; i < sp.size(); ++i) {
        double e = clamp_exp(-sp[i].valence * phi[j]) / A[i];
        v += sp[i].amount * sp[i].valence * e;
        dv -= sp[i].amount * sp[i].valence * sp[i].valence * e;
      }
      s[j] = v;
      ds[j] = dv;
    }
  };
  b.extra = [sp, &grid, Sd](std::span<const double> phi, std::span<const double> A) {
    std::vector<double> G(sp.size());
    for (std::size_t i = 0; i < sp.size(); ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < phi.size(); ++j)
        acc += grid.V[j] * clamp_exp(-sp[i].valence * phi[j]);
      G[i] = (A[i] - Sd * acc) / A[i];
    }
    return G;
  };
  b.solve = [sp, Sd, &bc, eps](const Grid& g, const Tridiag& J, std::span<const double> phi,
                               std::span<const double> A, const std::vector<double>& R,
                               std::vector<double>& dphi, std::vector<double>& dA) {
    (void)eps;
    const std::size_t n = phi.size(), m = sp.size();
    bool dir_in = bc.inner && bc.inner->gamma == 0.0;
    bool dir_out = bc.outer.gamma == 0.0;
    // T y = -R ; T Y_i = B_i with B_{j,i} = dR_j / dA_i
    std::vector<double> y(n);
    for (std::size_t j = 0; j < n; ++j) y[j] = -R[j];
    num::thomas(J.sub, J.diag, J.sup, y);
    std::vector<std::vector<double>> Y(m, std::vector<double>(n));
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        bool dir = (j == 0 && dir_in) || (j == n - 1 && dir_out);
        Y[i][j] = dir ? 0.0
                      : -g.V[j] * sp[i].amount * sp[i].valence *
                            clamp_exp(-sp[i].valence * phi[j]) / (A[i] * A[i]);
      }
      num::thomas(J.sub, J.diag, J.sup, Y[i]);
    }
    // extra rows: H_i = A_i - Sd sum V e^{-z phi}; dH/dphi_j = Sd V_j z e^{-z phi}, dH/dA = 1
    std::vector<double> Cm(m * n);
    std::vector<double> H(m);
    for (std::size_t i = 0; i < m; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        double e = clamp_exp(-sp[i].valence * phi[j]);
        acc += g.V[j] * e;
        Cm[i * n + j] = Sd * g.V[j] * sp[i].valence * e;
      }
      H[i] = A[i] - Sd * acc;
    }
    // (I - C Y) dA = -H - C y
    std::vector<double> S(m * m, 0.0), rhs(m);
    for (std::size_t i = 0; i < m; ++i) {
      double cy = 0.0;
      for (std::size_t j = 0; j < n; ++j) cy += Cm[i * n + j] * y[j];
      rhs[i] = -H[i] - cy;
      for (std::size_t k = 0; k < m; ++k) {
        double cY = 0.0;
        for (std::size_t j = 0; j < n; ++j) cY += Cm[i * n + j] * Y[k][j];
        S[i * m + k] = (i == k ? 1.0 : 0.0) - cY;
      }
    }
    num::dense_solve(S, rhs, m);
    dA = rhs;
    dphi.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      double v = y[j];
      for (std::size_t k = 0; k < m; ++k) v -= Y[k][j] * dA[k];
      dphi[j] = v;
    }
  };
  return b;
}

// Nodal d phi / dr: three-point interpolant inside, discrete flux balance at walls.
std::vector<double> nodal_gradient(const Grid& g, const Bc& bc, double eps,
                                   std::span<const double> phi, std::span<const double> s) {
  const std::size_t n = g.r.size() - 1;
  const double se = std::sqrt(eps);
  std::vector<double> d(n + 1, 0.0);
  for (std::size_t j = 1; j < n; ++j) {
    double h0 = g.r[j] - g.r[j - 1], h1 = g.r[j + 1] - g.r[j];
    d[j] = (-h1 / (h0 * (h0 + h1))) * phi[j - 1] + ((h1 - h0) / (h0 * h1)) * phi[j] +
           (h0 / (h1 * (h0 + h1))) * phi[j + 1];
  }
  // outer wall
  double Gn;
  if (bc.outer.gamma > 0.0)
    Gn = wall_flux_out(g, bc.outer, phi[n], se);
  else
    Gn = g.c[n - 1] * (phi[n] - phi[n - 1]) - g.V[n] * s[n] / eps;
  d[n] = Gn / pw(g.R, g.d - 1);
  if (!bc.inner) {
    d[0] = 0.0;
  } else {
    double G0;
    if (bc.inner->gamma > 0.0)
      G0 = wall_flux_in(g, *bc.inner, phi[0], se);
    else
      G0 = g.c[0] * (phi[1] - phi[0]) + g.V[0] * s[0] / eps;
    d[0] = G0 / pw(g.a, g.d - 1);
  }
  return d;
}

double boundary_flux_total(const Grid& g, const Bc& bc, double eps, std::span<const double> phi,
                           std::span<const double> s) {
  auto d = nodal_gradient(g, bc, eps, phi, s);
  double out = pw(g.R, g.d - 1) * d.back();
  if (bc.inner) out -= pw(g.a, g.d - 1) * d.front();
  return out;
}

// Interpolate a previous solution onto the new grid in stretched wall coordinates.
std::vector<double> initial_from_guess(const Grid& g, const RadialSolveResult& guess, double eps) {
  double s = std::sqrt(guess.eps / eps);
  std::vector<double> phi(g.r.size());
  for (std::size_t j = 0; j < g.r.size(); ++j) {
    double r = g.r[j];
    double d_out = g.R - r;
    double d_in = g.center ? std::numeric_limits<double>::infinity() : r - g.a;
    double ro = d_out <= d_in ? guess.outer_radius - d_out * s : guess.inner_radius + d_in * s;
    ro = std::clamp(ro, guess.r.front(), guess.r.back());
    phi[j] = guess.eval(ro).first;
  }
  return phi;
}

struct GridSolution {
  Grid grid;
  std::vector<double> phi, dphi, s, A;
  NewtonStats stats;
  double flux = 0.0;
};

Bc make_bc(const DomainSpec& dom) {
  Bc bc;
  bc.outer = {dom.components[0].robin.gamma, dom.components[0].robin.phi_bd};
  if (dom.shape == Shape::Annulus)
    bc.inner = Wall{dom.components[1].robin.gamma, dom.components[1].robin.phi_bd};
  return bc;
}

void check_radial(const DomainSpec& dom) {
  if (dom.shape != Shape::Disk && dom.shape != Shape::Ball && dom.shape != Shape::Annulus)
    fail(ErrorCode::InvalidArgument, "the oracle is radial only");
  for (const auto& c : dom.components)
    if (c.robin.gamma < 0.0) fail(ErrorCode::InvalidArgument, "gamma must be >= 0");
}

RadialSolveResult assemble(Model model, const DomainSpec& dom, double eps,
                           const GridSolution& coarse, const GridSolution* fine) {
  RadialSolveResult out;
  out.model = model;
  out.dimension = dom.dimension;
  out.eps = eps;
  out.outer_radius = dom.components[0].radius;
  out.inner_radius = dom.shape == Shape::Annulus ? dom.components[1].radius : 0.0;
  out.r = coarse.grid.r;
  const double Sd = unit_sphere_area(dom.dimension);
  for (double v : coarse.grid.V) out.cell_volume.push_back(Sd * v);
  out.coarse_intervals = coarse.grid.r.size() - 1;
  const GridSolution& last = fine ? *fine : coarse;
  out.newton_iterations = last.stats.iterations;
  out.residual_norm = std::max(coarse.stats.norm, fine ? fine->stats.norm : 0.0);
  out.damping_history = last.stats.damping;
  if (!fine) {
    out.phi = coarse.phi;
    out.dphi = coarse.dphi;
  } else {
    const std::size_t n = coarse.phi.size();
    out.phi.resize(n);
    out.dphi.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      out.phi[j] = (4.0 * fine->phi[2 * j] - coarse.phi[j]) / 3.0;
      out.dphi[j] = (4.0 * fine->dphi[2 * j] - coarse.dphi[j]) / 3.0;
      out.refinement_change =
          std::max(out.refinement_change, std::abs(fine->phi[2 * j] - coarse.phi[j]));
    }
  }
  // discrete divergence identity on the finest solve
  {
    double vol = 0.0, mag = 0.0;
    for (std::size_t j = 0; j < last.phi.size(); ++j) {
      vol += Sd * last.grid.V[j] * last.s[j];
      mag += Sd * last.grid.V[j] * std::abs(last.s[j]);
    }
    (void)mag;
    out.conservation_residual = std::abs(eps * Sd * last.flux + vol);
  }
  return out;
}

}  // namespace

std::pair<double, double> RadialSolveResult::eval(double radius) const {
  if (radius <= r.front()) return {phi.front(), dphi.front()};
  if (radius >= r.back()) return {phi.back(), dphi.back()};
  auto it = std::upper_bound(r.begin(), r.end(), radius);
  std::size_t j = static_cast<std::size_t>(it - r.begin());
  std::size_t i = j - 1;
  return num::hermite(r[i], r[j], phi[i], phi[j], dphi[i], dphi[j], radius);
}

double RadialSolveResult::f_eps(double p) const {
  double v = 0.0;
  for (std::size_t i = 0; i < species.size(); ++i)
    v += species[i].amount * species[i].valence * std::exp(-species[i].valence * p) / a_integrals[i];
  return v;
}

namespace {

GridSolution solve_pb_on(const Grid& grid, const Bc& bc, double eps, const Nonlinearity& f,
                         std::vector<double> phi, const RadialGridOptions& o) {
  GridSolution gs;
  gs.grid = grid;
  auto sys = pb_system([&f](double p) { return f.value(p); }, [&f](double p) { return f.derivative(p); });
  sys.reference = f.reference();
  std::vector<double> none;
  newton(grid, bc, eps, phi, none, sys, o, gs.stats);
  gs.s.resize(phi.size());
  for (std::size_t j = 0; j < phi.size(); ++j) gs.s[j] = f.value(phi[j]);
  gs.dphi = nodal_gradient(grid, bc, eps, phi, gs.s);
  gs.flux = boundary_flux_total(grid, bc, eps, phi, gs.s);
  gs.phi = std::move(phi);
  return gs;
}

std::vector<double> refine_guess(const Grid& fine, const GridSolution& coarse) {
  RadialSolveResult tmp;
  tmp.r = coarse.grid.r;
  tmp.phi = coarse.phi;
  tmp.dphi = coarse.dphi;
  std::vector<double> phi(fine.r.size());
  for (std::size_t j = 0; j < fine.r.size(); ++j) phi[j] = tmp.eval(fine.r[j]).first;
  return phi;
}

RadialSolveResult solve_pb_domain(const DomainSpec& dom, const Nonlinearity& f, double eps,
                                  const RadialGridOptions& o, const RadialSolveResult* guess) {
  check_radial(dom);
  if (!(eps > 0.0)) fail(ErrorCode::InvalidArgument, "eps must be positive");
  if (!f.monotone_contract()) fail(ErrorCode::UnsupportedProvenance, "f must be decreasing");
  std::optional<RadialSolveResult> chain;
  if (!guess && o.continuation && eps < 1e-2) {
    RadialGridOptions oc = o;
    oc.richardson = false;
    chain = solve_pb_domain(dom, f, std::max(eps * 10.0, 1e-2), oc, nullptr);
    guess = &*chain;
  }
  Bc bc = make_bc(dom);
  bool center = dom.shape != Shape::Annulus;
  double a = center ? 0.0 : dom.components[1].radius;
  double R = dom.components[0].radius;
  Grid g1 = build_grid(dom.dimension, a, R, center, eps, o, 1);
  std::vector<double> phi0 = guess ? initial_from_guess(g1, *guess, eps)
                                   : std::vector<double>(g1.r.size(), f.reference());
  auto coarse = solve_pb_on(g1, bc, eps, f, std::move(phi0), o);
  if (!o.richardson) return assemble(Model::PB, dom, eps, coarse, nullptr);
  Grid g2 = build_grid(dom.dimension, a, R, center, eps, o, 2);
  auto fine = solve_pb_on(g2, bc, eps, f, refine_guess(g2, coarse), o);
  return assemble(Model::PB, dom, eps, coarse, &fine);
}

double root_f_eps(const RadialSolveResult& res, double lo, double hi) {
  return num::bisect([&](double p) { return res.f_eps(p); }, lo, hi, 0.0);
}

}  // namespace

RadialSolveResult solve_radial_robin_pb(const DomainSpec& domain, const Nonlinearity& f, double eps,
                                        const RadialGridOptions& opts,
                                        const RadialSolveResult* guess) {
  return solve_pb_domain(domain, f, eps, opts, guess);
}

RadialSolveResult solve_radial_dirichlet(const Nonlinearity& f, int d, double R, double phi_bd,
                                         double eps, const RadialGridOptions& opts,
                                         const RadialSolveResult* guess) {
  auto dom = make_ball(d, R, {0.0, phi_bd});
  if (phi_bd == f.reference()) {
    // the constant state solves the discrete system exactly
    RadialGridOptions o = opts;
    o.continuation = false;
    return solve_pb_domain(dom, f, eps, o, nullptr);
  }
  auto res = solve_pb_domain(dom, f, eps, opts, guess);
  // the radial profile is monotone toward the wall; deep inside it may sit at phi* exactly
  const double dir = phi_bd > f.reference() ? 1.0 : -1.0;
  for (std::size_t j = 1; j < res.phi.size(); ++j) {
    double step = dir * (res.phi[j] - res.phi[j - 1]);
    bool resolved = std::abs(res.phi[j] - f.reference()) > 1e-250;
    if (step < 0.0 || (resolved && step == 0.0 && j + 1 < res.phi.size() &&
                       std::abs(res.phi[j - 1] - f.reference()) > 1e-250))
      fail(ErrorCode::NonMonotoneTrajectory,
           "radial solution not monotone at r = " + shortest(res.r[j]));
  }
  return res;
}

namespace {

GridSolution solve_ccpb_on(const Grid& grid, const Bc& bc, double eps,
                           const std::vector<IonSpecies>& sp, std::vector<double> phi,
                           std::vector<double> A, const RadialGridOptions& o) {
  GridSolution gs;
  gs.grid = grid;
  const double Sd = unit_sphere_area(grid.d);
  if (A.empty()) {
    for (const auto& s : sp) {
      double acc = 0.0;
      for (std::size_t j = 0; j < phi.size(); ++j) acc += grid.V[j] * std::exp(-s.valence * phi[j]);
      A.push_back(Sd * acc);
    }
  }
  auto sys = ccpb_system(grid, bc, eps, sp);
  // the integrals carry roundoff of their long sums into every node
  double span = 1.0;
  for (double p : phi) span = std::max(span, std::abs(p));
  sys.absolute_floor = 1e-13 * span;
  newton(grid, bc, eps, phi, A, sys, o, gs.stats);
  gs.s.resize(phi.size());
  std::vector<double> ds(phi.size());
  sys.source(phi, A, gs.s, ds);
  gs.dphi = nodal_gradient(grid, bc, eps, phi, gs.s);
  gs.flux = boundary_flux_total(grid, bc, eps, phi, gs.s);
  gs.phi = std::move(phi);
  gs.A = std::move(A);
  return gs;
}

}  // namespace

RadialSolveResult solve_radial_ccpb(const DomainSpec& dom, std::span<const IonSpecies> species,
                                    double eps, const RadialGridOptions& o,
                                    const RadialSolveResult* guess) {
  if (dom.shape != Shape::Annulus) fail(ErrorCode::InvalidArgument, "CCPB oracle needs an annulus");
  check_radial(dom);
  if (!(eps > 0.0)) fail(ErrorCode::InvalidArgument, "eps must be positive");
  if (species.empty()) fail(ErrorCode::InvalidArgument, "species list is empty");
  if (neutrality_defect(species) > 1e-12) fail(ErrorCode::NeutralityViolated, "sum m_i z_i != 0");
  double lo = std::min(dom.components[0].robin.phi_bd, dom.components[1].robin.phi_bd);
  double hi = std::max(dom.components[0].robin.phi_bd, dom.components[1].robin.phi_bd);
  if (lo == hi) fail(ErrorCode::AllBoundaryPotentialsEqual, "boundary potentials are equal");
  std::vector<IonSpecies> sp(species.begin(), species.end());
  std::optional<RadialSolveResult> chain;
  if (!guess && o.continuation && eps < 1e-2) {
    RadialGridOptions oc = o;
    oc.richardson = false;
    chain = solve_radial_ccpb(dom, species, std::max(eps * 10.0, 1e-2), oc, nullptr);
    guess = &*chain;
  }
  Bc bc = make_bc(dom);
  double a = dom.components[1].radius, R = dom.components[0].radius;
  Grid g1 = build_grid(dom.dimension, a, R, false, eps, o, 1);
  std::vector<double> phi0 = guess ? initial_from_guess(g1, *guess, eps)
                                   : std::vector<double>(g1.r.size(), 0.5 * (lo + hi));
  auto coarse = solve_ccpb_on(g1, bc, eps, sp, std::move(phi0), {}, o);
  std::optional<GridSolution> fine;
  if (o.richardson) {
    Grid g2 = build_grid(dom.dimension, a, R, false, eps, o, 2);
    fine = solve_ccpb_on(g2, bc, eps, sp, refine_guess(g2, coarse), coarse.A, o);
  }
  auto out = assemble(Model::CCPB, dom, eps, coarse, fine ? &*fine : nullptr);
  out.species = sp;
  out.a_integrals = coarse.A;
  if (fine)
    for (std::size_t i = 0; i < sp.size(); ++i)
      out.a_integrals[i] = (4.0 * fine->A[i] - coarse.A[i]) / 3.0;
  out.phi_eps_star = root_f_eps(out, lo, hi);
  // discrete global neutrality on the finest solve
  const GridSolution& last = fine ? *fine : coarse;
  const double Sd = unit_sphere_area(dom.dimension);
  double total = 0.0, scale = 0.0;
  for (std::size_t j = 0; j < last.phi.size(); ++j) total += Sd * last.grid.V[j] * last.s[j];
  for (const auto& s : sp) scale += s.amount * std::abs(s.valence);
  out.neutrality_residual = std::abs(total) / scale;
  return out;
}

double radial_integral(const RadialSolveResult& res,
                       const std::function<double(double r, double phi)>& g, double r_lo,
                       double r_hi) {
  if (r_hi <= r_lo) return 0.0;
  const auto& rule = num::gauss_legendre(6);
  const int d = res.dimension;
  double acc = 0.0;
  auto first = std::upper_bound(res.r.begin(), res.r.end(), r_lo);
  std::size_t j = first == res.r.begin() ? 0 : static_cast<std::size_t>(first - res.r.begin()) - 1;
  for (; j + 1 < res.r.size() && res.r[j] < r_hi; ++j) {
    double x0 = std::max(res.r[j], r_lo), x1 = std::min(res.r[j + 1], r_hi);
    if (x1 <= x0) continue;
    double mid = 0.5 * (x0 + x1), half = 0.5 * (x1 - x0);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      double r = mid + half * rule.nodes[q];
      double phi = num::hermite(res.r[j], res.r[j + 1], res.phi[j], res.phi[j + 1], res.dphi[j],
                                res.dphi[j + 1], r)
                       .first;
      acc += rule.weights[q] * half * pw(r, d - 1) * g(r, phi);
    }
  }
  return unit_sphere_area(d) * acc;
}

OracleRegionCharge oracle_region_charge(const RadialSolveResult& res, const DomainSpec& domain,
                                        std::size_t k, const RegionParams& params,
                                        const Nonlinearity* f) {
  validate(params);
  if (k >= domain.components.size()) fail(ErrorCode::InvalidArgument, "no such component");
  if (res.model == Model::PB && !f) fail(ErrorCode::InvalidArgument, "PB region charge needs f");
  std::function<double(double, double)> density;
  if (res.model == Model::PB)
    density = [f](double, double p) { return f->value(p); };
  else
    density = [&res](double, double p) { return res.f_eps(p); };
  double d1 = params.T * std::sqrt(params.eps), d2 = std::pow(params.eps, params.beta);
  OracleRegionCharge out;
  if (domain.components[k].orientation == Orientation::Outer) {
    double R = res.outer_radius;
    out.region1 = radial_integral(res, density, R - d1, R);
    out.region2 = radial_integral(res, density, R - d2, R - d1);
  } else {
    double a = res.inner_radius;
    out.region1 = radial_integral(res, density, a, a + d1);
    out.region2 = radial_integral(res, density, a + d1, a + d2);
  }
  return out;
}

ComparisonReport compare_expansion(const RadialSolveResult& oracle, const DomainSpec& domain,
                                   std::span<const BoundaryLayer> layers,
                                   const RegionParams& params, double curvature_sign) {
  // region II may be empty at large eps; only the layer sup needs T
  if (!(params.eps > 0.0 && params.T > 0.0 && params.beta > 0.0 && params.beta < 0.5))
    fail(ErrorCode::InconsistentParams, "bad region parameters");
  ComparisonReport rep;
  rep.model = oracle.model;
  rep.eps = oracle.eps;
  rep.params = params;
  if (params.eps != oracle.eps) fail(ErrorCode::InconsistentParams, "eps differs from the oracle");
  const double se = std::sqrt(oracle.eps);
  const int d = oracle.dimension;
  const double d1 = params.T * se, d2 = std::pow(params.eps, params.beta);
  for (const auto& layer : layers)
    if (layer.model != oracle.model) fail(ErrorCode::ModelProfileMismatch, "model mismatch");
  rep.reference = oracle.model == Model::CCPB ? oracle.phi_eps_star
                                              : (layers.empty() ? 0.0 : layers.front().reference);
  for (const auto& layer : layers) {
    std::size_t k = layer.boundary;
    if (k >= domain.components.size()) fail(ErrorCode::ModelProfileMismatch, "bad boundary index");
    const auto& comp = domain.components[k];
    bool outer = comp.orientation == Orientation::Outer;
    double H = curvature_sign * comp.mean_curvature;
    ComponentComparison cc;
    cc.boundary = k;
    std::vector<double> ts, logs;
    std::vector<double> t2, y2;
    for (std::size_t j = 0; j < oracle.r.size(); ++j) {
      double r = oracle.r[j];
      double dist = outer ? oracle.outer_radius - r : r - oracle.inner_radius;
      double other = domain.shape == Shape::Annulus
                         ? (outer ? r - oracle.inner_radius : oracle.outer_radius - r)
                         : std::numeric_limits<double>::infinity();
      double t = dist / se;
      double phi = oracle.phi[j];
      double dnu = outer ? oracle.dphi[j] : -oracle.dphi[j];
      if (dist < d1 && dist <= other) {
        ++cc.region1_nodes;
        auto [u, up] = layer.u.eval(t);
        auto [v, vp] = layer.v.eval(t);
        double corr = (d - 1) * H * v, dcorr = (d - 1) * H * vp;
        if (layer.w) {
          auto [w, wp] = layer.w->eval(t);
          corr += w;
          dcorr += wp;
        }
        cc.E1 = std::max(cc.E1, std::abs(phi - u));
        cc.E2 = std::max(cc.E2, std::abs(phi - u - se * corr) / se);
        cc.EF1 = std::max(cc.EF1, std::abs(se * dnu + up));
        cc.EF2 = std::max(cc.EF2, std::abs(dnu + up / se + dcorr));
      } else if (dist <= d2 && dist <= other) {
        ++cc.region2_nodes;
        double y = std::abs(phi - rep.reference);
        if (y > 0.0) {
          t2.push_back(t);
          y2.push_back(y);
          ts.push_back(t);
          logs.push_back(std::log(y));
        }
      } else if (dist > d2 && other > d2 && dist <= other) {
        ++cc.region3_nodes;
        cc.region3_max = std::max(cc.region3_max, std::abs(phi - rep.reference));
      }
    }
    if (cc.region1_nodes == 0) fail(ErrorCode::RegionEmpty, "no oracle nodes in region I");
    if (ts.size() >= 2) {
      auto [icpt, slope] = num::fit_line(ts, logs);
      double M = slope < 0.0 ? -slope : 1e-12;
      double Mp = std::exp(icpt);
      for (std::size_t i = 0; i < t2.size(); ++i) Mp = std::max(Mp, y2[i] * std::exp(M * t2[i]));
      cc.envelope = {M, Mp};
      cc.region3_bound = decay_envelope(EnvelopeKind::RegionIII, cc.envelope, params.eps, params.beta);
    }
    rep.components.push_back(cc);
  }
  return rep;
}

std::string radial_csv(const RadialSolveResult& res) {
  std::string out = "r,phi,dphi\n";
  for (std::size_t j = 0; j < res.r.size(); ++j) {
    out += shortest(res.r[j]);
    out += ',';
    out += shortest(res.phi[j]);
    out += ',';
    out += shortest(res.dphi[j]);
    out += '\n';
  }
  return out;
}

std::string radial_json(const RadialSolveResult& res) {
  nlohmann::ordered_json j;
  j["model"] = to_string(res.model);
  j["dimension"] = res.dimension;
  j["eps"] = res.eps;
  j["inner_radius"] = res.inner_radius;
  j["outer_radius"] = res.outer_radius;
  j["nodes"] = res.r.size();
  j["newton_iterations"] = res.newton_iterations;
  j["residual_norm"] = res.residual_norm;
  j["damping_history"] = res.damping_history;
  j["conservation_residual"] = res.conservation_residual;
  j["refinement_change"] = res.refinement_change;
  if (res.model == Model::CCPB) {
    j["A"] = res.a_integrals;
    j["phi_eps_star"] = res.phi_eps_star;
    j["neutrality_residual"] = res.neutrality_residual;
  }
  return j.dump(1) + "\n";
}

std::string comparison_json(const ComparisonReport& rep) {
  nlohmann::ordered_json j;
  j["model"] = to_string(rep.model);
  j["eps"] = rep.eps;
  j["T"] = rep.params.T;
  j["beta"] = rep.params.beta;
  j["reference"] = rep.reference;
  auto& arr = j["components"];
  arr = nlohmann::ordered_json::array();
  for (const auto& c : rep.components)
    arr.push_back({{"boundary", c.boundary},
                   {"E1", c.E1},
                   {"E2", c.E2},
                   {"EF1", c.EF1},
                   {"EF2", c.EF2},
                   {"region1_nodes", c.region1_nodes},
                   {"region2_nodes", c.region2_nodes},
                   {"region3_nodes", c.region3_nodes},
                   {"M", c.envelope.M},
                   {"M_prime", c.envelope.M_prime},
                   {"region3_max", c.region3_max},
                   {"region3_bound", c.region3_bound}});
  return j.dump(1) + "\n";
}

}  // namespace edl
