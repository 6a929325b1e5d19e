#include "edl/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "edl/error.hpp"
#include "edl/numerics.hpp"

namespace edl {

namespace {

constexpr double kHuge = std::numeric_limits<double>::max();

double clamp_finite(double x) {
  if (std::isnan(x)) return x;
  return std::clamp(x, -kHuge, kHuge);
}

// sum_i c_i exp(x_i), factoring out the dominant exponent when it is large
template <class Coef, class Expo>
double stable_exp_sum(std::size_t n, Coef coef, Expo expo) {
  double xmax = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) xmax = std::max(xmax, expo(i));
  if (xmax <= 30.0) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += coef(i) * std::exp(expo(i));
    return s;
  }
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += coef(i) * std::exp(expo(i) - xmax);
  if (s == 0.0) return 0.0;
  double log_mag = std::log(std::abs(s)) + xmax;
  if (log_mag > 709.0) return s > 0 ? kHuge : -kHuge;
  return s * std::exp(xmax);
}

void check_species(std::span<const IonSpecies> species) {
  if (species.empty()) fail(ErrorCode::InvalidArgument, "species list is empty");
  for (const auto& s : species) {
    if (s.valence == 0.0) fail(ErrorCode::InvalidArgument, "zero valence");
    if (!(s.amount > 0.0)) fail(ErrorCode::InvalidArgument, "species amount must be positive");
  }
}

}  // namespace

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::Classical: return "classical";
    case Provenance::F0: return "f0";
    case Provenance::FHat1: return "fhat1";
    case Provenance::F1: return "f1";
    case Provenance::Custom: return "custom";
  }
  return "unknown";
}

Nonlinearity::Nonlinearity(Provenance provenance, double reference, std::vector<ExpTerm> terms,
                           bool neutral)
    : provenance_(provenance), reference_(reference), terms_(std::move(terms)), neutral_(neutral) {}

Nonlinearity::Nonlinearity(double reference, std::shared_ptr<const Custom> custom)
    : provenance_(Provenance::Custom), reference_(reference), custom_(std::move(custom)) {}

double Nonlinearity::value_at_offset(double delta) const {
  if (custom_) return custom_->f(reference_ + delta);
  const std::size_t n = terms_.size();
  double xmax = -std::numeric_limits<double>::infinity();
  for (const auto& t : terms_) xmax = std::max(xmax, -t.valence * delta);
  if (neutral_ && xmax <= 30.0) {
    double s = 0.0;
    for (const auto& t : terms_) s += t.valence * t.weight * std::expm1(-t.valence * delta);
    return s;
  }
  double s = stable_exp_sum(
      n, [&](std::size_t i) { return terms_[i].valence * terms_[i].weight; },
      [&](std::size_t i) { return -terms_[i].valence * delta; });
  if (neutral_) {
    double c = 0.0;
    for (const auto& t : terms_) c += t.valence * t.weight;
    s -= c;
  }
  return clamp_finite(s);
}

double Nonlinearity::derivative_at_offset(double delta) const {
  if (custom_) return custom_->df(reference_ + delta);
  return clamp_finite(stable_exp_sum(
      terms_.size(),
      [&](std::size_t i) { return -terms_[i].valence * terms_[i].valence * terms_[i].weight; },
      [&](std::size_t i) { return -terms_[i].valence * delta; }));
}

double Nonlinearity::antiderivative_at_offset(double delta) const {
  if (custom_) {
    if (custom_->F) return custom_->F(reference_ + delta);
    return num::integrate(custom_->f, reference_, reference_ + delta, 1e-14);
  }
  if (neutral_) {
    double s = 0.0;
    for (const auto& t : terms_) s -= t.weight * num::expm1_minus_x(-t.valence * delta);
    return clamp_finite(s);
  }
  double s = 0.0;
  for (const auto& t : terms_) s -= t.weight * std::expm1(-t.valence * delta);
  return clamp_finite(s);
}

double Nonlinearity::antiderivative(double phi) const {
  return antiderivative_at_offset(phi - reference_);
}

double neutrality_defect(std::span<const IonSpecies> species) {
  double s = 0.0, a = 0.0;
  for (const auto& sp : species) {
    s += sp.amount * sp.valence;
    a += sp.amount * std::abs(sp.valence);
  }
  return a > 0 ? std::abs(s) / a : 0.0;
}

double find_reference_potential(const std::function<double(double)>& f,
                                const std::function<double(double)>& df) {
  double lo = -1.0, hi = 1.0;
  double flo = f(lo), fhi = f(hi);
  int expansions = 0;
  while (num::sign(flo) == num::sign(fhi) && flo != 0.0) {
    if (++expansions > 12) fail(ErrorCode::NoSignChange, "bracket expansion exhausted");
    lo *= 2.0;
    hi *= 2.0;
    flo = f(lo);
    fhi = f(hi);
  }
  double root = num::bisect(f, lo, hi, 1e-13);
  if (df) {
    for (int k = 0; k < 3; ++k) {
      double fr = f(root);
      double d = df(root);
      if (fr == 0.0 || d == 0.0) break;
      double next = root - fr / d;
      if (!(std::abs(f(next)) < std::abs(fr)) || std::abs(next - root) > 1e-12) break;
      root = next;
    }
  }
  return root;
}

double find_reference_potential(const Nonlinearity& f) {
  if (!f.monotone_contract())
    fail(ErrorCode::UnsupportedProvenance, "reference potential undefined for f1/fhat1");
  return f.reference();
}

Nonlinearity make_classical_pb(std::span<const IonSpecies> species) {
  check_species(species);
  bool pos = false, neg = false;
  for (const auto& s : species) (s.valence > 0 ? pos : neg) = true;
  if (!(pos && neg)) fail(ErrorCode::AllSameSignValences, "f has no zero");
  std::vector<IonSpecies> sp(species.begin(), species.end());
  auto raw = [sp](double phi) {
    return stable_exp_sum(
        sp.size(), [&](std::size_t i) { return sp[i].valence * sp[i].amount; },
        [&](std::size_t i) { return -sp[i].valence * phi; });
  };
  auto draw = [sp](double phi) {
    return stable_exp_sum(
        sp.size(), [&](std::size_t i) { return -sp[i].valence * sp[i].valence * sp[i].amount; },
        [&](std::size_t i) { return -sp[i].valence * phi; });
  };
  double ref = find_reference_potential(raw, draw);
  std::vector<ExpTerm> terms;
  for (const auto& s : sp) terms.push_back({s.valence, s.amount * std::exp(-s.valence * ref)});
  return Nonlinearity(Provenance::Classical, ref, std::move(terms), true);
}

Nonlinearity make_f0(std::span<const IonSpecies> species, double volume, double phi0_star) {
  check_species(species);
  if (!(volume > 0.0)) fail(ErrorCode::InvalidArgument, "volume must be positive");
  if (neutrality_defect(species) > 1e-12)
    fail(ErrorCode::NeutralityViolated, "sum m_i z_i != 0");
  std::vector<ExpTerm> terms;
  for (const auto& s : species) terms.push_back({s.valence, s.amount / volume});
  return Nonlinearity(Provenance::F0, phi0_star, std::move(terms), true);
}

Nonlinearity make_fhat1(std::span<const IonSpecies> species, double volume, double phi0_star,
                        std::span<const double> mhat) {
  check_species(species);
  if (!(volume > 0.0)) fail(ErrorCode::InvalidArgument, "volume must be positive");
  if (mhat.size() != species.size())
    fail(ErrorCode::InvalidArgument, "mhat length differs from species count");
  std::vector<ExpTerm> terms;
  for (std::size_t i = 0; i < species.size(); ++i)
    terms.push_back({species[i].valence, mhat[i] / volume});
  return Nonlinearity(Provenance::FHat1, phi0_star, std::move(terms), false);
}

Nonlinearity make_f1(const Nonlinearity& f0, const Nonlinearity& fhat1, double q) {
  if (f0.provenance() != Provenance::F0 || fhat1.provenance() != Provenance::FHat1)
    fail(ErrorCode::UnsupportedProvenance, "make_f1 needs an f0 and an fhat1");
  if (f0.reference() != fhat1.reference() || f0.terms().size() != fhat1.terms().size())
    fail(ErrorCode::MismatchedReference, "f0 and fhat1 do not share phi0*");
  // -Q f0'(phi) = sum Q z^2 w e^{-z delta}; as a term of the form w' z e^{-z delta}: w' = Q z w
  std::vector<ExpTerm> terms;
  for (std::size_t i = 0; i < f0.terms().size(); ++i) {
    const auto& a = f0.terms()[i];
    const auto& b = fhat1.terms()[i];
    if (a.valence != b.valence) fail(ErrorCode::MismatchedReference, "valence lists differ");
    terms.push_back({a.valence, q * a.valence * a.weight + b.weight});
  }
  return Nonlinearity(Provenance::F1, f0.reference(), std::move(terms), false);
}

Nonlinearity make_custom(std::function<double(double)> f, std::function<double(double)> df,
                         std::function<double(double)> F, std::optional<double> reference) {
  if (!f || !df) fail(ErrorCode::InvalidArgument, "custom nonlinearity needs f and f'");
  double ref = reference ? *reference : find_reference_potential(f, df);
  auto custom = std::make_shared<Nonlinearity::Custom>();
  custom->f = std::move(f);
  custom->df = std::move(df);
  if (F) {
    double shift = F(ref);
    custom->F = [F = std::move(F), shift](double phi) { return F(phi) - shift; };
  }
  return Nonlinearity(ref, std::move(custom));
}

double decay_rate(const Nonlinearity& f, double lo, double hi) {
  if (!(lo <= hi)) fail(ErrorCode::InvalidArgument, "decay_rate needs lo <= hi");
  double best = f.derivative(lo);
  if (hi > lo) {
    constexpr int n = 2048;
    int best_j = 0;
    for (int j = 0; j < n; ++j) {
      double x = lo + (hi - lo) * j / (n - 1);
      double d = f.derivative(x);
      if (d > best) {
        best = d;
        best_j = j;
      }
    }
    double a = lo + (hi - lo) * std::max(best_j - 1, 0) / (n - 1);
    double b = lo + (hi - lo) * std::min(best_j + 1, n - 1) / (n - 1);
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f.derivative(c), fd = f.derivative(d);
    for (int it = 0; it < 80 && b - a > 1e-15 * (1 + std::abs(a)); ++it) {
      if (fc > fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - g * (b - a);
        fc = f.derivative(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + g * (b - a);
        fd = f.derivative(d);
      }
    }
    double x = 0.5 * (a + b);
    double v = f.derivative(x);
    best = std::max(best, v);
  }
  if (!(best < 0.0)) fail(ErrorCode::NonDecreasingDetected, "f' >= 0 on the interval");
  return std::sqrt(-best);
}

bool sampled_decreasing(const Nonlinearity& f, double lo, double hi, int n) {
  for (int j = 0; j < n; ++j) {
    double x = n > 1 ? lo + (hi - lo) * j / (n - 1) : lo;
    if (!(f.derivative(x) < 0.0)) return false;
  }
  return true;
}

}  // namespace edl
