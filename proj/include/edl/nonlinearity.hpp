#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace edl {

enum class AmountRole { Concentration, Mass };

struct IonSpecies {
  double valence = 0.0;
  double amount = 0.0;
  AmountRole role = AmountRole::Concentration;
};

enum class Provenance { Classical, F0, FHat1, F1, Custom };

const char* to_string(Provenance p);

// One exponential term: contributes weight * z * exp(-z (phi - reference)) to f.
struct ExpTerm {
  double valence;
  double weight;
};

// Charge density f with f', F(phi) = int_{reference}^{phi} f, and its reference potential.
//
// Exponential sums are stored relative to the reference so that values close to the
// reference keep full relative precision.  For the neutral provenances (classical, f0)
// the constant sum z_i w_i is dropped, which makes f(reference) = 0 and F <= 0 exact.
class Nonlinearity {
 public:
  struct Custom {
    std::function<double(double)> f;
    std::function<double(double)> df;
    std::function<double(double)> F;  // may be empty; then quadrature is used
  };

  Nonlinearity(Provenance provenance, double reference, std::vector<ExpTerm> terms, bool neutral);
  Nonlinearity(double reference, std::shared_ptr<const Custom> custom);

  double operator()(double phi) const { return value(phi); }
  double value(double phi) const { return value_at_offset(phi - reference_); }
  double derivative(double phi) const { return derivative_at_offset(phi - reference_); }
  double antiderivative(double phi) const;

  // Same quantities, parametrised by delta = phi - reference.
  double value_at_offset(double delta) const;
  double derivative_at_offset(double delta) const;
  double antiderivative_at_offset(double delta) const;

  double reference() const { return reference_; }
  Provenance provenance() const { return provenance_; }
  bool monotone_contract() const {
    return provenance_ != Provenance::FHat1 && provenance_ != Provenance::F1;
  }
  const std::vector<ExpTerm>& terms() const { return terms_; }
  bool neutral_form() const { return neutral_; }

 private:
  Provenance provenance_;
  double reference_;
  std::vector<ExpTerm> terms_;
  bool neutral_ = false;
  std::shared_ptr<const Custom> custom_;
};

Nonlinearity make_classical_pb(std::span<const IonSpecies> species);
Nonlinearity make_f0(std::span<const IonSpecies> species, double volume, double phi0_star);
Nonlinearity make_fhat1(std::span<const IonSpecies> species, double volume, double phi0_star,
                        std::span<const double> mhat);
Nonlinearity make_f1(const Nonlinearity& f0, const Nonlinearity& fhat1, double q);
Nonlinearity make_custom(std::function<double(double)> f, std::function<double(double)> df,
                         std::function<double(double)> F = {},
                         std::optional<double> reference = std::nullopt);

// Relative neutrality defect |sum m z| / sum m |z|.
double neutrality_defect(std::span<const IonSpecies> species);

double find_reference_potential(const Nonlinearity& f);
// Zero of a decreasing function: geometric bracket expansion from 0, bisection, Newton polish.
double find_reference_potential(const std::function<double(double)>& f,
                                const std::function<double(double)>& df);

// m_f = sqrt(-max f') on [lo, hi].
double decay_rate(const Nonlinearity& f, double lo, double hi);

// True when f' < 0 at n uniform samples of [lo, hi].
bool sampled_decreasing(const Nonlinearity& f, double lo, double hi, int n = 512);

}  // namespace edl
