#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "edl/nonlinearity.hpp"

namespace edl {

struct RobinData {
  double gamma = 0.0;
  double phi_bd = 0.0;
};

enum class ProfileKind { U, V, W, Theta };
const char* to_string(ProfileKind k);

// value(t) ~ limit + amplitude * exp(-rate t) beyond the last sample
struct TailModel {
  double limit = 0.0;
  double amplitude = 0.0;
  double rate = 1.0;
};

struct ProfileMetadata {
  double gamma = 0.0;
  double phi_bd = 0.0;
  double reference = 0.0;      // phi* (or phi0*) of the nonlinearity used for u
  double u0 = 0.0;             // U0
  double du0 = 0.0;            // U'(0)
  double v0 = 0.0;             // V0 (kind v)
  double w0 = 0.0;             // w(0) (kind w)
  double q = 0.0;              // Q (kind w)
  double denominator = 0.0;    // U'(0) + gamma f(U0)
  double energy = 0.0;         // int_0^inf U'^2, time quadrature (kind v)
  std::optional<double> t_star;  // extremum of v
};

class Profile {
 public:
  Profile() = default;
  Profile(ProfileKind kind, std::vector<double> t, std::vector<double> value,
          std::vector<double> deriv, TailModel tail, ProfileMetadata meta);

  ProfileKind kind() const { return kind_; }
  std::span<const double> t() const { return t_; }
  std::span<const double> values() const { return value_; }
  std::span<const double> derivatives() const { return deriv_; }
  const TailModel& tail() const { return tail_; }
  const ProfileMetadata& metadata() const { return meta_; }
  double t_max() const { return t_.back(); }
  std::size_t size() const { return t_.size(); }

  std::pair<double, double> eval(double t) const;
  double value(double t) const { return eval(t).first; }
  double derivative(double t) const { return eval(t).second; }

 private:
  ProfileKind kind_ = ProfileKind::U;
  std::vector<double> t_, value_, deriv_;
  TailModel tail_;
  ProfileMetadata meta_;
};

inline std::pair<double, double> profile_eval(const Profile& p, double t) { return p.eval(t); }

struct ProfileOptions {
  std::size_t nodes = 4001;
  double decay_threshold = 1e-12;  // relative |u - phi*| that defines T_max
  double cap_factor = 40.0;        // T_max <= cap_factor / m_f
};

Profile solve_u(const Nonlinearity& f, RobinData robin, const ProfileOptions& opts = {});
Profile solve_v(const Profile& u, const Nonlinearity& f, RobinData robin);
Profile solve_theta(const Profile& u, const Nonlinearity& f0, RobinData robin);
// f1 must come from make_f1(f0, fhat1, q); F^_1 is recovered as F1 + q f0.
Profile solve_w(const Profile& u, const Nonlinearity& f0, const Nonlinearity& f1, double q,
                RobinData robin);

// Boundary value U0 of (U0 - phi_bd) sign relation with Robin data; exposed for ccpb.
double solve_u0(const Nonlinearity& f, RobinData robin);
// U'(0) = sgn(phi* - phi_bd) sqrt(-2 F(U0))
double initial_slope(const Nonlinearity& f, RobinData robin, double u0);

// int_0^inf u'^2 dt by quadrature in potential space.
double energy_potential_space(const Nonlinearity& f, double u0);
// Same integral by time quadrature of the samples plus tail.
double energy_time_space(const Profile& u, const Nonlinearity& f);

// Second-order linear ODE y'' = rhs(t, y, y') used by ode_residual.
struct EquationSpec {
  std::string name;
  std::function<double(double t, double y)> second_derivative;
};
EquationSpec u_equation(const Nonlinearity& f);
EquationSpec v_equation(const Profile& u, const Nonlinearity& f);
EquationSpec theta_equation(const Profile& u, const Nonlinearity& f0);
EquationSpec w_equation(const Profile& u, const Nonlinearity& f0, const Nonlinearity& f1);

// max over interior nodes of |D2 y - rhs|, D2 a five-point difference of the stored y'.
double ode_residual(const Profile& p, const EquationSpec& eq);

// CSV: t,value,derivative ; JSON: metadata + samples.
std::string profile_csv(const Profile& p);
std::string profile_json(const Profile& p);

}  // namespace edl
