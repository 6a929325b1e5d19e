#include <sstream>

#include <json.hpp>

#include "edl/format.hpp"
#include "edl/profiles.hpp"

namespace edl {

std::string profile_csv(const Profile& p) {
  std::string out = "t,value,derivative\n";
  auto t = p.t();
  auto v = p.values();
  auto d = p.derivatives();
  for (std::size_t j = 0; j < t.size(); ++j) {
    out += shortest(t[j]);
    out += ',';
    out += shortest(v[j]);
    out += ',';
    out += shortest(d[j]);
    out += '\n';
  }
  return out;
}

std::string profile_json(const Profile& p) {
  const auto& m = p.metadata();
  nlohmann::ordered_json j;
  j["kind"] = to_string(p.kind());
  j["gamma"] = m.gamma;
  j["phi_bd"] = m.phi_bd;
  j["reference"] = m.reference;
  j["U0"] = m.u0;
  j["dU0"] = m.du0;
  if (p.kind() == ProfileKind::V) {
    j["V0"] = m.v0;
    j["energy"] = m.energy;
    j["t_star"] = m.t_star ? nlohmann::ordered_json(*m.t_star) : nlohmann::ordered_json(nullptr);
  }
  if (p.kind() == ProfileKind::W) {
    j["w0"] = m.w0;
    j["Q"] = m.q;
  }
  j["denominator"] = m.denominator;
  j["T_max"] = p.t_max();
  j["tail"] = {{"limit", p.tail().limit}, {"amplitude", p.tail().amplitude}, {"rate", p.tail().rate}};
  j["t"] = std::vector<double>(p.t().begin(), p.t().end());
  j["value"] = std::vector<double>(p.values().begin(), p.values().end());
  j["derivative"] = std::vector<double>(p.derivatives().begin(), p.derivatives().end());
  return j.dump(1) + "\n";
}

}  // namespace edl
