#include <algorithm>
#include <initializer_list>
#include <set>

#include <json.hpp>

#include "edl/cli.hpp"
#include "edl/error.hpp"

namespace edl::cli {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void bad(const std::string& msg) { fail(ErrorCode::ConfigError, msg); }

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) bad(where + " must be an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : obj.items())
    if (!allowed.count(k)) bad("unknown key '" + k + "' in " + where);
}

template <class T>
T get(const json& obj, const char* key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    bad("bad value for '" + std::string(key) + "' in " + where);
  }
}

template <class T>
void maybe(const json& obj, const char* key, const std::string& where, T& dst) {
  if (obj.contains(key)) dst = get<T>(obj, key, where);
}

std::vector<IonSpecies> symmetric_salt() { return {{1, 1}, {-1, 1}}; }

RunConfig figure_base() {
  RunConfig c;
  c.model = Model::PB;
  c.nonlinearity = "sinh";
  c.robin = {{0.1, 1.0}, {0.1, -1.0}};
  return c;
}

RunConfig pb_disk() {
  RunConfig c;
  c.model = Model::PB;
  c.nonlinearity = "sinh";
  c.shape = "disk";
  c.outer_radius = 1.0;
  c.robin = {{0.1, 1.0}};
  return c;
}

RunConfig ccpb_annulus() {
  RunConfig c;
  c.model = Model::CCPB;
  c.species = symmetric_salt();
  c.shape = "annulus";
  c.inner_radius = 1.0;
  c.outer_radius = 2.0;
  c.robin = {{0.1, 1.0}, {0.1, -1.0}};
  return c;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"figure-U", "figure-V", "gouy-chapman", "pb-disk", "pb-disk-corrupt", "ccpb-annulus",
          "ccpb-dirichlet"};
}

RunConfig preset(std::string_view name) {
  RunConfig c;
  if (name == "figure-U" || name == "figure-V") {
    c = figure_base();
  } else if (name == "gouy-chapman") {
    c = figure_base();
    c.robin = {{0.0, 1.0}, {0.0, -1.0}, {0.0, 2.0}, {0.0, -2.0}};
  } else if (name == "pb-disk") {
    c = pb_disk();
  } else if (name == "pb-disk-corrupt") {
    c = pb_disk();
    c.curvature_sign = -1.0;
  } else if (name == "ccpb-annulus") {
    c = ccpb_annulus();
  } else if (name == "ccpb-dirichlet") {
    c = ccpb_annulus();
    c.robin = {{0.0, 1.0}, {0.0, -1.0}};
  } else {
    bad("unknown preset '" + std::string(name) + "'");
  }
  c.preset = std::string(name);
  return c;
}

RunConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    bad(std::string("config is not valid JSON: ") + e.what());
  }
  only_keys(doc, "config", {"preset", "model", "nonlinearity", "species", "domain", "robin",
                            "profile", "eps", "region", "output", "options"});
  RunConfig c;
  if (doc.contains("preset")) c = preset(get<std::string>(doc, "preset", "config"));
  if (doc.contains("model")) {
    auto m = get<std::string>(doc, "model", "config");
    if (m == "pb")
      c.model = Model::PB;
    else if (m == "ccpb")
      c.model = Model::CCPB;
    else
      bad("model must be 'pb' or 'ccpb'");
  }
  maybe(doc, "nonlinearity", "config", c.nonlinearity);
  if (!c.nonlinearity.empty() && c.nonlinearity != "sinh")
    bad("nonlinearity preset must be 'sinh'");
  if (doc.contains("species")) {
    const auto& arr = doc.at("species");
    if (!arr.is_array()) bad("species must be an array");
    c.species.clear();
    for (const auto& s : arr) {
      only_keys(s, "species entry", {"valence", "amount"});
      c.species.push_back({get<double>(s, "valence", "species entry"),
                           get<double>(s, "amount", "species entry")});
    }
  }
  if (doc.contains("domain")) {
    const auto& d = doc.at("domain");
    only_keys(d, "domain", {"shape", "dimension", "inner_radius", "outer_radius"});
    maybe(d, "shape", "domain", c.shape);
    maybe(d, "dimension", "domain", c.dimension);
    maybe(d, "inner_radius", "domain", c.inner_radius);
    maybe(d, "outer_radius", "domain", c.outer_radius);
  }
  if (doc.contains("robin")) {
    const auto& arr = doc.at("robin");
    if (!arr.is_array()) bad("robin must be an array");
    c.robin.clear();
    for (const auto& r : arr) {
      only_keys(r, "robin entry", {"gamma", "phi_bd"});
      c.robin.push_back({get<double>(r, "gamma", "robin entry"), get<double>(r, "phi_bd", "robin entry")});
    }
  }
  if (doc.contains("profile")) {
    const auto& p = doc.at("profile");
    only_keys(p, "profile", {"nodes", "decay_threshold", "cap_factor"});
    maybe(p, "nodes", "profile", c.profile.nodes);
    maybe(p, "decay_threshold", "profile", c.profile.decay_threshold);
    maybe(p, "cap_factor", "profile", c.profile.cap_factor);
  }
  if (doc.contains("eps")) c.eps = get<std::vector<double>>(doc, "eps", "config");
  if (doc.contains("region")) {
    const auto& r = doc.at("region");
    only_keys(r, "region", {"beta", "T"});
    maybe(r, "beta", "region", c.beta);
    maybe(r, "T", "region", c.T);
  }
  maybe(doc, "output", "config", c.output);
  if (doc.contains("options")) {
    const auto& o = doc.at("options");
    only_keys(o, "options", {"curvature_sign", "points", "order", "oracle"});
    maybe(o, "curvature_sign", "options", c.curvature_sign);
    maybe(o, "points", "options", c.points);
    maybe(o, "order", "options", c.order);
    if (o.contains("oracle")) {
      const auto& g = o.at("oracle");
      only_keys(g, "options.oracle", {"wall_spacing", "cluster_width", "richardson", "continuation",
                                      "max_newton", "tolerance", "step_tolerance"});
      maybe(g, "wall_spacing", "options.oracle", c.oracle.wall_spacing);
      maybe(g, "cluster_width", "options.oracle", c.oracle.cluster_width);
      maybe(g, "richardson", "options.oracle", c.oracle.richardson);
      maybe(g, "continuation", "options.oracle", c.oracle.continuation);
      maybe(g, "max_newton", "options.oracle", c.oracle.max_newton);
      maybe(g, "tolerance", "options.oracle", c.oracle.tolerance);
      maybe(g, "step_tolerance", "options.oracle", c.oracle.step_tolerance);
    }
  }
  // plain shape checks; module preconditions are checked in prepare()
  if (c.eps.empty()) bad("eps list is empty");
  for (double e : c.eps)
    if (!(e > 0.0 && e < 1.0)) bad("eps values must lie in (0, 1)");
  if (c.shape != "disk" && c.shape != "ball" && c.shape != "annulus")
    bad("domain.shape must be disk, ball or annulus");
  if (c.dimension < 2 || c.dimension > 3) bad("domain.dimension must be 2 or 3");
  if (c.shape == "disk" && c.dimension != 2) bad("a disk has dimension 2");
  if (c.robin.empty()) bad("robin list is empty");
  if (c.profile.nodes < 64) bad("profile.nodes must be >= 64");
  if (c.points < 2) bad("options.points must be >= 2");
  if (c.order != 1 && c.order != 2) bad("options.order must be 1 or 2");
  if (c.curvature_sign != 1.0 && c.curvature_sign != -1.0) bad("options.curvature_sign must be +1 or -1");
  if (c.oracle.max_newton < 1) bad("options.oracle.max_newton must be >= 1");
  return c;
}

std::string config_json(const RunConfig& c) {
  ordered_json j;
  if (!c.preset.empty()) j["preset"] = c.preset;
  j["model"] = c.model == Model::PB ? "pb" : "ccpb";
  if (!c.nonlinearity.empty()) j["nonlinearity"] = c.nonlinearity;
  j["species"] = ordered_json::array();
  for (const auto& s : c.species) j["species"].push_back({{"valence", s.valence}, {"amount", s.amount}});
  j["domain"] = {{"shape", c.shape},
                 {"dimension", c.dimension},
                 {"inner_radius", c.inner_radius},
                 {"outer_radius", c.outer_radius}};
  j["robin"] = ordered_json::array();
  for (const auto& r : c.robin) j["robin"].push_back({{"gamma", r.gamma}, {"phi_bd", r.phi_bd}});
  j["profile"] = {{"nodes", c.profile.nodes},
                  {"decay_threshold", c.profile.decay_threshold},
                  {"cap_factor", c.profile.cap_factor}};
  j["eps"] = c.eps;
  j["region"] = {{"beta", c.beta}, {"T", c.T}};
  if (!c.output.empty()) j["output"] = c.output;
  j["options"] = {{"curvature_sign", c.curvature_sign},
                  {"points", c.points},
                  {"order", c.order},
                  {"oracle",
                   {{"wall_spacing", c.oracle.wall_spacing},
                    {"cluster_width", c.oracle.cluster_width},
                    {"richardson", c.oracle.richardson},
                    {"continuation", c.oracle.continuation},
                    {"max_newton", c.oracle.max_newton},
                    {"tolerance", c.oracle.tolerance},
                    {"step_tolerance", c.oracle.step_tolerance}}}};
  return j.dump(1) + "\n";
}

Prepared prepare(const RunConfig& c) {
  // module precondition failures here are configuration problems, not solver failures
  try {
    Prepared p{c, std::nullopt, {}};
    auto& sp = p.config.species;
    if (c.nonlinearity == "sinh") sp = symmetric_salt();
    for (auto& s : sp) s.role = c.model == Model::CCPB ? AmountRole::Mass : AmountRole::Concentration;
    if (c.model == Model::PB) p.f = make_classical_pb(sp);
    std::size_t need = c.shape == "annulus" ? 2 : 1;
    if (c.robin.size() < need) bad("robin list has fewer entries than boundary components");
    for (const auto& r : c.robin)
      if (!(r.gamma >= 0.0)) bad("robin gamma must be >= 0");
    if (c.shape == "disk")
      p.domain = make_disk(c.outer_radius, c.robin[0]);
    else if (c.shape == "ball")
      p.domain = make_ball(c.dimension, c.outer_radius, c.robin[0]);
    else
      p.domain = make_annulus(c.dimension, c.inner_radius, c.outer_radius, c.robin[0], c.robin[1]);
    if (c.model == Model::CCPB) {
      if (sp.empty()) bad("species list is empty");
      if (neutrality_defect(sp) > 1e-12) fail(ErrorCode::NeutralityViolated, "species are not neutral");
    }
    RegionParams rp{c.eps.front(), c.beta, c.T};
    if (!(rp.beta > 0.0 && rp.beta < 0.5) || !(rp.T > 0.0)) bad("region needs 0 < beta < 1/2 and T > 0");
    return p;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    bad(e.what());
  }
}

}  // namespace edl::cli
