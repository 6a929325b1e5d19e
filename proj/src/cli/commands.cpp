#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "edl/ccpb.hpp"
#include "edl/cli.hpp"
#include "edl/error.hpp"
#include "edl/format.hpp"

namespace edl::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
}

std::string dump(const ordered_json& j) { return j.dump(1) + "\n"; }

ordered_json config_object(const RunConfig& c) { return ordered_json::parse(config_json(c)); }

ordered_json tail_json(const Profile& p) {
  return {{"limit", p.tail().limit}, {"amplitude", p.tail().amplitude}, {"rate", p.tail().rate}};
}

std::string idx(std::size_t i) { return std::to_string(i); }

std::vector<BoundaryLayer> layers_for(const Prepared& p, std::optional<CcpbConstants>& cc) {
  std::vector<BoundaryLayer> out;
  if (p.config.model == Model::PB) {
    for (std::size_t k = 0; k < p.domain.components.size(); ++k)
      out.push_back(make_pb_layer(*p.f, p.domain, k, p.config.profile));
  } else {
    cc = ccpb_constants(p.domain, p.config.species, p.config.profile);
    out = make_ccpb_layers(*cc);
  }
  return out;
}

// Sweep order: largest eps first so each solve seeds the next.
std::vector<std::size_t> sweep_order(const std::vector<double>& eps) {
  std::vector<std::size_t> order(eps.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return eps[a] > eps[b]; });
  return order;
}

RadialSolveResult oracle_solve(const Prepared& p, double eps, const RadialSolveResult* guess) {
  if (p.config.model == Model::PB) return solve_radial_robin_pb(p.domain, *p.f, eps, p.config.oracle, guess);
  return solve_radial_ccpb(p.domain, p.config.species, eps, p.config.oracle, guess);
}

std::vector<RadialSolveResult> oracle_sweep(const Prepared& p, std::ostream& log) {
  std::vector<RadialSolveResult> out(p.config.eps.size());
  const RadialSolveResult* prev = nullptr;
  for (std::size_t i : sweep_order(p.config.eps)) {
    double eps = p.config.eps[i];
    if (prev && prev->eps == eps) {
      out[i] = *prev;
    } else {
      out[i] = oracle_solve(p, eps, prev);
    }
    log << "oracle eps=" << shortest(eps) << " nodes=" << out[i].r.size()
        << " newton=" << out[i].newton_iterations << "\n";
    prev = &out[i];
  }
  return out;
}

bool region_params_ok(const RegionParams& r) {
  return r.T * std::sqrt(r.eps) < std::pow(r.eps, r.beta);
}

// Sign changes of a sampled derivative, ignoring roundoff-level values.
int sign_changes(std::span<const double> d) {
  double big = 0.0;
  for (double x : d) big = std::max(big, std::abs(x));
  int last = 0, changes = 0;
  for (double x : d) {
    if (std::abs(x) <= 1e-12 * big) continue;
    int s = x > 0 ? 1 : -1;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

struct Check {
  std::string name;
  bool pass;
  ordered_json detail;
};

ordered_json checks_json(const std::vector<Check>& checks, bool& all) {
  all = true;
  ordered_json arr = ordered_json::array();
  for (const auto& c : checks) {
    all = all && c.pass;
    arr.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  }
  return arr;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

}  // namespace

std::vector<std::string> command_names() {
  return {"profiles", "constants", "expand", "oracle", "verify", "figures"};
}

int cmd_profiles(const Prepared& p, const fs::path& out, std::ostream& log) {
  fs::create_directories(out);
  const auto& c = p.config;
  ordered_json meta;
  meta["config"] = config_object(c);
  meta["model"] = to_string(c.model);
  ordered_json list = ordered_json::array();
  if (c.model == Model::PB) {
    meta["reference"] = p.f->reference();
    for (std::size_t k = 0; k < c.robin.size(); ++k) {
      auto u = solve_u(*p.f, c.robin[k], c.profile);
      auto v = solve_v(u, *p.f, c.robin[k]);
      write_file(out / ("u_" + idx(k) + ".csv"), profile_csv(u));
      write_file(out / ("v_" + idx(k) + ".csv"), profile_csv(v));
      ordered_json e{{"index", k},
                     {"gamma", c.robin[k].gamma},
                     {"phi_bd", c.robin[k].phi_bd},
                     {"U0", u.metadata().u0},
                     {"dU0", u.metadata().du0},
                     {"V0", v.metadata().v0},
                     {"t_star", v.metadata().t_star ? ordered_json(*v.metadata().t_star) : ordered_json()},
                     {"u_tail", tail_json(u)},
                     {"v_tail", tail_json(v)}};
      list.push_back(e);
      log << "profiles " << k << " U0=" << shortest(u.metadata().u0) << "\n";
    }
  } else {
    auto cc = ccpb_constants(p.domain, c.species, c.profile);
    meta["phi0_star"] = cc.phi0_star;
    meta["Q"] = cc.q;
    for (std::size_t k = 0; k < cc.u.size(); ++k) {
      write_file(out / ("u_" + idx(k) + ".csv"), profile_csv(cc.u[k]));
      write_file(out / ("v_" + idx(k) + ".csv"), profile_csv(cc.v[k]));
      write_file(out / ("theta_" + idx(k) + ".csv"), profile_csv(cc.theta[k]));
      write_file(out / ("w_" + idx(k) + ".csv"), profile_csv(cc.w[k]));
      const auto& v = cc.v[k];
      list.push_back({{"index", k},
                      {"gamma", c.robin[k].gamma},
                      {"phi_bd", c.robin[k].phi_bd},
                      {"U0", cc.u0[k]},
                      {"dU0", cc.du0[k]},
                      {"V0", v.metadata().v0},
                      {"t_star", v.metadata().t_star ? ordered_json(*v.metadata().t_star) : ordered_json()},
                      {"w0", cc.w[k].metadata().w0},
                      {"u_tail", tail_json(cc.u[k])},
                      {"v_tail", tail_json(v)},
                      {"theta_tail", tail_json(cc.theta[k])},
                      {"w_tail", tail_json(cc.w[k])}});
    }
  }
  meta["profiles"] = list;
  write_file(out / "profiles.json", dump(meta));
  return Ok;
}

int cmd_constants(const Prepared& p, const fs::path& out, std::ostream& log) {
  if (p.config.model != Model::CCPB) fail(ErrorCode::ConfigError, "constants needs model 'ccpb'");
  fs::create_directories(out);
  auto cc = ccpb_constants(p.domain, p.config.species, p.config.profile);
  auto j = ordered_json::parse(constants_json(cc, p.domain));
  ordered_json doc;
  doc["config"] = config_object(p.config);
  doc["constants"] = j;
  write_file(out / "constants.json", dump(doc));
  log << "constants phi0*=" << shortest(cc.phi0_star) << " Q=" << shortest(cc.q) << "\n";
  return Ok;
}

int cmd_expand(const Prepared& p, const fs::path& out, std::ostream& log) {
  fs::create_directories(out);
  const auto& c = p.config;
  std::optional<CcpbConstants> cc;
  auto layers = layers_for(p, cc);
  ordered_json regions = ordered_json::array();
  for (std::size_t i = 0; i < c.eps.size(); ++i) {
    double eps = c.eps[i];
    for (const auto& layer : layers) {
      std::size_t k = layer.boundary;
      double H = p.domain.components[k].mean_curvature;
      std::string csv = "t,distance,potential,field,density,traction\n";
      for (int j = 0; j < c.points; ++j) {
        double t = c.T * j / (c.points - 1);
        ExpansionQuery q{c.model, k, H, t, eps, c.order};
        csv += shortest(t) + ',' + shortest(t * std::sqrt(eps)) + ',' + shortest(potential(q, layer)) +
               ',' + shortest(field_normal_component(q, layer)) + ',' +
               shortest(charge_density(q, layer)) + ',' + shortest(maxwell_traction(q, layer)) + '\n';
      }
      write_file(out / ("expand_" + idx(i) + "_" + idx(k) + ".csv"), csv);
      RegionParams rp{eps, c.beta, c.T};
      ordered_json entry{{"eps", eps}, {"boundary", k}};
      if (region_params_ok(rp))
        entry["charges"] = ordered_json::parse(region_charge_json(region_charge(p.domain, k, rp, layer)));
      else
        entry["charges"] = nullptr;  // T sqrt(eps) >= eps^beta: region II is empty
      regions.push_back(entry);
    }
    log << "expand eps=" << shortest(eps) << "\n";
  }
  ordered_json doc;
  doc["config"] = config_object(c);
  doc["regions"] = regions;
  write_file(out / "expand.json", dump(doc));
  return Ok;
}

int cmd_oracle(const Prepared& p, const fs::path& out, std::ostream& log) {
  fs::create_directories(out);
  const auto& c = p.config;
  std::optional<CcpbConstants> cc;
  auto layers = layers_for(p, cc);
  auto runs = oracle_sweep(p, log);
  for (std::size_t i = 0; i < runs.size(); ++i) {
    write_file(out / ("oracle_" + idx(i) + ".csv"), radial_csv(runs[i]));
    write_file(out / ("oracle_" + idx(i) + ".json"), radial_json(runs[i]));
    RegionParams rp{c.eps[i], c.beta, c.T};
    auto rep = compare_expansion(runs[i], p.domain, layers, rp, c.curvature_sign);
    write_file(out / ("compare_" + idx(i) + ".json"), comparison_json(rep));
  }
  ordered_json doc;
  doc["config"] = config_object(c);
  doc["runs"] = runs.size();
  write_file(out / "oracle.json", dump(doc));
  return Ok;
}

int cmd_verify(const Prepared& p, const fs::path& out, std::ostream& log) {
  fs::create_directories(out);
  const auto& c = p.config;
  std::optional<CcpbConstants> cc;
  auto layers = layers_for(p, cc);
  auto runs = oracle_sweep(p, log);
  auto order = sweep_order(c.eps);
  std::vector<ComparisonReport> reps(runs.size());
  for (std::size_t i = 0; i < runs.size(); ++i)
    reps[i] = compare_expansion(runs[i], p.domain, layers, {c.eps[i], c.beta, c.T}, c.curvature_sign);

  std::vector<Check> checks;
  ordered_json info = ordered_json::array();
  std::string csv = "eps,boundary,E1,E2,EF1,EF2,M,M_prime,region3_max,region3_bound,residual,conservation,neutrality,drift_gap\n";
  std::vector<double> drift;
  for (std::size_t i : order) {
    const auto& r = runs[i];
    double gap = 0.0;
    if (cc) gap = std::abs((r.phi_eps_star - cc->phi0_star) / std::sqrt(r.eps) - cc->q);
    drift.push_back(gap);
    for (const auto& comp : reps[i].components) {
      bool fitted = comp.region2_nodes >= 2;  // no envelope without region II samples
      csv += shortest(r.eps) + ',' + idx(comp.boundary) + ',' + shortest(comp.E1) + ',' +
             shortest(comp.E2) + ',' + shortest(comp.EF1) + ',' + shortest(comp.EF2) + ',' +
             (fitted ? shortest(comp.envelope.M) + ',' + shortest(comp.envelope.M_prime) : std::string(",")) + ',' +
             shortest(comp.region3_max) + ',' + shortest(comp.region3_bound) + ',' +
             shortest(r.residual_norm) + ',' + shortest(r.conservation_residual) + ',' +
             shortest(r.neutrality_residual) + ',' + shortest(gap) + '\n';
    }
    checks.push_back({"newton residual eps=" + shortest(r.eps), r.residual_norm <= c.oracle.tolerance,
                      {{"value", r.residual_norm}}});
    if (c.model == Model::PB) {
      checks.push_back({"conservation eps=" + shortest(r.eps), r.conservation_residual <= 1e-9,
                        {{"value", r.conservation_residual}}});
    } else {
      double lo = std::min(c.robin[0].phi_bd, c.robin[1].phi_bd);
      double hi = std::max(c.robin[0].phi_bd, c.robin[1].phi_bd);
      checks.push_back({"neutrality eps=" + shortest(r.eps), r.neutrality_residual <= 1e-8,
                        {{"value", r.neutrality_residual}}});
      checks.push_back({"bulk potential inside data eps=" + shortest(r.eps),
                        r.phi_eps_star > lo && r.phi_eps_star < hi, {{"value", r.phi_eps_star}}});
    }
    // region charges are pinned at small eps only
    RegionParams rp{r.eps, c.beta, c.T};
    if (r.eps <= 1e-4 && region_params_ok(rp)) {
      for (const auto& layer : layers) {
        auto formula = region_charge(p.domain, layer.boundary, rp, layer);
        auto oracle = oracle_region_charge(r, p.domain, layer.boundary, rp,
                                           c.model == Model::PB ? &*p.f : nullptr);
        double e1 = std::abs(oracle.region1 - formula.region1);
        double e2 = std::abs(oracle.region2 - formula.region2);
        int s = formula.expected_sign;
        bool signs = s == 0 || (oracle.region1 * s > 0 && oracle.region2 * s > 0);
        std::string name = "region charges boundary=" + idx(layer.boundary) + " eps=" + shortest(r.eps);
        ordered_json detail{{"region1_error", e1}, {"region2_error", e2}, {"signs", signs}};
        // the CCPB layers decay slowly, so at beta = 1/4 region II misses a tail that is
        // not small against eps; those numbers are reported, not asserted
        if (c.model == Model::PB)
          checks.push_back({name, e1 <= 0.1 * r.eps && e2 <= 0.1 * r.eps && signs, detail});
        else
          info.push_back({{"name", name}, {"detail", detail}});
      }
    }
  }
  if (order.size() >= 2) {
    for (std::size_t k = 0; k < layers.size(); ++k) {
      std::vector<double> E1, E2, EF1, EF2, c1, cf1;
      for (std::size_t i : order) {
        const auto& comp = reps[i].components[k];
        E1.push_back(comp.E1);
        E2.push_back(comp.E2);
        EF1.push_back(comp.EF1);
        EF2.push_back(comp.EF2);
        c1.push_back(comp.E1 / std::sqrt(c.eps[i]));
        cf1.push_back(comp.EF1 / std::sqrt(c.eps[i]));
      }
      std::string b = " boundary=" + idx(layers[k].boundary);
      checks.push_back({"E2 decreasing" + b, strictly_decreasing(E2), {{"values", E2}}});
      checks.push_back({"E2 halved" + b, E2.back() <= 0.5 * E2.front(), {{"values", E2}}});
      checks.push_back({"EF2 decreasing" + b, strictly_decreasing(EF2), {{"values", EF2}}});
      checks.push_back({"EF2 halved" + b, EF2.back() <= 0.5 * EF2.front(), {{"values", EF2}}});
      if (c.model == Model::PB) {
        auto spread = [](const std::vector<double>& v) {
          return *std::max_element(v.begin(), v.end()) / *std::min_element(v.begin(), v.end());
        };
        checks.push_back({"E1 decreasing" + b, strictly_decreasing(E1), {{"values", E1}}});
        checks.push_back({"E1 / sqrt(eps) within 2x" + b, spread(c1) <= 2.0, {{"values", c1}}});
        checks.push_back({"EF1 decreasing" + b, strictly_decreasing(EF1), {{"values", EF1}}});
        checks.push_back({"EF1 / sqrt(eps) within 2x" + b, spread(cf1) <= 2.0, {{"values", cf1}}});
      }
    }
    if (cc) checks.push_back({"drift approaches Q", strictly_decreasing(drift), {{"values", drift}}});
  }
  bool all = true;
  ordered_json doc;
  doc["config"] = config_object(c);
  doc["checks"] = checks_json(checks, all);
  if (!info.empty()) doc["reported"] = info;
  doc["pass"] = all;
  write_file(out / "summary.csv", csv);
  write_file(out / "verify.json", dump(doc));
  for (const auto& ch : checks) log << (ch.pass ? "PASS " : "FAIL ") << ch.name << "\n";
  return all ? Ok : AcceptanceFailed;
}

int cmd_figures(const Prepared& p, const fs::path& out, std::ostream& log) {
  if (p.config.model != Model::PB) fail(ErrorCode::ConfigError, "figures needs model 'pb'");
  fs::create_directories(out);
  const auto& c = p.config;
  std::vector<Check> checks;
  std::vector<double> v_sign(c.robin.size(), 0.0);
  const double ref = p.f->reference();
  for (std::size_t k = 0; k < c.robin.size(); ++k) {
    auto u = solve_u(*p.f, c.robin[k], c.profile);
    auto v = solve_v(u, *p.f, c.robin[k]);
    write_file(out / ("figure4_u_" + idx(k) + ".csv"), profile_csv(u));
    write_file(out / ("figure5_v_" + idx(k) + ".csv"), profile_csv(v));
    double dir = c.robin[k].phi_bd > ref ? -1.0 : 1.0;
    bool mono = true;
    for (double d : u.derivatives()) mono = mono && d * dir >= 0.0;
    checks.push_back({"u monotone " + idx(k), mono, {{"phi_bd", c.robin[k].phi_bd}}});
    double vmax = 0.0, vmin = 0.0;
    for (double x : v.values()) {
      vmax = std::max(vmax, x);
      vmin = std::min(vmin, x);
    }
    double scale = std::max(vmax, -vmin);
    bool one_sign = vmax <= 1e-12 * scale || vmin >= -1e-12 * scale;
    v_sign[k] = vmax > -vmin ? 1.0 : -1.0;
    int turns = sign_changes(v.derivatives());
    checks.push_back({"v single-signed " + idx(k), one_sign, {{"min", vmin}, {"max", vmax}}});
    checks.push_back({"v unimodal " + idx(k), turns <= 1, {{"turns", turns}}});
  }
  for (std::size_t a = 0; a < c.robin.size(); ++a)
    for (std::size_t b = a + 1; b < c.robin.size(); ++b)
      if (c.robin[a].gamma == c.robin[b].gamma && c.robin[a].phi_bd - ref == -(c.robin[b].phi_bd - ref))
        checks.push_back({"v opposite signs " + idx(a) + "," + idx(b), v_sign[a] * v_sign[b] < 0.0, {}});
  bool all = true;
  ordered_json doc;
  doc["config"] = config_object(c);
  doc["checks"] = checks_json(checks, all);
  doc["pass"] = all;
  write_file(out / "figures.json", dump(doc));
  for (const auto& ch : checks) log << (ch.pass ? "PASS " : "FAIL ") << ch.name << "\n";
  return all ? Ok : AcceptanceFailed;
}

int run(std::string_view command, std::string_view config_text, const fs::path& out, bool verbose,
        std::ostream& err) {
  auto report = [&](std::string_view code, const std::string& msg, int exit) {
    ordered_json j{{"error", code}, {"message", msg}, {"exit", exit}};
    err << j.dump() << "\n";
    return exit;
  };
  std::ostringstream sink;
  std::ostream& log = verbose ? err : sink;
  std::optional<Prepared> prep;
  fs::path dir = out;
  try {
    auto cfg = parse_config(config_text);
    if (dir.empty()) dir = cfg.output;
    if (dir.empty()) fail(ErrorCode::ConfigError, "no output directory given");
    prep = prepare(cfg);
  } catch (const Error& e) {
    return report(to_string(e.code()), e.what(), BadConfig);
  }
  const Prepared& p = *prep;
  try {
    if (command == "profiles") return cmd_profiles(p, dir, log);
    if (command == "constants") return cmd_constants(p, dir, log);
    if (command == "expand") return cmd_expand(p, dir, log);
    if (command == "oracle") return cmd_oracle(p, dir, log);
    if (command == "verify") return cmd_verify(p, dir, log);
    if (command == "figures") return cmd_figures(p, dir, log);
    return report("ConfigError", "unknown command '" + std::string(command) + "'", BadConfig);
  } catch (const Error& e) {
    return report(to_string(e.code()), e.what(), e.code() == ErrorCode::ConfigError ? BadConfig : SolverFailed);
  } catch (const std::exception& e) {
    return report("Failure", e.what(), SolverFailed);
  }
}

}  // namespace edl::cli
