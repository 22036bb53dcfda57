// Command-line front end: experiment configuration, subcommand dispatch,
// deterministic runs, structured JSON/CSV reports.
//
// Configuration is a flat key=value file plus flag overrides; flags win.
// Exit codes: 0 success, 1 validation error, 2 numerical failure.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "contact_spectral/contact_spectral.hpp"

namespace cs = contact_spectral;

namespace {

constexpr const char* kToolkitVersion = "1.0.0";

struct Settings {
  std::map<std::string, std::string> kv;

  bool has(const std::string& key) const { return kv.count(key) > 0; }
  void set(const std::string& key, const std::string& value) { kv[key] = value; }

  std::string str(const std::string& key, const std::string& fallback) const {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
  }
  double num(const std::string& key, double fallback) const {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    try {
      return std::stod(it->second);
    } catch (...) {
      throw cs::ValidationError("config value for '" + key + "' is not a number");
    }
  }
  long integer(const std::string& key, long fallback) const {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    try {
      return std::stol(it->second);
    } catch (...) {
      throw cs::ValidationError("config value for '" + key + "' is not an integer");
    }
  }
  bool flag(const std::string& key, bool fallback) const {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    return it->second == "1" || it->second == "true" || it->second == "yes";
  }
};

void load_config_file(const std::string& path, Settings& s) {
  std::ifstream in(path);
  if (!in) throw cs::ValidationError("cannot open config file: " + path);
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string v) {
      auto a = v.find_first_not_of(" \t\r");
      auto b = v.find_last_not_of(" \t\r");
      if (a == std::string::npos) return std::string();
      return v.substr(a, b - a + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (!key.empty()) s.set(key, value);
  }
}

// The isotopy described by the settings: reeb | profile | bump-lift | bump.
cs::ContactIsotopy build_isotopy(const Settings& s) {
  std::string kind = s.str("isotopy", "reeb");
  int steps = static_cast<int>(s.integer("steps", 1000));
  int n = static_cast<int>(s.integer("n", 1));
  if (n < 1 || n > 7) throw cs::ValidationError("n must be in [1, 7]");
  if (kind == "reeb") return cs::reeb_isotopy(s.num("reeb_t", 1.0), n);
  if (kind == "profile") {
    auto family = s.str("family", "strict") == "relaxed"
                      ? cs::ProfileFunction::Family::relaxed_family
                      : cs::ProfileFunction::Family::strict_family;
    cs::ProfileFunction prof =
        cs::make_profile(s.num("rho", -0.4), s.num("r", 1.0), s.num("eps", 0.1), family);
    return cs::profile_isotopy(prof, n);
  }
  if (n != 1) throw cs::ValidationError("bump fixtures are built on the n = 1 model");
  if (kind == "bump-lift") {
    return cs::fixtures::small_bump_lift(
        s.num("amplitude", 0.3), {s.num("center_x", 0.0), s.num("center_y", 0.0)},
        s.num("radius", 0.6), std::max(100, steps / 2));
  }
  if (kind == "bump") {
    cs::fixtures::BumpSpec bs;
    bs.amplitude = s.num("amplitude", 0.05);
    bs.center = {s.num("center_x", 0.0), s.num("center_y", 0.0)};
    bs.radius = s.num("radius", 0.6);
    bs.tau_weight = s.num("tau_weight", 0.4);
    bs.tau_phase = s.num("tau_phase", 0.0);
    bs.time_weight = s.num("time_weight", 0.0);
    return cs::integrate_isotopy(cs::fixtures::bump_contact_hamiltonian(bs), steps,
                                 static_cast<int>(s.integer("order", 4)));
  }
  throw cs::ValidationError("unknown isotopy kind: " + kind);
}

cs::SolverOptions solver_options(const Settings& s) {
  cs::SolverOptions opt;
  opt.seeds = static_cast<int>(s.integer("seeds", 4096));
  opt.seed = static_cast<std::uint64_t>(s.integer("seed", 12345));
  opt.residual_tol = s.num("residual_tol", cs::tol::solver_residual);
  opt.distinct_tol = s.num("distinct_tol", cs::tol::distinct);
  if (opt.residual_tol <= 0.0 || opt.distinct_tol <= 0.0)
    throw cs::ValidationError("tolerances must be positive");
  return opt;
}

cs::JsonValue point_json(const cs::PrequantizationPoint& p) {
  cs::JsonValue v = cs::JsonValue::object();
  cs::JsonValue y = cs::JsonValue::array();
  for (double c : p.y) y.push(cs::JsonValue::number(c));
  v.set("y", std::move(y));
  v.set("tau", cs::JsonValue::number(p.tau()));
  v.set("tau_lift", cs::JsonValue::number(p.tau_lift));
  return v;
}

struct RunOutput {
  cs::JsonValue results = cs::JsonValue::array();
  cs::JsonValue tolerances = cs::JsonValue::object();
  std::optional<cs::CsvTable> csv;
  int exit_code = 0;
};

// ---------------------------------------------------------------------------
// Subcommand handlers.

RunOutput run_flow(const Settings& s) {
  RunOutput out;
  std::string kind = s.str("isotopy", "profile");
  int steps = static_cast<int>(s.integer("steps", 1000));
  cs::JsonValue res = cs::JsonValue::object();
  res.set("kind", cs::JsonValue::string(kind));
  res.set("steps", cs::JsonValue::integer(steps));
  if (kind == "profile") {
    cs::ProfileFunction prof =
        cs::make_profile(s.num("rho", -0.4), s.num("r", 1.0), s.num("eps", 0.1));
    cs::ContactIsotopy numeric = cs::integrate_isotopy(cs::profile_hamiltonian(prof), steps);
    double worst = 0.0;
    for (int is = 1; is <= 20; ++is) {
      double s0 = (prof.r + 0.2) * is / 20.0;
      cs::PrequantizationPoint x =
          cs::make_point({s0 * std::cos(0.4), s0 * std::sin(0.4)}, 0.15);
      for (int it = 1; it <= 8; ++it) {
        double t = it / 8.0;
        worst = std::max(worst, cs::sigma_distance(numeric.evaluate(t, x).point,
                                                   cs::closed_form_flow_cartesian(prof, t, x)));
      }
    }
    res.set("closed_form_sup_error", cs::JsonValue::number(worst));
  } else {
    cs::ContactIsotopy iso = build_isotopy(s);
    cs::PrequantizationPoint x = cs::make_point(
        {s.num("start_x", 0.3), s.num("start_y", 0.0)}, s.num("start_tau", 0.0));
    cs::JsonValue traj = cs::JsonValue::array();
    for (int k = 0; k <= 8; ++k) {
      auto sample = iso.evaluate(k / 8.0, x);
      cs::JsonValue row = point_json(sample.point);
      row.set("t", cs::JsonValue::number(k / 8.0));
      row.set("rho", cs::JsonValue::number(sample.rho));
      traj.push(std::move(row));
    }
    res.set("trajectory", std::move(traj));
  }
  out.results.push(std::move(res));
  return out;
}

RunOutput run_translated_points(const Settings& s) {
  RunOutput out;
  cs::ContactIsotopy phi = build_isotopy(s);
  cs::DomainSpec box = cs::DomainSpec::ball(s.num("box_radius", 1.2));
  auto pts = cs::find_translated_points(phi, box, s.num("shift_lo", -1.0),
                                        s.num("shift_hi", 1.0), solver_options(s));
  cs::CsvTable csv({"shift", "action", "contractible", "winding", "s", "tau", "multiplicity"});
  for (const auto& tp : pts) {
    double srad = std::sqrt(cs::sq(tp.x.y[0]) + cs::sq(tp.x.y[1]));
    cs::JsonValue row = cs::JsonValue::object();
    row.set("point", point_json(tp.x));
    row.set("shift", cs::JsonValue::number(tp.shift));
    row.set("action", cs::JsonValue::number(tp.action));
    row.set("conformal_residual", cs::JsonValue::number(tp.conformal_residual));
    row.set("contractible", cs::JsonValue::boolean(tp.contractible));
    row.set("winding", cs::JsonValue::integer(tp.winding));
    row.set("multiplicity", cs::JsonValue::integer(tp.multiplicity));
    out.results.push(std::move(row));
    csv.add_row({cs::CsvTable::cell(tp.shift), cs::CsvTable::cell(tp.action),
                 cs::CsvTable::cell(tp.contractible),
                 cs::CsvTable::cell(static_cast<long long>(tp.winding)),
                 cs::CsvTable::cell(srad), cs::CsvTable::cell(tp.x.tau()),
                 cs::CsvTable::cell(static_cast<long long>(tp.multiplicity))});
  }
  out.csv = std::move(csv);
  out.tolerances.set("residual_tol", cs::JsonValue::number(solver_options(s).residual_tol));
  out.tolerances.set("distinct_tol", cs::JsonValue::number(solver_options(s).distinct_tol));
  return out;
}

RunOutput run_spectrum(const Settings& s) {
  RunOutput out;
  cs::ContactIsotopy phi = build_isotopy(s);
  cs::DomainSpec box = cs::DomainSpec::ball(s.num("box_radius", 1.2));
  auto spec = cs::action_spectrum(phi, box, s.num("window_lo", -0.9), s.num("window_hi", 0.9),
                                  solver_options(s));
  cs::CsvTable csv({"action", "shift", "contractible", "s_cluster"});
  for (const auto& e : spec.entries) {
    cs::JsonValue row = cs::JsonValue::object();
    row.set("action", cs::JsonValue::number(e.action));
    row.set("shift", cs::JsonValue::number(e.shift));
    row.set("contractible", cs::JsonValue::boolean(e.contractible));
    row.set("winding", cs::JsonValue::integer(e.winding));
    row.set("s_cluster", cs::JsonValue::number(e.s_cluster));
    row.set("multiplicity", cs::JsonValue::integer(e.multiplicity));
    out.results.push(std::move(row));
    csv.add_row({cs::CsvTable::cell(e.action), cs::CsvTable::cell(e.shift),
                 cs::CsvTable::cell(e.contractible), cs::CsvTable::cell(e.s_cluster)});
  }
  cs::JsonValue flags = cs::JsonValue::object();
  flags.set("nonresonant_raw", cs::JsonValue::boolean(spec.nonresonant_raw));
  flags.set("nonresonant_contractible",
            cs::JsonValue::boolean(spec.nonresonant_contractible));
  out.results.push(std::move(flags));
  out.csv = std::move(csv);
  return out;
}

RunOutput run_action(const Settings& s) {
  RunOutput out;
  cs::ContactIsotopy phi = build_isotopy(s);
  cs::CutoffProfile cutoff = cs::default_cutoff();
  int N = static_cast<int>(s.integer("loop_n", 256));
  std::string loop_kind = s.str("loop", "critical-pair");
  cs::DiscretizedLoop loop;
  if (loop_kind == "constant") {
    cs::PrequantizationPoint x = cs::make_point(
        {s.num("start_x", 0.3), s.num("start_y", 0.0)}, s.num("start_tau", 0.0));
    loop.eta = s.num("eta", 0.0);
    loop.samples.assign(N + 1, cs::SymplectizationPoint{x, s.num("loop_r", 1.0)});
  } else if (loop_kind == "critical-pair") {
    std::string kind = s.str("isotopy", "reeb");
    cs::PrequantizationPoint tp;
    double shift;
    if (kind == "reeb") {
      tp = cs::make_point({s.num("start_x", 0.3), s.num("start_y", 0.0)},
                          s.num("start_tau", 0.0));
      shift = s.num("reeb_t", 1.0);
    } else if (kind == "profile") {
      double eps = s.num("eps", 0.1);
      tp = cs::make_point({0.5 * eps, 0.0}, s.num("start_tau", 0.0));
      shift = s.num("rho", -0.4);
    } else if (kind == "bump-lift") {
      tp = cs::make_point({s.num("center_x", 0.0), s.num("center_y", 0.0)},
                          s.num("start_tau", 0.0));
      shift = -s.num("amplitude", 0.3);
    } else {
      throw cs::ValidationError("critical-pair loops need a reeb, profile, or bump-lift isotopy");
    }
    loop = cs::make_critical_pair(phi, tp, shift, N, cutoff);
  } else if (loop_kind == "file") {
    std::ifstream in(s.str("loop_file", ""));
    if (!in) throw cs::ValidationError("cannot open loop file");
    loop.eta = s.num("eta", 0.0);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::istringstream ls(line);
      double y1, y2, tau, r;
      char comma;
      if (ls >> y1 >> comma >> y2 >> comma >> tau >> comma >> r)
        loop.samples.push_back(
            cs::SymplectizationPoint{cs::PrequantizationPoint{{y1, y2}, tau}, r});
    }
  } else {
    throw cs::ValidationError("unknown loop kind: " + loop_kind);
  }
  auto value = cs::evaluate_rabinowitz_action(loop, phi, cutoff);
  double residual = cs::critical_residual(loop, phi, cutoff);
  cs::JsonValue res = cs::JsonValue::object();
  res.set("loop", cs::JsonValue::string(loop_kind));
  res.set("segments", cs::JsonValue::integer(loop.segments()));
  res.set("eta", cs::JsonValue::number(loop.eta));
  res.set("action", cs::JsonValue::number(value.value));
  res.set("quadrature_error_estimate", cs::JsonValue::number(value.quadrature_error_estimate));
  res.set("critical_residual", cs::JsonValue::number(residual));
  out.results.push(std::move(res));
  return out;
}

RunOutput run_profile(const Settings& s) {
  RunOutput out;
  auto family = s.str("family", "strict") == "relaxed"
                    ? cs::ProfileFunction::Family::relaxed_family
                    : cs::ProfileFunction::Family::strict_family;
  cs::ProfileFunction prof =
      cs::make_profile(s.num("rho", -0.4), s.num("r", 1.0), s.num("eps", 0.1), family);
  double margin = cs::verify_profile(prof);

  if (s.flag("scan", false)) {
    static const cs::ScanProfileFamily scan_family;
    cs::ScanResult scan = cs::g_and_l_scan(
        scan_family, static_cast<int>(s.integer("scan_grid", 1000)));
    cs::CsvTable csv({"rho", "l", "g"});
    for (const auto& row : scan.rows)
      csv.add_row({cs::CsvTable::cell(row.rho), cs::CsvTable::cell(row.l),
                   cs::CsvTable::cell(row.g)});
    out.csv = std::move(csv);
    cs::JsonValue root = cs::JsonValue::object();
    root.set("rho0", cs::JsonValue::number(scan.rho0));
    root.set("rho1", cs::JsonValue::number(scan.rho1));
    root.set("g_at_root", cs::JsonValue::number(scan.g_at_root));
    root.set("semicontinuity_ok", cs::JsonValue::boolean(scan.semicontinuity_ok));
    out.results.push(std::move(root));
    return out;
  }

  cs::ContactIsotopy phi = cs::profile_isotopy(prof);
  int steps = static_cast<int>(s.integer("steps", 1000));
  cs::ContactIsotopy numeric = cs::integrate_isotopy(cs::profile_hamiltonian(prof), steps);
  double sup_err = 0.0;
  for (int is = 1; is <= 16; ++is) {
    double s0 = (prof.r + 0.2) * is / 16.0;
    cs::PrequantizationPoint x = cs::make_point({s0, 0.0}, 0.2);
    for (int it = 1; it <= 5; ++it) {
      double t = it / 5.0;
      sup_err = std::max(sup_err, cs::sigma_distance(numeric.evaluate(t, x).point,
                                                     cs::closed_form_flow_cartesian(prof, t, x)));
    }
  }
  auto spec = cs::action_spectrum(phi, cs::DomainSpec::ball(prof.r + 0.2),
                                  s.num("window_lo", -0.9), s.num("window_hi", 0.9),
                                  solver_options(s));
  cs::JsonValue res = cs::JsonValue::object();
  res.set("rho", cs::JsonValue::number(prof.rho));
  res.set("r", cs::JsonValue::number(prof.r));
  res.set("eps", cs::JsonValue::number(prof.collar));
  res.set("envelope_margin", cs::JsonValue::number(margin));
  res.set("integrator_sup_error", cs::JsonValue::number(sup_err));
  cs::JsonValue specv = cs::JsonValue::array();
  for (double v : spec.values(true)) specv.push(cs::JsonValue::number(v));
  res.set("contractible_spectrum", std::move(specv));
  cs::JsonValue regions = cs::JsonValue::array();
  for (const auto& reg : cs::enumerate_translated_points_closed_form(prof)) {
    cs::JsonValue r = cs::JsonValue::object();
    r.set("s_lo", cs::JsonValue::number(reg.s_lo));
    r.set("s_hi", cs::JsonValue::number(reg.s_hi));
    r.set("shift", cs::JsonValue::number(reg.shift));
    r.set("collar", cs::JsonValue::boolean(reg.collar));
    regions.push(std::move(r));
  }
  res.set("translated_regions", std::move(regions));
  out.results.push(std::move(res));
  cs::CsvTable csv({"s", "f", "fp"});
  for (const auto& row : cs::profile_table(prof, static_cast<int>(s.integer("table_rows", 200))))
    csv.add_row({cs::CsvTable::cell(row.s), cs::CsvTable::cell(row.f),
                 cs::CsvTable::cell(row.fp)});
  out.csv = std::move(csv);
  return out;
}

RunOutput run_capacity(const Settings& s) {
  RunOutput out;
  cs::JsonValue res = cs::JsonValue::object();
  if (s.has("domain")) {
    std::string kind = s.str("domain", "ball");
    cs::DomainSpec d = cs::DomainSpec::ball(s.num("domain_radius", 1.0));
    if (kind == "cylinder") d.kind = cs::DomainSpec::Kind::cylinder;
    if (kind == "product") d.kind = cs::DomainSpec::Kind::product_with_circle;
    if (kind == "scaled") {
      d.kind = cs::DomainSpec::Kind::liouville_scaled;
      d.scale = s.num("domain_scale", 1.0);
    }
    double cap = cs::domain_capacity(d);
    res.set("domain", cs::JsonValue::string(kind));
    res.set("capacity", cs::JsonValue::number(cap));
    res.set("capacity_ceiling", cs::JsonValue::integer(cs::snap_ceil(cap)));
  } else {
    cs::ContactIsotopy phi = build_isotopy(s);
    cs::SpectralOptions opt;
    opt.box = cs::DomainSpec::ball(s.num("box_radius", 1.2));
    if (s.has("window_lo")) opt.window_lo = s.num("window_lo", -1.2);
    if (s.has("window_hi")) opt.window_hi = s.num("window_hi", 1.2);
    opt.solver = solver_options(s);
    opt.with_snapshot = s.flag("snapshot", true);
    cs::SpectralValue v = cs::spectral_number(phi, opt);
    const char* names[] = {"reeb", "small-bump", "lifted-hamiltonian", "profile-flow",
                           "spectrum-bracket"};
    res.set("method", cs::JsonValue::string(names[static_cast<int>(v.method)]));
    res.set("c", cs::JsonValue::number(v.c));
    if (v.pinned()) {
      res.set("c_ceiling", cs::JsonValue::integer(cs::snap_ceil(v.c)));
    } else if (v.bracket) {
      cs::JsonValue b = cs::JsonValue::array();
      b.push(cs::JsonValue::number(v.bracket->first));
      b.push(cs::JsonValue::number(v.bracket->second));
      res.set("bracket", std::move(b));
    }
    cs::JsonValue specv = cs::JsonValue::array();
    for (const auto& e : v.spectrum_snapshot.entries)
      if (e.contractible) specv.push(cs::JsonValue::number(e.action));
    res.set("contractible_spectrum", std::move(specv));
  }
  out.results.push(std::move(res));
  return out;
}

RunOutput run_nonsqueeze(const Settings& s) {
  RunOutput out;
  if (!s.has("source_capacity") || !s.has("target_capacity"))
    throw cs::ValidationError("nonsqueeze needs source_capacity and target_capacity");
  auto cert = cs::nonsqueeze_certificate(s.num("source_capacity", 0.0),
                                         s.num("target_capacity", 0.0));
  cs::JsonValue res = cs::JsonValue::object();
  res.set("source_capacity", cs::JsonValue::number(cert.source_capacity));
  res.set("target_capacity", cs::JsonValue::number(cert.target_capacity));
  res.set("source_capacity_ceiling", cs::JsonValue::integer(cert.source_capacity_ceiling));
  res.set("target_capacity_ceiling", cs::JsonValue::integer(cert.target_capacity_ceiling));
  res.set("verdict",
          cs::JsonValue::string(cert.obstruction ? "obstruction" : "no-obstruction"));
  out.results.push(std::move(res));
  return out;
}

RunOutput run_hz_probe(const Settings& s) {
  RunOutput out;
  std::string system = s.str("hamiltonian", "harmonic");
  int grid = static_cast<int>(s.integer("probe_grid", 64));
  double limit = s.num("period_limit", 1.5);
  cs::HZProbeReport rep;
  if (system == "harmonic") {
    rep = cs::hz_admissibility_probe(
        cs::probe_plane_system(cs::fixtures::harmonic_oscillator(), 0.9, grid), limit);
  } else if (system == "admissible") {
    cs::ScalarField H = cs::fixtures::admissible_radial_field(s.num("amplitude", 2.0),
                                                              s.num("r", 1.0), s.num("eps", 0.1));
    rep = cs::hz_admissibility_probe(cs::probe_plane_system(H, 0.95, grid), limit);
  } else if (system == "cutoff") {
    cs::ScalarField H = cs::fixtures::admissible_radial_field(s.num("amplitude", 2.0),
                                                              s.num("r", 1.0), s.num("eps", 0.1));
    cs::HZCutoff cut = cs::hz_cutoff(H, s.num("cutoff_r", 2.5), s.num("cutoff_eps", 0.1));
    rep = cs::hz_admissibility_probe(
        cs::probe_cutoff_system(cut, 0.95, s.num("cutoff_r", 2.5) - 0.05, grid), limit);
  } else {
    throw cs::ValidationError("unknown probe system: " + system);
  }
  cs::JsonValue res = cs::JsonValue::object();
  res.set("hamiltonian", cs::JsonValue::string(rep.hamiltonian_description));
  res.set("tested_initial_conditions", cs::JsonValue::integer(rep.tested_initial_conditions));
  res.set("min_detected_period", cs::JsonValue::number(rep.min_detected_period));
  res.set("detections", cs::JsonValue::integer(rep.detections));
  res.set("admissible_consistent", cs::JsonValue::boolean(rep.admissible_consistent));
  res.set("period_limit", cs::JsonValue::number(rep.period_limit));
  out.results.push(std::move(res));
  if (s.flag("witness", false)) {
    auto wit = cs::displacement_witness(s.num("witness_radius", 1.0),
                                        s.num("witness_margin", 0.1));
    cs::JsonValue w = cs::JsonValue::object();
    w.set("radius", cs::JsonValue::number(wit.radius));
    w.set("margin", cs::JsonValue::number(wit.margin));
    w.set("energy", cs::JsonValue::number(wit.energy));
    w.set("min_clearance", cs::JsonValue::number(wit.min_clearance));
    w.set("energy_bound", cs::JsonValue::number(cs::kPi * cs::sq(wit.radius) + wit.margin));
    out.results.push(std::move(w));
  }
  return out;
}

RunOutput run_verify(const Settings&) {
  RunOutput out;
  auto results = cs::run_acceptance_suite();
  bool all = true;
  for (const auto& r : results) {
    std::printf("%s %s\n", r.pass ? "PASS" : "FAIL", r.id.c_str());
    std::fflush(stdout);
    all = all && r.pass;
    cs::JsonValue row = cs::JsonValue::object();
    row.set("id", cs::JsonValue::string(r.id));
    row.set("pass", cs::JsonValue::boolean(r.pass));
    row.set("detail", cs::JsonValue::string(r.detail));
    out.results.push(std::move(row));
  }
  out.exit_code = all ? 0 : 2;
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"contact-spectral: numerical contact dynamics toolkit"};
  app.require_subcommand(1);

  Settings settings;
  std::string config_path, write_config_path;

  // first pass: load the config file so flags can override it
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
  if (!config_path.empty()) {
    try {
      load_config_file(config_path, settings);
    } catch (const std::exception& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      return 1;
    }
  }

  // every option writes through to the flat settings map when provided
  auto add_kv = [&settings](CLI::App* cmd, const std::string& name, const std::string& key,
                            const std::string& desc) {
    auto opt = cmd->add_option_function<std::string>(
        name, [&settings, key](const std::string& v) { settings.set(key, v); }, desc);
    opt->expected(1);
    return opt;
  };
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "flat key=value configuration file");
    add_kv(cmd, "--n", "n", "half-dimension of the Euclidean factor");
    add_kv(cmd, "--seed", "seed", "seed for the jitter stream");
    add_kv(cmd, "--format", "format", "json or csv");
    add_kv(cmd, "--output", "output", "report path (stdout when omitted)");
    add_kv(cmd, "--isotopy", "isotopy", "reeb | profile | bump-lift | bump");
    add_kv(cmd, "--reeb-t", "reeb_t", "Reeb translation time");
    add_kv(cmd, "--rho", "rho", "profile plateau value");
    add_kv(cmd, "--r", "r", "profile outer radius");
    add_kv(cmd, "--eps", "eps", "profile collar width");
    add_kv(cmd, "--family", "family", "strict or relaxed");
    add_kv(cmd, "--amplitude", "amplitude", "bump amplitude");
    add_kv(cmd, "--center-x", "center_x", "bump center x");
    add_kv(cmd, "--center-y", "center_y", "bump center y");
    add_kv(cmd, "--radius", "radius", "bump radius");
    add_kv(cmd, "--tau-weight", "tau_weight", "bump tau modulation");
    add_kv(cmd, "--time-weight", "time_weight", "bump time modulation");
    add_kv(cmd, "--steps", "steps", "integrator steps on [0,1]");
    add_kv(cmd, "--order", "order", "integrator order (2 or 4)");
    add_kv(cmd, "--seeds", "seeds", "solver seed count");
    add_kv(cmd, "--box-radius", "box_radius", "search box radius");
    add_kv(cmd, "--shift-lo", "shift_lo", "shift window lower end");
    add_kv(cmd, "--shift-hi", "shift_hi", "shift window upper end");
    add_kv(cmd, "--window-lo", "window_lo", "action window lower end");
    add_kv(cmd, "--window-hi", "window_hi", "action window upper end");
    cmd->add_flag_function(
        "--timing", [&settings](std::int64_t) { settings.set("timing", "1"); },
        "include wall time in the report");
    cmd->add_option("--write-config", write_config_path,
                    "write the resolved configuration to this path");
  };

  CLI::App* c_flow = app.add_subcommand("flow", "integrate and compare isotopies");
  add_common(c_flow);
  add_kv(c_flow, "--start-x", "start_x", "trajectory start y1");
  add_kv(c_flow, "--start-y", "start_y", "trajectory start y2");
  add_kv(c_flow, "--start-tau", "start_tau", "trajectory start tau");

  CLI::App* c_tp = app.add_subcommand("translated-points", "grid-seeded translated point solver");
  add_common(c_tp);

  CLI::App* c_spec = app.add_subcommand("spectrum", "action spectrum over a window");
  add_common(c_spec);

  CLI::App* c_action = app.add_subcommand("action", "evaluate action functionals on loops");
  add_common(c_action);
  add_kv(c_action, "--loop", "loop", "constant | critical-pair | file");
  add_kv(c_action, "--loop-n", "loop_n", "number of loop segments");
  add_kv(c_action, "--loop-r", "loop_r", "constant loop radial coordinate");
  add_kv(c_action, "--eta", "eta", "Lagrange multiplier");
  add_kv(c_action, "--loop-file", "loop_file", "CSV samples y1,y2,tau_lift,r");
  add_kv(c_action, "--start-x", "start_x", "base point y1");
  add_kv(c_action, "--start-y", "start_y", "base point y2");
  add_kv(c_action, "--start-tau", "start_tau", "base point tau");

  CLI::App* c_prof = app.add_subcommand("profile", "profile construction, flow, and scan");
  add_common(c_prof);
  c_prof->add_flag_function(
      "--scan", [&settings](std::int64_t) { settings.set("scan", "1"); },
      "run the l/g scan over the built-in family");
  add_kv(c_prof, "--scan-grid", "scan_grid", "scan grid resolution");
  add_kv(c_prof, "--table-rows", "table_rows", "profile table rows");

  CLI::App* c_cap = app.add_subcommand("capacity", "spectral numbers and domain capacities");
  add_common(c_cap);
  add_kv(c_cap, "--domain", "domain", "ball | cylinder | product | scaled");
  add_kv(c_cap, "--domain-radius", "domain_radius", "domain radius");
  add_kv(c_cap, "--domain-scale", "domain_scale", "Liouville scale");

  CLI::App* c_ns = app.add_subcommand("nonsqueeze", "ceiling capacity certificates");
  add_common(c_ns);
  add_kv(c_ns, "--source-capacity", "source_capacity", "capacity of the source domain");
  add_kv(c_ns, "--target-capacity", "target_capacity", "capacity of the target domain");

  CLI::App* c_hz = app.add_subcommand("hz-probe", "periodic orbit probe and witnesses");
  add_common(c_hz);
  add_kv(c_hz, "--hamiltonian", "hamiltonian", "harmonic | admissible | cutoff");
  add_kv(c_hz, "--probe-grid", "probe_grid", "initial conditions per axis");
  add_kv(c_hz, "--period-limit", "period_limit", "probe integration horizon");
  add_kv(c_hz, "--cutoff-r", "cutoff_r", "cutoff outer radius");
  add_kv(c_hz, "--cutoff-eps", "cutoff_eps", "cutoff shoulder width");
  c_hz->add_flag_function(
      "--witness", [&settings](std::int64_t) { settings.set("witness", "1"); },
      "also build a displacement witness");
  add_kv(c_hz, "--witness-radius", "witness_radius", "displaced ball radius");
  add_kv(c_hz, "--witness-margin", "witness_margin", "energy margin");

  CLI::App* c_verify = app.add_subcommand("verify", "run the full verification battery");
  add_common(c_verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? 1 : 0;
  }

  std::string command;
  RunOutput out;
  auto t0 = std::chrono::steady_clock::now();
  try {
    if (c_flow->parsed()) {
      command = "flow";
      out = run_flow(settings);
    } else if (c_tp->parsed()) {
      command = "translated-points";
      out = run_translated_points(settings);
    } else if (c_spec->parsed()) {
      command = "spectrum";
      out = run_spectrum(settings);
    } else if (c_action->parsed()) {
      command = "action";
      out = run_action(settings);
    } else if (c_prof->parsed()) {
      command = "profile";
      out = run_profile(settings);
    } else if (c_cap->parsed()) {
      command = "capacity";
      out = run_capacity(settings);
    } else if (c_ns->parsed()) {
      command = "nonsqueeze";
      out = run_nonsqueeze(settings);
    } else if (c_hz->parsed()) {
      command = "hz-probe";
      out = run_hz_probe(settings);
    } else if (c_verify->parsed()) {
      command = "verify";
      out = run_verify(settings);
    }
  } catch (const cs::ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return 1;
  } catch (const cs::NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  // The report destination is not a computational input; it stays out of the
  // echoed configuration so identical runs give identical bytes.
  if (!write_config_path.empty()) {
    std::ostringstream cfg;
    cfg << "# command: " << command << "\n";
    for (const auto& [k, v] : settings.kv)
      if (k != "output") cfg << k << " = " << v << "\n";
    cs::write_text_file(write_config_path, cfg.str());
  }

  std::string format = settings.str("format", "json");
  std::string payload;
  if (format == "csv" && out.csv) {
    payload = out.csv->dump();
  } else {
    cs::JsonValue report = cs::JsonValue::object();
    report.set("command", cs::JsonValue::string(command));
    cs::JsonValue echo = cs::JsonValue::object();
    for (const auto& [k, v] : settings.kv)
      if (k != "output") echo.set(k, cs::JsonValue::string(v));
    report.set("config_echo", std::move(echo));
    report.set("results", std::move(out.results));
    report.set("tolerances", std::move(out.tolerances));
    report.set("wall_time", settings.flag("timing", false) ? cs::JsonValue::number(wall)
                                                           : cs::JsonValue::null());
    report.set("toolkit_version", cs::JsonValue::string(kToolkitVersion));
    payload = report.dump(2) + "\n";
  }

  std::string output = settings.str("output", "");
  if (output.empty()) {
    std::fwrite(payload.data(), 1, payload.size(), stdout);
  } else {
    try {
      cs::write_text_file(output, payload);
    } catch (const std::exception& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      return 1;
    }
  }
  return out.exit_code;
}
