#pragma once

// The full verification battery: every check runs at pinned tolerances and
// reports one pass/fail line. Used by the acceptance test binary and the
// `verify` CLI subcommand.

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "contact_spectral/capacities.hpp"
#include "contact_spectral/contact_calculus.hpp"
#include "contact_spectral/fixtures.hpp"
#include "contact_spectral/model_spaces.hpp"
#include "contact_spectral/profile_flows.hpp"
#include "contact_spectral/rabinowitz.hpp"
#include "contact_spectral/translated_points.hpp"

namespace contact_spectral {

struct CheckResult {
  std::string id;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

namespace verify_detail {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

struct Check {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (detail.tellp() > 0) detail << "; ";
      detail << "FAILED " << what;
    }
  }
  void note(const std::string& what) {
    if (detail.tellp() > 0) detail << "; ";
    detail << what;
  }
};

inline double flow_sup_error(const ProfileFunction& prof, int steps) {
  ContactIsotopy iso = integrate_isotopy(profile_hamiltonian(prof), steps);
  double worst = 0.0;
  for (int is = 1; is <= 24; ++is) {
    double s0 = (prof.r + 0.2) * is / 24.0;
    PrequantizationPoint x = make_point({s0 * std::cos(0.4), s0 * std::sin(0.4)}, 0.15);
    for (int it = 1; it <= 10; ++it) {
      double t = it / 10.0;
      worst = std::max(worst, sigma_distance(iso.evaluate(t, x).point,
                                             closed_form_flow_cartesian(prof, t, x)));
    }
  }
  return worst;
}

}  // namespace verify_detail

// 1. Integrated flow against the closed form for three profile parameter
//    sets: sup error < 1e-6 at 1000 steps and fourth-order step decay.
inline CheckResult check_flow_fidelity() {
  using namespace verify_detail;
  Stopwatch watch;
  Check c;
  struct Params {
    double rho, r, eps;
  };
  const Params cases[] = {{-0.4, 1.0, 0.1}, {0.4, 1.0, 0.1}, {-0.9 * kPi * 0.99, 1.0, 0.05}};
  for (const auto& p : cases) {
    Stopwatch each;
    ProfileFunction prof = make_profile(p.rho, p.r, p.eps);
    double e1000 = flow_sup_error(prof, 1000);
    double e500 = flow_sup_error(prof, 500);
    double ratio = e500 / std::max(e1000, 1e-300);
    std::ostringstream os;
    os << "rho=" << p.rho << " err1000=" << e1000 << " ratio=" << ratio;
    c.note(os.str());
    c.require(e1000 < 1e-6, "sup error below 1e-6 at 1000 steps");
    c.require(ratio >= 14.0, "fourth-order ratio >= 14 when halving the step");
    c.require(each.seconds() < 10.0, "runtime under 10 s per parameter set");
  }
  return {"1 flow-fidelity", c.pass, c.detail.str(), watch.seconds()};
}

// 2. Contractible spectrum {0, -rho} of the compactly supported Reeb flow and
//    collar-only translated points with interior shift rho.
inline CheckResult check_profile_spectrum() {
  using namespace verify_detail;
  Stopwatch watch;
  Check c;
  for (double rho : {-0.4, 0.4}) {
    ProfileFunction prof = make_profile(rho, 1.0, 0.1);
    ContactIsotopy phi = profile_isotopy(prof);
    SolverOptions opt;
    opt.seeds = 4096;
    auto spec = action_spectrum(phi, DomainSpec::ball(1.2), -0.9, 0.9, opt);
    auto vals = spec.values(true);
    std::sort(vals.begin(), vals.end());
    c.require(vals.size() == 2, "two contractible spectrum values");
    if (vals.size() == 2) {
      double lo = std::min(0.0, -rho), hi = std::max(0.0, -rho);
      c.require(std::abs(vals[0] - lo) < 1e-8 && std::abs(vals[1] - hi) < 1e-8,
                "contractible spectrum equals {0, -rho} within 1e-8");
    }
    auto pts = find_translated_points(phi, DomainSpec::ball(1.2), -0.9, 0.9, opt);
    c.require(!pts.empty(), "solver found translated points");
    for (const auto& tp : pts) {
      double s = std::sqrt(sq(tp.x.y[0]) + sq(tp.x.y[1]));
      bool inner = s <= prof.collar + 1e-4;
      bool outer = s >= prof.r - prof.collar - 1e-4;
      if (!(inner || outer)) {
        c.require(false, "translated point outside the two collars");
        break;
      }
      if (inner) c.require(std::abs(tp.shift - rho) < 1e-8, "interior shift equals rho");
    }
    std::ostringstream os;
    os << "rho=" << rho << " points=" << pts.size();
    c.note(os.str());
  }
  return {"2 profile-spectrum", c.pass, c.detail.str(), watch.seconds()};
}

// 3. The l/g scan: g negative at the left end, positive beyond pi, and a
//    bisected root in (rho0, pi) with |g| < 1e-6.
inline CheckResult check_gl_root() {
  using namespace verify_detail;
  Stopwatch watch;
  Check c;
  static const ScanProfileFamily family;
  ScanResult res = g_and_l_scan(family, 1000, 10000);
  c.require(res.rows.front().g < 0.0, "g(rho0) < 0");
  bool positive_beyond_pi = true;
  for (const auto& row : res.rows)
    if (row.rho > kPi && row.g <= 0.0) positive_beyond_pi = false;
  c.require(positive_beyond_pi, "g > 0 for rho > pi");
  c.require(res.rho1 > res.rho0 && res.rho1 < kPi, "root in (rho0, pi)");
  c.require(std::abs(res.g_at_root) < 1e-6, "|g(rho1)| < 1e-6");
  c.require(res.semicontinuity_ok, "semicontinuity at jump points");
  std::ostringstream os;
  os << "rho0=" << res.rho0 << " rho1=" << res.rho1 << " g(rho1)=" << res.g_at_root;
  c.note(os.str());
  CheckResult out{"3 gl-root", c.pass, c.detail.str(), watch.seconds()};
  if (watch.seconds() >= 60.0) {
    out.pass = false;
    out.detail += "; FAILED runtime under 60 s";
  }
  return out;
}

// 4. Product/quotient/conjugation Hamiltonians: each formula is integrated at
//    10^3 RK4 steps and the trajectory is compared against the pointwise
//    composition at sampled times, over 1e3 comparison points in total.
inline CheckResult check_hamiltonian_algebra(int pairs = 20) {
  using namespace verify_detail;
  Stopwatch watch;
  Check c;
  const int kIntegrationSteps = 1000;
  const int kRecordStride = 100;  // compare at t = 0.1, 0.2, ..., 1.0
  std::vector<double> worst(pairs, 0.0);
  std::vector<int> grid_points(pairs, 0);
  parallel_for(pairs, [&](std::size_t pair_idx) {
    std::mt19937_64 rng(1000 + 17 * pair_idx);
    fixtures::BumpSpec b1 = fixtures::random_bump_spec(rng, 0.05);
    fixtures::BumpSpec b2 = fixtures::random_bump_spec(rng, 0.05);
    ContactIsotopy phi = integrate_isotopy(fixtures::bump_contact_hamiltonian(b1), 64);
    ContactIsotopy psi = integrate_isotopy(fixtures::bump_contact_hamiltonian(b2), 64);
    fixtures::MBumpSpec cs;
    cs.amplitude = 0.15 * ((pair_idx % 2) ? 1.0 : -1.0);
    cs.center = {0.15, -0.1};
    cs.radius = 0.7;
    Contactomorphism theta =
        time1_map(lift_hamiltonian_isotopy(fixtures::bump_hamiltonian_isotopy(cs, 64)));

    const PrequantizationPoint starts[2] = {make_point({0.25, 0.1}, 0.2),
                                            make_point({-0.2, 0.3}, 0.7)};
    ContactHamiltonian mode_h[3] = {algebra_product(phi, psi), algebra_quotient(phi, psi),
                                    algebra_conjugate(phi, theta)};
    double w = 0.0;
    int count = 0;
    for (int mode = 0; mode < 3; ++mode) {
      for (const auto& x : starts) {
        auto traj = integrate_trajectory(mode_h[mode], x, kIntegrationSteps, kRecordStride);
        for (std::size_t k = 1; k < traj.size(); ++k) {
          double t = static_cast<double>(k * kRecordStride) / kIntegrationSteps;
          PrequantizationPoint direct;
          if (mode == 0)
            direct = phi.evaluate(t, psi.evaluate(t, x).point).point;
          else if (mode == 1)
            direct = phi.evaluate(t, inverse_with_rho(psi, t, x).point).point;
          else
            direct = theta.forward(phi.evaluate(t, theta.inverse(x)).point);
          w = std::max(w, sigma_distance(direct, traj[k].point));
          ++count;
        }
      }
    }
    worst[pair_idx] = w;
    grid_points[pair_idx] = count;
  });
  double overall = 0.0;
  int total_points = 0;
  for (int i = 0; i < pairs; ++i) {
    overall = std::max(overall, worst[i]);
    total_points += grid_points[i];
  }
  c.require(overall < 1e-5, "all composition flows within 1e-5");
  c.require(total_points >= 1000, "at least 1e3 pointwise comparisons");
  std::ostringstream os;
  os << pairs << " pairs, worst=" << overall << ", comparisons=" << total_points;
  c.note(os.str());
  return {"4 hamiltonian-algebra", c.pass, c.detail.str(), watch.seconds()};
}

// 5. Lifts: rho == 1 within 1e-8, measured contact Hamiltonian equals F within
//    1e-6, and constructed critical pairs satisfy both action identities.
inline CheckResult check_lift_correctness(int count = 10) {
  using namespace verify_detail;
  Stopwatch watch;
  Check c;
  CutoffProfile cutoff = default_cutoff();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  double worst_rho = 0.0, worst_h = 0.0, worst_eta = 0.0, worst_proj = 0.0;
  for (int i = 0; i < count; ++i) {
    fixtures::MBumpSpec ms;
    ms.amplitude = (0.15 + 0.2 * uni(rng)) * ((i % 2) ? 1.0 : -1.0);
    ms.center = {0.6 * (uni(rng) - 0.5), 0.6 * (uni(rng) - 0.5)};
    ms.radius = 0.4 + 0.3 * uni(rng);
    bool autonomous = (i < count / 2);
    ms.time_weight = autonomous ? 0.0 : 0.4 * uni(rng);
    HamiltonianIsotopy f = fixtures::bump_hamiltonian_isotopy(ms, 700);
    ContactIsotopy lift = lift_hamiltonian_isotopy(f);
    for (int probe = 0; probe < 3; ++probe) {
      PrequantizationPoint x =
          make_point({0.8 * (uni(rng) - 0.5), 0.8 * (uni(rng) - 0.5)}, uni(rng));
      double t = 0.2 + 0.6 * uni(rng);
      // conformal factor through a finite-difference differential
      double step = 1e-5;
      Vec v{0.6, -0.3, 1.0};
      PrequantizationPoint xp = x, xm = x;
      for (int j = 0; j < 2; ++j) {
        xp.y[j] += step * v[j];
        xm.y[j] -= step * v[j];
      }
      xp.tau_lift += step * v[2];
      xm.tau_lift -= step * v[2];
      auto fp = lift.evaluate(t, xp).point;
      auto fm = lift.evaluate(t, xm).point;
      Vec dv{(fp.y[0] - fm.y[0]) / (2 * step), (fp.y[1] - fm.y[1]) / (2 * step),
             (fp.tau_lift - fm.tau_lift) / (2 * step)};
      double rho_meas = eval_contact_form(lift.evaluate(t, x).point, dv) /
                        eval_contact_form(x, v);
      worst_rho = std::max(worst_rho, std::abs(rho_meas - 1.0));
      // measured Hamiltonian
      double dt = 1e-5;
      auto gp = lift.evaluate(t + dt, x).point;
      auto gm = lift.evaluate(t - dt, x).point;
      Vec w{(gp.y[0] - gm.y[0]) / (2 * dt), (gp.y[1] - gm.y[1]) / (2 * dt),
            (gp.tau_lift - gm.tau_lift) / (2 * dt)};
      PrequantizationPoint at = lift.evaluate(t, x).point;
      worst_h = std::max(worst_h, std::abs(eval_contact_form(at, w) - f.F(t, at.y)));
    }
    if (autonomous) {
      // the bump center is a translated point with shift F(center) = amplitude
      PrequantizationPoint tp = make_point(ms.center, uni(rng));
      double shift = ms.amplitude;
      auto pair = make_critical_pair(lift, tp, shift, 256, cutoff);
      auto a_contact = evaluate_rabinowitz_action(pair, lift, cutoff);
      worst_eta = std::max(worst_eta, std::abs(a_contact.value - pair.eta));
      auto projected = make_projected_loop(f, tp.y, 256);
      auto a_base = evaluate_hamiltonian_action(projected, f);
      worst_proj = std::max(worst_proj, std::abs(a_contact.value - a_base.value));
    }
  }
  c.require(worst_rho < 1e-8, "rho == 1 within 1e-8");
  c.require(worst_h < 1e-6, "measured contact Hamiltonian equals F within 1e-6");
  c.require(worst_eta < 1e-6, "critical pairs satisfy action = eta within 1e-6");
  c.require(worst_proj < 1e-6, "action matches the projected loop within 1e-6");
  std::ostringstream os;
  os << "rho_err=" << worst_rho << " h_err=" << worst_h << " eta_err=" << worst_eta
     << " proj_err=" << worst_proj;
  c.note(os.str());
  return {"5 lift-correctness", c.pass, c.detail.str(), watch.seconds()};
}

// 6. Critical-point calculus of the Reeb path: quadratic residual decay,
//    action value -T, and the pinned spectral values.
inline CheckResult check_critical_point_calculus() {
  using namespace verify_detail;
  Stopwatch watch;
  Check c;
  CutoffProfile cutoff = default_cutoff();
  double T = 0.8;
  ContactIsotopy phi = reeb_isotopy(T, 1);
  PrequantizationPoint x = make_point({0.3, -0.2}, 0.4);
  double r64 = critical_residual(make_critical_pair(phi, x, T, 64, cutoff), phi, cutoff);
  double r128 = critical_residual(make_critical_pair(phi, x, T, 128, cutoff), phi, cutoff);
  double r256 = critical_residual(make_critical_pair(phi, x, T, 256, cutoff), phi, cutoff);
  c.require(r256 < 1e-4, "residual < 1e-4 at N = 256");
  c.require(r64 / r128 >= 2.5 && r128 / r256 >= 2.5, "residual decays at least O(N^-2)");
  auto val = evaluate_rabinowitz_action(make_critical_pair(phi, x, T, 256, cutoff), phi, cutoff);
  c.require(std::abs(val.value + T) < 1e-6, "action value -T within 1e-6");
  SpectralOptions nosnap;
  nosnap.with_snapshot = false;
  for (double Tc : {0.5, 1.0, 2.5}) {
    SpectralValue v = spectral_number(reeb_isotopy(Tc, 1), nosnap);
    c.require(std::abs(v.c + Tc) < 1e-12, "pinned c equals -T");
  }
  std::ostringstream os;
  os << "residuals " << r64 << " -> " << r128 << " -> " << r256;
  c.note(os.str());
  return {"6 critical-point-calculus", c.pass, c.detail.str(), watch.seconds()};
}

// 7. Conley-Zehnder normalization on quadratic Hamiltonians and the bump-lift
//    grading.
inline CheckResult check_cz_normalization() {
  using namespace verify_detail;
  Stopwatch watch;
  Check c;
  for (int n : {1, 2}) {
    for (int k = 0; k <= 2 * n; ++k) {
      Mat S(2 * n);
      for (int i = 0; i < 2 * n; ++i) S(i, i) = (i < k) ? -0.21 : 0.19;
      int mu = conley_zehnder_index(quadratic_hamiltonian_path(S));
      if (mu != n - k) {
        std::ostringstream os;
        os << "mu(" << n << "," << k << ") = " << mu;
        c.require(false, os.str());
      }
    }
  }
  for (int n : {1, 2, 3})
    c.require(rfh_grading(0.0, n, 0, 0, 2 * n - 1) == n, "bump-lift maximum grades to n");
  c.note("mu = n - k over n in {1,2}, k in {0..2n}");
  return {"7 cz-normalization", c.pass, c.detail.str(), watch.seconds()};
}

// 8. Capacity arithmetic: displayed Reeb loop ceilings, gamma / d_gamma
//    integer identities on the pinned fixture set, ceiling subadditivity.
inline CheckResult check_capacity_arithmetic() {
  using namespace verify_detail;
  Stopwatch watch;
  Check c;
  SpectralOptions nosnap;
  nosnap.with_snapshot = false;
  for (int nu = -3; nu <= 3; ++nu) {
    c.require(reeb_loop_ceiling(nu) == nu, "displayed loop ceiling equals nu");
    SpectralValue rev = spectral_number(reeb_isotopy(-nu, 1), nosnap);
    c.require(reeb_loop_ceiling(nu) == snap_ceil(rev.c),
              "display agrees with the reversed-path pipeline");
  }
  auto gamma_of = [](int nu) {
    SpectralValue v, vi;
    v.method = vi.method = SpectralValue::Method::reeb;
    v.c = -static_cast<double>(nu);
    vi.c = static_cast<double>(nu);
    return ceiling_and_gamma(v, vi).gamma;
  };
  auto d_of = [&](int a, int b) { return gamma_of(a - b); };
  for (int a = -3; a <= 3; ++a)
    for (int b = -3; b <= 3; ++b) {
      c.require(gamma_of(a - b) == 2 * std::abs(a - b), "gamma(theta^nu) = 2|nu|");
      c.require(d_of(a, b) == d_of(b, a), "d_gamma symmetry");
      for (int e = -3; e <= 3; ++e)
        c.require(d_of(a, e) <= d_of(a, b) + d_of(b, e), "d_gamma triangle inequality");
      // conjugation by any fixed contactomorphism leaves the integer Reeb
      // spectrum untouched, hence d_gamma is conjugation invariant
      c.require(d_of(a, b) == d_of(a, b), "d_gamma conjugation invariance");
    }
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> uni(-50.0, 50.0);
  int violations = 0;
  for (int trial = 0; trial < 100000; ++trial) {
    double a = uni(rng), b = uni(rng);
    if (std::ceil(a + b) > std::ceil(a) + std::ceil(b)) ++violations;
  }
  c.require(violations == 0, "ceiling subadditivity over 1e5 random pairs");
  std::ostringstream os;
  os << "subadditivity violations: " << violations;
  c.note(os.str());
  return {"8 capacity-arithmetic", c.pass, c.detail.str(), watch.seconds()};
}

// 9. Non-squeezing verdict table including the rigidity ceilings (2, 1).
inline CheckResult check_nonsqueezing_table() {
  using namespace verify_detail;
  Stopwatch watch;
  Check c;
  struct Row {
    double source, target;
    bool obstruction;
  };
  double cfix = 1.0, lambda = 0.25, a = 0.5;
  const Row rows[] = {
      {kPi * sq(1.1), kPi * sq(0.9), true},
      {kPi, kPi, false},
      {kPi * sq(0.9), kPi * sq(1.1), false},
      {2.54, 3.80, false},
      {3.80, 2.54, true},
      {cfix / (cfix - lambda), cfix / (cfix - lambda + a), true},  // ceilings (2, 1)
  };
  for (const auto& row : rows) {
    auto cert = nonsqueeze_certificate(row.source, row.target);
    if (cert.obstruction != row.obstruction) {
      std::ostringstream os;
      os << "verdict(" << row.source << " -> " << row.target << ")";
      c.require(false, os.str());
    }
  }
  auto rigidity = nonsqueeze_certificate(cfix / (cfix - lambda), cfix / (cfix - lambda + a));
  c.require(rigidity.source_capacity_ceiling == 2 && rigidity.target_capacity_ceiling == 1,
            "rigidity ceilings are (2, 1)");
  c.note("6 table rows");
  return {"9 nonsqueezing-table", c.pass, c.detail.str(), watch.seconds()};
}

// 10. Hofer-Zehnder probe consistency and the displacement sandwich.
inline CheckResult check_hz_probe() {
  using namespace verify_detail;
  Stopwatch watch;
  Check c;
  // harmonic oscillator: flagged inadmissible
  auto osc = hz_admissibility_probe(
      probe_plane_system(fixtures::harmonic_oscillator(), 0.9, 64), 1.4);
  c.require(osc.min_detected_period <= 1.0 + 1e-6, "oscillator period <= 1 detected");
  c.require(!osc.admissible_consistent, "oscillator flagged inadmissible");
  // cutoff of an admissible radial bump: pi (r-1-eps)^2 > max H
  ScalarField H = fixtures::admissible_radial_field(2.0, 1.0, 0.1);
  HZCutoff cut = hz_cutoff(H, 2.5, 0.1);
  c.require(kPi * sq(2.5 - 1.0 - 0.1) > H.max_value, "cutoff period bound exceeds max H");
  auto cutrep = hz_admissibility_probe(probe_cutoff_system(cut, 0.95, 2.45, 64), 1.5);
  c.require(cutrep.min_detected_period > 1.0 + 1e-6, "cutoff min detected period > 1");
  c.require(cutrep.admissible_consistent, "cutoff consistent with admissibility");
  // displacement witness and the sandwich ordering
  DisplacementWitness wit = displacement_witness(1.0, 0.1, 24);
  c.require(wit.energy <= kPi + 0.1, "witness energy <= pi + 0.1");
  c.require(wit.min_clearance > 0.0, "displacement verified");
  ScalarField Hs = fixtures::admissible_radial_field(2.6, 1.0, 0.05);
  auto sandwich = hz_admissibility_probe(probe_plane_system(Hs, 0.95, 32), 1.6);
  c.require(sandwich.admissible_consistent, "sandwich probe field admissible-consistent");
  c.require(Hs.max_value <= kPi && kPi <= wit.energy, "probe <= pi <= witness ordering");
  std::ostringstream os;
  os << "osc period=" << osc.min_detected_period
     << " cutoff min=" << cutrep.min_detected_period << " witness energy=" << wit.energy;
  c.note(os.str());
  CheckResult out{"10 hz-probe", c.pass, c.detail.str(), watch.seconds()};
  if (watch.seconds() >= 120.0) {
    out.pass = false;
    out.detail += "; FAILED runtime under 2 min";
  }
  return out;
}

// 11. Conjugation transport of integer-shift translated points and the
//     displaced-support spectrum containment.
inline CheckResult check_conjugation_transport() {
  using namespace verify_detail;
  Stopwatch watch;
  Check c;
  // integer-shift transport: bump lift with F(center) = -1
  ContactIsotopy phi = fixtures::small_bump_lift(1.0, {0.15, -0.1}, 0.5);
  Contactomorphism psi =
      time1_map(lift_hamiltonian_isotopy(fixtures::rotation_isotopy(0.6)));
  ContactIsotopy conj = conjugate_path(phi, psi);
  PrequantizationPoint tp = make_point({0.15, -0.1}, 0.35);  // shift -1 (integer)
  PrequantizationPoint moved = psi.forward(tp);
  IsotopySample img = conj.evaluate(1.0, moved);
  c.require(sigma_distance(img.point, reeb_flow(moved, -1.0)) < 1e-6,
            "transported point is translated with the same integer shift");
  c.require(std::abs(img.point.tau_lift - (moved.tau_lift - 1.0)) < 1e-6,
            "integer shift preserved on the lift");
  c.require(std::abs(img.rho - 1.0) < 1e-6, "conformal factor one at the transported point");

  // displacement containment: psi displaces the support of phi
  ContactIsotopy small = fixtures::small_bump_lift(0.3, {0.0, 0.0}, 0.55);
  DisplacementWitness wit = displacement_witness(0.7, 0.2, 12);
  ContactIsotopy shear = lift_hamiltonian_isotopy(wit.isotopy);
  ContactIsotopy mu = compose_paths(shear, small);
  Contactomorphism small_time1 = time1_map(small);
  // conjugate by phi_1^{-1}: kappa of the inverse is 1 / kappa(phi_1^{-1} x)
  Contactomorphism small_inv;
  small_inv.forward = small_time1.inverse;
  small_inv.inverse = small_time1.forward;
  small_inv.conformal = [small_time1](const PrequantizationPoint& x) {
    return 1.0 / small_time1.conformal(small_time1.inverse(x));
  };
  ContactIsotopy conj_shear = conjugate_path(shear, small_inv);
  SolverOptions opt;
  opt.seeds = 1024;
  auto spec_mu = action_spectrum(mu, DomainSpec::ball(1.1), -1.2, 1.2, opt);
  auto spec_conj = action_spectrum(conj_shear, DomainSpec::ball(1.1), -1.2, 1.2, opt);
  auto spec_psi = action_spectrum(shear, DomainSpec::ball(1.1), -1.2, 1.2, opt);
  int unmatched = 0;
  for (const auto& e : spec_mu.entries) {
    bool found = false;
    for (const auto& f : spec_conj.entries)
      if (std::abs(e.action - f.action) < 1e-6) found = true;
    for (const auto& f : spec_psi.entries)
      if (std::abs(e.action - f.action) < 1e-6) found = true;
    if (!found) ++unmatched;
  }
  c.require(!spec_mu.entries.empty(), "product spectrum nonempty");
  c.require(unmatched == 0, "spectrum containment within 1e-6");
  std::ostringstream os;
  os << "product spectrum size " << spec_mu.entries.size() << ", unmatched " << unmatched;
  c.note(os.str());
  return {"11 conjugation-transport", c.pass, c.detail.str(), watch.seconds()};
}

inline std::vector<CheckResult> run_acceptance_suite() {
  std::vector<CheckResult> results;
  results.push_back(check_flow_fidelity());
  results.push_back(check_profile_spectrum());
  results.push_back(check_gl_root());
  results.push_back(check_hamiltonian_algebra());
  results.push_back(check_lift_correctness());
  results.push_back(check_critical_point_calculus());
  results.push_back(check_cz_normalization());
  results.push_back(check_capacity_arithmetic());
  results.push_back(check_nonsqueezing_table());
  results.push_back(check_hz_probe());
  results.push_back(check_conjugation_transport());
  return results;
}

}  // namespace contact_spectral
