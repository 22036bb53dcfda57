#pragma once

// Analytic fixture families shared by the test suites and the CLI: bump
// contact Hamiltonians with known gradients, rotation and bump Hamiltonian
// isotopies on R^2, the harmonic oscillator, and admissible radial fields.

#include <cmath>
#include <memory>
#include <random>
#include <string>

#include "contact_spectral/capacities.hpp"
#include "contact_spectral/contact_calculus.hpp"
#include "contact_spectral/profile_flows.hpp"
#include "contact_spectral/util.hpp"

namespace contact_spectral::fixtures {

struct BumpSpec {
  double amplitude = 0.05;
  Vec center = {0.0, 0.0};
  double radius = 0.6;
  double tau_weight = 0.0;   // strength of the cos(2 pi (tau - tau0)) factor
  double tau_phase = 0.0;
  double time_weight = 0.0;  // strength of the sin(2 pi t) factor
};

// h(t, y, tau) = A bump(|y - c| / R) (1 + b cos(2 pi (tau - tau0)))
//                                    (1 + w sin(2 pi t)), analytic gradient.
inline ContactHamiltonian bump_contact_hamiltonian(const BumpSpec& spec, int n = 1) {
  auto sp = std::make_shared<BumpSpec>(spec);
  ContactHamiltonian h;
  h.n = n;
  double cnorm = 0.0;
  for (double c : spec.center) cnorm += c * c;
  h.support_radius = std::sqrt(cnorm) + spec.radius;
  h.value = [sp](double t, std::span<const double> y, double tau) {
    double u2 = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) u2 += sq(y[i] - (*sp).center[i]);
    double u = std::sqrt(u2) / sp->radius;
    double base = sp->amplitude * exp_bump(u);
    double tf = 1.0 + sp->tau_weight * std::cos(2.0 * kPi * (tau - sp->tau_phase));
    double wf = 1.0 + sp->time_weight * std::sin(2.0 * kPi * t);
    return base * tf * wf;
  };
  h.value_grad = [sp](double t, std::span<const double> y, double tau, std::span<double> dy,
                      double& dtau) {
    double u2 = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) u2 += sq(y[i] - sp->center[i]);
    double dist = std::sqrt(u2);
    double u = dist / sp->radius;
    double bval = exp_bump(u);
    double bder = exp_bump_deriv(u);
    double tf = 1.0 + sp->tau_weight * std::cos(2.0 * kPi * (tau - sp->tau_phase));
    double wf = 1.0 + sp->time_weight * std::sin(2.0 * kPi * t);
    double radial = (dist > 1e-12) ? sp->amplitude * bder * tf * wf / (sp->radius * dist) : 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) dy[i] = radial * (y[i] - sp->center[i]);
    dtau = -sp->amplitude * bval * wf * sp->tau_weight * 2.0 * kPi *
           std::sin(2.0 * kPi * (tau - sp->tau_phase));
    return sp->amplitude * bval * tf * wf;
  };
  return h;
}

inline BumpSpec random_bump_spec(std::mt19937_64& rng, double amplitude_scale = 0.05) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  BumpSpec s;
  s.amplitude = amplitude_scale * (0.5 + uni(rng));
  if (uni(rng) < 0.5) s.amplitude = -s.amplitude;
  s.center = {0.8 * (uni(rng) - 0.5), 0.8 * (uni(rng) - 0.5)};
  s.radius = 0.4 + 0.4 * uni(rng);
  s.tau_weight = 0.3 + 0.5 * uni(rng);
  s.tau_phase = uni(rng);
  s.time_weight = 0.5 * uni(rng);
  return s;
}

// F(t, y) = A bump(|y - c| / R) (1 + w sin(2 pi t)) on R^2.
struct MBumpSpec {
  double amplitude = -0.3;
  Vec center = {0.0, 0.0};
  double radius = 0.6;
  double time_weight = 0.0;
};

inline HamiltonianIsotopy bump_hamiltonian_isotopy(const MBumpSpec& spec, int steps = 400) {
  auto sp = std::make_shared<MBumpSpec>(spec);
  auto F = [sp](double t, std::span<const double> y) {
    double u2 = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) u2 += sq(y[i] - sp->center[i]);
    double u = std::sqrt(u2) / sp->radius;
    return sp->amplitude * exp_bump(u) * (1.0 + sp->time_weight * std::sin(2.0 * kPi * t));
  };
  auto Fg = [sp](double t, std::span<const double> y, std::span<double> g) {
    double u2 = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) u2 += sq(y[i] - sp->center[i]);
    double dist = std::sqrt(u2);
    double u = dist / sp->radius;
    double wf = 1.0 + sp->time_weight * std::sin(2.0 * kPi * t);
    double radial =
        (dist > 1e-12) ? sp->amplitude * exp_bump_deriv(u) * wf / (sp->radius * dist) : 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) g[i] = radial * (y[i] - sp->center[i]);
    return sp->amplitude * exp_bump(u) * wf;
  };
  double cnorm = 0.0;
  for (double c : spec.center) cnorm += c * c;
  auto iso = make_hamiltonian_isotopy(F, Fg, std::sqrt(cnorm) + spec.radius, 1, steps);
  return iso;
}

// Lift of the autonomous bump -b (b >= 0 with a unique maximum at the center):
// the tractable small-bump construction.
inline ContactIsotopy small_bump_lift(double b_max, const Vec& center, double radius,
                                      int steps = 400) {
  MBumpSpec spec;
  spec.amplitude = -b_max;
  spec.center = center;
  spec.radius = radius;
  spec.time_weight = 0.0;
  ContactIsotopy iso = lift_hamiltonian_isotopy(bump_hamiltonian_isotopy(spec, steps));
  iso.pinned = PinnedConstruction{PinnedConstruction::Kind::small_bump, 0.0, b_max, -b_max, 0.0};
  return iso;
}

// Linear rotation flow of R^2: F = c |y|^2, gamma-preserving, a == 0.
inline HamiltonianIsotopy rotation_isotopy(double c) {
  HamiltonianIsotopy f;
  f.n = 1;
  f.support_radius = kInf;
  f.steps = 1;
  f.F = [c](double, std::span<const double> y) { return c * (sq(y[0]) + sq(y[1])); };
  f.F_grad = [c](double, std::span<const double> y, std::span<double> g) {
    g[0] = 2.0 * c * y[0];
    g[1] = 2.0 * c * y[1];
    return c * (sq(y[0]) + sq(y[1]));
  };
  f.evaluate = [c](double t, const Vec& y) {
    double ang = 2.0 * c * t;
    double cs = std::cos(ang), sn = std::sin(ang);
    return HamiltonianMapSample{{cs * y[0] - sn * y[1], sn * y[0] + cs * y[1]}, 0.0};
  };
  f.inverse = [c](double t, const Vec& y) {
    double ang = -2.0 * c * t;
    double cs = std::cos(ang), sn = std::sin(ang);
    return Vec{cs * y[0] - sn * y[1], sn * y[0] + cs * y[1]};
  };
  return f;
}

// Harmonic oscillator pi |y|^2: every orbit is 1-periodic.
inline ScalarField harmonic_oscillator() {
  ScalarField H;
  H.m = 1;
  H.support_radius = kInf;
  H.max_value = kInf;
  H.description = "harmonic oscillator pi |y|^2";
  H.value = [](std::span<const double> y) { return kPi * (sq(y[0]) + sq(y[1])); };
  H.gradient = [](std::span<const double> y, std::span<double> g) {
    g[0] = 2.0 * kPi * y[0];
    g[1] = 2.0 * kPi * y[1];
  };
  return H;
}

// Admissible radial field on R^2 built from a strict profile: the plateau
// value A is reached on a neighborhood of the origin and every nonconstant
// orbit has period > 1.
inline ScalarField admissible_radial_field(double A, double r = 1.0, double eps = 0.1) {
  auto prof = std::make_shared<ProfileFunction>(
      make_profile(-A, r, eps, ProfileFunction::Family::strict_family));
  ScalarField H;
  H.m = 1;
  H.support_radius = r;
  H.max_value = A;
  H.description = "admissible radial plateau field";
  H.value = [prof](std::span<const double> y) {
    double s = std::sqrt(sq(y[0]) + sq(y[1]));
    return -prof->value(s);
  };
  H.gradient = [prof](std::span<const double> y, std::span<double> g) {
    double s = std::sqrt(sq(y[0]) + sq(y[1]));
    double radial = (s > 1e-12) ? -prof->derivative(s) / s : 0.0;
    g[0] = radial * y[0];
    g[1] = radial * y[1];
  };
  return H;
}

}  // namespace contact_spectral::fixtures
