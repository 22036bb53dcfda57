#include <doctest.h>

#include <cmath>
#include <random>

#include "contact_spectral/fixtures.hpp"
#include "contact_spectral/profile_flows.hpp"
#include "contact_spectral/rabinowitz.hpp"

using namespace contact_spectral;

namespace {

DiscretizedLoop constant_loop(const PrequantizationPoint& x, double r, double eta, int N) {
  DiscretizedLoop loop;
  loop.eta = eta;
  loop.samples.assign(N + 1, SymplectizationPoint{x, r});
  return loop;
}

}  // namespace

TEST_CASE("cutoff profile invariants") {
  CutoffProfile c = default_cutoff();
  for (double t : {0.5, 0.6, 0.8, 1.0}) CHECK(c.beta(t) == 0.0);
  CHECK(simpson(c.beta, 0.0, 1.0, 8192) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(c.chi(0.5) == doctest::Approx(0.0));
  CHECK(c.chi(1.0) == doctest::Approx(1.0));
  for (int k = 0; k <= 40; ++k) CHECK(c.chi_dot(k / 40.0) >= 0.0);
  CHECK(c.beta_integral(0.5) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("rabinowitz action values") {
  CutoffProfile cutoff = default_cutoff();
  ContactIsotopy id = identity_isotopy(1);
  PrequantizationPoint x = make_point({0.3, -0.2}, 0.4);

  SUBCASE("constant loop at r = 1 with zero data vanishes") {
    auto loop = constant_loop(x, 1.0, 0.0, 64);
    auto val = evaluate_rabinowitz_action(loop, id, cutoff);
    CHECK(std::abs(val.value) < 1e-13);
  }

  SUBCASE("constant loop at r = 2 with eta = 1 gives -1") {
    auto loop = constant_loop(x, 2.0, 1.0, 256);
    auto val = evaluate_rabinowitz_action(loop, id, cutoff);
    CHECK(val.value == doctest::Approx(-1.0).epsilon(1e-8));
  }

  SUBCASE("non-closed loops are rejected") {
    auto loop = constant_loop(x, 1.0, 0.0, 64);
    loop.samples.back().base.y[0] += 1e-3;
    CHECK_THROWS_AS(evaluate_rabinowitz_action(loop, id, cutoff), ValidationError);
  }

  SUBCASE("odd or short sample counts are rejected") {
    auto loop = constant_loop(x, 1.0, 0.0, 9);
    CHECK_THROWS_AS(evaluate_rabinowitz_action(loop, id, cutoff), ValidationError);
  }

  SUBCASE("critical pair of the Reeb path evaluates to eta = -T") {
    double T = 0.7;
    ContactIsotopy phi = reeb_isotopy(T, 1);
    auto loop = make_critical_pair(phi, x, T, 256, cutoff);
    auto val = evaluate_rabinowitz_action(loop, phi, cutoff);
    CHECK(val.value == doctest::Approx(-T).epsilon(1e-8));
    CHECK(std::abs(val.value - loop.eta) < 1e-6);
  }

  SUBCASE("critical pair of the compactly supported Reeb flow evaluates to eta") {
    ProfileFunction prof = make_profile(-0.4, 1.0, 0.1);
    ContactIsotopy phi = profile_isotopy(prof);
    PrequantizationPoint tp = make_point({0.05, 0.0}, 0.3);  // inner collar, shift rho
    auto loop = make_critical_pair(phi, tp, prof.rho, 256, cutoff);
    auto val = evaluate_rabinowitz_action(loop, phi, cutoff);
    CHECK(val.value == doctest::Approx(loop.eta).epsilon(1e-7));
    CHECK(loop.eta == doctest::Approx(0.4));
    for (const auto& s : loop.samples) CHECK(std::abs(s.r - 1.0) < 1e-12);
  }

  SUBCASE("quadrature error estimate contracts under refinement") {
    ContactIsotopy phi = reeb_isotopy(0.7, 1);
    auto coarse = evaluate_rabinowitz_action(make_critical_pair(phi, x, 0.7, 128, cutoff),
                                             phi, cutoff);
    auto fine = evaluate_rabinowitz_action(make_critical_pair(phi, x, 0.7, 256, cutoff),
                                           phi, cutoff);
    CHECK(fine.quadrature_error_estimate < coarse.quadrature_error_estimate / 3.5);
  }
}

TEST_CASE("hamiltonian action values") {
  SUBCASE("constant loop outside the support vanishes") {
    fixtures::MBumpSpec ms;
    ms.amplitude = -0.3;
    ms.radius = 0.5;
    HamiltonianIsotopy f = fixtures::bump_hamiltonian_isotopy(ms);
    MLoop loop;
    loop.samples.assign(33, Vec{2.0, 2.0});
    CHECK(std::abs(evaluate_hamiltonian_action(loop, f).value) < 1e-13);
  }

  SUBCASE("constant loop at a critical point of autonomous F gives -F") {
    fixtures::MBumpSpec ms;
    ms.amplitude = -0.3;
    ms.center = {0.1, 0.2};
    ms.radius = 0.5;
    HamiltonianIsotopy f = fixtures::bump_hamiltonian_isotopy(ms);
    MLoop loop;
    loop.samples.assign(33, ms.center);
    CHECK(evaluate_hamiltonian_action(loop, f).value == doctest::Approx(0.3).epsilon(1e-12));
  }

  SUBCASE("1-periodic rotation orbit: area cancels the Hamiltonian term") {
    HamiltonianIsotopy f = fixtures::rotation_isotopy(kPi);
    double a = 0.6;
    int N = 512;
    MLoop loop;
    loop.samples.resize(N + 1);
    for (int k = 0; k <= N; ++k) {
      double t = 2.0 * kPi * k / N;
      loop.samples[k] = {a * std::cos(t), a * std::sin(t)};
    }
    auto val = evaluate_hamiltonian_action(loop, f);
    CHECK(std::abs(val.value) < 1e-4);
    double area = 0.0;
    for (int k = 0; k < N; ++k) {
      Vec d{loop.samples[k + 1][0] - loop.samples[k][0],
            loop.samples[k + 1][1] - loop.samples[k][1]};
      area += 0.5 * (gamma_form(loop.samples[k], d) + gamma_form(loop.samples[k + 1], d));
    }
    CHECK(area == doctest::Approx(kPi * a * a).epsilon(1e-4));
  }
}

TEST_CASE("critical residuals") {
  CutoffProfile cutoff = default_cutoff();

  SUBCASE("constant loop with zero data has zero residual") {
    ContactIsotopy id = identity_isotopy(1);
    auto loop = constant_loop(make_point({0.4, 0.0}, 0.2), 1.0, 0.0, 64);
    CHECK(critical_residual(loop, id, cutoff) < 1e-9);
  }

  SUBCASE("Reeb critical pairs: residual decays quadratically") {
    double T = 0.8;
    ContactIsotopy phi = reeb_isotopy(T, 1);
    PrequantizationPoint x = make_point({0.3, -0.2}, 0.4);
    double r64 = critical_residual(make_critical_pair(phi, x, T, 64, cutoff), phi, cutoff);
    double r128 = critical_residual(make_critical_pair(phi, x, T, 128, cutoff), phi, cutoff);
    double r256 = critical_residual(make_critical_pair(phi, x, T, 256, cutoff), phi, cutoff);
    CHECK(r256 < 1e-4);
    CHECK(r64 / r128 > 2.5);
    CHECK(r128 / r256 > 2.5);
  }

  SUBCASE("perturbed critical pairs stay away from zero residual") {
    double T = 0.8;
    ContactIsotopy phi = reeb_isotopy(T, 1);
    PrequantizationPoint x = make_point({0.3, -0.2}, 0.4);
    auto loop = make_critical_pair(phi, x, T, 128, cutoff);
    double base = critical_residual(loop, phi, cutoff);
    double delta = 1e-3;
    int N = loop.segments();
    for (int k = 0; k <= N; ++k)
      loop.samples[k].base.y[0] += delta * std::sin(2.0 * kPi * k / N);
    double perturbed = critical_residual(loop, phi, cutoff);
    CHECK(perturbed > base + 0.5 * delta);
  }

  SUBCASE("directional action derivatives vanish quadratically at critical pairs") {
    ProfileFunction prof = make_profile(-0.4, 1.0, 0.1);
    ContactIsotopy phi = profile_isotopy(prof);
    PrequantizationPoint tp = make_point({0.05, 0.0}, 0.3);
    CutoffProfile c = default_cutoff();
    auto directional = [&](int N) {
      auto loop = make_critical_pair(phi, tp, prof.rho, N, c);
      auto perturbed = loop;
      double eps = 1e-6;
      auto apply = [&](double sgn) {
        for (int k = 0; k <= N; ++k) {
          double t = static_cast<double>(k) / N;
          double w = std::sin(2.0 * kPi * t);
          perturbed.samples[k].base.y[0] = loop.samples[k].base.y[0] + sgn * eps * w;
          perturbed.samples[k].base.tau_lift =
              loop.samples[k].base.tau_lift + sgn * 0.5 * eps * w;
        }
      };
      apply(1.0);
      double ap = evaluate_rabinowitz_action(perturbed, phi, c).value;
      apply(-1.0);
      double am = evaluate_rabinowitz_action(perturbed, phi, c).value;
      return std::abs(ap - am) / (2.0 * eps);
    };
    double g128 = directional(128);
    double g256 = directional(256);
    CHECK(g256 < 1e-3);
    CHECK(g128 / g256 > 2.5);
  }
}

TEST_CASE("spectrum correspondence for lifts") {
  CutoffProfile cutoff = default_cutoff();
  fixtures::MBumpSpec ms;
  ms.amplitude = -0.3;
  ms.center = {0.1, -0.15};
  ms.radius = 0.6;
  HamiltonianIsotopy f = fixtures::bump_hamiltonian_isotopy(ms, 600);
  ContactIsotopy lift = lift_hamiltonian_isotopy(f);
  // translated point at the bump center with shift F(center) = -0.3
  PrequantizationPoint tp = make_point({0.1, -0.15}, 0.25);
  double shift = -0.3;
  auto pair = make_critical_pair(lift, tp, shift, 256, cutoff);
  auto a_contact = evaluate_rabinowitz_action(pair, lift, cutoff);
  CHECK(a_contact.value == doctest::Approx(0.3).epsilon(1e-7));
  auto projected = make_projected_loop(f, tp.y, 256);
  auto a_base = evaluate_hamiltonian_action(projected, f);
  CHECK(a_contact.value == doctest::Approx(a_base.value).epsilon(1e-6));
}

TEST_CASE("truncated Hamiltonian option reproduces the plain value on the shell") {
  CutoffProfile cutoff = default_cutoff();
  ProfileFunction prof = make_profile(-0.4, 1.0, 0.1);
  ContactIsotopy phi = profile_isotopy(prof);
  PrequantizationPoint tp = make_point({0.05, 0.0}, 0.3);
  auto loop = make_critical_pair(phi, tp, prof.rho, 128, cutoff);
  RabinowitzOptions opts;
  opts.truncation = truncate_hamiltonian(phi, 1.0, 1.0, 0.0);
  auto plain = evaluate_rabinowitz_action(loop, phi, cutoff);
  auto truncated = evaluate_rabinowitz_action(loop, phi, cutoff, opts);
  CHECK(plain.value == doctest::Approx(truncated.value).epsilon(1e-12));
}
