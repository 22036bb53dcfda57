#include <doctest.h>

#include <cmath>

#include "contact_spectral/contact_calculus.hpp"
#include "contact_spectral/profile_flows.hpp"

using namespace contact_spectral;

TEST_CASE("profile construction") {
  SUBCASE("zero plateau gives the zero profile") {
    ProfileFunction p = make_profile(0.0, 1.0, 0.1);
    for (double s : {0.0, 0.3, 0.7, 1.0}) {
      CHECK(p.value(s) == 0.0);
      CHECK(p.derivative(s) == 0.0);
    }
  }

  SUBCASE("strict profile satisfies the envelope conditions on a grid") {
    ProfileFunction p = make_profile(-0.5, 1.0, 0.1);
    double margin = verify_profile(p);
    CHECK(margin > 0.0);
    CHECK(p.value(0.0) == doctest::Approx(-0.5));
    CHECK(p.value(0.05) == doctest::Approx(-0.5));
    CHECK(p.value(0.95) == doctest::Approx(0.0));
    CHECK(p.value(1.0) == doctest::Approx(0.0));
    // monotone up for negative plateau
    for (int k = 0; k < 100; ++k) CHECK(p.derivative(0.005 + 0.99 * k / 100) >= 0.0);
  }

  SUBCASE("positive plateau flips monotonicity") {
    ProfileFunction p = make_profile(0.4, 1.0, 0.1);
    verify_profile(p);
    CHECK(p.value(0.0) == doctest::Approx(0.4));
    for (int k = 0; k < 100; ++k) CHECK(p.derivative(0.005 + 0.99 * k / 100) <= 0.0);
  }

  SUBCASE("the near-sharp plateau of the wide-collar family is realizable") {
    ProfileFunction p = make_profile(-0.9 * kPi * 0.99, 1.0, 0.05);
    CHECK(verify_profile(p) > 0.0);
  }

  SUBCASE("plateau beyond the envelope bound is rejected") {
    CHECK_THROWS_AS(make_profile(-4.0, 1.0, 0.1), ValidationError);
    CHECK_THROWS_AS(make_profile(4.0, 1.0, 0.1), ValidationError);
    // relaxed family doubles the bound
    ProfileFunction p = make_profile(-4.0, 1.0, 0.1, ProfileFunction::Family::relaxed_family);
    CHECK(verify_profile(p) > 0.0);
    CHECK_THROWS_AS(make_profile(-7.0, 1.0, 0.1, ProfileFunction::Family::relaxed_family),
                    ValidationError);
  }

  SUBCASE("collar geometry is validated") {
    CHECK_THROWS_AS(make_profile(-0.5, 1.0, 0.6), ValidationError);
    CHECK_THROWS_AS(make_profile(-0.5, 1.0, 0.0), ValidationError);
  }

  SUBCASE("derivative is consistent with the value by finite differences") {
    ProfileFunction p = make_profile(-0.7, 1.2, 0.15);
    for (double s : {0.2, 0.4, 0.6, 0.9, 1.02}) {
      double d = 1e-6;
      double fd = (p.value(s + d) - p.value(s - d)) / (2 * d);
      CHECK(fd == doctest::Approx(p.derivative(s)).epsilon(1e-6));
    }
  }
}

TEST_CASE("closed-form flow") {
  ProfileFunction p = make_profile(-0.4, 1.0, 0.1);

  SUBCASE("inner collar is the Reeb flow at rate rho") {
    PolarPoint x{0.05, {1.2}, 0.3};
    PolarPoint q = closed_form_flow(p, 0.7, x);
    CHECK(q.s == doctest::Approx(0.05));
    CHECK(q.phi[0] == doctest::Approx(1.2));
    CHECK(q.tau_lift == doctest::Approx(0.3 + 0.7 * (-0.4)).epsilon(1e-13));
  }

  SUBCASE("outside the support the flow is the identity") {
    PolarPoint x{1.3, {0.4}, 0.8};
    PolarPoint q = closed_form_flow(p, 5.0, x);
    CHECK(q.s == doctest::Approx(1.3));
    CHECK(q.phi[0] == doctest::Approx(0.4));
    CHECK(q.tau_lift == doctest::Approx(0.8));
  }

  SUBCASE("generic radius matches the integrated flow to 1e-6") {
    ContactIsotopy iso = integrate_isotopy(profile_hamiltonian(p), 1000);
    double worst = 0.0;
    for (double s0 : {0.2, 0.5, 0.85}) {
      PrequantizationPoint x = make_point({s0 * std::cos(0.3), s0 * std::sin(0.3)}, 0.1);
      for (int k = 1; k <= 5; ++k) {
        double t = k / 5.0;
        worst = std::max(worst, sigma_distance(iso.evaluate(t, x).point,
                                               closed_form_flow_cartesian(p, t, x)));
      }
    }
    CHECK(worst < 1e-6);
  }

  SUBCASE("the flow is exact") {
    ContactIsotopy iso = profile_isotopy(p);
    double step = 1e-5;
    PrequantizationPoint x = make_point({0.5, 0.2}, 0.6);
    Vec v{0.3, -0.2, 0.7};
    PrequantizationPoint xp = x, xm = x;
    xp.y[0] += step * v[0];
    xp.y[1] += step * v[1];
    xp.tau_lift += step * v[2];
    xm.y[0] -= step * v[0];
    xm.y[1] -= step * v[1];
    xm.tau_lift -= step * v[2];
    auto fp = iso.evaluate(1.0, xp).point;
    auto fm = iso.evaluate(1.0, xm).point;
    Vec dv{(fp.y[0] - fm.y[0]) / (2 * step), (fp.y[1] - fm.y[1]) / (2 * step),
           (fp.tau_lift - fm.tau_lift) / (2 * step)};
    double pulled = eval_contact_form(iso.evaluate(1.0, x).point, dv);
    CHECK(pulled == doctest::Approx(eval_contact_form(x, v)).epsilon(1e-8));
  }

  SUBCASE("group law on the inner tube") {
    ProfileFunction p3 = make_profile(-1.2, 1.0, 0.1);
    PrequantizationPoint x = make_point({0.03, 0.02}, 0.9);
    PrequantizationPoint three = x;
    for (int i = 0; i < 3; ++i) three = closed_form_flow_cartesian(p, 1.0, three);
    PrequantizationPoint direct = closed_form_flow_cartesian(p3, 1.0, x);
    CHECK(sigma_distance(three, direct) < 1e-12);
    CHECK(three.tau_lift == doctest::Approx(direct.tau_lift).epsilon(1e-12));
  }
}

TEST_CASE("translated point enumeration") {
  SUBCASE("strict profile has exactly the two collars") {
    ProfileFunction p = make_profile(-0.4, 1.0, 0.1);
    auto regions = enumerate_translated_points_closed_form(p);
    REQUIRE(regions.size() == 2);
    CHECK(regions[0].collar);
    CHECK(regions[0].s_hi == doctest::Approx(0.1));
    CHECK(regions[0].shift == doctest::Approx(-0.4));
    CHECK(regions[1].s_lo == doctest::Approx(0.9));
    CHECK(regions[1].shift == doctest::Approx(0.0));
  }

  SUBCASE("zero profile translates everything with shift zero") {
    ProfileFunction p = make_profile(0.0, 1.0, 0.1);
    auto regions = enumerate_translated_points_closed_form(p);
    REQUIRE(regions.size() == 1);
    CHECK(regions[0].shift == 0.0);
    CHECK(regions[0].s_hi == kInf);
  }

  SUBCASE("relaxed profile with envelope crossings reports the extra shifts") {
    ProfileFunction p = make_profile(-4.0, 1.0, 0.1, ProfileFunction::Family::relaxed_family);
    auto regions = enumerate_translated_points_closed_form(p);
    REQUIRE(regions.size() >= 3);
    int crossings = 0;
    for (const auto& reg : regions) {
      if (reg.collar) continue;
      ++crossings;
      double s = reg.s_lo;
      // crossing condition f'(s) = 2 pi s and the shift value f(s) - pi s^2
      CHECK(p.derivative(s) == doctest::Approx(2.0 * kPi * s).epsilon(1e-7));
      CHECK(reg.shift == doctest::Approx(p.value(s) - kPi * s * s).epsilon(1e-9));
    }
    CHECK(crossings == 2);
  }
}

TEST_CASE("scan family and the g/l root") {
  static const ScanProfileFamily family;

  SUBCASE("tangency value sits in the required window") {
    CHECK(family.rho_tangency() > 0.75 * kPi);
    CHECK(family.rho_tangency() < kPi);
    // relaxed envelope validity up to 3 pi / 2
    CHECK(1.5 * kPi < 2.0 * family.rho_tangency());
  }

  SUBCASE("family members are valid profiles of both regimes") {
    // below the tangency: strict (f' < 2 pi s); up to 3 pi/2: relaxed
    double rt = family.rho_tangency();
    for (double frac : {0.5, 0.9}) {
      double rho = frac * rt;
      for (int k = 1; k <= 200; ++k) {
        double s = static_cast<double>(k) / 200;
        CHECK(family.fprime(rho, s) < 2.0 * kPi * s);
      }
    }
    for (int k = 1; k <= 200; ++k) {
      double s = static_cast<double>(k) / 200;
      CHECK(family.fprime(1.5 * kPi, s) < 4.0 * kPi * s);
    }
    // plateau value: f(0) = -rho, f(1) = 0
    CHECK(family.f(1.0, 0.0) == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(family.f(1.0, 1.0) == doctest::Approx(0.0).epsilon(1e-9));
  }

  SUBCASE("scan signs and the bisected root") {
    ScanResult res = g_and_l_scan(family, 200, 4000);
    CHECK(res.rows.front().g < 0.0);
    for (const auto& row : res.rows)
      if (row.rho > kPi + 1e-9) CHECK(row.g > 0.0);
    CHECK(res.rho1 > res.rho0);
    CHECK(res.rho1 < kPi);
    CHECK(std::abs(res.g_at_root) < 1e-6);
    CHECK(res.semicontinuity_ok);
  }

  SUBCASE("l is computed from s = 1 downward") {
    double rho = family.rho_tangency() + 0.2;
    double l = family.l(rho);
    CHECK(l > 0.0);
    CHECK(family.fprime(rho, l) == doctest::Approx(2.0 * kPi * l).epsilon(1e-9));
    // no crossing above l
    for (int k = 1; k <= 50; ++k) {
      double s = l + (1.0 - l) * k / 51.0;
      CHECK(family.fprime(rho, s) < 2.0 * kPi * s);
    }
  }
}

TEST_CASE("profile table serialization") {
  ProfileFunction p = make_profile(-0.4, 1.0, 0.1);
  auto rows = profile_table(p, 50);
  REQUIRE(rows.size() == 51);
  CHECK(rows.front().s == 0.0);
  CHECK(rows.front().f == doctest::Approx(-0.4));
  CHECK(rows.back().s == doctest::Approx(1.0));
  CHECK(rows.back().f == doctest::Approx(0.0));
}
