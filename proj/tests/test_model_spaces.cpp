#include <doctest.h>

#include <cmath>
#include <random>

#include "contact_spectral/model_spaces.hpp"

using namespace contact_spectral;

TEST_CASE("contact form") {
  PrequantizationPoint p = make_point({0.3, -0.6}, 0.25);

  SUBCASE("Reeb direction pairs to 1") {
    Vec tangent{0.0, 0.0, 1.0};
    CHECK(eval_contact_form(p, tangent) == doctest::Approx(1.0).epsilon(1e-14));
  }

  SUBCASE("horizontal tangents at the origin see only the tau component") {
    PrequantizationPoint origin = make_point({0.0, 0.0}, 0.1);
    Vec tangent{1.7, -2.4, 0.55};
    CHECK(eval_contact_form(origin, tangent) == doctest::Approx(0.55).epsilon(1e-14));
  }

  SUBCASE("value at y = (1,0) on (0,1,0) is one half") {
    PrequantizationPoint q = make_point({1.0, 0.0}, 0.0);
    Vec tangent{0.0, 1.0, 0.0};
    CHECK(eval_contact_form(q, tangent) == doctest::Approx(0.5).epsilon(1e-14));
  }

  SUBCASE("dimension mismatch is rejected") {
    Vec bad{1.0, 2.0};
    CHECK_THROWS_AS(eval_contact_form(p, bad), ValidationError);
  }

  SUBCASE("linear in the tangent argument") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
      PrequantizationPoint q = make_point({uni(rng), uni(rng)}, mod1(uni(rng)));
      Vec u{uni(rng), uni(rng), uni(rng)};
      Vec v{uni(rng), uni(rng), uni(rng)};
      double a = uni(rng), b = uni(rng);
      Vec comb(3);
      for (int i = 0; i < 3; ++i) comb[i] = a * u[i] + b * v[i];
      double lhs = eval_contact_form(q, comb);
      double rhs = a * eval_contact_form(q, u) + b * eval_contact_form(q, v);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
  }
}

TEST_CASE("reeb flow") {
  PrequantizationPoint p = make_point({0.4, 0.1}, 0.25);

  SUBCASE("identity at t = 0") {
    auto q = reeb_flow(p, 0.0);
    CHECK(q.y == p.y);
    CHECK(q.tau_lift == p.tau_lift);
  }

  SUBCASE("full period returns mod 1 and advances the lift") {
    auto q = reeb_flow(p, 1.0);
    CHECK(q.tau() == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(q.tau_lift == doctest::Approx(1.25).epsilon(1e-14));
  }

  SUBCASE("mod-1 arithmetic") {
    auto q = reeb_flow(make_point({0.4, 0.1}, 0.9), 0.3);
    CHECK(q.tau() == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(q.tau_lift == doctest::Approx(1.2).epsilon(1e-14));
  }

  SUBCASE("flow property is exact in y and the lift") {
    auto a = reeb_flow(p, 0.7 + 0.9);
    auto b = reeb_flow(reeb_flow(p, 0.7), 0.9);
    CHECK(a.y == b.y);
    CHECK(a.tau_lift == doctest::Approx(b.tau_lift).epsilon(1e-15));
  }
}

TEST_CASE("liouville scaling") {
  SUBCASE("identity at r = 1") {
    DomainSpec b = DomainSpec::ball(1.0);
    CHECK(liouville_scale(b, 1.0).radius == doctest::Approx(1.0));
  }

  SUBCASE("B(1) scales to B(2) at r = 4") {
    DomainSpec b = DomainSpec::ball(1.0);
    CHECK(liouville_scale(b, 4.0).radius == doctest::Approx(2.0).epsilon(1e-14));
  }

  SUBCASE("capacity consequence: pi (sqrt(r) rho)^2 = r pi rho^2") {
    double rho = 0.8, r = 2.7;
    double scaled = kPi * sq(std::sqrt(r) * rho);
    CHECK(scaled == doctest::Approx(r * kPi * sq(rho)).epsilon(1e-13));
  }

  SUBCASE("rejects nonpositive scale") {
    CHECK_THROWS_AS(liouville_scale(DomainSpec::ball(1.0), 0.0), ValidationError);
    CHECK_THROWS_AS(liouville_scale(make_point({1.0, 0.0}, 0.0), -2.0), ValidationError);
  }

  SUBCASE("composition law to 1e-12") {
    PrequantizationPoint p = make_point({0.3, -1.2}, 0.6);
    auto a = liouville_scale(p, 2.0 * 3.5);
    auto b = liouville_scale(liouville_scale(p, 2.0), 3.5);
    for (int i = 0; i < 2; ++i) CHECK(a.y[i] == doctest::Approx(b.y[i]).epsilon(1e-12));
  }
}

TEST_CASE("polar round trips") {
  SUBCASE("n = 1 polar") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
      PolarPoint p;
      p.s = 1e-8 + 2.0 * uni(rng);
      p.phi = {2.0 * kPi * uni(rng)};
      p.tau_lift = uni(rng);
      PolarPoint q = to_polar(from_polar(p));
      CHECK(q.s == doctest::Approx(p.s).epsilon(1e-10));
      CHECK(std::abs(wrap_half((q.phi[0] - p.phi[0]) / (2.0 * kPi))) * 2.0 * kPi <
            1e-10 * std::max(1.0, p.s));
      CHECK(q.tau_lift == doctest::Approx(p.tau_lift).epsilon(1e-14));
    }
  }

  SUBCASE("multi-radius round trip per plane") {
    MultiRadiusPoint p;
    p.s = {0.7, 1.3};
    p.phi = {1.1, 5.2};
    p.tau_lift = 0.4;
    auto q = to_multi_radius(from_multi_radius(p));
    for (int j = 0; j < 2; ++j) {
      CHECK(q.s[j] == doctest::Approx(p.s[j]).epsilon(1e-12));
      CHECK(q.phi[j] == doctest::Approx(p.phi[j]).epsilon(1e-12));
    }
  }
}

TEST_CASE("winding number") {
  SUBCASE("constant loop") {
    std::vector<PrequantizationPoint> loop(9, make_point({0.2, 0.3}, 0.5));
    CHECK(winding_number(loop) == 0);
  }

  SUBCASE("one full Reeb period") {
    std::vector<PrequantizationPoint> loop;
    for (int k = 0; k <= 32; ++k)
      loop.push_back(PrequantizationPoint{{0.2, 0.3}, static_cast<double>(k) / 32});
    CHECK(winding_number(loop) == 1);
  }

  SUBCASE("non-closed loop reports the gap") {
    std::vector<PrequantizationPoint> loop;
    loop.push_back(make_point({0.0, 0.0}, 0.0));
    loop.push_back(make_point({0.5, 0.0}, 0.2));
    CHECK_THROWS_AS(winding_number(loop), ValidationError);
  }

  SUBCASE("invariant under reparametrization and refinement") {
    auto sample = [](int N, bool quadratic) {
      std::vector<PrequantizationPoint> loop;
      for (int k = 0; k <= N; ++k) {
        double t = static_cast<double>(k) / N;
        if (quadratic) t = t * t;
        loop.push_back(PrequantizationPoint{{std::cos(2.0 * kPi * t), std::sin(2.0 * kPi * t)},
                                            -2.0 * t});
      }
      return loop;
    };
    CHECK(winding_number(sample(64, false)) == -2);
    CHECK(winding_number(sample(512, false)) == -2);
    CHECK(winding_number(sample(64, true)) == -2);
  }
}

TEST_CASE("symplectization points require positive r") {
  CHECK_THROWS_AS(make_symplectization_point(make_point({0.0, 0.0}, 0.0), -1.0),
                  ValidationError);
}
