#include <doctest.h>

#include <cmath>
#include <random>

#include "contact_spectral/fixtures.hpp"
#include "contact_spectral/profile_flows.hpp"
#include "contact_spectral/translated_points.hpp"

using namespace contact_spectral;

namespace {

SolverOptions small_solver(int seeds = 256) {
  SolverOptions opt;
  opt.seeds = seeds;
  return opt;
}

// independent recheck of the defining equations
void recheck(const ContactIsotopy& phi, const TranslatedPoint& tp, double tol_res = 1e-8) {
  IsotopySample s = phi.evaluate(1.0, tp.x);
  PrequantizationPoint target = reeb_flow(tp.x, tp.shift);
  CHECK(sigma_distance(s.point, target) < tol_res);
  CHECK(std::abs(s.point.tau_lift - target.tau_lift) < tol_res);
  CHECK(std::abs(s.rho - 1.0) < tol_res);
}

}  // namespace

TEST_CASE("translated points of the Reeb path") {
  double T = 0.8;
  ContactIsotopy phi = reeb_isotopy(T, 1);
  auto pts = find_translated_points(phi, DomainSpec::ball(0.8), 0.0, 1.5, small_solver());
  REQUIRE(!pts.empty());
  for (const auto& tp : pts) {
    CHECK(tp.shift == doctest::Approx(T).epsilon(1e-9));
    CHECK(tp.action == doctest::Approx(-T).epsilon(1e-9));
    CHECK(tp.contractible);
    recheck(phi, tp);
  }
}

TEST_CASE("translated points of the compactly supported Reeb flow") {
  ProfileFunction prof = make_profile(-0.4, 1.0, 0.1);
  ContactIsotopy phi = profile_isotopy(prof);
  auto pts = find_translated_points(phi, DomainSpec::ball(1.2), -1.0, 1.0, small_solver(1024));
  REQUIRE(!pts.empty());
  bool saw_interior = false, saw_outer = false;
  // collar membership at the geometric-distinctness resolution: the ramp is
  // flat to second order at the collar edge, so solver solutions smear in by
  // the cube root of the residual tolerance
  for (const auto& tp : pts) {
    double s = std::sqrt(sq(tp.x.y[0]) + sq(tp.x.y[1]));
    bool inner = s <= prof.collar + 1e-4;
    bool outer = s >= prof.r - prof.collar - 1e-4;
    CHECK((inner || outer));
    if (inner) {
      CHECK(tp.shift == doctest::Approx(prof.rho).epsilon(1e-8));
      saw_interior = true;
    }
    if (outer) {
      CHECK(std::abs(tp.shift) < 1e-8);
      saw_outer = true;
    }
    recheck(phi, tp);
  }
  CHECK(saw_interior);
  CHECK(saw_outer);
}

TEST_CASE("no convergence yields an empty list rather than an error") {
  // the identity has no translated points with shifts inside (0.3, 0.7)
  auto pts = find_translated_points(identity_isotopy(1), DomainSpec::ball(0.5), 0.3, 0.7,
                                    small_solver(64));
  CHECK(pts.empty());
}

TEST_CASE("translated points of a small bump lift sit at critical points") {
  ContactIsotopy lift = fixtures::small_bump_lift(0.3, {0.1, -0.15}, 0.6);
  auto pts = find_translated_points(lift, DomainSpec::ball(0.9), -0.6, 0.6, small_solver(512));
  REQUIRE(!pts.empty());
  bool saw_center = false;
  for (const auto& tp : pts) {
    recheck(lift, tp, 1e-7);
    double dc = std::sqrt(sq(tp.x.y[0] - 0.1) + sq(tp.x.y[1] + 0.15));
    if (dc < 1e-5) {
      saw_center = true;
      // shift at the maximum of b is -b(center) = -0.3
      CHECK(tp.shift == doctest::Approx(-0.3).epsilon(1e-7));
    }
  }
  CHECK(saw_center);
}

TEST_CASE("iterated translated points") {
  SUBCASE("nu = 1 reduces to the plain solver") {
    ContactIsotopy phi = reeb_isotopy(0.4, 1);
    auto one = iterated_translated_points(phi, 1, DomainSpec::ball(0.5), 0.0, 1.0,
                                          small_solver(128));
    auto plain = find_translated_points(phi, DomainSpec::ball(0.5), 0.0, 1.0,
                                        small_solver(128));
    REQUIRE(one.by_iterate.count(1) == 1);
    CHECK(one.by_iterate.at(1).size() == plain.size());
  }

  SUBCASE("interior points of the profile flow iterate with shifts nu rho") {
    ProfileFunction prof = make_profile(-0.3, 1.0, 0.1);
    ContactIsotopy phi = profile_isotopy(prof);
    auto res = iterated_translated_points(phi, 3, DomainSpec::ball(0.3), -2.0, 0.5,
                                          small_solver(256));
    for (int nu = 1; nu <= 3; ++nu) {
      bool found = false;
      for (const auto& tp : res.by_iterate.at(nu)) {
        double s = std::sqrt(sq(tp.x.y[0]) + sq(tp.x.y[1]));
        if (s <= prof.collar) {
          CHECK(tp.shift == doctest::Approx(nu * prof.rho).epsilon(1e-8));
          found = true;
        }
      }
      CHECK(found);
    }
    CHECK(res.distinct_count >= 1);
  }

  SUBCASE("distinct count is nondecreasing and bump-lift shifts are monotone") {
    ContactIsotopy lift = fixtures::small_bump_lift(0.22, {0.0, 0.0}, 0.55);
    auto one = iterated_translated_points(lift, 1, DomainSpec::ball(0.7), -1.5, 0.5,
                                          small_solver(128));
    auto three = iterated_translated_points(lift, 3, DomainSpec::ball(0.7), -1.5, 0.5,
                                            small_solver(128));
    CHECK(three.distinct_count >= one.distinct_count);
    // the center iterates with strictly decreasing shift -0.22 nu, so the
    // spectral values -shift increase strictly across iterations
    double prev = 1.0;
    for (int nu = 1; nu <= 3; ++nu) {
      bool found = false;
      for (const auto& tp : three.by_iterate.at(nu)) {
        if (std::sqrt(sq(tp.x.y[0]) + sq(tp.x.y[1])) < 1e-5) {
          CHECK(tp.shift == doctest::Approx(-0.22 * nu).epsilon(1e-7));
          CHECK(tp.shift < prev - 0.1);
          prev = tp.shift;
          found = true;
          break;
        }
      }
      CHECK(found);
    }
  }
}

TEST_CASE("action spectra") {
  SUBCASE("identity spectrum in a sub-integer window is {0}") {
    auto spec = action_spectrum(identity_isotopy(1), DomainSpec::ball(0.5), -0.45, 0.45,
                                small_solver(128));
    REQUIRE(!spec.entries.empty());
    for (const auto& e : spec.entries) CHECK(std::abs(e.action) < 1e-9);
    CHECK_FALSE(spec.nonresonant_raw);
  }

  SUBCASE("Reeb path spectrum: raw integer translates, one contractible value") {
    double T = 2.5;
    ContactIsotopy phi = reeb_isotopy(T, 1);
    auto spec = action_spectrum(phi, DomainSpec::ball(0.4), -3.2, 0.2, small_solver(128));
    bool saw_contractible = false;
    for (const auto& e : spec.entries) {
      if (e.contractible) {
        CHECK(e.action == doctest::Approx(-T).epsilon(1e-9));
        CHECK(e.winding == 0);
        saw_contractible = true;
      } else {
        // the translate with shift T + m has action -T - m and winding -m
        double m = -(e.action + T);
        CHECK(std::abs(m - std::round(m)) < 1e-9);
        CHECK(e.winding == -static_cast<int>(std::round(m)));
      }
    }
    CHECK(saw_contractible);
    CHECK(spec.nonresonant_raw);  // -2.5 + k never lands on an integer
  }

  SUBCASE("profile flow contractible spectrum is {0, -rho}") {
    ProfileFunction prof = make_profile(-0.4, 1.0, 0.1);
    ContactIsotopy phi = profile_isotopy(prof);
    auto spec = action_spectrum(phi, DomainSpec::ball(1.2), -0.9, 0.9, small_solver(1024));
    std::vector<double> vals = spec.values(true);
    std::sort(vals.begin(), vals.end());
    REQUIRE(vals.size() == 2);
    CHECK(vals[0] == doctest::Approx(0.0).epsilon(1e-8));
    CHECK(vals[1] == doctest::Approx(0.4).epsilon(1e-8));
    CHECK_FALSE(spec.nonresonant_contractible);  // 0 is in the spectrum
  }
}

TEST_CASE("conjugation transport of integer-shift points") {
  // fixed points (integer shift 0) of the bump lift transport under a
  // rotation lift to fixed points of the conjugated path
  ContactIsotopy phi = fixtures::small_bump_lift(0.3, {0.2, 0.0}, 0.5);
  ContactIsotopy psi_path = lift_hamiltonian_isotopy(fixtures::rotation_isotopy(0.7));
  Contactomorphism psi = time1_map(psi_path);
  ContactIsotopy conj = conjugate_path(phi, psi);
  // the bump center is a translated point with shift -0.3; any point far from
  // the support is fixed (shift 0, integer)
  PrequantizationPoint far = make_point({0.85, 0.3}, 0.55);
  IsotopySample direct = conj.evaluate(1.0, psi.forward(far));
  CHECK(sigma_distance(direct.point, psi.forward(far)) < 1e-9);
  CHECK(std::abs(direct.rho - 1.0) < 1e-9);
  // the transported center keeps its (non-integer) shift as well since the
  // conjugator is exact
  PrequantizationPoint center = make_point({0.2, 0.0}, 0.1);
  PrequantizationPoint image = psi.forward(center);
  IsotopySample moved = conj.evaluate(1.0, image);
  CHECK(sigma_distance(moved.point, reeb_flow(image, -0.3)) < 1e-8);
}

TEST_CASE("conley zehnder index") {
  SUBCASE("short positive definite quadratic flow has index m") {
    for (int m : {1, 2}) {
      Mat S(2 * m);
      for (int i = 0; i < 2 * m; ++i) S(i, i) = 0.2;
      CHECK(conley_zehnder_index(quadratic_hamiltonian_path(S)) == m);
    }
  }

  SUBCASE("Morse index k gives m - k") {
    for (int m : {1, 2}) {
      for (int k = 0; k <= 2 * m; ++k) {
        Mat S(2 * m);
        for (int i = 0; i < 2 * m; ++i) S(i, i) = (i < k) ? -0.23 : 0.2;
        CHECK(conley_zehnder_index(quadratic_hamiltonian_path(S)) == m - k);
      }
    }
  }

  SUBCASE("planar rotations: frozen regression values") {
    // rotation by 2 pi theta t; the index is 1 for theta in (0,1),
    // computed independently at fine resolution and frozen
    for (double theta : {0.25, 0.5, 0.9}) {
      Mat S(2);
      S(0, 0) = S(1, 1) = 2.0 * kPi * theta;
      auto coarse = quadratic_hamiltonian_path(S, 400);
      auto fine = quadratic_hamiltonian_path(S, 4000);
      CHECK(conley_zehnder_index(coarse) == 1);
      CHECK(conley_zehnder_index(fine) == 1);
    }
    Mat Sneg(2);
    Sneg(0, 0) = Sneg(1, 1) = -2.0 * kPi * 0.3;
    CHECK(conley_zehnder_index(quadratic_hamiltonian_path(Sneg)) == -1);
  }

  SUBCASE("catenation counts the interior full-rotation crossing") {
    // rotation to angle 2 pi * 1.2 passes eigenvalue 1 once: index 3
    Mat S(2);
    S(0, 0) = S(1, 1) = 2.0 * kPi * 1.2;
    CHECK(conley_zehnder_index(quadratic_hamiltonian_path(S, 2000)) == 3);
    // additivity against the two pieces: 1 + 2 = 3
    Mat S1(2);
    S1(0, 0) = S1(1, 1) = 2.0 * kPi * 0.6;
    CHECK(conley_zehnder_index(quadratic_hamiltonian_path(S1, 1000)) == 1);
  }

  SUBCASE("degenerate endpoints are rejected") {
    Mat S(2);
    S(0, 0) = S(1, 1) = 2.0 * kPi;  // full rotation, endpoint = identity
    CHECK_THROWS_AS(conley_zehnder_index(quadratic_hamiltonian_path(S, 2000)),
                    ValidationError);
  }

  SUBCASE("paths must start at the identity") {
    std::vector<Mat> path(32, Mat::identity(2));
    path[0](0, 0) = 2.0;
    CHECK_THROWS_AS(conley_zehnder_index(path), ValidationError);
  }
}

TEST_CASE("grading formula") {
  SUBCASE("eta = 0 case") { CHECK(rfh_grading(0.0, 2, 0, 0, 3) == 2); }
  SUBCASE("bump-lift maximum grades to n") {
    for (int n : {1, 2, 3}) CHECK(rfh_grading(0.0, n, 0, 0, 2 * n - 1) == n);
  }
  SUBCASE("positive eta direct substitution") {
    CHECK(rfh_grading(0.7, 1, 0, 0, 0) == 0);
    CHECK(rfh_grading(0.7, 1, 2, 2, 1) == 2);
  }
  SUBCASE("negative eta adds one") { CHECK(rfh_grading(-0.7, 1, 2, 2, 1) == 3); }
  SUBCASE("odd local dimension is rejected for nonzero eta") {
    CHECK_THROWS_AS(rfh_grading(0.5, 1, 1, 3, 0), ValidationError);
  }
}
