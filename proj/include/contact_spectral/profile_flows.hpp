#pragma once

// Compactly supported radial profiles f on [0, r] with plateaus f = rho near 0
// and f = 0 near r, the closed-form contact flow they generate on
// R^{2n} x S^1, its translated-point structure, and the l/g root scan over a
// one-parameter profile family.

#include <cmath>
#include <functional>
#include <memory>
#include <sstream>
#include <vector>

#include "contact_spectral/contact_calculus.hpp"
#include "contact_spectral/model_spaces.hpp"
#include "contact_spectral/util.hpp"

namespace contact_spectral {

// The derivative hugs the admissibility envelope: f'(s) = -sign(rho) c E s T(s)
// with E = 2pi (strict) or 4pi (relaxed), T a quintic taper supported in
// (eps, r-eps), and c < 1 so that E s - |f'(s)| > 0 everywhere.
struct ProfileFunction {
  enum class Family { strict_family, relaxed_family };

  double rho = 0.0;
  double r = 1.0;
  double collar = 0.1;  // plateau width at both ends
  Family family = Family::strict_family;

  double envelope = 2.0 * kPi;
  double c = 0.0;      // envelope fraction
  double delta = 0.0;  // taper transition width
  double a = 0.0, b = 0.0;  // support of f' is (a, b) = (collar, r - collar)
  double I_rise_end = 0.0, I_plateau_end = 0.0, I_total = 0.0;

  // taper profile in [0,1]
  double taper(double s) const {
    if (s <= a || s >= b) return 0.0;
    if (s < a + delta) return smoothstep5((s - a) / delta);
    if (s <= b - delta) return 1.0;
    return smoothstep5((b - s) / delta);
  }

  // integral of u * taper(u) over [0, s], closed form piecewise
  double envelope_mass(double s) const {
    auto I1 = [](double x) { return x * x * x * x * (2.5 + x * (-3.0 + x)); };
    auto I2 = [](double x) {
      return x * x * x * x * x * (2.0 + x * (-2.5 + x * (6.0 / 7.0)));
    };
    if (s <= a) return 0.0;
    if (s < a + delta) {
      double x = (s - a) / delta;
      return delta * (a * I1(x) + delta * I2(x));
    }
    if (s <= b - delta) return I_rise_end + 0.5 * (s * s - sq(a + delta));
    if (s < b) {
      double x = (b - s) / delta;
      return I_plateau_end + delta * (b * (I1(1.0) - I1(x)) - delta * (I2(1.0) - I2(x)));
    }
    return I_total;
  }

  double derivative(double s) const {
    if (rho == 0.0 || s <= 0.0) return 0.0;
    double sgn = (rho > 0.0) ? 1.0 : -1.0;
    return -sgn * c * envelope * s * taper(s);
  }

  double value(double s) const {
    if (rho == 0.0) return 0.0;
    if (s >= r) return 0.0;
    double sgn = (rho > 0.0) ? 1.0 : -1.0;
    return rho - sgn * c * envelope * envelope_mass(s);
  }
};

inline ProfileFunction make_profile(double rho, double r, double epsilon,
                                    ProfileFunction::Family family =
                                        ProfileFunction::Family::strict_family) {
  if (r <= 0.0 || epsilon <= 0.0 || 2.0 * epsilon >= r)
    throw ValidationError("make_profile: need 0 < 2*epsilon < r");
  ProfileFunction p;
  p.rho = rho;
  p.r = r;
  p.collar = epsilon;
  p.family = family;
  p.envelope = (family == ProfileFunction::Family::strict_family) ? 2.0 * kPi : 4.0 * kPi;
  p.a = epsilon;
  p.b = r - epsilon;
  double family_bound = 0.5 * p.envelope * r * r;  // integral of the envelope over [0, r]
  if (std::abs(rho) >= family_bound - 1e-6) {
    std::ostringstream os;
    os << "make_profile: |rho| = " << std::abs(rho)
       << " exceeds the envelope integral bound " << family_bound
       << " over [0, r]; no admissible profile exists";
    throw ValidationError(os.str());
  }
  if (rho == 0.0) {
    p.c = 0.0;
    p.delta = (p.b - p.a) / 8.0;
    return p;
  }
  // Shrink the taper until the envelope mass suffices.
  double width = p.b - p.a;
  for (double delta = width / 8.0; delta >= width / 4096.0; delta *= 0.5) {
    p.delta = delta;
    // mass integrals for this taper
    auto I1 = [](double x) { return x * x * x * x * (2.5 + x * (-3.0 + x)); };
    auto I2 = [](double x) {
      return x * x * x * x * x * (2.0 + x * (-2.5 + x * (6.0 / 7.0)));
    };
    p.I_rise_end = delta * (p.a * I1(1.0) + delta * I2(1.0));
    p.I_plateau_end = p.I_rise_end + 0.5 * (sq(p.b - delta) - sq(p.a + delta));
    double fall = delta * (p.b * I1(1.0) - delta * I2(1.0));
    p.I_total = p.I_plateau_end + fall;
    double cc = std::abs(rho) / (p.envelope * p.I_total);
    if (cc <= 1.0 - 1e-9) {
      p.c = cc;
      return p;
    }
  }
  std::ostringstream os;
  double sharp = 0.5 * p.envelope * (sq(r - epsilon) - sq(epsilon));
  os << "make_profile: |rho| = " << std::abs(rho)
     << " cannot be realized with collar width " << epsilon
     << " (envelope mass over (" << epsilon << ", " << r - epsilon << ") is " << sharp << ")";
  throw ValidationError(os.str());
}

// Grid verification of the plateau, monotonicity, and envelope conditions.
// Returns the minimum of E s - |f'(s)| over the grid (must be positive).
inline double verify_profile(const ProfileFunction& p, int grid = 10000) {
  double margin = kInf;
  for (int k = 0; k <= grid; ++k) {
    double s = p.r * k / grid;
    double fp = p.derivative(s);
    if (p.rho < 0.0 && fp < -1e-15) throw NumericalError("profile: monotonicity violated");
    if (p.rho > 0.0 && fp > 1e-15) throw NumericalError("profile: monotonicity violated");
    if (s <= p.collar && std::abs(p.value(s) - p.rho) > 1e-12)
      throw NumericalError("profile: inner plateau not exact");
    if (s >= p.r - p.collar && std::abs(p.value(s)) > 1e-12)
      throw NumericalError("profile: outer plateau not exact");
    if (s > 0.0) margin = std::min(margin, p.envelope * s - std::abs(fp));
  }
  if (!(margin > 0.0)) throw NumericalError("profile: envelope condition violated");
  return margin;
}

// ---------------------------------------------------------------------------
// Closed-form flow. Preserves s = |y|; rotates every symplectic plane by
// (f'(s)/s) t and advances tau_lift by (f(s) - s f'(s)/2) t. Exact (rho == 1).

inline PrequantizationPoint closed_form_flow_cartesian(const ProfileFunction& p, double t,
                                                       const PrequantizationPoint& x) {
  double s2 = 0.0;
  for (double v : x.y) s2 += v * v;
  double s = std::sqrt(s2);
  PrequantizationPoint q = x;
  if (s >= p.r) return q;
  double fp = p.derivative(s);
  double omega = (s > 1e-8) ? fp / s : 0.0;
  double angle = omega * t;
  double cs = std::cos(angle), sn = std::sin(angle);
  for (std::size_t j = 0; j + 1 < x.y.size(); j += 2) {
    double u = x.y[j], v = x.y[j + 1];
    q.y[j] = cs * u - sn * v;
    q.y[j + 1] = sn * u + cs * v;
  }
  q.tau_lift = x.tau_lift + (p.value(s) - 0.5 * s * fp) * t;
  return q;
}

inline PolarPoint closed_form_flow(const ProfileFunction& p, double t, const PolarPoint& x) {
  if (x.phi.size() != 1)
    throw ValidationError("closed_form_flow: polar form is the n = 1 presentation");
  PolarPoint q = x;
  if (x.s >= p.r) return q;
  double fp = p.derivative(x.s);
  double omega = (x.s > 1e-8) ? fp / x.s : 0.0;
  q.phi[0] = std::fmod(x.phi[0] + omega * t, 2.0 * kPi);
  if (q.phi[0] < 0.0) q.phi[0] += 2.0 * kPi;
  q.tau_lift = x.tau_lift + (p.value(x.s) - 0.5 * x.s * fp) * t;
  return q;
}

// h(y, tau) = f(|y|) with analytic gradient.
inline ContactHamiltonian profile_hamiltonian(const ProfileFunction& p, int n = 1) {
  auto prof = std::make_shared<ProfileFunction>(p);
  ContactHamiltonian h;
  h.n = n;
  h.support_radius = p.r;
  h.value = [prof](double, std::span<const double> y, double) {
    double s2 = 0.0;
    for (double v : y) s2 += v * v;
    return prof->value(std::sqrt(s2));
  };
  h.value_grad = [prof](double, std::span<const double> y, double, std::span<double> dy,
                        double& dtau) {
    double s2 = 0.0;
    for (double v : y) s2 += v * v;
    double s = std::sqrt(s2);
    double fp = (s > 1e-12) ? prof->derivative(s) / s : 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) dy[i] = fp * y[i];
    dtau = 0.0;
    return prof->value(s);
  };
  return h;
}

inline ContactIsotopy profile_isotopy(const ProfileFunction& p, int n = 1) {
  auto prof = std::make_shared<ProfileFunction>(p);
  ContactIsotopy iso;
  iso.n = n;
  iso.method = ContactIsotopy::Method::closed_form;
  iso.hamiltonian = profile_hamiltonian(p, n);
  iso.evaluate = [prof](double t, const PrequantizationPoint& x) {
    return IsotopySample{closed_form_flow_cartesian(*prof, t, x), 1.0};
  };
  iso.inverse = [prof](double t, const PrequantizationPoint& x) {
    return closed_form_flow_cartesian(*prof, -t, x);
  };
  iso.pinned =
      PinnedConstruction{PinnedConstruction::Kind::profile_flow, 0.0, 0.0, 0.0, p.rho};
  return iso;
}

// ---------------------------------------------------------------------------
// Translated points of the time-1 closed-form flow: s with f'(s)/s in 2 pi Z;
// the time-shift there is f(s) - s f'(s)/2.

struct TranslatedRegion {
  double s_lo = 0.0;
  double s_hi = 0.0;  // kInf for the outer region
  double shift = 0.0;
  bool collar = true;  // false for an isolated envelope crossing
};

inline std::vector<TranslatedRegion> enumerate_translated_points_closed_form(
    const ProfileFunction& p, int grid = 20000) {
  std::vector<TranslatedRegion> out;
  if (p.rho == 0.0 || p.c == 0.0) {
    out.push_back({0.0, kInf, 0.0, true});
    return out;
  }
  out.push_back({0.0, p.collar, p.rho, true});
  out.push_back({p.r - p.collar, kInf, 0.0, true});
  // Isolated crossings f'(s) = +-2 pi k s for k != 0; only |k| = 1 is
  // reachable under the relaxed envelope.
  double sgn = (p.rho > 0.0) ? -1.0 : 1.0;  // sign of f'
  auto cross = [&](double s) { return sgn * p.derivative(s) - 2.0 * kPi * s; };
  double prev_s = p.a, prev_v = cross(p.a);
  for (int k = 1; k <= grid; ++k) {
    double s = p.a + (p.b - p.a) * k / grid;
    double v = cross(s);
    if ((prev_v < 0.0 && v >= 0.0) || (prev_v >= 0.0 && v < 0.0)) {
      double lo = prev_s, hi = s;
      for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        if ((cross(lo) <= 0.0) == (cross(mid) <= 0.0))
          lo = mid;
        else
          hi = mid;
      }
      double s_star = 0.5 * (lo + hi);
      double shift = p.value(s_star) - sgn * kPi * s_star * s_star;
      out.push_back({s_star, s_star, shift, false});
    }
    prev_s = s;
    prev_v = v;
  }
  return out;
}

// ---------------------------------------------------------------------------
// One-parameter family rho -> f_rho with plateau -rho and f' = rho w(s),
// w(s) proportional to s^{1.2} tapered into (0.05, 0.95). The envelope ratio
// rho w(s) / (2 pi s) peaks at a unique interior point, so the family is
// strict below the tangency value and develops crossings above it.

class ScanProfileFamily {
 public:
  ScanProfileFamily() {
    const int N = kTableSize;
    table_w_.resize(N + 1);
    table_W_.resize(N + 1);
    // unnormalized shape s^{1.2} T(s)
    for (int i = 0; i <= N; ++i) table_w_[i] = shape(static_cast<double>(i) / N);
    // cumulative integral by per-interval Simpson
    table_W_[0] = 0.0;
    double h = 1.0 / N;
    for (int i = 0; i < N; ++i) {
      double s0 = static_cast<double>(i) / N;
      double mid = shape(s0 + 0.5 * h);
      table_W_[i + 1] = table_W_[i] + h / 6.0 * (table_w_[i] + 4.0 * mid + table_w_[i + 1]);
    }
    norm_ = 1.0 / table_W_[N];
    // tangency value: min over s of 2 pi s / w(s)
    double best = kInf;
    for (int i = 1; i <= N; ++i) {
      double s = static_cast<double>(i) / N;
      double w = norm_ * table_w_[i];
      if (w > 1e-14) best = std::min(best, 2.0 * kPi * s / w);
    }
    rho_tan_ = best;
  }

  double rho_tangency() const { return rho_tan_; }
  double rho_min() const { return rho_tan_ + 1e-4; }

  double w(double s) const {
    if (s <= 0.0 || s >= 1.0) return 0.0;
    return norm_ * shape(s);
  }

  double W(double s) const {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    double u = s * kTableSize;
    int i = static_cast<int>(u);
    double frac = u - i;
    return norm_ * ((1.0 - frac) * table_W_[i] + frac * table_W_[i + 1]);
  }

  double fprime(double rho, double s) const { return rho * w(s); }
  double f(double rho, double s) const { return -rho * (1.0 - W(s)); }

  // Largest s in [0,1] with f'(s) >= 2 pi s, scanned from s = 1 downward.
  double l(double rho, int grid = 10000) const {
    for (int k = grid; k >= 1; --k) {
      double s = static_cast<double>(k) / grid;
      if (fprime(rho, s) >= 2.0 * kPi * s) {
        double lo = s, hi = std::min(1.0, s + 1.0 / grid);
        auto val = [&](double x) { return fprime(rho, x) - 2.0 * kPi * x; };
        for (int it = 0; it < 60; ++it) {
          double mid = 0.5 * (lo + hi);
          if (val(mid) >= 0.0)
            lo = mid;
          else
            hi = mid;
        }
        return 0.5 * (lo + hi);
      }
    }
    return 0.0;
  }

  double g(double rho, int grid = 10000) const {
    double ls = l(rho, grid);
    return f(rho, ls) - kPi * ls * ls + rho;
  }

 private:
  static constexpr int kTableSize = 200000;

  static double shape(double s) {
    const double a = 0.05, b = 0.95, d = 0.02;
    double taper;
    if (s <= a || s >= b)
      taper = 0.0;
    else if (s < a + d)
      taper = smoothstep5((s - a) / d);
    else if (s <= b - d)
      taper = 1.0;
    else
      taper = smoothstep5((b - s) / d);
    return (taper == 0.0) ? 0.0 : std::pow(s, 1.2) * taper;
  }

  std::vector<double> table_w_, table_W_;
  double norm_ = 1.0;
  double rho_tan_ = 0.0;
};

struct ScanRow {
  double rho = 0.0;
  double l = 0.0;
  double g = 0.0;
};

struct ScanResult {
  std::vector<ScanRow> rows;
  double rho0 = 0.0;
  double rho1 = 0.0;     // root of g in (rho0, pi)
  double g_at_root = 0.0;
  std::vector<double> jump_points;  // rho values where l jumps
  bool semicontinuity_ok = true;
};

inline ScanResult g_and_l_scan(const ScanProfileFamily& family, int grid = 1000,
                               int s_grid = 10000) {
  if (grid < 8) throw ValidationError("g_and_l_scan: grid too small");
  ScanResult res;
  res.rho0 = family.rho_min();
  double hi = 1.5 * kPi;
  res.rows.reserve(grid + 1);
  for (int k = 0; k <= grid; ++k) {
    double rho = res.rho0 + (hi - res.rho0) * k / grid;
    double ls = family.l(rho, s_grid);
    res.rows.push_back({rho, ls, family.f(rho, ls) - kPi * ls * ls + rho});
  }
  for (std::size_t i = 0; i + 1 < res.rows.size(); ++i) {
    if (std::abs(res.rows[i + 1].l - res.rows[i].l) > 0.05) {
      res.jump_points.push_back(res.rows[i + 1].rho);
      if (res.rows[i + 1].g > res.rows[i].g + 1e-9) res.semicontinuity_ok = false;
    }
  }
  // Bisection on the first sign change.
  double lo = 0.0, hir = 0.0;
  bool found = false;
  for (std::size_t i = 0; i + 1 < res.rows.size(); ++i) {
    if (res.rows[i].g < 0.0 && res.rows[i + 1].g >= 0.0) {
      lo = res.rows[i].rho;
      hir = res.rows[i + 1].rho;
      found = true;
      break;
    }
  }
  if (!found) throw NumericalError("g_and_l_scan: no sign change of g on the grid");
  for (int it = 0; it < 200 && hir - lo > 1e-13; ++it) {
    double mid = 0.5 * (lo + hir);
    if (family.g(mid, s_grid) < 0.0)
      lo = mid;
    else
      hir = mid;
  }
  res.rho1 = 0.5 * (lo + hir);
  res.g_at_root = family.g(res.rho1, s_grid);
  return res;
}

// Plain-text profile table (s, f, f') for external plotting.
struct ProfileTableRow {
  double s, f, fp;
};

inline std::vector<ProfileTableRow> profile_table(const ProfileFunction& p, int rows = 200) {
  std::vector<ProfileTableRow> out;
  out.reserve(rows + 1);
  for (int k = 0; k <= rows; ++k) {
    double s = p.r * k / rows;
    out.push_back({s, p.value(s), p.derivative(s)});
  }
  return out;
}

}  // namespace contact_spectral
