#pragma once

// The model contact manifold R^{2n} x S^1 with alpha = gamma + dtau,
// gamma = (1/2) sum (x dy - y dx), its polar presentation, the
// symplectization, Reeb and Liouville flows, and winding numbers.

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "contact_spectral/linalg.hpp"
#include "contact_spectral/util.hpp"

namespace contact_spectral {

// A point (y, tau) of R^{2n} x S^1. The S^1 coordinate is stored as a real
// lift; the mod-1 representative is derived. Flows update the lift.
struct PrequantizationPoint {
  Vec y;           // dimension 2n
  double tau_lift = 0.0;

  int n() const { return static_cast<int>(y.size()) / 2; }
  double tau() const { return mod1(tau_lift); }
};

inline PrequantizationPoint make_point(Vec y, double tau) {
  if (y.size() < 2 || y.size() % 2 != 0)
    throw ValidationError("PrequantizationPoint: y must have even dimension >= 2");
  return PrequantizationPoint{std::move(y), tau};
}

// gamma evaluated at y on a tangent vector of R^{2n}.
inline double gamma_form(std::span<const double> y, std::span<const double> v) {
  double s = 0.0;
  for (std::size_t j = 0; j + 1 < y.size(); j += 2)
    s += 0.5 * (y[j] * v[j + 1] - y[j + 1] * v[j]);
  return s;
}

// alpha = gamma + dtau on a tangent vector (v_y, v_tau) of dimension 2n+1.
inline double eval_contact_form(const PrequantizationPoint& p, std::span<const double> tangent) {
  if (tangent.size() != p.y.size() + 1)
    throw ValidationError("eval_contact_form: tangent must have dimension 2n+1");
  return gamma_form(p.y, tangent.first(p.y.size())) + tangent[p.y.size()];
}

// Reeb flow: tau-translation. y unchanged, lift increased by exactly t.
inline PrequantizationPoint reeb_flow(const PrequantizationPoint& p, double t) {
  PrequantizationPoint q = p;
  q.tau_lift += t;
  return q;
}

// Time-(log r) flow of the Liouville field Z = (1/2) sum (x dx + y dy)^sharp:
// scales Euclidean coordinates by sqrt(r).
inline PrequantizationPoint liouville_scale(const PrequantizationPoint& p, double r) {
  if (r <= 0.0) throw ValidationError("liouville_scale: scale must be positive");
  PrequantizationPoint q = p;
  double f = std::sqrt(r);
  for (double& c : q.y) c *= f;
  return q;
}

inline Vec liouville_scale(const Vec& y, double r) {
  if (r <= 0.0) throw ValidationError("liouville_scale: scale must be positive");
  Vec q = y;
  double f = std::sqrt(r);
  for (double& c : q) c *= f;
  return q;
}

// Euclidean distance in R^{2n} x S^1 (circle distance on the tau factor).
inline double sigma_distance(const PrequantizationPoint& a, const PrequantizationPoint& b) {
  double s = sq(wrap_half(a.tau_lift - b.tau_lift));
  for (std::size_t i = 0; i < a.y.size(); ++i) s += sq(a.y[i] - b.y[i]);
  return std::sqrt(s);
}

// Polar presentation for n = 1: y = (s cos phi, s sin phi).
struct PolarPoint {
  double s = 0.0;
  Vec phi;  // 2n-1 angles in [0, 2pi); one angle in the canonical n = 1 case
  double tau_lift = 0.0;

  double tau() const { return mod1(tau_lift); }
};

inline PolarPoint to_polar(const PrequantizationPoint& p) {
  if (p.n() != 1) throw ValidationError("to_polar: single-radius presentation is the n = 1 case");
  PolarPoint q;
  q.s = std::sqrt(sq(p.y[0]) + sq(p.y[1]));
  double a = (q.s > 1e-300) ? std::atan2(p.y[1], p.y[0]) : 0.0;
  if (a < 0.0) a += 2.0 * kPi;
  q.phi = {a};
  q.tau_lift = p.tau_lift;
  return q;
}

inline PrequantizationPoint from_polar(const PolarPoint& p) {
  if (p.phi.size() != 1) throw ValidationError("from_polar: expected one angle (n = 1)");
  return PrequantizationPoint{{p.s * std::cos(p.phi[0]), p.s * std::sin(p.phi[0])}, p.tau_lift};
}

// Per-plane polar coordinates (s_j, phi_j), the n > 1 generalization.
struct MultiRadiusPoint {
  Vec s;    // n radii
  Vec phi;  // n angles in [0, 2pi)
  double tau_lift = 0.0;
};

inline MultiRadiusPoint to_multi_radius(const PrequantizationPoint& p) {
  MultiRadiusPoint q;
  int n = p.n();
  q.s.resize(n);
  q.phi.resize(n);
  for (int j = 0; j < n; ++j) {
    double a = p.y[2 * j], b = p.y[2 * j + 1];
    q.s[j] = std::sqrt(a * a + b * b);
    double ang = (q.s[j] > 1e-300) ? std::atan2(b, a) : 0.0;
    if (ang < 0.0) ang += 2.0 * kPi;
    q.phi[j] = ang;
  }
  q.tau_lift = p.tau_lift;
  return q;
}

inline PrequantizationPoint from_multi_radius(const MultiRadiusPoint& p) {
  PrequantizationPoint q;
  q.y.resize(2 * p.s.size());
  for (std::size_t j = 0; j < p.s.size(); ++j) {
    q.y[2 * j] = p.s[j] * std::cos(p.phi[j]);
    q.y[2 * j + 1] = p.s[j] * std::sin(p.phi[j]);
  }
  q.tau_lift = p.tau_lift;
  return q;
}

struct SymplectizationPoint {
  PrequantizationPoint base;
  double r = 1.0;  // positive radial coordinate
};

inline SymplectizationPoint make_symplectization_point(PrequantizationPoint base, double r) {
  if (r <= 0.0) throw ValidationError("SymplectizationPoint: r must be positive");
  return SymplectizationPoint{std::move(base), r};
}

struct DomainSpec {
  enum class Kind { ball, cylinder, product_with_circle, liouville_scaled };
  Kind kind = Kind::ball;
  double radius = 1.0;
  double scale = 1.0;   // Liouville parameter for liouville_scaled
  int ambient_dim = 2;  // 2n

  static DomainSpec ball(double radius, int ambient_dim = 2) {
    if (radius <= 0.0) throw ValidationError("DomainSpec: radius must be positive");
    return DomainSpec{Kind::ball, radius, 1.0, ambient_dim};
  }
};

inline DomainSpec liouville_scale(const DomainSpec& d, double r) {
  if (r <= 0.0) throw ValidationError("liouville_scale: scale must be positive");
  DomainSpec q = d;
  if (d.kind == DomainSpec::Kind::ball || d.kind == DomainSpec::Kind::cylinder) {
    q.radius = d.radius * std::sqrt(r);
  } else if (d.kind == DomainSpec::Kind::liouville_scaled) {
    q.scale = d.scale * r;
  } else {
    q.kind = DomainSpec::Kind::liouville_scaled;
    q.scale = r;
  }
  return q;
}

// Winding of a closed loop given by samples with continuous tau_lift:
// (final lift - initial lift), which must be an integer.
inline int winding_number(const std::vector<PrequantizationPoint>& loop,
                          double closure_tol = tol::loop_closure) {
  if (loop.size() < 2) throw ValidationError("winding_number: need at least two samples");
  const auto& a = loop.front();
  const auto& b = loop.back();
  double gap = 0.0;
  for (std::size_t i = 0; i < a.y.size(); ++i) gap = std::max(gap, std::abs(a.y[i] - b.y[i]));
  gap = std::max(gap, std::abs(wrap_half(a.tau_lift - b.tau_lift)));
  if (gap > closure_tol) {
    std::ostringstream os;
    os << "winding_number: loop does not close, gap = " << gap;
    throw ValidationError(os.str());
  }
  double w = b.tau_lift - a.tau_lift;
  double r = std::round(w);
  if (std::abs(w - r) > tol::loop_closure)
    throw NumericalError("winding_number: lift difference is not an integer");
  return static_cast<int>(r);
}

}  // namespace contact_spectral
