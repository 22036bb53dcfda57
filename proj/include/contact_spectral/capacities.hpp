#pragma once

// Spectral numbers on the tractable class, ceiling capacities and the
// gamma / d_gamma arithmetic, non-squeezing certificates, the Hofer-Zehnder
// cutoff construction and admissibility probe, and displacement witnesses.

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "contact_spectral/contact_calculus.hpp"
#include "contact_spectral/model_spaces.hpp"
#include "contact_spectral/translated_points.hpp"
#include "contact_spectral/util.hpp"

namespace contact_spectral {

struct SpectralValue {
  enum class Method { reeb, small_bump, lifted_hamiltonian, profile_flow, spectrum_bracket };
  double c = 0.0;  // NaN when method == spectrum_bracket
  Method method = Method::spectrum_bracket;
  std::optional<std::pair<double, double>> bracket;
  ActionSpectrum spectrum_snapshot;

  bool pinned() const { return method != Method::spectrum_bracket; }
};

struct SpectralOptions {
  DomainSpec box = DomainSpec::ball(1.5, 2);
  std::optional<double> window_lo, window_hi;
  SolverOptions solver = [] {
    SolverOptions s;
    s.seeds = 1024;
    return s;
  }();
  bool with_snapshot = true;
};

// Pinned spectral values for the tractable constructions; anything else gets
// the spectrum plus a bracket [min detected value, continuation bound].
inline SpectralValue spectral_number(const ContactIsotopy& phi,
                                     SpectralOptions opt = SpectralOptions{}) {
  SpectralValue out;
  opt.box.ambient_dim = 2 * phi.n;
  if (phi.pinned) {
    switch (phi.pinned->kind) {
      case PinnedConstruction::Kind::reeb:
        out.method = SpectralValue::Method::reeb;
        out.c = -phi.pinned->reeb_time;
        break;
      case PinnedConstruction::Kind::small_bump:
        out.method = SpectralValue::Method::small_bump;
        out.c = phi.pinned->bump_max;
        break;
      case PinnedConstruction::Kind::lifted_hamiltonian:
        out.method = SpectralValue::Method::lifted_hamiltonian;
        out.c = -phi.pinned->lifted_min_F;
        break;
      case PinnedConstruction::Kind::profile_flow:
        out.method = SpectralValue::Method::profile_flow;
        out.c = (phi.pinned->profile_rho >= 0.0) ? 0.0 : -phi.pinned->profile_rho;
        break;
    }
    if (opt.with_snapshot) {
      double lo = opt.window_lo.value_or(std::min(out.c, 0.0) - 1.2);
      double hi = opt.window_hi.value_or(std::max(out.c, 0.0) + 1.2);
      out.spectrum_snapshot = action_spectrum(phi, opt.box, lo, hi, opt.solver);
    }
    return out;
  }
  double bound = continuation_bound(identity_isotopy(phi.n), phi);
  double lo = opt.window_lo.value_or(-bound - 1.0);
  double hi = opt.window_hi.value_or(bound + 1.0);
  out.method = SpectralValue::Method::spectrum_bracket;
  out.c = std::numeric_limits<double>::quiet_NaN();
  out.spectrum_snapshot = action_spectrum(phi, opt.box, lo, hi, opt.solver);
  double min_val = kInf;
  for (const auto& e : out.spectrum_snapshot.entries) min_val = std::min(min_val, e.action);
  out.bracket = {min_val, bound};
  return out;
}

// Exact pinned rule for composing with a Reeb path on the left:
// the spectral value drops by T.
inline SpectralValue compose_with_reeb(const SpectralValue& v, double T) {
  SpectralValue out = v;
  if (!v.pinned()) throw ValidationError("compose_with_reeb: needs a pinned value");
  out.c = v.c - T;
  return out;
}

// ceil with a snap for values within 1e-9 of an integer.
inline long long snap_ceil(double x) {
  double r = std::round(x);
  if (std::abs(x - r) < 1e-9) return static_cast<long long>(r);
  return static_cast<long long>(std::ceil(x));
}

inline long long ceiling_of(const SpectralValue& v) {
  if (v.pinned()) return snap_ceil(v.c);
  if (!v.bracket) throw ValidationError("ceiling_of: bracket value without a bracket");
  long long a = snap_ceil(v.bracket->first);
  long long b = snap_ceil(v.bracket->second);
  if (a != b) throw ValidationError("ceiling undetermined: bracket straddles an integer");
  return a;
}

struct CeilingGamma {
  long long c_bar = 0;
  long long c_bar_inverse = 0;
  long long gamma = 0;
};

inline CeilingGamma ceiling_and_gamma(const SpectralValue& c_phi,
                                      const SpectralValue& c_phi_inverse) {
  CeilingGamma out;
  out.c_bar = ceiling_of(c_phi);
  out.c_bar_inverse = ceiling_of(c_phi_inverse);
  out.gamma = std::llabs(out.c_bar) + std::llabs(out.c_bar_inverse);
  return out;
}

// d_gamma(phi, psi) = gamma(phi psi^{-1}), taking the two pinned values of the
// quotient path and its inverse.
inline long long d_gamma(const SpectralValue& c_quotient, const SpectralValue& c_quotient_inverse) {
  return ceiling_and_gamma(c_quotient, c_quotient_inverse).gamma;
}

// The displayed ceiling value of the Reeb loop t -> theta^{tT}; equals the
// ceiling of the spectral value of the reversed loop.
inline long long reeb_loop_ceiling(double T) { return snap_ceil(T); }

// ---------------------------------------------------------------------------
// Domain capacities and non-squeezing certificates.

inline double domain_capacity(const DomainSpec& d) {
  switch (d.kind) {
    case DomainSpec::Kind::ball:
    case DomainSpec::Kind::cylinder:
    case DomainSpec::Kind::product_with_circle:
      return kPi * sq(d.radius);
    case DomainSpec::Kind::liouville_scaled:
      if (d.scale <= 0.0) throw ValidationError("domain_capacity: scale must be positive");
      return d.scale * kPi * sq(d.radius);
  }
  throw ValidationError("domain_capacity: unsupported domain kind");
}

struct CapacityCertificate {
  DomainSpec source, target;
  double source_capacity = 0.0, target_capacity = 0.0;
  long long source_capacity_ceiling = 0;
  long long target_capacity_ceiling = 0;
  bool obstruction = false;
};

inline CapacityCertificate nonsqueeze_certificate(double source_capacity,
                                                  double target_capacity) {
  if (!(source_capacity > 0.0) || !(target_capacity > 0.0) ||
      !std::isfinite(source_capacity) || !std::isfinite(target_capacity))
    throw ValidationError("nonsqueeze_certificate: capacities must be finite and positive");
  CapacityCertificate cert;
  cert.source_capacity = source_capacity;
  cert.target_capacity = target_capacity;
  cert.source_capacity_ceiling = snap_ceil(source_capacity);
  cert.target_capacity_ceiling = snap_ceil(target_capacity);
  cert.obstruction = cert.target_capacity_ceiling < cert.source_capacity_ceiling;
  return cert;
}

inline CapacityCertificate nonsqueeze_certificate(const DomainSpec& source,
                                                  const DomainSpec& target) {
  CapacityCertificate cert = nonsqueeze_certificate(domain_capacity(source),
                                                    domain_capacity(target));
  cert.source = source;
  cert.target = target;
  return cert;
}

// ---------------------------------------------------------------------------
// Autonomous compactly supported scalar fields on R^{2m}.

struct ScalarField {
  std::function<double(std::span<const double>)> value;
  std::function<void(std::span<const double>, std::span<double>)> gradient;  // optional
  double support_radius = 1.0;
  int m = 1;  // field lives on R^{2m}
  double max_value = 0.0;
  std::string description;
};

namespace detail {

inline void scalar_gradient(const ScalarField& H, std::span<const double> y,
                            std::span<double> g) {
  if (H.gradient) {
    H.gradient(y, g);
    return;
  }
  std::array<double, kMaxDim> buf{};
  const std::size_t d = y.size();
  for (std::size_t i = 0; i < d; ++i) buf[i] = y[i];
  std::span<double> yb(buf.data(), d);
  for (std::size_t i = 0; i < d; ++i) {
    double step = 1e-6 * std::max(1.0, std::abs(y[i]));
    double keep = yb[i];
    yb[i] = keep + step;
    double fp = H.value(yb);
    yb[i] = keep - step;
    double fm = H.value(yb);
    yb[i] = keep;
    g[i] = (fp - fm) / (2.0 * step);
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Hofer-Zehnder cutoff: H_beta(x, y) = beta(|y|) H(x) on M x R^{2m'},
// with beta == 1 on [0, r-1-eps], 0 beyond r, and -1 <= beta' <= 0.

struct HZCutoff {
  ScalarField base;
  double r = 2.5, eps = 0.1;
  int m_y = 1;  // the y factor is R^{2 m_y}
  double period_bound = 0.0;  // pi (r-1-eps)^2 / max H
  std::function<double(double)> beta;
  std::function<double(double)> beta_deriv;

  double value(std::span<const double> x, std::span<const double> y) const {
    double s2 = 0.0;
    for (double v : y) s2 += v * v;
    return beta(std::sqrt(s2)) * base.value(x);
  }

  // (beta(|y|) X_H(x), H(x) X_beta(y))
  void field(std::span<const double> x, std::span<const double> y, std::span<double> out) const {
    const std::size_t dx = x.size(), dy = y.size();
    std::array<double, detail::kMaxDim> g{};
    detail::scalar_gradient(base, x, std::span<double>(g.data(), dx));
    double s2 = 0.0;
    for (double v : y) s2 += v * v;
    double s = std::sqrt(s2);
    double b = beta(s);
    for (std::size_t j = 0; j + 1 < dx; j += 2) {
      out[j] = -b * g[j + 1];
      out[j + 1] = b * g[j];
    }
    double bp = (s > 1e-12) ? beta_deriv(s) / s : 0.0;
    double Hx = base.value(x);
    for (std::size_t j = 0; j + 1 < dy; j += 2) {
      out[dx + j] = -Hx * bp * y[j + 1];
      out[dx + j + 1] = Hx * bp * y[j];
    }
  }
};

inline HZCutoff hz_cutoff(const ScalarField& H, double r, double eps, int m_y = 1) {
  if (!(r > 1.0 + eps)) throw ValidationError("hz_cutoff: need r > 1 + eps");
  if (eps <= 0.0) throw ValidationError("hz_cutoff: eps must be positive");
  HZCutoff cut;
  cut.base = H;
  cut.r = r;
  cut.eps = eps;
  cut.m_y = m_y;
  cut.period_bound = kPi * sq(r - 1.0 - eps) / std::max(H.max_value, 1e-12);
  double a = r - 1.0 - eps, b = r;
  double d = 0.5 * eps;  // ramp width of the slope taper
  double c = 1.0 / (b - a - d);
  auto taper = [a, b, d](double s) {
    if (s <= a || s >= b) return 0.0;
    if (s < a + d) return smoothstep5((s - a) / d);
    if (s <= b - d) return 1.0;
    return smoothstep5((b - s) / d);
  };
  auto taper_mass = [a, b, d](double s) {  // integral of taper over [a, s]
    auto I1 = [](double x) { return x * x * x * x * (2.5 + x * (-3.0 + x)); };
    if (s <= a) return 0.0;
    if (s < a + d) return d * I1((s - a) / d);
    if (s <= b - d) return d * I1(1.0) + (s - (a + d));
    if (s < b) return d * I1(1.0) + (b - 2.0 * d - a) + d * (I1(1.0) - I1((b - s) / d));
    return (b - a) - d;
  };
  cut.beta = [c, taper_mass, b](double s) {
    if (s >= b) return 0.0;
    return 1.0 - c * taper_mass(s);
  };
  cut.beta_deriv = [c, taper](double s) { return -c * taper(s); };
  return cut;
}

// ---------------------------------------------------------------------------
// Shooting probe for short periodic orbits. This is a falsification probe on
// a sampled grid, not a proof of admissibility.

struct HZProbeReport {
  std::string hamiltonian_description;
  int tested_initial_conditions = 0;
  double min_detected_period = kInf;
  int detections = 0;
  bool admissible_consistent = true;
  double period_limit = 1.5;
};

struct ProbeSystem {
  std::function<void(std::span<const double>, std::span<double>)> velocity;
  std::vector<Vec> initial_conditions;
  std::string description;
};

inline HZProbeReport hz_admissibility_probe(const ProbeSystem& system, double period_limit,
                                            double return_tol = 1e-6, int steps_per_unit = 2048) {
  if (period_limit <= 0.0) throw ValidationError("hz_admissibility_probe: period_limit > 0");
  HZProbeReport rep;
  rep.hamiltonian_description = system.description;
  rep.tested_initial_conditions = static_cast<int>(system.initial_conditions.size());
  rep.period_limit = period_limit;
  const int dim = system.initial_conditions.empty()
                      ? 0
                      : static_cast<int>(system.initial_conditions[0].size());
  if (dim == 0 || dim > detail::kMaxDim)
    throw ValidationError("hz_admissibility_probe: bad dimension");
  int steps = std::max(64, static_cast<int>(std::ceil(period_limit * steps_per_unit)));
  double dt = period_limit / steps;

  std::vector<double> found(system.initial_conditions.size(), kInf);
  std::vector<int> hits(system.initial_conditions.size(), 0);
  parallel_for(system.initial_conditions.size(), [&](std::size_t ic) {
    const Vec& z0 = system.initial_conditions[ic];
    std::array<double, detail::kMaxDim> z{}, k1{}, k2{}, k3{}, k4{}, tmp{};
    for (int i = 0; i < dim; ++i) z[i] = z0[i];
    auto speed2 = [&] {
      std::array<double, detail::kMaxDim> v{};
      system.velocity(std::span<const double>(z.data(), dim), std::span<double>(v.data(), dim));
      double s = 0.0;
      for (int i = 0; i < dim; ++i) s += v[i] * v[i];
      return s;
    };
    if (speed2() < 1e-18) return;  // rest point
    auto rk4 = [&](std::array<double, detail::kMaxDim>& state, double h) {
      auto eval = [&](const double* s, double* out) {
        system.velocity(std::span<const double>(s, dim), std::span<double>(out, dim));
      };
      eval(state.data(), k1.data());
      for (int i = 0; i < dim; ++i) tmp[i] = state[i] + 0.5 * h * k1[i];
      eval(tmp.data(), k2.data());
      for (int i = 0; i < dim; ++i) tmp[i] = state[i] + 0.5 * h * k2[i];
      eval(tmp.data(), k3.data());
      for (int i = 0; i < dim; ++i) tmp[i] = state[i] + h * k3[i];
      eval(tmp.data(), k4.data());
      for (int i = 0; i < dim; ++i)
        state[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    };
    auto dist2_to_start = [&](const std::array<double, detail::kMaxDim>& state) {
      double s = 0.0;
      for (int i = 0; i < dim; ++i) s += sq(state[i] - z0[i]);
      return s;
    };
    double travel = 0.0;
    double dprev2 = 0.0, dcur2 = 0.0;
    std::array<double, detail::kMaxDim> zprev2_state{}, zprev_state{};
    double best = kInf;
    for (int k = 1; k <= steps; ++k) {
      zprev2_state = zprev_state;
      zprev_state = z;
      rk4(z, dt);
      for (int i = 0; i < dim; ++i)
        if (!std::isfinite(z[i]) || std::abs(z[i]) > detail::kBlowup)
          throw NumericalError("hz_admissibility_probe: integrator blow-up");
      double d2 = dist2_to_start(z);
      travel = std::max(travel, d2);
      if (k >= 8) {
        // local minimum of the squared distance at the previous sample
        if (dcur2 <= dprev2 && dcur2 < d2 && k >= 16) {
          // parabola through the three samples; vertex in time
          double a = dprev2, bq = dcur2, cq = d2;
          double denom = a - 2.0 * bq + cq;
          double off = (denom > 1e-300) ? 0.5 * (a - cq) / denom : 0.0;
          off = std::clamp(off, -1.0, 1.0);
          double tstar = (k - 1 + off) * dt;
          // re-integrate one step from the bracketing sample to t*
          std::array<double, detail::kMaxDim> zs = zprev2_state;
          double h = tstar - (k - 2) * dt;
          int sub = 4;
          for (int q = 0; q < sub; ++q) rk4(zs, h / sub);
          double dstar = std::sqrt(dist2_to_start(zs));
          if (dstar < return_tol && travel > sq(10.0 * return_tol)) {
            best = std::min(best, tstar);
            ++hits[ic];
          }
        }
      }
      dprev2 = dcur2;
      dcur2 = d2;
      if (best < kInf) break;
    }
    found[ic] = best;
  });
  for (std::size_t i = 0; i < found.size(); ++i) {
    rep.min_detected_period = std::min(rep.min_detected_period, found[i]);
    rep.detections += hits[i];
  }
  rep.admissible_consistent = rep.min_detected_period > 1.0 + 1e-6;
  return rep;
}

// Initial-condition grids.
inline std::vector<Vec> plane_grid(double radius, int per_axis) {
  std::vector<Vec> out;
  out.reserve(per_axis * per_axis);
  for (int i = 0; i < per_axis; ++i)
    for (int j = 0; j < per_axis; ++j) {
      double a = -radius + 2.0 * radius * (i + 0.5) / per_axis;
      double b = -radius + 2.0 * radius * (j + 0.5) / per_axis;
      out.push_back({a, b});
    }
  return out;
}

// Radial section (x1, 0, y1, 0) for the 4-dimensional cutoff systems.
inline std::vector<Vec> section_grid(double x_radius, double y_radius, int per_axis) {
  std::vector<Vec> out;
  out.reserve(per_axis * per_axis);
  for (int i = 0; i < per_axis; ++i)
    for (int j = 0; j < per_axis; ++j) {
      double a = -x_radius + 2.0 * x_radius * (i + 0.5) / per_axis;
      double b = -y_radius + 2.0 * y_radius * (j + 0.5) / per_axis;
      out.push_back({a, 0.0, b, 0.0});
    }
  return out;
}

inline ProbeSystem probe_plane_system(const ScalarField& H, double radius, int per_axis) {
  ProbeSystem sys;
  auto Hp = std::make_shared<ScalarField>(H);
  sys.velocity = [Hp](std::span<const double> z, std::span<double> out) {
    std::array<double, detail::kMaxDim> g{};
    detail::scalar_gradient(*Hp, z, std::span<double>(g.data(), z.size()));
    for (std::size_t j = 0; j + 1 < z.size(); j += 2) {
      out[j] = -g[j + 1];
      out[j + 1] = g[j];
    }
  };
  sys.initial_conditions = plane_grid(radius, per_axis);
  sys.description = H.description;
  return sys;
}

inline ProbeSystem probe_cutoff_system(const HZCutoff& cut, double x_radius, double y_radius,
                                       int per_axis) {
  ProbeSystem sys;
  auto cp = std::make_shared<HZCutoff>(cut);
  int dx = 2 * cut.base.m;
  sys.velocity = [cp, dx](std::span<const double> z, std::span<double> out) {
    cp->field(z.first(dx), z.subspan(dx), out);
  };
  sys.initial_conditions = section_grid(x_radius, y_radius, per_axis);
  sys.description = cut.base.description + " under radial cutoff";
  return sys;
}

// ---------------------------------------------------------------------------
// Displacement witness: a shear displacing B(radius) with oscillation at most
// pi radius^2 + margin. The speed profile dominates the ball chord pointwise.

struct DisplacementWitness {
  HamiltonianIsotopy isotopy;
  double energy = 0.0;         // oscillation of the generating Hamiltonian
  double min_clearance = 0.0;  // min over the sample grid of |image| - radius
  double radius = 1.0, margin = 0.1;
};

inline DisplacementWitness displacement_witness(double radius, double margin,
                                                int check_grid = 24) {
  if (radius <= 0.0) throw ValidationError("displacement_witness: radius must be positive");
  if (margin <= 0.0) throw ValidationError("displacement_witness: margin must be positive");
  double R = radius;
  double delta = std::sqrt(R * R + 0.9 * margin / kPi) - R;
  double Rd = R + delta;
  double ds = 0.5 * delta;  // smoothing width of the speed profile
  auto ramp = [Rd, ds](double u) {
    double au = std::abs(u);
    if (au >= Rd) return 0.0;
    return 2.0 * std::sqrt(Rd * Rd - u * u) * smoothstep5((Rd - au) / ds);
  };
  // cumulative speed profile V with V' = ramp
  const int table_n = 8192;
  auto Vtab = std::make_shared<std::vector<double>>(table_n + 1, 0.0);
  double h = 2.0 * Rd / table_n;
  for (int i = 0; i < table_n; ++i) {
    double u0 = -Rd + i * h;
    (*Vtab)[i + 1] = (*Vtab)[i] + h / 6.0 * (ramp(u0) + 4.0 * ramp(u0 + 0.5 * h) + ramp(u0 + h));
  }
  double total = Vtab->back();
  // Hermite interpolation keeps V' consistent with the ramp to cubic order.
  auto Vfun = [Vtab, Rd, h, total, ramp](double u) {
    if (u <= -Rd) return 0.0;
    if (u >= Rd) return total;
    double x = (u + Rd) / h;
    int i = std::min(static_cast<int>(x), table_n - 1);
    double s = x - i;
    double u0 = -Rd + i * h;
    double p0 = (*Vtab)[i], p1 = (*Vtab)[i + 1];
    double m0 = h * ramp(u0), m1 = h * ramp(u0 + h);
    double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * p0 + (s3 - 2 * s2 + s) * m0 +
           (-2 * s3 + 3 * s2) * p1 + (s3 - s2) * m1;
  };
  // F(y) = -V(y2) tapered back to zero far above the ball and cut off in y1.
  double Y = Rd + 1.0;           // start of the far taper in y2
  double L = 3.0 * (R + total);  // y1 box
  auto box = [L](double u) {
    double au = std::abs(u);
    if (au <= L) return 1.0;
    if (au >= L + 1.0) return 0.0;
    return smoothstep5(L + 1.0 - au);
  };
  auto far = [Y](double u) {
    if (u <= Y) return 1.0;
    if (u >= Y + 1.0) return 0.0;
    return smoothstep5(Y + 1.0 - u);
  };
  auto box_deriv = [L](double u) {
    double au = std::abs(u);
    if (au <= L || au >= L + 1.0) return 0.0;
    return -smoothstep5_deriv(L + 1.0 - au) * (u > 0 ? 1.0 : -1.0);
  };
  auto far_deriv = [Y](double u) {
    if (u <= Y || u >= Y + 1.0) return 0.0;
    return -smoothstep5_deriv(Y + 1.0 - u);
  };
  auto F = [Vfun, box, far](double, std::span<const double> y) {
    return -Vfun(y[1]) * box(y[0]) * far(y[1]);
  };
  auto Fg = [Vfun, ramp, box, far, box_deriv, far_deriv](double, std::span<const double> y,
                                                         std::span<double> g) {
    double V = Vfun(y[1]);
    g[0] = -V * box_deriv(y[0]) * far(y[1]);
    g[1] = -(ramp(y[1]) * far(y[1]) + V * far_deriv(y[1])) * box(y[0]);
    return -V * box(y[0]) * far(y[1]);
  };
  DisplacementWitness wit;
  wit.radius = radius;
  wit.margin = margin;
  wit.energy = total;  // osc F = max - min = total integral of the ramp
  wit.isotopy = make_hamiltonian_isotopy(F, Fg, L + 2.0, 1, 250);
  // displacement check on a polar sample grid of the closed ball
  double worst = kInf;
  Vec worst_sample;
  for (int i = 0; i <= check_grid; ++i) {
    double rr = R * i / check_grid;
    int naz = std::max(8, check_grid);
    for (int j = 0; j < naz; ++j) {
      double th = 2.0 * kPi * j / naz;
      Vec y0{rr * std::cos(th), rr * std::sin(th)};
      Vec img = wit.isotopy.evaluate(1.0, y0).image;
      double clearance = std::sqrt(sq(img[0]) + sq(img[1])) - R;
      if (clearance < worst) {
        worst = clearance;
        worst_sample = y0;
      }
    }
  }
  wit.min_clearance = worst;
  if (worst <= 0.0) {
    std::ostringstream os;
    os << "displacement_witness: image overlaps the ball at sample (" << worst_sample[0] << ", "
       << worst_sample[1] << ")";
    throw NumericalError(os.str());
  }
  return wit;
}

}  // namespace contact_spectral
