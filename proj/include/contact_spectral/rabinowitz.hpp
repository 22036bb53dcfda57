#pragma once

// The perturbed Rabinowitz action functional on discretized loops in the
// symplectization, the Hamiltonian action functional on loops in M,
// cutoff profiles, critical-pair construction, and critical-point residuals.

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <vector>

#include "contact_spectral/contact_calculus.hpp"
#include "contact_spectral/model_spaces.hpp"
#include "contact_spectral/util.hpp"

namespace contact_spectral {

struct CutoffProfile {
  std::function<double(double)> beta;      // supported in (0, 1/2), integral 1
  std::function<double(double)> chi;       // 0 on [0, 1/2], monotone to 1
  std::function<double(double)> chi_dot;

  double beta_integral(double t) const {  // B(t) = int_0^t beta
    if (t <= 0.0) return 0.0;
    if (t >= 0.5) return 1.0;
    return simpson(beta, 0.0, t, 512);
  }
};

inline CutoffProfile default_cutoff() {
  // normalized C-infinity bump on (0, 1/2)
  static const double norm = [] {
    auto raw = [](double t) { return exp_bump((t - 0.25) / 0.25); };
    return 1.0 / simpson(raw, 0.0, 0.5, 4096);
  }();
  CutoffProfile c;
  c.beta = [](double t) { return norm * exp_bump((t - 0.25) / 0.25); };
  c.chi = [](double t) { return smoothstep5((t - 0.5) / 0.5); };
  c.chi_dot = [](double t) { return smoothstep5_deriv((t - 0.5) / 0.5) * 2.0; };
  return c;
}

struct DiscretizedLoop {
  std::vector<SymplectizationPoint> samples;  // N+1 samples at t_k = k/N
  double eta = 0.0;

  int segments() const { return static_cast<int>(samples.size()) - 1; }
};

inline void validate_loop(const DiscretizedLoop& loop) {
  int N = loop.segments();
  if (N < 16 || N % 2 != 0)
    throw ValidationError("DiscretizedLoop: need an even number of segments >= 16");
  const auto& a = loop.samples.front();
  const auto& b = loop.samples.back();
  double gap = std::abs(wrap_half(a.base.tau_lift - b.base.tau_lift));
  for (std::size_t i = 0; i < a.base.y.size(); ++i)
    gap = std::max(gap, std::abs(a.base.y[i] - b.base.y[i]));
  gap = std::max(gap, std::abs(a.r - b.r));
  if (gap > tol::discretized_loop) {
    std::ostringstream os;
    os << "DiscretizedLoop: loop does not close, gap = " << gap;
    throw ValidationError(os.str());
  }
  for (const auto& s : loop.samples)
    if (s.r <= 0.0) throw ValidationError("DiscretizedLoop: r must stay positive");
}

struct ActionValue {
  double value = 0.0;
  double quadrature_error_estimate = 0.0;
};

struct RabinowitzOptions {
  // When set, the Hamiltonian term uses the truncated field instead of r h.
  std::optional<TruncatedHamiltonian> truncation;
};

namespace detail {

// lambda = r alpha applied at sample j to a displacement (dy, dtau_lift).
inline double lambda_pairing(const SymplectizationPoint& p, std::span<const double> dy,
                             double dtau) {
  return p.r * (gamma_form(p.base.y, dy) + dtau);
}

inline double rabinowitz_sum(const DiscretizedLoop& loop, const ContactIsotopy& phi,
                             const CutoffProfile& cutoff, const RabinowitzOptions& opts,
                             int stride) {
  const int N = loop.segments();
  const auto& S = loop.samples;
  double term_lambda = 0.0;
  Vec dy(S[0].base.y.size());
  for (int k = 0; k < N; k += stride) {
    int k2 = k + stride;
    for (std::size_t i = 0; i < dy.size(); ++i) dy[i] = S[k2].base.y[i] - S[k].base.y[i];
    double dtau = S[k2].base.tau_lift - S[k].base.tau_lift;
    term_lambda += 0.5 * (lambda_pairing(S[k], dy, dtau) + lambda_pairing(S[k2], dy, dtau));
  }
  auto hamiltonian_term = [&](int k) {
    double t = static_cast<double>(k) / N;
    double cd = cutoff.chi_dot(t);
    if (cd == 0.0) return 0.0;
    double s = cutoff.chi(t);
    double H;
    if (opts.truncation)
      H = opts.truncation->value(s, S[k].base, S[k].r);
    else
      H = S[k].r * phi.hamiltonian.value(s, S[k].base.y, S[k].base.tau());
    return cd * H;
  };
  auto constraint_term = [&](int k) {
    double t = static_cast<double>(k) / N;
    return cutoff.beta(t) * (S[k].r - 1.0);
  };
  double term_H = 0.0, term_beta = 0.0;
  double dt = static_cast<double>(stride) / N;
  for (int k = 0; k < N; k += stride) {
    term_H += 0.5 * (hamiltonian_term(k) + hamiltonian_term(k + stride)) * dt;
    term_beta += 0.5 * (constraint_term(k) + constraint_term(k + stride)) * dt;
  }
  return term_lambda - loop.eta * term_beta - term_H;
}

}  // namespace detail

inline ActionValue evaluate_rabinowitz_action(const DiscretizedLoop& loop,
                                              const ContactIsotopy& phi,
                                              const CutoffProfile& cutoff,
                                              const RabinowitzOptions& opts = {}) {
  validate_loop(loop);
  double fine = detail::rabinowitz_sum(loop, phi, cutoff, opts, 1);
  double coarse = detail::rabinowitz_sum(loop, phi, cutoff, opts, 2);
  return ActionValue{fine, std::abs(fine - coarse) / 3.0};
}

// The integral of beta(t)(r(t)-1) over the loop.
inline double loop_constraint(const DiscretizedLoop& loop, const CutoffProfile& cutoff) {
  const int N = loop.segments();
  double acc = 0.0;
  auto term = [&](int k) {
    double t = static_cast<double>(k) / N;
    return cutoff.beta(t) * (loop.samples[k].r - 1.0);
  };
  for (int k = 0; k < N; ++k) acc += 0.5 * (term(k) + term(k + 1)) / N;
  return acc;
}

// ---------------------------------------------------------------------------
// Hamiltonian action on loops in M.

struct MLoop {
  std::vector<Vec> samples;  // N+1 samples, last equals first
};

inline void validate_mloop(const MLoop& loop) {
  if (loop.samples.size() < 17)
    throw ValidationError("MLoop: need at least 16 segments");
  const auto& a = loop.samples.front();
  const auto& b = loop.samples.back();
  double gap = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) gap = std::max(gap, std::abs(a[i] - b[i]));
  if (gap > tol::discretized_loop) {
    std::ostringstream os;
    os << "MLoop: loop does not close, gap = " << gap;
    throw ValidationError(os.str());
  }
}

inline ActionValue evaluate_hamiltonian_action(const MLoop& loop, const HamiltonianIsotopy& f) {
  validate_mloop(loop);
  const int N = static_cast<int>(loop.samples.size()) - 1;
  auto sum = [&](int stride) {
    double area = 0.0, ham = 0.0;
    Vec dy(loop.samples[0].size());
    for (int k = 0; k < N; k += stride) {
      int k2 = k + stride;
      for (std::size_t i = 0; i < dy.size(); ++i)
        dy[i] = loop.samples[k2][i] - loop.samples[k][i];
      area += 0.5 * (gamma_form(loop.samples[k], dy) + gamma_form(loop.samples[k2], dy));
      double t0 = static_cast<double>(k) / N, t1 = static_cast<double>(k2) / N;
      ham += 0.5 * (f.F(t0, loop.samples[k]) + f.F(t1, loop.samples[k2])) *
             (static_cast<double>(stride) / N);
    }
    return area - ham;
  };
  double fine = sum(1);
  double coarse = sum(2);
  return ActionValue{fine, std::abs(fine - coarse) / 3.0};
}

// ---------------------------------------------------------------------------
// Critical pairs: a Reeb arc on [0, 1/2] through a translated point followed
// by the reparametrized symplectization flow on [1/2, 1].

inline DiscretizedLoop make_critical_pair(const ContactIsotopy& phi,
                                          const PrequantizationPoint& tp, double shift, int N,
                                          const CutoffProfile& cutoff) {
  if (N < 16 || N % 2 != 0)
    throw ValidationError("make_critical_pair: need an even number of segments >= 16");
  double eta = -shift;
  DiscretizedLoop loop;
  loop.eta = eta;
  loop.samples.resize(N + 1);
  PrequantizationPoint x0 = reeb_flow(tp, -eta);
  for (int k = 0; k <= N; ++k) {
    double t = static_cast<double>(k) / N;
    if (t <= 0.5) {
      double B = cutoff.beta_integral(t);
      loop.samples[k] = SymplectizationPoint{reeb_flow(x0, eta * B), 1.0};
    } else {
      IsotopySample s = phi.evaluate(cutoff.chi(t), tp);
      loop.samples[k] = SymplectizationPoint{s.point, 1.0 / s.rho};
    }
  }
  return loop;
}

// Projection of a lifted critical pair: the f-orbit of the M-part of the
// translated point.
inline MLoop make_projected_loop(const HamiltonianIsotopy& f, const Vec& y0, int N) {
  MLoop loop;
  loop.samples.resize(N + 1);
  for (int k = 0; k <= N; ++k)
    loop.samples[k] = f.evaluate(static_cast<double>(k) / N, y0).image;
  return loop;
}

// ---------------------------------------------------------------------------
// Critical-point residual: sup-norm of the discrete defect of the first-order
// equations, the multiplier constraint, and the normalized finite-difference
// gradient of the action on the sample basis.

inline double critical_residual(const DiscretizedLoop& loop, const ContactIsotopy& phi,
                                const CutoffProfile& cutoff,
                                const RabinowitzOptions& opts = {}) {
  validate_loop(loop);
  const int N = loop.segments();
  const int d = static_cast<int>(loop.samples[0].base.y.size());
  SymplectizationLift lift = lift_to_symplectization(phi);
  // Integral-form defect per segment with a Simpson rule on the right-hand
  // side; vanishes to quadrature order exactly on critical pairs.
  auto rhs_at = [&](double t, const SymplectizationPoint& u, Vec& out) {
    out.assign(d + 2, 0.0);
    double cd = cutoff.chi_dot(t);
    if (cd != 0.0) {
      Vec X = lift.field(cutoff.chi(t), u);
      for (int i = 0; i < d + 2; ++i) out[i] = cd * X[i];
    }
    out[d] += loop.eta * cutoff.beta(t);
  };
  double defect = 0.0;
  Vec f0, fm, f1;
  for (int k = 0; k < N; ++k) {
    const auto& u0 = loop.samples[k];
    const auto& u1 = loop.samples[k + 1];
    double dt = 1.0 / N;
    SymplectizationPoint um;
    um.base.y.resize(d);
    for (int i = 0; i < d; ++i) um.base.y[i] = 0.5 * (u0.base.y[i] + u1.base.y[i]);
    um.base.tau_lift = 0.5 * (u0.base.tau_lift + u1.base.tau_lift);
    um.r = 0.5 * (u0.r + u1.r);
    rhs_at(static_cast<double>(k) / N, u0, f0);
    rhs_at((k + 0.5) / N, um, fm);
    rhs_at(static_cast<double>(k + 1) / N, u1, f1);
    auto simpson_rhs = [&](int i) { return (f0[i] + 4.0 * fm[i] + f1[i]) / 6.0; };
    for (int i = 0; i < d; ++i)
      defect = std::max(defect,
                        std::abs((u1.base.y[i] - u0.base.y[i]) / dt - simpson_rhs(i)));
    defect = std::max(
        defect, std::abs((u1.base.tau_lift - u0.base.tau_lift) / dt - simpson_rhs(d)));
    defect = std::max(defect, std::abs((u1.r - u0.r) / dt - simpson_rhs(d + 1)));
  }
  defect = std::max(defect, std::abs(loop_constraint(loop, cutoff)));

  // Finite-difference gradient of the discrete action on the sample basis.
  auto action_of = [&](const DiscretizedLoop& l) {
    return detail::rabinowitz_sum(l, phi, cutoff, opts, 1);
  };
  DiscretizedLoop work = loop;
  double step = 1e-6;
  double gmax = 0.0;
  auto probe = [&](int k, int coord) {
    auto bump = [&](DiscretizedLoop& l, double amount) {
      auto apply = [&](SymplectizationPoint& s) {
        if (coord < d)
          s.base.y[coord] += amount;
        else if (coord == d)
          s.base.tau_lift += amount;
        else
          s.r += amount;
      };
      apply(l.samples[k]);
      if (k == 0) apply(l.samples[N]);
    };
    bump(work, step);
    double ap = action_of(work);
    bump(work, -2.0 * step);
    double am = action_of(work);
    bump(work, step);
    return (ap - am) / (2.0 * step);
  };
  for (int k = 0; k < N; ++k)
    for (int coord = 0; coord < d + 2; ++coord)
      gmax = std::max(gmax, std::abs(probe(k, coord)));
  defect = std::max(defect, gmax);
  return defect;
}

}  // namespace contact_spectral
