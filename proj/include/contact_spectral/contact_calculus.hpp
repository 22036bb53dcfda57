#pragma once

// Contact Hamiltonians to contact vector fields and isotopies on
// R^{2n} x S^1, conformal-factor tracking, composition/inverse/conjugation
// Hamiltonians, lifts of Hamiltonian isotopies, symplectization lifts,
// truncation profiles, and oscillation norms.

#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <vector>

#include "contact_spectral/model_spaces.hpp"
#include "contact_spectral/util.hpp"

namespace contact_spectral {

struct ContactHamiltonian {
  // h(t, y, tau); tau is the mod-1 representative.
  std::function<double(double, std::span<const double>, double)> value;
  // Optional analytic partials: fills dy (size 2n) and dtau, returns h.
  std::function<double(double, std::span<const double>, double, std::span<double>, double&)>
      value_grad;
  double support_radius = kInf;  // h == 0 for |y| >= support_radius
  int n = 1;

  double operator()(double t, const PrequantizationPoint& p) const {
    return value(t, p.y, p.tau());
  }
};

inline ContactHamiltonian zero_hamiltonian(int n) {
  ContactHamiltonian h;
  h.n = n;
  h.value = [](double, std::span<const double>, double) { return 0.0; };
  h.value_grad = [](double, std::span<const double>, double, std::span<double> dy,
                    double& dtau) {
    for (double& v : dy) v = 0.0;
    dtau = 0.0;
    return 0.0;
  };
  h.support_radius = 0.0;
  return h;
}

inline ContactHamiltonian constant_hamiltonian(double c, int n) {
  ContactHamiltonian h;
  h.n = n;
  h.value = [c](double, std::span<const double>, double) { return c; };
  h.value_grad = [c](double, std::span<const double>, double, std::span<double> dy,
                     double& dtau) {
    for (double& v : dy) v = 0.0;
    dtau = 0.0;
    return c;
  };
  h.support_radius = kInf;
  return h;
}

namespace detail {

constexpr int kMaxDim = 16;    // 2n
constexpr int kMaxState = 18;  // (y, tau_lift, log rho)
constexpr double kFdStep = 1e-5;
constexpr double kBlowup = 1e8;

// Value plus partials, analytic when available, central differences otherwise.
inline double hamiltonian_partials(const ContactHamiltonian& h, double t,
                                   std::span<const double> y, double tau, std::span<double> dy,
                                   double& dtau) {
  if (h.value_grad) return h.value_grad(t, y, tau, dy, dtau);
  std::array<double, kMaxDim> buf{};
  const std::size_t d = y.size();
  for (std::size_t i = 0; i < d; ++i) buf[i] = y[i];
  std::span<double> yb(buf.data(), d);
  for (std::size_t i = 0; i < d; ++i) {
    double step = kFdStep * std::max(1.0, std::abs(y[i]));
    double keep = yb[i];
    yb[i] = keep + step;
    double hp = h.value(t, yb, tau);
    yb[i] = keep - step;
    double hm = h.value(t, yb, tau);
    yb[i] = keep;
    dy[i] = (hp - hm) / (2.0 * step);
  }
  double ts = kFdStep;
  dtau = (h.value(t, y, mod1(tau + ts)) - h.value(t, y, mod1(tau - ts))) / (2.0 * ts);
  return h.value(t, y, tau);
}

// The unique X with alpha(X) = h and i_X dalpha = dh(R) alpha - dh.
// Writes V (2n entries) and the tau-component c; also reports dh/dtau.
inline double contact_field_at(const ContactHamiltonian& h, double t, std::span<const double> y,
                               double tau, std::span<double> V, double& c) {
  std::array<double, kMaxDim> grad{};
  const std::size_t d = y.size();
  std::span<double> g(grad.data(), d);
  double dtau = 0.0;
  double hval = hamiltonian_partials(h, t, y, tau, g, dtau);
  for (std::size_t j = 0; j + 1 < d; j += 2) {
    V[j] = 0.5 * dtau * y[j] - g[j + 1];
    V[j + 1] = 0.5 * dtau * y[j + 1] + g[j];
  }
  c = hval - gamma_form(y, V.first(d));
  return dtau;
}

// Derivative of the augmented state (y, tau_lift, log rho).
// sign=+1 integrates d/dt phi_t; sign=-1 with time t0-s integrates the
// reverse path while still accumulating log rho of the forward map.
inline void isotopy_state_field(const ContactHamiltonian& h, double t, double sign,
                                const double* st, double* dst, int dim2n) {
  std::span<const double> y(st, dim2n);
  std::span<double> V(dst, dim2n);
  double c = 0.0;
  double dtau = contact_field_at(h, t, y, mod1(st[dim2n]), V, c);
  for (int i = 0; i < dim2n; ++i) dst[i] *= sign;
  dst[dim2n] = sign * c;
  dst[dim2n + 1] = dtau;  // log rho always accumulates forward
}

inline void rk_step(const ContactHamiltonian& h, double t, double dt, double sign, double tshift,
                    double tsign, double* st, int dim2n, int order) {
  // The field is evaluated at hamiltonian time (tshift + tsign * t).
  const int m = dim2n + 2;
  std::array<double, kMaxState> k1{}, k2{}, k3{}, k4{}, tmp{};
  auto eval = [&](double tt, const double* s, double* out) {
    isotopy_state_field(h, tshift + tsign * tt, sign, s, out, dim2n);
  };
  eval(t, st, k1.data());
  if (order == 2) {
    for (int i = 0; i < m; ++i) tmp[i] = st[i] + 0.5 * dt * k1[i];
    eval(t + 0.5 * dt, tmp.data(), k2.data());
    for (int i = 0; i < m; ++i) st[i] += dt * k2[i];
    return;
  }
  for (int i = 0; i < m; ++i) tmp[i] = st[i] + 0.5 * dt * k1[i];
  eval(t + 0.5 * dt, tmp.data(), k2.data());
  for (int i = 0; i < m; ++i) tmp[i] = st[i] + 0.5 * dt * k2[i];
  eval(t + 0.5 * dt, tmp.data(), k3.data());
  for (int i = 0; i < m; ++i) tmp[i] = st[i] + dt * k3[i];
  eval(t + dt, tmp.data(), k4.data());
  for (int i = 0; i < m; ++i)
    st[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

}  // namespace detail

// Contact vector field at a point, returned as (V, c) of dimension 2n+1.
inline Vec contact_vector_field(const ContactHamiltonian& h, double t,
                                const PrequantizationPoint& p) {
  const std::size_t d = p.y.size();
  Vec out(d + 1, 0.0);
  std::array<double, detail::kMaxDim> vbuf{};
  std::span<double> V(vbuf.data(), d);
  double c = 0.0;
  detail::contact_field_at(h, t, p.y, p.tau(), V, c);
  for (std::size_t i = 0; i < d; ++i) out[i] = V[i];
  out[d] = c;
  return out;
}

struct IsotopySample {
  PrequantizationPoint point;
  double rho = 1.0;
};

struct PinnedConstruction {
  enum class Kind { reeb, small_bump, lifted_hamiltonian, profile_flow };
  Kind kind = Kind::reeb;
  double reeb_time = 0.0;     // T of the path t -> theta^{tT}
  double bump_max = 0.0;      // max of b when the contact Hamiltonian is -b
  double lifted_min_F = 0.0;  // min over M (including 0 off support) of autonomous F
  double profile_rho = 0.0;   // plateau value of the profile flow
};

struct ContactIsotopy {
  enum class Method { integrated, closed_form, lifted };

  ContactHamiltonian hamiltonian;
  // (t, x) -> (phi_t(x) with continuous tau_lift, rho_t(x))
  std::function<IsotopySample(double, const PrequantizationPoint&)> evaluate;
  // Optional closed-form inverse map x -> phi_t^{-1}(x).
  std::function<PrequantizationPoint(double, const PrequantizationPoint&)> inverse;
  Method method = Method::integrated;
  int n = 1;
  int steps = 1000;  // resolution backing integrated evaluation
  std::optional<PinnedConstruction> pinned;
};

// phi_t(x) by fixed-step integration of the augmented state (y, tau_lift, log rho).
inline IsotopySample integrate_forward(const ContactHamiltonian& h, double t,
                                       const PrequantizationPoint& x, int steps, int order = 4) {
  const int d = static_cast<int>(x.y.size());
  std::array<double, detail::kMaxState> st{};
  for (int i = 0; i < d; ++i) st[i] = x.y[i];
  st[d] = x.tau_lift;
  st[d + 1] = 0.0;
  int nsteps = std::max(1, steps);
  double dt = t / nsteps;
  for (int k = 0; k < nsteps; ++k) {
    detail::rk_step(h, k * dt, dt, +1.0, 0.0, +1.0, st.data(), d, order);
    for (int i = 0; i < d + 2; ++i)
      if (!std::isfinite(st[i]) || std::abs(st[i]) > detail::kBlowup)
        throw NumericalError("integrate_forward: state blow-up");
  }
  PrequantizationPoint q;
  q.y.assign(st.begin(), st.begin() + d);
  q.tau_lift = st[d];
  return {q, std::exp(st[d + 1])};
}

// phi_t^{-1}(x) by integrating the reverse path z' = -X_{h(t-s)}(z);
// the returned rho is rho_t at the preimage.
inline IsotopySample reverse_sample(const ContactHamiltonian& h, double t,
                                    const PrequantizationPoint& x, int steps, int order = 4) {
  const int d = static_cast<int>(x.y.size());
  std::array<double, detail::kMaxState> st{};
  for (int i = 0; i < d; ++i) st[i] = x.y[i];
  st[d] = x.tau_lift;
  st[d + 1] = 0.0;
  int nsteps = std::max(1, steps);
  double ds = t / nsteps;
  for (int k = 0; k < nsteps; ++k) {
    detail::rk_step(h, k * ds, ds, -1.0, t, -1.0, st.data(), d, order);
    for (int i = 0; i < d + 2; ++i)
      if (!std::isfinite(st[i]) || std::abs(st[i]) > detail::kBlowup)
        throw NumericalError("reverse_sample: state blow-up");
  }
  PrequantizationPoint q;
  q.y.assign(st.begin(), st.begin() + d);
  q.tau_lift = st[d];
  return {q, std::exp(st[d + 1])};
}

// One integration pass over [0, 1] recording every record_stride-th step.
// Returns samples at t = k * record_stride / steps for k = 0, 1, ....
inline std::vector<IsotopySample> integrate_trajectory(const ContactHamiltonian& h,
                                                       const PrequantizationPoint& x, int steps,
                                                       int record_stride, int order = 4) {
  const int d = static_cast<int>(x.y.size());
  std::array<double, detail::kMaxState> st{};
  for (int i = 0; i < d; ++i) st[i] = x.y[i];
  st[d] = x.tau_lift;
  st[d + 1] = 0.0;
  std::vector<IsotopySample> out;
  auto record = [&] {
    PrequantizationPoint q;
    q.y.assign(st.begin(), st.begin() + d);
    q.tau_lift = st[d];
    out.push_back({q, std::exp(st[d + 1])});
  };
  record();
  double dt = 1.0 / steps;
  for (int k = 0; k < steps; ++k) {
    detail::rk_step(h, k * dt, dt, +1.0, 0.0, +1.0, st.data(), d, order);
    for (int i = 0; i < d + 2; ++i)
      if (!std::isfinite(st[i]) || std::abs(st[i]) > detail::kBlowup)
        throw NumericalError("integrate_trajectory: state blow-up");
    if ((k + 1) % record_stride == 0) record();
  }
  return out;
}

inline ContactIsotopy integrate_isotopy(ContactHamiltonian h, int steps, int order = 4) {
  if (steps < 1) throw ValidationError("integrate_isotopy: steps must be >= 1");
  if (order != 2 && order != 4) throw ValidationError("integrate_isotopy: order must be 2 or 4");
  ContactIsotopy iso;
  iso.n = h.n;
  iso.steps = steps;
  iso.method = ContactIsotopy::Method::integrated;
  iso.hamiltonian = h;
  auto hh = std::make_shared<ContactHamiltonian>(std::move(h));
  iso.evaluate = [hh, steps, order](double t, const PrequantizationPoint& x) {
    int k = std::max(1, static_cast<int>(std::ceil(std::abs(t) * steps)));
    return integrate_forward(*hh, t, x, k, order);
  };
  return iso;
}

inline ContactIsotopy identity_isotopy(int n) {
  ContactIsotopy iso;
  iso.n = n;
  iso.method = ContactIsotopy::Method::closed_form;
  iso.hamiltonian = zero_hamiltonian(n);
  iso.evaluate = [](double, const PrequantizationPoint& x) { return IsotopySample{x, 1.0}; };
  iso.inverse = [](double, const PrequantizationPoint& x) { return x; };
  return iso;
}

// The Reeb path t -> theta^{tT}.
inline ContactIsotopy reeb_isotopy(double T, int n) {
  ContactIsotopy iso;
  iso.n = n;
  iso.method = ContactIsotopy::Method::closed_form;
  iso.hamiltonian = constant_hamiltonian(T, n);
  iso.evaluate = [T](double t, const PrequantizationPoint& x) {
    return IsotopySample{reeb_flow(x, t * T), 1.0};
  };
  iso.inverse = [T](double t, const PrequantizationPoint& x) { return reeb_flow(x, -t * T); };
  iso.pinned = PinnedConstruction{PinnedConstruction::Kind::reeb, T, 0.0, 0.0, 0.0};
  return iso;
}

// Inverse map with the conformal factor at the preimage.
inline IsotopySample inverse_with_rho(const ContactIsotopy& phi, double t,
                                      const PrequantizationPoint& x) {
  if (phi.inverse) {
    PrequantizationPoint w = phi.inverse(t, x);
    return {w, phi.evaluate(t, w).rho};
  }
  return reverse_sample(phi.hamiltonian, t, x, std::max(1, static_cast<int>(std::ceil(std::abs(t) * phi.steps))));
}

// Inverse map, Newton-polished against the forward evaluation. Throws when the
// residual cannot be brought below tol.
inline PrequantizationPoint inverse_point(const ContactIsotopy& phi, double t,
                                          const PrequantizationPoint& x, double res_tol = 1e-9,
                                          int max_iter = 50) {
  PrequantizationPoint w = inverse_with_rho(phi, t, x).point;
  const int d = static_cast<int>(x.y.size());
  auto residual = [&](const PrequantizationPoint& z, Vec& r) {
    IsotopySample fw = phi.evaluate(t, z);
    r.assign(d + 1, 0.0);
    for (int i = 0; i < d; ++i) r[i] = fw.point.y[i] - x.y[i];
    r[d] = fw.point.tau_lift - x.tau_lift;
  };
  Vec r;
  residual(w, r);
  double rn = norm_inf(r);
  int iter = 0;
  while (rn > res_tol && iter < max_iter) {
    Mat J(d + 1);
    Vec rcol;
    for (int j = 0; j <= d; ++j) {
      PrequantizationPoint zp = w;
      double step = 1e-6;
      if (j < d)
        zp.y[j] += step;
      else
        zp.tau_lift += step;
      residual(zp, rcol);
      for (int i = 0; i <= d; ++i) J(i, j) = (rcol[i] - r[i]) / step;
    }
    Vec delta;
    Vec rhs(r);
    for (double& v : rhs) v = -v;
    if (!lu_solve(J, rhs, delta)) throw NumericalError("inverse_point: singular Jacobian");
    PrequantizationPoint wn = w;
    double damp = 1.0;
    for (int back = 0; back < 8; ++back) {
      wn = w;
      for (int i = 0; i < d; ++i) wn.y[i] += damp * delta[i];
      wn.tau_lift += damp * delta[d];
      Vec rn2;
      residual(wn, rn2);
      if (norm_inf(rn2) < rn) {
        r = rn2;
        break;
      }
      damp *= 0.5;
    }
    w = wn;
    rn = norm_inf(r);
    ++iter;
  }
  if (rn > res_tol) {
    std::ostringstream os;
    os << "inverse_point: Newton residual " << rn << " above tolerance " << res_tol;
    throw NumericalError(os.str());
  }
  return w;
}

// ---------------------------------------------------------------------------
// Path combinators.

// t -> phi_t psi_t, conformal cocycle rho(psi x) sigma(x).
inline ContactIsotopy compose_paths(const ContactIsotopy& phi, const ContactIsotopy& psi);

// t -> (phi_t)^{-1}, contact Hamiltonian -h_t(phi_t(x)) / rho_t(x).
inline ContactIsotopy inverse_path(const ContactIsotopy& phi);

struct Contactomorphism {
  std::function<PrequantizationPoint(const PrequantizationPoint&)> forward;
  std::function<PrequantizationPoint(const PrequantizationPoint&)> inverse;
  std::function<double(const PrequantizationPoint&)> conformal;  // kappa
};

inline Contactomorphism time1_map(const ContactIsotopy& phi) {
  auto p = std::make_shared<ContactIsotopy>(phi);
  Contactomorphism c;
  c.forward = [p](const PrequantizationPoint& x) { return p->evaluate(1.0, x).point; };
  c.inverse = [p](const PrequantizationPoint& x) {
    if (p->inverse) return p->inverse(1.0, x);
    return inverse_point(*p, 1.0, x);
  };
  c.conformal = [p](const PrequantizationPoint& x) { return p->evaluate(1.0, x).rho; };
  return c;
}

// ---------------------------------------------------------------------------
// Composition / quotient / conjugation Hamiltonians.

enum class AlgebraMode { product, quotient, conjugate };

// l_t(x) = h_t(x) + rho_t(phi_t^{-1} x) k_t(phi_t^{-1} x).
inline ContactHamiltonian algebra_product(const ContactIsotopy& phi, const ContactIsotopy& psi) {
  auto a = std::make_shared<ContactIsotopy>(phi);
  auto b = std::make_shared<ContactIsotopy>(psi);
  ContactHamiltonian l;
  l.n = phi.n;
  l.support_radius = std::max(phi.hamiltonian.support_radius, psi.hamiltonian.support_radius);
  l.value = [a, b](double t, std::span<const double> y, double tau) {
    PrequantizationPoint x{Vec(y.begin(), y.end()), tau};
    double h = a->hamiltonian.value(t, y, tau);
    IsotopySample w = inverse_with_rho(*a, t, x);
    return h + w.rho * b->hamiltonian.value(t, w.point.y, w.point.tau());
  };
  return l;
}

// m_t(x) = h_t(x) - rho_t(w) k_t(psi_t(w)) / sigma_t(w), w = phi_t^{-1}(x).
inline ContactHamiltonian algebra_quotient(const ContactIsotopy& phi, const ContactIsotopy& psi) {
  auto a = std::make_shared<ContactIsotopy>(phi);
  auto b = std::make_shared<ContactIsotopy>(psi);
  ContactHamiltonian m;
  m.n = phi.n;
  m.support_radius = std::max(phi.hamiltonian.support_radius, psi.hamiltonian.support_radius);
  m.value = [a, b](double t, std::span<const double> y, double tau) {
    PrequantizationPoint x{Vec(y.begin(), y.end()), tau};
    double h = a->hamiltonian.value(t, y, tau);
    IsotopySample w = inverse_with_rho(*a, t, x);
    IsotopySample pw = b->evaluate(t, w.point);
    double k = b->hamiltonian.value(t, pw.point.y, pw.point.tau());
    return h - w.rho * k / pw.rho;
  };
  return m;
}

// q_t(x) = kappa(theta^{-1} x) h_t(theta^{-1} x).
inline ContactHamiltonian algebra_conjugate(const ContactIsotopy& phi,
                                            const Contactomorphism& theta) {
  auto a = std::make_shared<ContactIsotopy>(phi);
  auto th = std::make_shared<Contactomorphism>(theta);
  ContactHamiltonian q;
  q.n = phi.n;
  q.support_radius = kInf;
  q.value = [a, th](double t, std::span<const double> y, double tau) {
    PrequantizationPoint x{Vec(y.begin(), y.end()), tau};
    PrequantizationPoint w = th->inverse(x);
    return th->conformal(w) * a->hamiltonian.value(t, w.y, w.tau());
  };
  return q;
}

inline ContactHamiltonian hamiltonian_algebra(AlgebraMode mode, const ContactIsotopy& first,
                                              const ContactIsotopy& second) {
  switch (mode) {
    case AlgebraMode::product:
      return algebra_product(first, second);
    case AlgebraMode::quotient:
      return algebra_quotient(first, second);
    default:
      throw ValidationError("hamiltonian_algebra: conjugate mode takes a fixed contactomorphism");
  }
}

inline ContactHamiltonian hamiltonian_algebra(AlgebraMode mode, const ContactIsotopy& first,
                                              const Contactomorphism& second) {
  if (mode != AlgebraMode::conjugate)
    throw ValidationError("hamiltonian_algebra: only conjugate mode takes a contactomorphism");
  return algebra_conjugate(first, second);
}

inline ContactIsotopy compose_paths(const ContactIsotopy& phi, const ContactIsotopy& psi) {
  auto a = std::make_shared<ContactIsotopy>(phi);
  auto b = std::make_shared<ContactIsotopy>(psi);
  ContactIsotopy iso;
  iso.n = phi.n;
  iso.steps = std::max(phi.steps, psi.steps);
  iso.method = (phi.method == ContactIsotopy::Method::integrated ||
                psi.method == ContactIsotopy::Method::integrated)
                   ? ContactIsotopy::Method::integrated
                   : ContactIsotopy::Method::closed_form;
  iso.hamiltonian = algebra_product(phi, psi);
  iso.evaluate = [a, b](double t, const PrequantizationPoint& x) {
    IsotopySample inner = b->evaluate(t, x);
    IsotopySample outer = a->evaluate(t, inner.point);
    return IsotopySample{outer.point, outer.rho * inner.rho};
  };
  if (phi.inverse && psi.inverse) {
    iso.inverse = [a, b](double t, const PrequantizationPoint& x) {
      return b->inverse(t, a->inverse(t, x));
    };
  }
  return iso;
}

inline ContactIsotopy inverse_path(const ContactIsotopy& phi) {
  auto a = std::make_shared<ContactIsotopy>(phi);
  ContactIsotopy iso;
  iso.n = phi.n;
  iso.steps = phi.steps;
  iso.method = phi.method;
  iso.hamiltonian.n = phi.n;
  iso.hamiltonian.support_radius = phi.hamiltonian.support_radius;
  iso.hamiltonian.value = [a](double t, std::span<const double> y, double tau) {
    PrequantizationPoint x{Vec(y.begin(), y.end()), tau};
    IsotopySample fw = a->evaluate(t, x);
    return -a->hamiltonian.value(t, fw.point.y, fw.point.tau()) / fw.rho;
  };
  iso.evaluate = [a](double t, const PrequantizationPoint& x) {
    IsotopySample w = inverse_with_rho(*a, t, x);
    return IsotopySample{w.point, 1.0 / w.rho};
  };
  iso.inverse = [a](double t, const PrequantizationPoint& x) { return a->evaluate(t, x).point; };
  return iso;
}

// t -> theta phi_t theta^{-1} for a fixed contactomorphism theta.
inline ContactIsotopy conjugate_path(const ContactIsotopy& phi, const Contactomorphism& theta) {
  auto a = std::make_shared<ContactIsotopy>(phi);
  auto th = std::make_shared<Contactomorphism>(theta);
  ContactIsotopy iso;
  iso.n = phi.n;
  iso.steps = phi.steps;
  iso.method = phi.method;
  iso.hamiltonian = algebra_conjugate(phi, theta);
  iso.evaluate = [a, th](double t, const PrequantizationPoint& x) {
    PrequantizationPoint w = th->inverse(x);
    IsotopySample mid = a->evaluate(t, w);
    PrequantizationPoint out = th->forward(mid.point);
    double rho = th->conformal(mid.point) * mid.rho / th->conformal(w);
    return IsotopySample{out, rho};
  };
  if (phi.inverse) {
    iso.inverse = [a, th](double t, const PrequantizationPoint& x) {
      return th->forward(a->inverse(t, th->inverse(x)));
    };
  }
  return iso;
}

// t -> (phi_t)^nu with the iterated product Hamiltonian.
inline ContactIsotopy iterate_path(const ContactIsotopy& phi, int nu) {
  if (nu < 1) throw ValidationError("iterate_path: nu must be >= 1");
  if (nu == 1) return phi;
  auto a = std::make_shared<ContactIsotopy>(phi);
  ContactIsotopy iso;
  iso.n = phi.n;
  iso.steps = phi.steps;
  iso.method = phi.method;
  iso.hamiltonian.n = phi.n;
  iso.hamiltonian.support_radius = phi.hamiltonian.support_radius;
  iso.hamiltonian.value = [a, nu](double t, std::span<const double> y, double tau) {
    PrequantizationPoint w{Vec(y.begin(), y.end()), tau};
    double total = 0.0, cocycle = 1.0;
    for (int j = 0; j < nu; ++j) {
      total += cocycle * a->hamiltonian.value(t, w.y, w.tau());
      if (j + 1 < nu) {
        IsotopySample inv = inverse_with_rho(*a, t, w);
        cocycle *= inv.rho;
        w = inv.point;
      }
    }
    return total;
  };
  iso.evaluate = [a, nu](double t, const PrequantizationPoint& x) {
    IsotopySample acc{x, 1.0};
    for (int j = 0; j < nu; ++j) {
      IsotopySample s = a->evaluate(t, acc.point);
      acc.point = s.point;
      acc.rho *= s.rho;
    }
    return acc;
  };
  if (phi.inverse) {
    iso.inverse = [a, nu](double t, const PrequantizationPoint& x) {
      PrequantizationPoint w = x;
      for (int j = 0; j < nu; ++j) w = a->inverse(t, w);
      return w;
    };
  }
  return iso;
}

// ---------------------------------------------------------------------------
// Hamiltonian isotopies on M = R^{2n} and their lifts.

struct HamiltonianMapSample {
  Vec image;      // f_t(y)
  double action;  // a_t(y), the primitive of f_t^* gamma - gamma
};

struct HamiltonianIsotopy {
  std::function<double(double, std::span<const double>)> F;
  std::function<double(double, std::span<const double>, std::span<double>)> F_grad;  // optional
  std::function<HamiltonianMapSample(double, const Vec&)> evaluate;
  std::function<Vec(double, const Vec&)> inverse;  // optional closed form
  double support_radius = 1.0;
  int n = 1;
  int steps = 400;
};

namespace detail {

inline void hamiltonian_gradient(const HamiltonianIsotopy& f, double t, std::span<const double> y,
                                 std::span<double> g) {
  if (f.F_grad) {
    f.F_grad(t, y, g);
    return;
  }
  std::array<double, kMaxDim> buf{};
  const std::size_t d = y.size();
  for (std::size_t i = 0; i < d; ++i) buf[i] = y[i];
  std::span<double> yb(buf.data(), d);
  for (std::size_t i = 0; i < d; ++i) {
    double step = kFdStep * std::max(1.0, std::abs(y[i]));
    double keep = yb[i];
    yb[i] = keep + step;
    double fp = f.F(t, yb);
    yb[i] = keep - step;
    double fm = f.F(t, yb);
    yb[i] = keep;
    g[i] = (fp - fm) / (2.0 * step);
  }
}

// Symplectic gradient with i_X omega = -dF: X = (-dF_2, dF_1, ...) per plane.
inline void hamiltonian_field(const HamiltonianIsotopy& f, double t, std::span<const double> y,
                              std::span<double> X) {
  std::array<double, kMaxDim> grad{};
  const std::size_t d = y.size();
  std::span<double> g(grad.data(), d);
  hamiltonian_gradient(f, t, y, g);
  for (std::size_t j = 0; j + 1 < d; j += 2) {
    X[j] = -g[j + 1];
    X[j + 1] = g[j];
  }
}

}  // namespace detail

// Builds the integrated realization of the flow of F, with the action
// primitive a_t co-evolved: da/dt = gamma(X_F) - F along the trajectory.
inline HamiltonianIsotopy make_hamiltonian_isotopy(
    std::function<double(double, std::span<const double>)> F,
    std::function<double(double, std::span<const double>, std::span<double>)> F_grad,
    double support_radius, int n, int steps = 400) {
  HamiltonianIsotopy f;
  f.F = std::move(F);
  f.F_grad = std::move(F_grad);
  f.support_radius = support_radius;
  f.n = n;
  f.steps = steps;
  auto self = std::make_shared<HamiltonianIsotopy>(f);
  f.evaluate = [self, steps](double t, const Vec& y0) {
    const int d = static_cast<int>(y0.size());
    std::array<double, detail::kMaxState> st{};
    for (int i = 0; i < d; ++i) st[i] = y0[i];
    st[d] = 0.0;  // action
    int nsteps = std::max(1, static_cast<int>(std::ceil(std::abs(t) * steps)));
    double dt = t / nsteps;
    auto field = [&](double tt, const double* s, double* out) {
      std::span<const double> y(s, d);
      std::span<double> X(out, d);
      detail::hamiltonian_field(*self, tt, y, X);
      out[d] = gamma_form(y, X) - self->F(tt, y);
    };
    std::array<double, detail::kMaxState> k1{}, k2{}, k3{}, k4{}, tmp{};
    for (int k = 0; k < nsteps; ++k) {
      double tt = k * dt;
      field(tt, st.data(), k1.data());
      for (int i = 0; i <= d; ++i) tmp[i] = st[i] + 0.5 * dt * k1[i];
      field(tt + 0.5 * dt, tmp.data(), k2.data());
      for (int i = 0; i <= d; ++i) tmp[i] = st[i] + 0.5 * dt * k2[i];
      field(tt + 0.5 * dt, tmp.data(), k3.data());
      for (int i = 0; i <= d; ++i) tmp[i] = st[i] + dt * k3[i];
      field(tt + dt, tmp.data(), k4.data());
      for (int i = 0; i <= d; ++i)
        st[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      for (int i = 0; i <= d; ++i)
        if (!std::isfinite(st[i]) || std::abs(st[i]) > detail::kBlowup)
          throw NumericalError("HamiltonianIsotopy: state blow-up");
    }
    HamiltonianMapSample out;
    out.image.assign(st.begin(), st.begin() + d);
    out.action = st[d];
    return out;
  };
  return f;
}

// f_t^{-1}(y) by integrating the reverse flow z' = -X_{F(t-s)}(z).
inline Vec hamiltonian_inverse_flow(const HamiltonianIsotopy& f, double t, const Vec& y) {
  const int d = static_cast<int>(y.size());
  std::array<double, detail::kMaxState> st{}, k1{}, k2{}, k3{}, k4{}, tmp{};
  for (int i = 0; i < d; ++i) st[i] = y[i];
  int nsteps = std::max(1, static_cast<int>(std::ceil(std::abs(t) * f.steps)));
  double ds = t / nsteps;
  auto field = [&](double s, const double* z, double* out) {
    std::span<const double> zz(z, d);
    std::span<double> X(out, d);
    detail::hamiltonian_field(f, t - s, zz, X);
    for (int i = 0; i < d; ++i) out[i] = -out[i];
  };
  for (int k = 0; k < nsteps; ++k) {
    double s = k * ds;
    field(s, st.data(), k1.data());
    for (int i = 0; i < d; ++i) tmp[i] = st[i] + 0.5 * ds * k1[i];
    field(s + 0.5 * ds, tmp.data(), k2.data());
    for (int i = 0; i < d; ++i) tmp[i] = st[i] + 0.5 * ds * k2[i];
    field(s + 0.5 * ds, tmp.data(), k3.data());
    for (int i = 0; i < d; ++i) tmp[i] = st[i] + ds * k3[i];
    field(s + ds, tmp.data(), k4.data());
    for (int i = 0; i < d; ++i)
      st[i] += ds / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return Vec(st.begin(), st.begin() + d);
}

// Exact lift phi_t(y, tau) = (f_t(y), tau - a_t(y)); rho == 1 and the contact
// Hamiltonian equals F_t.
inline ContactIsotopy lift_hamiltonian_isotopy(const HamiltonianIsotopy& f) {
  auto fp = std::make_shared<HamiltonianIsotopy>(f);
  ContactIsotopy iso;
  iso.n = f.n;
  iso.steps = f.steps;
  iso.method = ContactIsotopy::Method::lifted;
  iso.hamiltonian.n = f.n;
  iso.hamiltonian.support_radius = f.support_radius;
  iso.hamiltonian.value = [fp](double t, std::span<const double> y, double) {
    return fp->F(t, y);
  };
  if (f.F_grad) {
    iso.hamiltonian.value_grad = [fp](double t, std::span<const double> y, double,
                                      std::span<double> dy, double& dtau) {
      fp->F_grad(t, y, dy);
      dtau = 0.0;
      return fp->F(t, y);
    };
  }
  iso.evaluate = [fp](double t, const PrequantizationPoint& x) {
    HamiltonianMapSample s = fp->evaluate(t, x.y);
    PrequantizationPoint q;
    q.y = std::move(s.image);
    q.tau_lift = x.tau_lift - s.action;
    return IsotopySample{q, 1.0};
  };
  iso.inverse = [fp](double t, const PrequantizationPoint& x) {
    Vec w = fp->inverse ? fp->inverse(t, x.y) : hamiltonian_inverse_flow(*fp, t, x.y);
    HamiltonianMapSample s = fp->evaluate(t, w);
    PrequantizationPoint q;
    q.y = std::move(w);
    q.tau_lift = x.tau_lift + s.action;
    return q;
  };
  return iso;
}

// ---------------------------------------------------------------------------
// Symplectization lift.

struct SymplectizationLift {
  std::function<SymplectizationPoint(double, const SymplectizationPoint&)> map;
  std::function<double(double, const SymplectizationPoint&)> hamiltonian;  // r h_t(x)
  std::function<Vec(double, const SymplectizationPoint&)> field;           // dim 2n+2
};

inline SymplectizationLift lift_to_symplectization(const ContactIsotopy& phi) {
  auto a = std::make_shared<ContactIsotopy>(phi);
  SymplectizationLift lift;
  lift.map = [a](double t, const SymplectizationPoint& p) {
    IsotopySample s = a->evaluate(t, p.base);
    return SymplectizationPoint{s.point, p.r / s.rho};
  };
  lift.hamiltonian = [a](double t, const SymplectizationPoint& p) {
    return p.r * a->hamiltonian.value(t, p.base.y, p.base.tau());
  };
  lift.field = [a](double t, const SymplectizationPoint& p) {
    const std::size_t d = p.base.y.size();
    Vec out(d + 2, 0.0);
    std::array<double, detail::kMaxDim> vbuf{};
    std::span<double> V(vbuf.data(), d);
    double c = 0.0;
    double dtau = detail::contact_field_at(a->hamiltonian, t, p.base.y, p.base.tau(), V, c);
    for (std::size_t i = 0; i < d; ++i) out[i] = V[i];
    out[d] = c;
    out[d + 1] = -p.r * dtau;
    return out;
  };
  return lift;
}

// ---------------------------------------------------------------------------
// Truncation profile and truncated Hamiltonian on W-coordinates.

struct TruncatedHamiltonian {
  double kappa = 1.0;
  double w = 1.0;
  std::function<double(double)> epsilon;  // plateau/slope profile in r
  // (t, x, r) -> epsilon_kappa(w r) * w r * h_t(x), constant -3/4 off the shell
  std::function<double(double, const PrequantizationPoint&, double)> value;
};

inline std::function<double(double)> truncation_profile(double kappa) {
  double lo0 = std::exp(-2.0 * kappa), lo1 = std::exp(-kappa);
  double hi0 = std::exp(kappa), hi1 = std::exp(kappa) + 1.0;
  return [lo0, lo1, hi0, hi1](double r) {
    if (r <= lo0 || r >= hi1) return 0.0;
    if (r < lo1) return smoothstep5((r - lo0) / (lo1 - lo0));
    if (r <= hi0) return 1.0;
    return smoothstep5((hi1 - r) / (hi1 - hi0));
  };
}

// Norms are declared below; truncate_hamiltonian needs kappa(phi).
struct NormReport {
  double osc_plus = 0.0;
  double osc_minus = 0.0;
  double osc = 0.0;
  double kappa = 0.0;
};

struct NormOptions {
  int time_samples = 16;
  int space_grid = 9;        // per spatial axis
  int tau_grid = 8;
  int refine_rounds = 3;
  double fallback_radius = 2.0;  // search radius when support is unbounded
  int kappa_time_grid = 7;
  int kappa_space_grid = 4;
};

NormReport norms(const ContactIsotopy& phi, int samples, const NormOptions& opt);

inline NormReport norms(const ContactIsotopy& phi, int samples = 16) {
  return norms(phi, samples, NormOptions{});
}

inline TruncatedHamiltonian truncate_hamiltonian(const ContactIsotopy& phi, double kappa,
                                                 double w = 1.0,
                                                 std::optional<double> kappa_phi = std::nullopt) {
  if (w <= 0.0) throw ValidationError("truncate_hamiltonian: w must be positive");
  double kphi = kappa_phi ? *kappa_phi : norms(phi).kappa;
  if (kappa <= kphi / w) {
    std::ostringstream os;
    os << "truncate_hamiltonian: kappa = " << kappa
       << " must exceed the rescaled conformal constant " << kphi / w;
    throw ValidationError(os.str());
  }
  TruncatedHamiltonian th;
  th.kappa = kappa;
  th.w = w;
  th.epsilon = truncation_profile(kappa);
  auto a = std::make_shared<ContactIsotopy>(phi);
  double lo = std::exp(-2.0 * kappa), hi = std::exp(kappa) + 1.0;
  auto eps = th.epsilon;
  th.value = [a, eps, w, lo, hi](double t, const PrequantizationPoint& x, double r) {
    double rw = w * r;
    if (rw <= lo || rw >= hi) return -0.75;
    return eps(rw) * rw * a->hamiltonian.value(t, x.y, x.tau());
  };
  return th;
}

// ---------------------------------------------------------------------------
// Oscillation norms and the conformal constant.

namespace detail {

struct Extrema {
  double max_v = -kInf;
  double min_v = kInf;
};

// Grid sweep with local refinement; a rigorous lower bound of the true
// extrema, exact for the shipped analytic fixture families.
inline Extrema spatial_extrema(const ContactHamiltonian& h, double t, double radius,
                               const NormOptions& opt) {
  const int d = 2 * h.n;
  Extrema ex;
  Vec best_max(d + 1, 0.0), best_min(d + 1, 0.0);
  int g = std::max(2, opt.space_grid);
  std::array<double, kMaxDim> y{};
  std::vector<int> idx(d, 0);
  auto visit = [&](double lo_r, double hi_r, const Vec* center, double window) {
    idx.assign(d, 0);
    while (true) {
      for (int i = 0; i < d; ++i) {
        double frac = (g == 1) ? 0.5 : static_cast<double>(idx[i]) / (g - 1);
        if (center)
          y[i] = (*center)[i] - window + 2.0 * window * frac;
        else
          y[i] = lo_r + (hi_r - lo_r) * frac;
      }
      int tg = std::max(2, opt.tau_grid);
      for (int k = 0; k < tg; ++k) {
        double tau = static_cast<double>(k) / tg;
        if (center) tau = mod1((*center)[d] - window + 2.0 * window * k / (tg - 1));
        double v = h.value(t, std::span<const double>(y.data(), d), tau);
        if (v > ex.max_v) {
          ex.max_v = v;
          for (int i = 0; i < d; ++i) best_max[i] = y[i];
          best_max[d] = tau;
        }
        if (v < ex.min_v) {
          ex.min_v = v;
          for (int i = 0; i < d; ++i) best_min[i] = y[i];
          best_min[d] = tau;
        }
      }
      int c = 0;
      while (c < d && ++idx[c] == g) idx[c++] = 0;
      if (c == d) break;
    }
  };
  visit(-radius, radius, nullptr, 0.0);
  double window = radius / 2.0;
  for (int round = 0; round < opt.refine_rounds; ++round) {
    Vec cmax = best_max, cmin = best_min;
    visit(0, 0, &cmax, window);
    visit(0, 0, &cmin, window);
    window /= 4.0;
  }
  return ex;
}

}  // namespace detail

inline NormReport norms(const ContactIsotopy& phi, int samples, const NormOptions& opt) {
  if (samples < 1) throw ValidationError("norms: samples must be >= 1");
  double radius = std::isfinite(phi.hamiltonian.support_radius) &&
                          phi.hamiltonian.support_radius > 0.0
                      ? phi.hamiltonian.support_radius
                      : opt.fallback_radius;
  NormReport rep;
  // Trapezoid in t of the spatial extrema.
  Vec maxs(samples + 1), mins(samples + 1);
  for (int k = 0; k <= samples; ++k) {
    double t = static_cast<double>(k) / samples;
    auto ex = detail::spatial_extrema(phi.hamiltonian, t, radius, opt);
    maxs[k] = ex.max_v;
    mins[k] = ex.min_v;
  }
  double plus = 0.0, minus = 0.0;
  for (int k = 0; k < samples; ++k) {
    plus += 0.5 * (maxs[k] + maxs[k + 1]) / samples;
    minus += 0.5 * (mins[k] + mins[k + 1]) / samples;
  }
  // Each part is clamped at zero; for compactly supported Hamiltonians the
  // extrema straddle zero and the clamp never acts.
  rep.osc_plus = std::max(plus, 0.0);
  rep.osc_minus = std::max(-minus, 0.0);
  rep.osc = rep.osc_plus + rep.osc_minus;
  // kappa = 8 max |rho_dot / rho^2| over a sampled grid, rho_dot by central
  // differences in t.
  double kmax = 0.0;
  const int d = 2 * phi.n;
  int sg = std::max(2, opt.kappa_space_grid);
  int tg = std::max(2, opt.kappa_time_grid);
  double dt = 1e-4;
  std::vector<int> idx(d, 0);
  PrequantizationPoint p;
  p.y.assign(d, 0.0);
  while (true) {
    for (int i = 0; i < d; ++i)
      p.y[i] = -radius + 2.0 * radius * idx[i] / (sg - 1);
    for (int kt = 0; kt <= tg; ++kt) {
      for (int ktau = 0; ktau < 3; ++ktau) {
        p.tau_lift = ktau / 3.0;
        double t = static_cast<double>(kt) / tg;
        double t0 = std::min(std::max(t - dt, 0.0), 1.0 - 2.0 * dt);
        double rm = phi.evaluate(t0, p).rho;
        double r0 = phi.evaluate(t0 + dt, p).rho;
        double rp = phi.evaluate(t0 + 2.0 * dt, p).rho;
        double rdot = (rp - rm) / (2.0 * dt);
        kmax = std::max(kmax, std::abs(rdot) / sq(r0));
      }
    }
    int c = 0;
    while (c < d && ++idx[c] == sg) idx[c++] = 0;
    if (c == d) break;
  }
  rep.kappa = 8.0 * kmax;
  return rep;
}

// Upper bound for the continuation constant between two paths:
// exp(max(kappa_phi, kappa_psi)) * || h^phi - h^psi ||_+.
inline double continuation_bound(const ContactIsotopy& phi, const ContactIsotopy& psi,
                                 int samples = 16, const NormOptions& opt = NormOptions{}) {
  double kphi = norms(phi, samples, opt).kappa;
  double kpsi = norms(psi, samples, opt).kappa;
  ContactHamiltonian diff;
  diff.n = phi.n;
  diff.support_radius = std::max(phi.hamiltonian.support_radius,
                                 psi.hamiltonian.support_radius);
  auto a = std::make_shared<ContactHamiltonian>(phi.hamiltonian);
  auto b = std::make_shared<ContactHamiltonian>(psi.hamiltonian);
  diff.value = [a, b](double t, std::span<const double> y, double tau) {
    return a->value(t, y, tau) - b->value(t, y, tau);
  };
  double radius = std::isfinite(diff.support_radius) && diff.support_radius > 0.0
                      ? diff.support_radius
                      : opt.fallback_radius;
  double plus = 0.0;
  Vec maxs(samples + 1);
  for (int k = 0; k <= samples; ++k) {
    double t = static_cast<double>(k) / samples;
    maxs[k] = detail::spatial_extrema(diff, t, radius, opt).max_v;
  }
  for (int k = 0; k < samples; ++k) plus += 0.5 * (maxs[k] + maxs[k + 1]) / samples;
  plus = std::max(plus, 0.0);
  return std::exp(std::max(kphi, kpsi)) * plus;
}

// Sampled path of an isotopy through a point, with continuous tau_lift.
inline std::vector<PrequantizationPoint> isotopy_path_points(const ContactIsotopy& phi,
                                                             const PrequantizationPoint& x,
                                                             int segments) {
  std::vector<PrequantizationPoint> out;
  out.reserve(segments + 1);
  for (int k = 0; k <= segments; ++k)
    out.push_back(phi.evaluate(static_cast<double>(k) / segments, x).point);
  return out;
}

}  // namespace contact_spectral
