#pragma once

// Translated-point detection by grid-seeded damped Newton, iterated
// translated points, action spectra with contractibility flags, the
// Conley-Zehnder index of symplectic paths, and the chain-level grading.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include "contact_spectral/contact_calculus.hpp"
#include "contact_spectral/linalg.hpp"
#include "contact_spectral/model_spaces.hpp"
#include "contact_spectral/util.hpp"

namespace contact_spectral {

struct TranslatedPoint {
  PrequantizationPoint x;
  double shift = 0.0;              // real-valued via tau_lift
  double conformal_residual = 0.0; // |rho_1(x) - 1|
  bool contractible = true;
  int winding = 0;                 // of the concatenated loop
  double action = 0.0;             // = -shift
  std::optional<int> cz_index;
  int multiplicity = 1;            // cluster size before deduplication
};

struct SolverOptions {
  int seeds = 4096;
  int max_newton = 50;
  double residual_tol = tol::solver_residual;
  double accept_tol = 1e-9;     // solutions above this residual are discarded
  double distinct_tol = tol::distinct;
  int path_segments = 64;       // sampling of the concatenated loop
  std::uint64_t seed = 12345;   // jitter stream
};

namespace detail {

struct RawSolution {
  PrequantizationPoint x;
  double shift = 0.0;
  double residual = 0.0;
  double conformal_residual = 0.0;
};

// Residual of the translated-point system in R^{2n+2}:
// (phi_1(x).y - x.y, lift difference - eta, log rho_1(x)).
inline void tp_residual(const ContactIsotopy& phi, const PrequantizationPoint& x, double eta,
                        Vec& out) {
  IsotopySample s = phi.evaluate(1.0, x);
  const int d = static_cast<int>(x.y.size());
  out.assign(d + 2, 0.0);
  for (int i = 0; i < d; ++i) out[i] = s.point.y[i] - x.y[i];
  out[d] = (s.point.tau_lift - x.tau_lift) - eta;
  out[d + 1] = std::log(s.rho);
}

inline bool tp_newton(const ContactIsotopy& phi, PrequantizationPoint& x, double& eta,
                      const SolverOptions& opt, double& res_norm) {
  const int d = static_cast<int>(x.y.size());
  Vec r, rp;
  tp_residual(phi, x, eta, r);
  res_norm = norm_inf(r);
  for (int iter = 0; iter < opt.max_newton && res_norm > opt.residual_tol; ++iter) {
    Mat J(d + 2);
    double fd = 1e-6;
    for (int j = 0; j < d + 1; ++j) {
      PrequantizationPoint xp = x;
      if (j < d)
        xp.y[j] += fd;
      else
        xp.tau_lift += fd;
      tp_residual(phi, xp, eta, rp);
      for (int i = 0; i < d + 2; ++i) J(i, j) = (rp[i] - r[i]) / fd;
    }
    // d/d eta is exact.
    for (int i = 0; i < d + 2; ++i) J(i, d + 1) = (i == d) ? -1.0 : 0.0;
    // Levenberg step on J^T J handles rank-deficient families.
    Mat JtJ(d + 2);
    Vec Jtr(d + 2, 0.0);
    for (int i = 0; i < d + 2; ++i)
      for (int j = 0; j < d + 2; ++j) {
        double acc = 0.0;
        for (int k = 0; k < d + 2; ++k) acc += J(k, i) * J(k, j);
        JtJ(i, j) = acc;
      }
    double trace = 0.0;
    for (int i = 0; i < d + 2; ++i) trace += JtJ(i, i);
    double mu = std::max(1e-12 * trace / (d + 2), 1e-14);
    for (int i = 0; i < d + 2; ++i) {
      JtJ(i, i) += mu;
      double acc = 0.0;
      for (int k = 0; k < d + 2; ++k) acc += J(k, i) * r[k];
      Jtr[i] = -acc;
    }
    Vec delta;
    if (!lu_solve(JtJ, Jtr, delta)) return false;
    double damp = 1.0;
    bool improved = false;
    for (int back = 0; back < 10; ++back) {
      PrequantizationPoint xn = x;
      for (int i = 0; i < d; ++i) xn.y[i] += damp * delta[i];
      xn.tau_lift += damp * delta[d];
      double en = eta + damp * delta[d + 1];
      Vec rn;
      tp_residual(phi, xn, en, rn);
      double nn = norm_inf(rn);
      if (nn < res_norm) {
        x = xn;
        eta = en;
        r = rn;
        res_norm = nn;
        improved = true;
        break;
      }
      damp *= 0.5;
    }
    if (!improved) break;
  }
  return res_norm <= opt.accept_tol;
}

}  // namespace detail

// Winding of the concatenated loop: the isotopy path through x followed by
// the reverse Reeb arc matching the given shift.
inline int concatenation_winding(const ContactIsotopy& phi, const PrequantizationPoint& x,
                                 double shift, int segments = 64) {
  std::vector<PrequantizationPoint> loop = isotopy_path_points(phi, x, segments);
  PrequantizationPoint end = loop.back();
  for (int k = 1; k <= segments; ++k)
    loop.push_back(reeb_flow(end, -shift * static_cast<double>(k) / segments));
  return winding_number(loop, 1e-5);
}

// Grid x Sobol seeded damped Newton on the translated-point system.
// Converged solutions are deduplicated by ambient distance; each deduplicated
// point carries the real shift read off the tau lift.
inline std::vector<TranslatedPoint> find_translated_points(const ContactIsotopy& phi,
                                                           const DomainSpec& search_box,
                                                           double shift_lo, double shift_hi,
                                                           const SolverOptions& opt = {}) {
  if (!(shift_lo < shift_hi) || !std::isfinite(shift_lo) || !std::isfinite(shift_hi))
    throw ValidationError("find_translated_points: shift window must be finite");
  const int d = search_box.ambient_dim;
  if (d < 2 || d % 2) throw ValidationError("find_translated_points: ambient_dim must be even");
  const double R = search_box.radius;

  // Deterministic seed grid with a low-discrepancy jitter stream.
  int per_axis = std::max(2, static_cast<int>(std::round(
                                  std::pow(static_cast<double>(opt.seeds), 1.0 / (d + 1)))));
  std::vector<PrequantizationPoint> seeds;
  Sobol sobol(std::min(6, d + 1), opt.seed % 1024);
  std::vector<int> idx(d + 1, 0);
  while (true) {
    auto jitter = sobol.next();
    PrequantizationPoint p;
    p.y.resize(d);
    for (int i = 0; i < d; ++i) {
      double frac = (idx[i] + 0.35 + 0.3 * jitter[std::min<std::size_t>(i, jitter.size() - 1)]) /
                    per_axis;
      p.y[i] = -R + 2.0 * R * frac;
    }
    double fr = (idx[d] + 0.35 + 0.3 * jitter.back()) / per_axis;
    p.tau_lift = mod1(fr);
    seeds.push_back(std::move(p));
    int c = 0;
    while (c <= d && ++idx[c] == per_axis) idx[c++] = 0;
    if (c > d) break;
    if (static_cast<int>(seeds.size()) >= opt.seeds) break;
  }

  std::vector<std::optional<detail::RawSolution>> results(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t i) {
    PrequantizationPoint x = seeds[i];
    double eta;
    try {
      IsotopySample s1 = phi.evaluate(1.0, x);
      eta = s1.point.tau_lift - x.tau_lift;  // natural shift guess
      double res = 0.0;
      if (!detail::tp_newton(phi, x, eta, opt, res)) return;
      double ynorm = 0.0;
      for (double v : x.y) ynorm = std::max(ynorm, std::abs(v));
      if (ynorm > R + 1e-6) return;  // left the search box
      if (eta < shift_lo - 1e-9 || eta > shift_hi + 1e-9) return;
      IsotopySample chk = phi.evaluate(1.0, x);
      detail::RawSolution sol;
      sol.x = x;
      sol.shift = eta;
      sol.residual = res;
      sol.conformal_residual = std::abs(chk.rho - 1.0);
      results[i] = sol;
    } catch (const NumericalError&) {
      // seed skipped
    }
  });

  // Deterministic merge: sort then cluster by distance.
  std::vector<detail::RawSolution> sols;
  for (auto& r : results)
    if (r) sols.push_back(*r);
  std::sort(sols.begin(), sols.end(), [](const auto& a, const auto& b) {
    if (a.shift != b.shift) return a.shift < b.shift;
    for (std::size_t i = 0; i < a.x.y.size(); ++i)
      if (a.x.y[i] != b.x.y[i]) return a.x.y[i] < b.x.y[i];
    return a.x.tau() < b.x.tau();
  });
  std::vector<TranslatedPoint> out;
  for (const auto& s : sols) {
    bool merged = false;
    for (auto& t : out) {
      if (std::abs(t.shift - s.shift) < opt.distinct_tol &&
          sigma_distance(t.x, s.x) < opt.distinct_tol) {
        ++t.multiplicity;
        merged = true;
        break;
      }
    }
    if (merged) continue;
    TranslatedPoint tp;
    tp.x = s.x;
    tp.shift = s.shift;
    tp.conformal_residual = s.conformal_residual;
    tp.action = -s.shift;
    tp.winding = concatenation_winding(phi, s.x, s.shift, opt.path_segments);
    tp.contractible = (tp.winding == 0);
    out.push_back(std::move(tp));
  }
  return out;
}

// Translated points of the iterates (phi_t)^nu for nu = 1..nu_max, plus the
// count of geometrically distinct points across all iterations.
struct IteratedTranslatedPoints {
  std::map<int, std::vector<TranslatedPoint>> by_iterate;
  int distinct_count = 0;
};

inline IteratedTranslatedPoints iterated_translated_points(const ContactIsotopy& phi, int nu_max,
                                                           const DomainSpec& box, double shift_lo,
                                                           double shift_hi,
                                                           const SolverOptions& opt = {}) {
  if (nu_max < 1) throw ValidationError("iterated_translated_points: nu_max must be >= 1");
  IteratedTranslatedPoints out;
  std::vector<PrequantizationPoint> reps;
  for (int nu = 1; nu <= nu_max; ++nu) {
    ContactIsotopy it = iterate_path(phi, nu);
    auto pts = find_translated_points(it, box, shift_lo, shift_hi, opt);
    for (const auto& tp : pts) {
      bool seen = false;
      for (const auto& r : reps)
        if (sigma_distance(r, tp.x) < opt.distinct_tol) {
          seen = true;
          break;
        }
      if (!seen) reps.push_back(tp.x);
    }
    out.by_iterate[nu] = std::move(pts);
  }
  out.distinct_count = static_cast<int>(reps.size());
  return out;
}

// ---------------------------------------------------------------------------
// Action spectrum.

struct SpectrumEntry {
  double action = 0.0;
  double shift = 0.0;
  bool contractible = true;
  int winding = 0;
  double s_cluster = 0.0;  // |y| of the representative
  int multiplicity = 1;
  TranslatedPoint representative;
};

struct ActionSpectrum {
  std::vector<SpectrumEntry> entries;  // raw spectrum, integer translates included
  double window_lo = 0.0, window_hi = 0.0;
  bool nonresonant_raw = true;          // raw spectrum misses the integers
  bool nonresonant_contractible = true; // contractible spectrum misses the integers

  std::vector<double> values(bool contractible_only) const {
    std::vector<double> v;
    for (const auto& e : entries)
      if (!contractible_only || e.contractible) v.push_back(e.action);
    return v;
  }
};

// Spectrum over the action window [lo, hi]: values -shift of deduplicated
// translated points, enlarged by the integer Reeb translates of each point
// (those enter with non-zero winding, hence as non-contractible entries).
inline ActionSpectrum action_spectrum(const ContactIsotopy& phi, const DomainSpec& box,
                                      double action_lo, double action_hi,
                                      const SolverOptions& opt = {}) {
  if (!(action_lo < action_hi)) throw ValidationError("action_spectrum: empty window");
  ActionSpectrum spec;
  spec.window_lo = action_lo;
  spec.window_hi = action_hi;
  auto pts = find_translated_points(phi, box, -action_hi, -action_lo, opt);
  const double merge_tol = 1e-8;
  auto add_entry = [&](const TranslatedPoint& tp, int k) {
    double shift = tp.shift + k;
    double action = -shift;
    if (action < action_lo - 1e-12 || action > action_hi + 1e-12) return;
    for (auto& e : spec.entries) {
      if (std::abs(e.action - action) < merge_tol && e.winding == tp.winding - k) {
        e.multiplicity += tp.multiplicity;
        return;
      }
    }
    SpectrumEntry e;
    e.action = action;
    e.shift = shift;
    e.winding = tp.winding - k;
    e.contractible = (e.winding == 0);
    double s2 = 0.0;
    for (double v : tp.x.y) s2 += v * v;
    e.s_cluster = std::sqrt(s2);
    e.multiplicity = tp.multiplicity;
    e.representative = tp;
    e.representative.shift = shift;
    e.representative.action = action;
    spec.entries.push_back(std::move(e));
  };
  int k_lo = static_cast<int>(std::floor(-action_hi - 1.0));
  int k_hi = static_cast<int>(std::ceil(-action_lo + 1.0));
  for (const auto& tp : pts)
    for (int k = k_lo; k <= k_hi; ++k) add_entry(tp, k);
  std::sort(spec.entries.begin(), spec.entries.end(),
            [](const SpectrumEntry& a, const SpectrumEntry& b) { return a.action < b.action; });
  for (const auto& e : spec.entries) {
    if (std::abs(e.action - std::round(e.action)) < 1e-9) {
      spec.nonresonant_raw = false;
      if (e.contractible) spec.nonresonant_contractible = false;
    }
  }
  return spec;
}

// ---------------------------------------------------------------------------
// Conley-Zehnder index of a path of symplectic matrices starting at the
// identity with nondegenerate endpoint. Crossings of det(Psi - 1) are counted
// with the signature of the crossing form <v, S v> on the kernel, where
// S = -J dPsi/dt Psi^{-1}; the t = 0 crossing contributes half its signature.
// Normalized so that a short positive-definite quadratic flow on R^{2m}
// has index m.

namespace detail {

inline Mat standard_J(int dim) {
  Mat J(dim);
  for (int j = 0; j + 1 < dim; j += 2) {
    J(j, j + 1) = -1.0;
    J(j + 1, j) = 1.0;
  }
  return J;
}

inline Mat mat_inverse(const Mat& a) {
  int n = a.n();
  Mat inv(n);
  for (int col = 0; col < n; ++col) {
    Vec e(n, 0.0), x;
    e[col] = 1.0;
    if (!lu_solve(a, e, x)) throw NumericalError("cz_index: singular matrix");
    for (int i = 0; i < n; ++i) inv(i, col) = x[i];
  }
  return inv;
}

// S(t) = -J Psi' Psi^{-1}, symmetrized.
inline Mat crossing_form_matrix(const std::vector<Mat>& path, int k) {
  int n = path.front().n();
  int N = static_cast<int>(path.size()) - 1;
  int k0 = std::max(0, k - 1), k1 = std::min(N, k + 1);
  Mat dPsi = (path[k1] - path[k0]).scaled(static_cast<double>(N) / (k1 - k0));
  Mat S = standard_J(n).scaled(-1.0) * dPsi * mat_inverse(path[k]);
  Mat sym(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) sym(i, j) = 0.5 * (S(i, j) + S(j, i));
  return sym;
}

// Signature of <v, S v> restricted to the near-kernel of (Psi - 1).
inline int restricted_signature(const Mat& psi, const Mat& S, double kernel_tol) {
  int n = psi.n();
  Mat A = psi - Mat::identity(n);
  // near-kernel from the symmetric eigenproblem of A^T A
  Mat AtA = A.transposed() * A;
  Vec evals;
  Mat evecs;
  jacobi_eigen(AtA, evals, evecs);
  std::vector<int> kernel;
  for (int i = 0; i < n; ++i)
    if (std::sqrt(std::max(0.0, evals[i])) < kernel_tol) kernel.push_back(i);
  if (kernel.empty()) return 0;
  int m = static_cast<int>(kernel.size());
  Mat q(m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) acc += evecs(i, kernel[a]) * S(i, j) * evecs(j, kernel[b]);
      q(a, b) = acc;
    }
  Vec qe;
  Mat qv;
  jacobi_eigen(q, qe, qv);
  int sig = 0;
  double scale = 0.0;
  for (double v : qe) scale = std::max(scale, std::abs(v));
  double thr = std::max(1e-9, 1e-6 * scale);
  for (double v : qe) {
    if (v > thr) ++sig;
    if (v < -thr) --sig;
  }
  return sig;
}

}  // namespace detail

// path: matrices at uniform times 0 = t_0 < ... < t_N = 1.
inline int conley_zehnder_index(const std::vector<Mat>& path) {
  if (path.size() < 8) throw ValidationError("conley_zehnder_index: path too short");
  int n = path.front().n();
  if (n % 2) throw ValidationError("conley_zehnder_index: odd dimension");
  {
    Mat d0 = path.front() - Mat::identity(n);
    double a = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a = std::max(a, std::abs(d0(i, j)));
    if (a > 1e-8) throw ValidationError("conley_zehnder_index: path must start at the identity");
  }
  const int N = static_cast<int>(path.size()) - 1;
  if (std::abs(det(path.back() - Mat::identity(n))) < 1e-8)
    throw ValidationError("conley_zehnder_index: degenerate path");

  Vec dvals(N + 1);
  for (int k = 0; k <= N; ++k) dvals[k] = det(path[k] - Mat::identity(n));

  double half0 = 0.5 * detail::restricted_signature(
                           path.front(), detail::crossing_form_matrix(path, 0), 1e-4);
  double total = half0;

  // Interior crossings: sign changes, plus touching zeros detected as local
  // minima of |det(Psi - 1)| whose parabola-vertex value is negligible
  // against the local curvature.
  std::vector<int> crossing_at;
  int guard = std::max(2, N / 50);  // keep clear of the t = 0 crossing
  for (int k = guard; k < N; ++k) {
    bool sign_change = (dvals[k] == 0.0) ? true : (dvals[k] * dvals[k + 1] < 0.0);
    bool touch = false;
    if (!sign_change && std::abs(dvals[k]) <= std::abs(dvals[k - 1]) &&
        std::abs(dvals[k]) < std::abs(dvals[k + 1])) {
      double curv = dvals[k - 1] - 2.0 * dvals[k] + dvals[k + 1];
      if (std::abs(curv) > 1e-14) {
        double slope = 0.5 * (dvals[k + 1] - dvals[k - 1]);
        double vertex = dvals[k] - 0.5 * slope * slope / curv;
        touch = std::abs(vertex) < 0.05 * std::abs(curv);
      }
    }
    if (sign_change || touch) {
      int kc = (std::abs(dvals[k]) <= std::abs(dvals[k + 1])) ? k : k + 1;
      if (!crossing_at.empty() && kc - crossing_at.back() <= 2) continue;
      crossing_at.push_back(kc);
    }
  }
  for (int kc : crossing_at) {
    Mat S = detail::crossing_form_matrix(path, kc);
    // widen the kernel tolerance until a kernel is seen
    int sig = 0;
    for (double ktol : {1e-6, 1e-4, 1e-2}) {
      sig = detail::restricted_signature(path[kc], S, ktol);
      if (sig != 0) break;
    }
    total += sig;
  }
  double rounded = std::round(total);
  if (std::abs(total - rounded) > 1e-6)
    throw NumericalError("conley_zehnder_index: non-integer crossing count");
  return static_cast<int>(rounded);
}

// Path of the linearized flow of a quadratic Hamiltonian z -> (1/2) <z, S0 z>.
inline std::vector<Mat> quadratic_hamiltonian_path(const Mat& S0, int samples = 400) {
  int n = S0.n();
  Mat J = detail::standard_J(n);
  Mat A = J * S0;  // generator of Psi' = J S0 Psi
  std::vector<Mat> path;
  path.reserve(samples + 1);
  Mat psi = Mat::identity(n);
  path.push_back(psi);
  double dt = 1.0 / samples;
  for (int k = 0; k < samples; ++k) {
    // RK4 for the linear matrix equation
    Mat k1 = A * psi;
    Mat k2 = A * (psi + k1.scaled(0.5 * dt));
    Mat k3 = A * (psi + k2.scaled(0.5 * dt));
    Mat k4 = A * (psi + k3.scaled(dt));
    psi = psi + (k1 + k2.scaled(2.0) + k3.scaled(2.0) + k4).scaled(dt / 6.0);
    path.push_back(psi);
  }
  return path;
}

// ---------------------------------------------------------------------------
// Chain-level grading with the eta-sign cases.
inline int rfh_grading(double eta, int n, int mu_cz, int local_dim, int morse_index) {
  if (local_dim < 0) throw ValidationError("rfh_grading: local_dim must be >= 0");
  if (eta == 0.0) return 1 - n + morse_index;
  int doubled = 2 * mu_cz - local_dim + 2 * morse_index + (eta < 0.0 ? 2 : 0);
  if (doubled % 2 != 0)
    throw ValidationError("rfh_grading: odd local dimension gives a half-integer grading");
  return doubled / 2;
}

}  // namespace contact_spectral
