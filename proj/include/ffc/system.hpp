#pragma once

// Kernel systems {g1,g2,k,k1,k2,h1,h2,h3,h4} satisfying the compatibility
// conditions under which the transform of a convolution equals the
// convolution of transforms:
//   (i)    g1 g2 k^2 + h1 h2 = 0            in L2
//   (ii)   m_L(supp(h3) /\ supp(h4)) = 0
//   (iii)  g1^2 k^2 + h1^2 = h3^2 + k1^2    pointwise a.e.
//   (iv)   g2^2 k^2 + h2^2 = h4^2 + k2^2    pointwise a.e.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "functional.hpp"
#include "kernel.hpp"

namespace ffc {

struct KernelSystem {
  Kernel g1, g2, k, k1, k2, h1, h2, h3, h4;

  void require_shared_grid() const {
    for (const Kernel* p : {&g2, &k, &k1, &k2, &h1, &h2, &h3, &h4}) require_same_grid(g1, *p);
  }

  // true when every slot carries an exact closed form (or exact square),
  // which decides the residual tolerance regime
  bool analytic() const {
    for (const Kernel* p : {&g1, &g2, &k, &k1, &k2, &h1, &h2, &h3, &h4})
      if (!p->squared_form()) return false;
    return true;
  }

  json to_json() const {
    return json{{"g1", g1.to_literal()}, {"g2", g2.to_literal()}, {"k", k.to_literal()},
                {"k1", k1.to_literal()}, {"k2", k2.to_literal()}, {"h1", h1.to_literal()},
                {"h2", h2.to_literal()}, {"h3", h3.to_literal()}, {"h4", h4.to_literal()}};
  }

  static KernelSystem from_json(const json& j) {
    auto get = [&](const char* name) {
      if (!j.contains(name))
        throw std::invalid_argument(std::string("KernelSystem: missing kernel '") + name + "'");
      return Kernel::from_literal(j[name]);
    };
    KernelSystem s{get("g1"), get("g2"), get("k"),  get("k1"), get("k2"),
                   get("h1"), get("h2"), get("h3"), get("h4")};
    s.require_shared_grid();
    return s;
  }
};

// exact-quadrature kernels warrant the tight tolerance; grid-only kernels
// carry trapezoid error, so the check relaxes to 1e-6
inline double default_system_tol(const KernelSystem& sys) {
  return sys.analytic() ? 1e-10 : 1e-6;
}

struct SystemReport {
  double residual_i = 0;        // ||g1 g2 k^2 + h1 h2||_2
  double overlap_measure = 0;   // m_L(supp(h3) /\ supp(h4))
  double residual_iii = 0;      // max_t |g1^2 k^2 + h1^2 - h3^2 - k1^2|
  double residual_iv = 0;       // max_t |g2^2 k^2 + h2^2 - h4^2 - k2^2|
  bool pass_i = false, pass_ii = false, pass_iii = false, pass_iv = false;
  double tol = 0;

  bool pass() const { return pass_i && pass_ii && pass_iii && pass_iv; }

  json to_json() const {
    return json{{"residual_i", residual_i},
                {"overlap_measure", overlap_measure},
                {"residual_iii", residual_iii},
                {"residual_iv", residual_iv},
                {"pass_i", pass_i},
                {"pass_ii", pass_ii},
                {"pass_iii", pass_iii},
                {"pass_iv", pass_iv},
                {"pass", pass()},
                {"tol", tol}};
  }
};

inline SystemReport check_system(const KernelSystem& sys, double tol) {
  sys.require_shared_grid();
  SystemReport r;
  r.tol = tol;

  Kernel ksq = pointwise_product(sys.k, sys.k);
  Kernel lhs_i = pointwise_lincomb(1.0, pointwise_product(pointwise_product(sys.g1, sys.g2), ksq),
                                   1.0, pointwise_product(sys.h1, sys.h2));
  r.residual_i = std::sqrt(std::max(0.0, l2_norm_sq(lhs_i)));
  r.pass_i = r.residual_i <= tol;

  double cell = sys.g1.T() / double(sys.g1.M());
  r.overlap_measure = support(sys.h3).intersection_measure(support(sys.h4));
  r.pass_ii = r.overlap_measure <= cell + 1e-12;

  // (iii)/(iv) are pointwise statements; compare on the grid
  auto gridwise_gap = [&](const Kernel& g, const Kernel& h, const Kernel& hs, const Kernel& ks) {
    double m = 0;
    for (std::size_t i = 0; i < g.grid().size(); ++i) {
      double lhs = g.grid()[i] * g.grid()[i] * sys.k.grid()[i] * sys.k.grid()[i] +
                   h.grid()[i] * h.grid()[i];
      double rhs = hs.grid()[i] * hs.grid()[i] + ks.grid()[i] * ks.grid()[i];
      m = std::max(m, std::abs(lhs - rhs));
    }
    return m;
  };
  r.residual_iii = gridwise_gap(sys.g1, sys.h1, sys.h3, sys.k1);
  r.residual_iv = gridwise_gap(sys.g2, sys.h2, sys.h4, sys.k2);
  r.pass_iii = r.residual_iii <= tol;
  r.pass_iv = r.residual_iv <= tol;
  return r;
}

inline SystemReport check_system(const KernelSystem& sys) {
  return check_system(sys, default_system_tol(sys));
}

// indicator kernel of a union of intervals, with an exact closed form
inline Kernel indicator_kernel(const SupportSet& s, double T, std::size_t M) {
  TrigPoly form = TrigPoly::constant(T, 0.0);
  for (const auto& iv : s.intervals())
    form = form + TrigPoly::indicator(T, std::max(0.0, iv.lo), std::min(T, iv.hi));
  json expr = json::array();
  for (const auto& iv : s.intervals()) expr.push_back(json{{"ind", {iv.lo, iv.hi}}});
  return Kernel::from_form(std::move(form),
                           expr.size() == 1 ? expr[0] : json{{"op", "add"}, {"args", expr}}, M);
}

// builds the nine-kernel family
//   h1 = g1 k,   h2 = -g2 k,
//   h3 = sqrt2 g1 k chi_A,  h4 = sqrt2 g2 k chi_B,
//   k1 = sqrt2 g1 k chi_B,  k2 = sqrt2 g2 k chi_A
// from generators g1, g2, k and a partition {A,B} of [0,T]; every instance
// satisfies conditions (i)-(iv) identically
inline KernelSystem generate_family_trig(const Kernel& g1, const Kernel& g2, const Kernel& k,
                                         const SupportSet& A, const SupportSet& B) {
  require_same_grid(g1, g2);
  require_same_grid(g1, k);
  require_nonzero(g1, "generate_family_trig.g1");
  require_nonzero(g2, "generate_family_trig.g2");
  require_nonzero(k, "generate_family_trig.k");
  double T = g1.T();
  std::size_t M = g1.M();
  double cell = T / double(M);
  if (A.measure() <= cell || B.measure() <= cell)
    throw std::invalid_argument("generate_family_trig: both partition cells need positive measure");
  if (A.intersection_measure(B) > cell + 1e-12)
    throw std::invalid_argument("generate_family_trig: partition cells overlap");
  if (A.measure() + B.measure() < T - cell - 1e-12)
    throw std::invalid_argument("generate_family_trig: partition does not cover [0,T]");

  Kernel chiA = indicator_kernel(A, T, M);
  Kernel chiB = indicator_kernel(B, T, M);
  const double r2 = std::sqrt(2.0);

  Kernel g1k = pointwise_product(g1, k);
  Kernel g2k = pointwise_product(g2, k);
  KernelSystem sys;
  sys.g1 = g1;
  sys.g2 = g2;
  sys.k = k;
  sys.h1 = g1k;
  sys.h2 = scale_kernel(-1.0, g2k);
  sys.h3 = scale_kernel(r2, pointwise_product(g1k, chiA));
  sys.h4 = scale_kernel(r2, pointwise_product(g2k, chiB));
  sys.k1 = scale_kernel(r2, pointwise_product(g1k, chiB));
  sys.k2 = scale_kernel(r2, pointwise_product(g2k, chiA));
  return sys;
}

// ----- dyadic (Haar) series family ------------------------------------------

// orthonormal basis of L2 of one half interval: the normalized indicator of
// the half followed by the global unit-norm Haar wavelets supported inside it
inline std::vector<Kernel> haar_half_basis(bool left_half, std::size_t n_terms, double T,
                                           std::size_t M) {
  if (n_terms < 1) throw std::invalid_argument("haar_half_basis: need at least one member");
  std::vector<Kernel> out;
  double lo = left_half ? 0.0 : T / 2;
  double hi = left_half ? T / 2 : T;
  out.push_back(Kernel::from_form(TrigPoly::indicator(T, lo, hi) * std::sqrt(2.0 / T),
                                  json{{"op", "scale"},
                                       {"c", std::sqrt(2.0 / T)},
                                       {"args", json::array({json{{"ind", {lo, hi}}}})}},
                                  M));
  for (int n = 2; out.size() < n_terms; ++n) {
    Kernel h = haar_function(n, T, M);
    SupportSet s = support(h);
    if (s.empty()) continue;
    double s_lo = s.intervals().front().lo;
    double s_hi = s.intervals().back().hi;
    bool in_left = s_hi <= T / 2 + 1e-12 * T;
    bool in_right = s_lo >= T / 2 - 1e-12 * T;
    if ((left_half && in_left) || (!left_half && in_right)) out.push_back(std::move(h));
  }
  return out;
}

struct HaarSeries {
  std::vector<double> coefficients;
  Kernel sum;              // truncated expansion
  double trunc_residual;   // || target - sum ||_2
};

// truncated Fourier expansion of `target` in the given orthonormal family
inline HaarSeries haar_expand(const Kernel& target, const std::vector<Kernel>& basis) {
  HaarSeries out;
  Kernel acc;
  bool first = true;
  for (const auto& b : basis) {
    double c = l2_inner(target, b);
    out.coefficients.push_back(c);
    Kernel term = scale_kernel(c, b);
    acc = first ? term : pointwise_lincomb(1.0, acc, 1.0, term);
    first = false;
  }
  Kernel diff = pointwise_lincomb(1.0, target, -1.0, acc);
  out.trunc_residual = std::sqrt(std::max(0.0, l2_norm_sq(diff)));
  out.sum = std::move(acc);
  return out;
}

struct HaarFamilyReport {
  KernelSystem sys;  // h3,h4 truncated A-side series; k1,k2 truncated B-side series
  std::size_t n_terms = 0;
  // [j] indexes the generator pair (g1 k) resp. (g2 k)
  double trunc_residual_A[2] = {0, 0};
  double trunc_residual_B[2] = {0, 0};
  double parseval_residual[2] = {0, 0};  // | ||series_A||^2 + ||series_B||^2 - ||sqrt2 g_j k||^2 |
  std::vector<double> coeffs_A[2], coeffs_B[2];

  json to_json() const {
    return json{{"n_terms", n_terms},
                {"trunc_residual_A", {trunc_residual_A[0], trunc_residual_A[1]}},
                {"trunc_residual_B", {trunc_residual_B[0], trunc_residual_B[1]}},
                {"parseval_residual", {parseval_residual[0], parseval_residual[1]}},
                {"coeffs_A", {coeffs_A[0], coeffs_A[1]}},
                {"coeffs_B", {coeffs_B[0], coeffs_B[1]}},
                {"system", sys.to_json()}};
  }
};

// dyadic-series construction: expands sqrt2 g_j k over the half-interval
// bases and returns the truncated series kernels plus convergence
// diagnostics.  At finite truncation the conditions hold only up to the
// reported residuals, so this is a diagnostic report, not a certified system.
inline HaarFamilyReport generate_family_haar(const Kernel& g1, const Kernel& g2, const Kernel& k,
                                             std::size_t n_terms) {
  require_same_grid(g1, g2);
  require_same_grid(g1, k);
  if (n_terms < 1) throw std::invalid_argument("generate_family_haar: n_terms must be >= 1");
  double T = g1.T();
  std::size_t M = g1.M();

  auto basis_A = haar_half_basis(true, n_terms, T, M);   // throws when the grid is too coarse
  auto basis_B = haar_half_basis(false, n_terms, T, M);

  HaarFamilyReport rep;
  rep.n_terms = n_terms;
  rep.sys.g1 = g1;
  rep.sys.g2 = g2;
  rep.sys.k = k;
  rep.sys.h1 = pointwise_product(g1, k);
  rep.sys.h2 = scale_kernel(-1.0, pointwise_product(g2, k));

  const double r2 = std::sqrt(2.0);
  Kernel chiA = indicator_kernel(SupportSet({{0.0, T / 2}}), T, M);
  Kernel chiB = indicator_kernel(SupportSet({{T / 2, T}}), T, M);

  Kernel* series_A[2] = {&rep.sys.h3, &rep.sys.h4};
  Kernel* series_B[2] = {&rep.sys.k1, &rep.sys.k2};
  const Kernel* gs[2] = {&g1, &g2};
  for (int j = 0; j < 2; ++j) {
    Kernel target = scale_kernel(r2, pointwise_product(*gs[j], k));
    Kernel target_A = pointwise_product(target, chiA);
    Kernel target_B = pointwise_product(target, chiB);

    HaarSeries a = haar_expand(target_A, basis_A);
    HaarSeries b = haar_expand(target_B, basis_B);
    rep.trunc_residual_A[j] = a.trunc_residual;
    rep.trunc_residual_B[j] = b.trunc_residual;
    double energy = l2_norm_sq(a.sum) + l2_norm_sq(b.sum);
    rep.parseval_residual[j] = std::abs(energy - l2_norm_sq(target));
    rep.coeffs_A[j] = a.coefficients;
    rep.coeffs_B[j] = b.coefficients;
    *series_A[j] = std::move(a.sum);
    *series_B[j] = std::move(b.sum);
  }
  return rep;
}

// ----- composed identity ------------------------------------------------------

struct ComposedReport {
  SystemReport system;
  ComboDiff diff;
  bool pass = false;
  double tol = 0;

  json to_json() const {
    return json{{"system", system.to_json()},
                {"max_coeff_rel", diff.max_coeff_rel},
                {"max_kernel_abs", diff.max_kernel_abs},
                {"matched", diff.matched},
                {"pass", pass},
                {"tol", tol}};
  }
};

// transform-of-convolution vs convolution-of-transforms, termwise, on a
// system passing all four conditions
inline ComposedReport verify_composed_identity(const KernelSystem& sys, const ExpCombo& F,
                                               const ExpCombo& G, double q,
                                               double tol = 1e-10) {
  ComposedReport rep;
  rep.tol = tol;
  rep.system = check_system(sys);
  if (!rep.system.pass())
    throw std::invalid_argument(
        "verify_composed_identity: kernel system fails the compatibility conditions");

  TransformParam p = TransformParam::feynman(q);
  CtoSpec spec12{sys.g1, sys.g2, sys.h1, sys.h2};
  CtoSpec spec34{sys.g1, sys.g2, sys.h3, sys.h4};
  ExpCombo lhs = fft_of_cto_exp(F, G, spec12, sys.k, p);
  ExpCombo rhs = cto_of_ffts_exp(F, G, sys.k1, sys.k2, spec34, p);
  rep.diff = compare_combos(lhs, rhs);
  rep.pass = rep.diff.matched && rep.diff.max_coeff_rel <= tol;
  return rep;
}

}  // namespace ffc
