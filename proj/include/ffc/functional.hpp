#pragma once

// Exponential-functional calculus: finite complex-linear combinations of
// e^{<u,x>} with closed forms for the generalized Fourier--Feynman transform
// and the convolution type operation, plus Monte Carlo evaluation of both
// for arbitrary functionals at real transform parameters.

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "kernel.hpp"
#include "path.hpp"

namespace ffc {

using Complex = std::complex<double>;

// transform parameter: analytic lambda in the right half plane, or the
// Feynman boundary value lambda = -iq with nonzero real q
class TransformParam {
 public:
  static TransformParam analytic(Complex lambda) {
    if (!(lambda.real() > 0))
      throw std::invalid_argument("TransformParam: analytic lambda needs Re(lambda) > 0");
    TransformParam p;
    p.lambda_ = lambda;
    return p;
  }

  static TransformParam feynman(double q) {
    if (q == 0) throw std::invalid_argument("TransformParam: Feynman parameter q must be nonzero");
    TransformParam p;
    p.q_ = q;
    return p;
  }

  // the factor multiplying ||.||_2^2 in every closed form: 1/(2 lambda),
  // which at the boundary lambda = -iq becomes i/(2q)
  Complex half_inv_lambda() const {
    if (q_) return Complex(0.0, 1.0 / (2.0 * *q_));
    return 1.0 / (2.0 * *lambda_);
  }

  bool is_feynman() const { return q_.has_value(); }

  double real_lambda() const {
    if (q_ || lambda_->imag() != 0)
      throw std::invalid_argument("TransformParam: Monte Carlo evaluation needs real lambda > 0");
    return lambda_->real();
  }

  json to_json() const {
    if (q_) return json{{"q", *q_}};
    return json{{"lambda", json::array({lambda_->real(), lambda_->imag()})}};
  }

  static TransformParam from_json(const json& j) {
    if (j.contains("q")) return feynman(j["q"].get<double>());
    if (j.contains("lambda")) {
      const auto& l = j["lambda"];
      if (l.is_array()) return analytic(Complex(l[0].get<double>(), l[1].get<double>()));
      return analytic(Complex(l.get<double>(), 0.0));
    }
    throw std::invalid_argument("TransformParam: expected {\"q\":..} or {\"lambda\":..}");
  }

 private:
  TransformParam() = default;
  std::optional<Complex> lambda_;
  std::optional<double> q_;
};

struct ExpTerm {
  Complex coeff;
  Kernel u;
};

// phase-weighted term: Psi_u * exp{(i/2q)||v k||^2}; the phase folds into the
// coefficient on construction so stored terms never carry phase data
inline ExpTerm make_weighted_term(Complex coeff, Kernel u, double q, const Kernel& v,
                                  const Kernel& k) {
  if (q == 0) throw std::invalid_argument("make_weighted_term: q must be nonzero");
  Complex phase = std::exp(Complex(0.0, l2_norm_sq_product(v, k) / (2.0 * q)));
  return ExpTerm{coeff * phase, std::move(u)};
}

class ExpCombo {
 public:
  ExpCombo() = default;

  static ExpCombo zero() { return ExpCombo(); }

  // the constant functional c (exponent kernel identically zero)
  static ExpCombo constant(Complex c, double T, std::size_t M) {
    ExpCombo f;
    if (c != 0.0) f.terms_.push_back({c, Kernel::from_expr(json{{"const", 0.0}}, T, M)});
    return f;
  }

  static ExpCombo single(Complex coeff, Kernel u) {
    ExpCombo f;
    f.terms_.push_back({coeff, std::move(u)});
    return f;
  }

  const std::vector<ExpTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  void add_term(Complex coeff, const Kernel& u) {
    if (coeff == 0.0) return;
    for (auto& t : terms_) {
      if (same_exponent(t.u, u)) {
        t.coeff += coeff;
        return;
      }
    }
    terms_.push_back({coeff, u});
  }

  Complex eval(const WienerPath& x) const {
    Complex s = 0;
    for (std::size_t j = 0; j < terms_.size(); ++j) {
      Complex v = terms_[j].coeff * std::exp(pwz_integral(terms_[j].u, x));
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw std::runtime_error("ExpCombo::eval: overflow in term " + std::to_string(j));
      s += v;
    }
    return s;
  }

  json to_json() const {
    json terms = json::array();
    for (const auto& t : terms_)
      terms.push_back(json{{"coeff", json::array({t.coeff.real(), t.coeff.imag()})},
                           {"u", t.u.expr()}});
    return terms;
  }

  static ExpCombo from_json(const json& j, double T, std::size_t M) {
    ExpCombo f;
    for (const auto& t : j) {
      Complex c(t["coeff"][0].get<double>(), t["coeff"][1].get<double>());
      f.add_term(c, Kernel::from_expr(t["u"], T, M));
    }
    return f;
  }

  static bool same_exponent(const Kernel& a, const Kernel& b) {
    if (a.M() != b.M()) return false;
    double scale = std::max({a.max_abs(), b.max_abs(), 1.0});
    return max_abs_diff(a, b) <= 1e-12 * scale;
  }

 private:
  std::vector<ExpTerm> terms_;
};

inline ExpCombo multiply(const ExpCombo& F, const ExpCombo& G) {
  ExpCombo out;
  for (const auto& a : F.terms())
    for (const auto& b : G.terms())
      out.add_term(a.coeff * b.coeff, pointwise_lincomb(1.0, a.u, 1.0, b.u));
  return out;
}

inline void require_nonzero(const Kernel& k, const char* what) {
  if (k.is_zero(0.0))
    throw std::invalid_argument(std::string(what) + ": kernel must be nonzero");
}

// E^{an f_q}[Psi_u(Z_h(x,.))] summed over terms: Sigma c_j exp(||u_j h||^2 / (2 lambda))
inline Complex analytic_feynman_exp(const ExpCombo& F, const Kernel& h,
                                    const TransformParam& p) {
  require_nonzero(h, "analytic_feynman_exp");
  Complex hil = p.half_inv_lambda();
  Complex s = 0;
  for (const auto& t : F.terms()) s += t.coeff * std::exp(hil * l2_norm_sq_product(t.u, h));
  return s;
}

// T_{q,k}(Psi_u)(y) = Psi_u(y) exp(||u k||^2 / (2 lambda)): exponents are
// unchanged, coefficients pick up the transform phase
inline ExpCombo fft_exp(const ExpCombo& F, const Kernel& k, const TransformParam& p) {
  require_nonzero(k, "fft_exp");
  Complex hil = p.half_inv_lambda();
  ExpCombo out;
  for (const auto& t : F.terms())
    out.add_term(t.coeff * std::exp(hil * l2_norm_sq_product(t.u, k)), t.u);
  return out;
}

struct CtoSpec {
  Kernel g1, g2, h1, h2;

  void validate() const {
    require_same_grid(g1, g2);
    require_same_grid(g1, h1);
    require_same_grid(g1, h2);
    require_nonzero(g1, "CtoSpec.g1");
    require_nonzero(g2, "CtoSpec.g2");
    require_nonzero(h1, "CtoSpec.h1");
    require_nonzero(h2, "CtoSpec.h2");
  }
};

// (Psi_u * Psi_v)^{(g1,g2;h1,h2)}(y) = exp{<u g1 + v g2, y> + ||u h1 + v h2||^2/(2 lambda)}
inline ExpCombo cto_exp(const ExpCombo& F, const ExpCombo& G, const CtoSpec& spec,
                        const TransformParam& p) {
  spec.validate();
  Complex hil = p.half_inv_lambda();
  ExpCombo out;
  for (const auto& a : F.terms())
    for (const auto& b : G.terms()) {
      Kernel mix = pointwise_lincomb(1.0, pointwise_product(a.u, spec.h1), 1.0,
                                     pointwise_product(b.u, spec.h2));
      Kernel exponent = pointwise_lincomb(1.0, pointwise_product(a.u, spec.g1), 1.0,
                                          pointwise_product(b.u, spec.g2));
      out.add_term(a.coeff * b.coeff * std::exp(hil * l2_norm_sq(mix)), exponent);
    }
  return out;
}

// per term pair: the cross and square pieces of the transform phase, used to
// localize failures to a violated compatibility condition
struct PhasePair {
  double cross_integral = 0;  // \int u v (h1 h2 + g1 g2 k^2) dt   (or u v h3 h4)
  double square_u = 0;        // \int u^2 (h1^2 + g1^2 k^2) dt     (or u^2 (h3^2 + k1^2))
  double square_v = 0;
};

struct PhaseDiagnostics {
  std::vector<PhasePair> pairs;

  double max_abs_cross() const {
    double m = 0;
    for (const auto& p : pairs) m = std::max(m, std::abs(p.cross_integral));
    return m;
  }
};

// \int a b dt; exact when both kernels carry closed forms
inline double l2_inner(const Kernel& a, const Kernel& b) {
  require_same_grid(a, b);
  if (a.has_form() && b.has_form()) return ((*a.form()) * (*b.form())).integral();
  const auto& ga = a.grid();
  const auto& gb = b.grid();
  double dt = a.T() / double(a.M());
  double s = 0.5 * (ga.front() * gb.front() + ga.back() * gb.back());
  for (std::size_t i = 1; i < a.M(); ++i) s += ga[i] * gb[i];
  return s * dt;
}

// composition T_{q,k} o CTO with the expanded phase decomposition
inline ExpCombo fft_of_cto_exp(const ExpCombo& F, const ExpCombo& G, const CtoSpec& spec,
                               const Kernel& k, const TransformParam& p,
                               PhaseDiagnostics* diag = nullptr) {
  spec.validate();
  require_nonzero(k, "fft_of_cto_exp");
  if (diag) {
    diag->pairs.clear();
    Kernel ksq = pointwise_product(k, k);
    Kernel cross = pointwise_lincomb(1.0, pointwise_product(spec.h1, spec.h2), 1.0,
                                     pointwise_product(pointwise_product(spec.g1, spec.g2), ksq));
    Kernel sq1 = pointwise_lincomb(1.0, pointwise_product(spec.h1, spec.h1), 1.0,
                                   pointwise_product(pointwise_product(spec.g1, spec.g1), ksq));
    Kernel sq2 = pointwise_lincomb(1.0, pointwise_product(spec.h2, spec.h2), 1.0,
                                   pointwise_product(pointwise_product(spec.g2, spec.g2), ksq));
    for (const auto& a : F.terms())
      for (const auto& b : G.terms()) {
        PhasePair pp;
        pp.cross_integral = l2_inner(pointwise_product(a.u, b.u), cross);
        pp.square_u = l2_inner(pointwise_product(a.u, a.u), sq1);
        pp.square_v = l2_inner(pointwise_product(b.u, b.u), sq2);
        diag->pairs.push_back(pp);
      }
  }
  return fft_exp(cto_exp(F, G, spec, p), k, p);
}

// composition CTO(FFT, FFT) with the h3 h4 cross-term diagnostics
inline ExpCombo cto_of_ffts_exp(const ExpCombo& F, const ExpCombo& G, const Kernel& k1,
                                const Kernel& k2, const CtoSpec& spec34,
                                const TransformParam& p, PhaseDiagnostics* diag = nullptr) {
  spec34.validate();
  require_nonzero(k1, "cto_of_ffts_exp");
  require_nonzero(k2, "cto_of_ffts_exp");
  if (diag) {
    diag->pairs.clear();
    Kernel cross = pointwise_product(spec34.h1, spec34.h2);
    Kernel sq1 = pointwise_lincomb(1.0, pointwise_product(spec34.h1, spec34.h1), 1.0,
                                   pointwise_product(k1, k1));
    Kernel sq2 = pointwise_lincomb(1.0, pointwise_product(spec34.h2, spec34.h2), 1.0,
                                   pointwise_product(k2, k2));
    for (const auto& a : F.terms())
      for (const auto& b : G.terms()) {
        PhasePair pp;
        pp.cross_integral = l2_inner(pointwise_product(a.u, b.u), cross);
        pp.square_u = l2_inner(pointwise_product(a.u, a.u), sq1);
        pp.square_v = l2_inner(pointwise_product(b.u, b.u), sq2);
        diag->pairs.push_back(pp);
      }
  }
  return cto_exp(fft_exp(F, k1, p), fft_exp(G, k2, p), spec34, p);
}

// factorized right side of the transform-of-CTO identity: product over term
// pairs of the transforms under s(g1 k, h1) and s(g2 k, h2) with the
// evaluation path passed through g1 resp. g2
inline ExpCombo factorized_fft_of_cto(const ExpCombo& F, const ExpCombo& G,
                                      const CtoSpec& spec, const Kernel& k,
                                      const TransformParam& p) {
  Kernel s1 = combine_s(pointwise_product(spec.g1, k), spec.h1);
  Kernel s2 = combine_s(pointwise_product(spec.g2, k), spec.h2);
  Complex hil = p.half_inv_lambda();
  ExpCombo lhs, rhs;
  for (const auto& a : F.terms())
    lhs.add_term(a.coeff * std::exp(hil * l2_norm_sq_product(a.u, s1)),
                 pointwise_product(a.u, spec.g1));
  for (const auto& b : G.terms())
    rhs.add_term(b.coeff * std::exp(hil * l2_norm_sq_product(b.u, s2)),
                 pointwise_product(b.u, spec.g2));
  return multiply(lhs, rhs);
}

// factorized right side of the CTO-of-transforms identity, with combined
// kernels s(h3,k1) and s(h4,k2)
inline ExpCombo factorized_cto_of_ffts(const ExpCombo& F, const ExpCombo& G,
                                       const Kernel& k1, const Kernel& k2,
                                       const CtoSpec& spec34, const TransformParam& p) {
  Kernel s3 = combine_s(spec34.h1, k1);
  Kernel s4 = combine_s(spec34.h2, k2);
  Complex hil = p.half_inv_lambda();
  ExpCombo lhs, rhs;
  for (const auto& a : F.terms())
    lhs.add_term(a.coeff * std::exp(hil * l2_norm_sq_product(a.u, s3)),
                 pointwise_product(a.u, spec34.g1));
  for (const auto& b : G.terms())
    rhs.add_term(b.coeff * std::exp(hil * l2_norm_sq_product(b.u, s4)),
                 pointwise_product(b.u, spec34.g2));
  return multiply(lhs, rhs);
}

// termwise discrepancy between two combos: matches terms by exponent kernel
// and reports the worst coefficient and kernel deviations
struct ComboDiff {
  double max_coeff_rel = 0;
  double max_kernel_abs = 0;
  bool matched = true;
};

inline ComboDiff compare_combos(const ExpCombo& A, const ExpCombo& B) {
  ComboDiff d;
  if (A.terms().size() != B.terms().size()) {
    d.matched = false;
    d.max_coeff_rel = 1e9;
    return d;
  }
  std::vector<bool> used(B.terms().size(), false);
  for (const auto& a : A.terms()) {
    bool found = false;
    for (std::size_t j = 0; j < B.terms().size(); ++j) {
      if (used[j]) continue;
      const auto& b = B.terms()[j];
      double scale = std::max({a.u.max_abs(), b.u.max_abs(), 1.0});
      double kd = max_abs_diff(a.u, b.u);
      if (kd <= 1e-9 * scale) {
        used[j] = true;
        found = true;
        double cs = std::max({std::abs(a.coeff), std::abs(b.coeff), 1e-30});
        d.max_coeff_rel = std::max(d.max_coeff_rel, std::abs(a.coeff - b.coeff) / cs);
        d.max_kernel_abs = std::max(d.max_kernel_abs, kd);
        break;
      }
    }
    if (!found) {
      d.matched = false;
      d.max_coeff_rel = 1e9;
    }
  }
  return d;
}

// ----- Monte Carlo counterparts at real lambda ------------------------------

using Functional = std::function<Complex(const WienerPath&)>;

inline WienerPath add_paths(const WienerPath& a, const WienerPath& b) {
  WienerPath r = a;
  for (std::size_t i = 0; i < r.samples.size(); ++i) r.samples[i] += b.samples[i];
  return r;
}

// T_{lambda,k}(F)(y) = E[F(y + lambda^{-1/2} Z_k(x,.))]
inline McEstimate mc_fft(const Functional& F, const Kernel& k, double lambda,
                         const WienerPath& y, const PathSampler& sampler, std::size_t n) {
  if (!(lambda > 0)) throw std::invalid_argument("mc_fft: lambda must be a positive real");
  require_nonzero(k, "mc_fft");
  double scale = 1.0 / std::sqrt(lambda);
  const auto& kg = k.grid();
  auto f = [&](const std::vector<WienerPath>& xs) {
    WienerPath z;
    z.T = y.T;
    z.samples.resize(y.samples.size());
    const auto& s = xs[0].samples;
    double acc = 0;
    z.samples[0] = y.samples[0];
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      acc += kg[i] * (s[i + 1] - s[i]);
      z.samples[i + 1] = y.samples[i + 1] + scale * acc;
    }
    return F(z);
  };
  return mc_expectation(f, sampler, n, 1);
}

// (F*G)^{(g1,g2;h1,h2)}_lambda(y) with real lambda > 0
inline McEstimate mc_cto(const Functional& F, const Functional& G, const CtoSpec& spec,
                         double lambda, const WienerPath& y, const PathSampler& sampler,
                         std::size_t n) {
  if (!(lambda > 0)) throw std::invalid_argument("mc_cto: lambda must be a positive real");
  spec.validate();
  double scale = 1.0 / std::sqrt(lambda);
  WienerPath yg1 = gaussian_process_path(spec.g1, y);
  WienerPath yg2 = gaussian_process_path(spec.g2, y);
  const auto& h1g = spec.h1.grid();
  const auto& h2g = spec.h2.grid();
  auto f = [&](const std::vector<WienerPath>& xs) {
    const auto& s = xs[0].samples;
    WienerPath a = yg1, b = yg2;
    double acc1 = 0, acc2 = 0;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      double dx = s[i + 1] - s[i];
      acc1 += h1g[i] * dx;
      acc2 += h2g[i] * dx;
      a.samples[i + 1] += scale * acc1;
      b.samples[i + 1] += scale * acc2;
    }
    return F(a) * G(b);
  };
  return mc_expectation(f, sampler, n, 1);
}

// coupled double-path estimate of T_{lambda,k}((F*G)_lambda)(y)
inline McEstimate mc_fft_of_cto(const Functional& F, const Functional& G, const CtoSpec& spec,
                                const Kernel& k, double lambda, const WienerPath& y,
                                const PathSampler& sampler, std::size_t n) {
  if (!(lambda > 0)) throw std::invalid_argument("mc_fft_of_cto: lambda must be positive");
  spec.validate();
  double scale = 1.0 / std::sqrt(lambda);
  WienerPath yg1 = gaussian_process_path(spec.g1, y);
  WienerPath yg2 = gaussian_process_path(spec.g2, y);
  Kernel g1k = pointwise_product(spec.g1, k);
  Kernel g2k = pointwise_product(spec.g2, k);
  const auto& h1g = spec.h1.grid();
  const auto& h2g = spec.h2.grid();
  const auto& g1kg = g1k.grid();
  const auto& g2kg = g2k.grid();
  auto f = [&](const std::vector<WienerPath>& xs) {
    const auto& x1 = xs[0].samples;  // CTO integration variable
    const auto& x2 = xs[1].samples;  // transform integration variable
    WienerPath a = yg1, b = yg2;
    double a1 = 0, a2 = 0, b1 = 0, b2 = 0;
    for (std::size_t i = 0; i + 1 < x1.size(); ++i) {
      double d1 = x1[i + 1] - x1[i];
      double d2 = x2[i + 1] - x2[i];
      a1 += h1g[i] * d1;
      a2 += g1kg[i] * d2;
      b1 += h2g[i] * d1;
      b2 += g2kg[i] * d2;
      a.samples[i + 1] += scale * (a1 + a2);
      b.samples[i + 1] += scale * (b1 + b2);
    }
    return F(a) * G(b);
  };
  return mc_expectation(f, sampler, n, 2);
}

// triple-path estimate of (T_{lambda,k1}(F) * T_{lambda,k2}(G))_lambda(y)
inline McEstimate mc_cto_of_ffts(const Functional& F, const Functional& G, const Kernel& k1,
                                 const Kernel& k2, const CtoSpec& spec34, double lambda,
                                 const WienerPath& y, const PathSampler& sampler,
                                 std::size_t n) {
  if (!(lambda > 0)) throw std::invalid_argument("mc_cto_of_ffts: lambda must be positive");
  spec34.validate();
  double scale = 1.0 / std::sqrt(lambda);
  WienerPath yg1 = gaussian_process_path(spec34.g1, y);
  WienerPath yg2 = gaussian_process_path(spec34.g2, y);
  const auto& h3g = spec34.h1.grid();
  const auto& h4g = spec34.h2.grid();
  const auto& k1g = k1.grid();
  const auto& k2g = k2.grid();
  auto f = [&](const std::vector<WienerPath>& xs) {
    const auto& x1 = xs[0].samples;
    const auto& x2 = xs[1].samples;
    const auto& x3 = xs[2].samples;
    WienerPath a = yg1, b = yg2;
    double s3 = 0, sk1 = 0, s4 = 0, sk2 = 0;
    for (std::size_t i = 0; i + 1 < x1.size(); ++i) {
      double d1 = x1[i + 1] - x1[i];
      s3 += h3g[i] * d1;
      sk1 += k1g[i] * (x2[i + 1] - x2[i]);
      s4 += h4g[i] * d1;
      sk2 += k2g[i] * (x3[i + 1] - x3[i]);
      a.samples[i + 1] += scale * (s3 + sk1);
      b.samples[i + 1] += scale * (s4 + sk2);
    }
    return F(a) * G(b);
  };
  return mc_expectation(f, sampler, n, 3);
}

}  // namespace ffc
