#pragma once

// Versioned verification bundles: the fixed test-functional battery, the
// named kernel configurations, randomized draws for the two factorization
// identities, and the three built-in suites exposed by the CLI
// ("examples", "paper-identities", "mc-battery").

#include <cmath>
#include <string>
#include <vector>

#include "functional.hpp"
#include "kernel.hpp"
#include "path.hpp"
#include "rotation.hpp"
#include "system.hpp"

namespace ffc::suites {

inline Kernel kexpr(const json& e, double T, std::size_t M) {
  return Kernel::from_expr(e, T, M);
}

// ----- named example systems --------------------------------------------------

inline KernelSystem example_61(double T, std::size_t M) {
  json indA = json{{"ind", {0.0, T / 2}}};
  json indB = json{{"ind", {T / 2, T}}};
  json sin2 = json{{"sin", {{"a", 2}}}};
  KernelSystem s;
  s.g1 = kexpr(json{{"op", "scale"},
                    {"c", 2.0},
                    {"args", json::array({json{{"op", "mul"},
                                               {"args", json::array({json{{"cos", {{"a", 2}}}}, indA})}}})}},
               T, M);
  s.g2 = kexpr(
      json{{"op", "mul"},
           {"args", json::array(
                        {json{{"op", "sub"},
                              {"args", json::array(
                                           {json{{"const", 3.0}},
                                            json{{"op", "scale"},
                                                 {"c", 4.0},
                                                 {"args", json::array({json{{"op", "mul"},
                                                                            {"args", json::array({sin2, sin2})}}})}}})}},
                         indB})}},
      T, M);
  s.k = kexpr(sin2, T, M);
  s.k1 = kexpr(json{{"sin", {{"a", 4}}}}, T, M);
  s.k2 = kexpr(json{{"sin", {{"a", 6}}}}, T, M);
  s.h1 = kexpr(indB, T, M);
  s.h2 = kexpr(indA, T, M);
  s.h3 = kexpr(json{{"op", "mul"}, {"args", json::array({json{{"cos", {{"a", 4}}}}, indB})}}, T, M);
  s.h4 = kexpr(json{{"op", "mul"}, {"args", json::array({json{{"cos", {{"a", 6}}}}, indA})}}, T, M);
  return s;
}

inline KernelSystem example_62(int l, int m, int n, double T, std::size_t M) {
  if (!(0 < l && l < m && m < n))
    throw std::invalid_argument("example_62: need positive l < m < n");
  Kernel g1 = kexpr(json{{"sin", {{"a", l}}}}, T, M);
  Kernel g2 = kexpr(json{{"sin", {{"a", m}}}}, T, M);
  Kernel k = kexpr(json{{"cos", {{"a", n}}}}, T, M);
  return generate_family_trig(g1, g2, k, SupportSet({{0.0, T / 2}}), SupportSet({{T / 2, T}}));
}

// ----- randomized draws ------------------------------------------------------

class DrawRng {
 public:
  explicit DrawRng(std::uint64_t seed, std::uint64_t stream = 0) : gen_(seed, stream, 0) {}
  double uniform(double a, double b) { return a + (b - a) * gen_.uniform(); }
  int pick(int n) { return int(gen_.next() % std::uint64_t(n)); }
  bool coin() { return (gen_.next() & 1) != 0; }

 private:
  rng::Xoshiro256 gen_;
};

// bounded nonzero kernel from the symbolic primitive set
inline Kernel random_primitive_kernel(DrawRng& rng, double T, std::size_t M) {
  switch (rng.pick(5)) {
    case 0: return kexpr(json{{"const", rng.uniform(0.3, 1.5) * (rng.coin() ? 1 : -1)}}, T, M);
    case 1:
      return scale_kernel(rng.uniform(0.5, 1.5),
                          kexpr(json{{"sin", {{"a", 1 + rng.pick(4)}}}}, T, M));
    case 2:
      return scale_kernel(rng.uniform(0.5, 1.5),
                          kexpr(json{{"cos", {{"a", 1 + rng.pick(4)}}}}, T, M));
    case 3: {
      Kernel a = kexpr(json{{"sin", {{"a", 1 + rng.pick(3)}}}}, T, M);
      Kernel b = kexpr(json{{"cos", {{"a", 1 + rng.pick(3)}}}}, T, M);
      return pointwise_lincomb(rng.uniform(0.3, 1.0), a, rng.uniform(0.3, 1.0), b);
    }
    default:
      return pointwise_lincomb(1.0, kexpr("t", T, M), rng.uniform(0.2, 1.0),
                               kexpr(json{{"const", 0.5}}, T, M));
  }
}

// a primitive kernel bounded away from zero (suitable as g or k generator)
inline Kernel random_nonvanishing_kernel(DrawRng& rng, double T, std::size_t M) {
  for (;;) {
    Kernel k = random_primitive_kernel(rng, T, M);
    if (k.max_abs() > 0.05) return k;
  }
}

inline ExpCombo random_combo(DrawRng& rng, double T, std::size_t M, int max_terms = 3) {
  ExpCombo f;
  int n = 1 + rng.pick(max_terms);
  for (int i = 0; i < n; ++i)
    f.add_term(Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)),
               random_primitive_kernel(rng, T, M));
  if (f.empty()) f.add_term(1.0, kexpr(json{{"const", 1.0}}, T, M));
  return f;
}

struct DrawResult {
  bool pass = false;
  ComboDiff diff;
  double q = 0;
};

// one randomized instance of the transform-of-convolution setting with
// h1 = c g1 k, h2 = -(1/c) g2 k, so g1 g2 k^2 + h1 h2 = 0 identically
struct FftOfCtoDraw {
  CtoSpec spec;
  Kernel k;
  ExpCombo F, G;
  double q = 0;
};

inline FftOfCtoDraw make_fft_of_cto_draw(std::uint64_t seed, double T, std::size_t M) {
  DrawRng rng(seed, 52);
  Kernel g1 = random_nonvanishing_kernel(rng, T, M);
  Kernel g2 = random_nonvanishing_kernel(rng, T, M);
  Kernel k = random_nonvanishing_kernel(rng, T, M);
  double c = rng.uniform(0.5, 2.0);
  FftOfCtoDraw d;
  d.spec = CtoSpec{g1, g2, scale_kernel(c, pointwise_product(g1, k)),
                   scale_kernel(-1.0 / c, pointwise_product(g2, k))};
  d.k = k;
  d.F = random_combo(rng, T, M);
  d.G = random_combo(rng, T, M);
  d.q = rng.uniform(0.5, 3.0) * (rng.coin() ? 1 : -1);
  return d;
}

inline DrawResult draw_fft_of_cto_factorization(std::uint64_t seed, double T, std::size_t M,
                                                double tol = 1e-10) {
  FftOfCtoDraw d = make_fft_of_cto_draw(seed, T, M);
  DrawResult r;
  r.q = d.q;
  TransformParam p = TransformParam::feynman(d.q);
  ExpCombo lhs = fft_of_cto_exp(d.F, d.G, d.spec, d.k, p);
  ExpCombo rhs = factorized_fft_of_cto(d.F, d.G, d.spec, d.k, p);
  r.diff = compare_combos(lhs, rhs);
  r.pass = r.diff.matched && r.diff.max_coeff_rel <= tol;
  return r;
}

// one randomized instance of the convolution-of-transforms setting with
// h3, h4 restricted to disjoint halves so m_L(supp h3 /\ supp h4) = 0
struct CtoOfFftsDraw {
  CtoSpec spec34;
  Kernel k1, k2;
  ExpCombo F, G;
  double q = 0;
};

inline CtoOfFftsDraw make_cto_of_ffts_draw(std::uint64_t seed, double T, std::size_t M) {
  DrawRng rng(seed, 54);
  Kernel indA = kexpr(json{{"ind", {0.0, T / 2}}}, T, M);
  Kernel indB = kexpr(json{{"ind", {T / 2, T}}}, T, M);
  Kernel h3 = pointwise_product(random_nonvanishing_kernel(rng, T, M), indA);
  Kernel h4 = pointwise_product(random_nonvanishing_kernel(rng, T, M), indB);
  while (h3.is_zero(1e-9)) h3 = pointwise_product(random_nonvanishing_kernel(rng, T, M), indA);
  while (h4.is_zero(1e-9)) h4 = pointwise_product(random_nonvanishing_kernel(rng, T, M), indB);
  CtoOfFftsDraw d;
  d.spec34 = CtoSpec{random_nonvanishing_kernel(rng, T, M),
                     random_nonvanishing_kernel(rng, T, M), h3, h4};
  d.k1 = random_nonvanishing_kernel(rng, T, M);
  d.k2 = random_nonvanishing_kernel(rng, T, M);
  d.F = random_combo(rng, T, M);
  d.G = random_combo(rng, T, M);
  d.q = rng.uniform(0.5, 3.0) * (rng.coin() ? 1 : -1);
  return d;
}

inline DrawResult draw_cto_of_ffts_factorization(std::uint64_t seed, double T, std::size_t M,
                                                 double tol = 1e-10) {
  CtoOfFftsDraw d = make_cto_of_ffts_draw(seed, T, M);
  DrawResult r;
  r.q = d.q;
  TransformParam p = TransformParam::feynman(d.q);
  ExpCombo lhs = cto_of_ffts_exp(d.F, d.G, d.k1, d.k2, d.spec34, p);
  ExpCombo rhs = factorized_cto_of_ffts(d.F, d.G, d.k1, d.k2, d.spec34, p);
  r.diff = compare_combos(lhs, rhs);
  r.pass = r.diff.matched && r.diff.max_coeff_rel <= tol;
  return r;
}

// random sound kernel system for the composed identity
inline KernelSystem draw_trig_system(std::uint64_t seed, double T, std::size_t M) {
  DrawRng rng(seed, 62);
  Kernel g1 = random_nonvanishing_kernel(rng, T, M);
  Kernel g2 = random_nonvanishing_kernel(rng, T, M);
  Kernel k = random_nonvanishing_kernel(rng, T, M);
  double split = T * rng.uniform(0.25, 0.75);
  split = std::round(split / T * double(M)) * T / double(M);  // grid-aligned partition
  return generate_family_trig(g1, g2, k, SupportSet({{0.0, split}}), SupportSet({{split, T}}));
}

// ----- fixed test-functional battery ----------------------------------------

// five bounded-growth two-argument functionals; u, v are fixed battery kernels
inline std::vector<Functional2> battery_2d(double T, std::size_t M) {
  Kernel u = kexpr(json{{"sin", {{"a", 1}}}}, T, M);
  Kernel v = kexpr(json{{"cos", {{"a", 2}}}}, T, M);
  std::size_t half = M / 2;
  return {
      // exponential in two PWZ coordinates
      [u, v](const WienerPath& a, const WienerPath& b) {
        return Complex(std::exp(0.5 * pwz_integral(u, a) + 0.5 * pwz_integral(v, b)), 0.0);
      },
      // quadratic polynomial in PWZ coordinates
      [u, v](const WienerPath& a, const WienerPath& b) {
        double s = pwz_integral(u, a), t = pwz_integral(v, b);
        return Complex(s * s + t + 0.5 * s * t, 0.0);
      },
      // endpoint product
      [](const WienerPath& a, const WienerPath& b) {
        return Complex(a.terminal() * b.terminal(), 0.0);
      },
      // bounded oscillatory functional of two time marginals
      [half](const WienerPath& a, const WienerPath& b) {
        return Complex(std::cos(a.terminal() + b.at_time_index(half)), 0.0);
      },
      // complex exponential (oscillatory) of one PWZ coordinate each
      [u, v](const WienerPath& a, const WienerPath& b) {
        return std::exp(Complex(0.0, pwz_integral(u, a) - pwz_integral(v, b)));
      }};
}

// single-argument companions for the product-split identity
inline std::vector<Functional> battery_1d(double T, std::size_t M) {
  Kernel u = kexpr(json{{"sin", {{"a", 1}}}}, T, M);
  return {
      [u](const WienerPath& a) { return Complex(std::exp(0.5 * pwz_integral(u, a)), 0.0); },
      [u](const WienerPath& a) {
        double s = pwz_integral(u, a);
        return Complex(s * s + 1.0, 0.0);
      },
      [](const WienerPath& a) { return Complex(std::cos(a.terminal()), 0.0); }};
}

// named kernel configurations with vanishing independence residual
inline std::vector<std::pair<std::string, RotationCase>> rotation_configs(double T,
                                                                          std::size_t M) {
  auto c = [&](const json& e) { return kexpr(e, T, M); };
  double r = 1.0 / std::sqrt(2.0);
  std::vector<std::pair<std::string, RotationCase>> out;
  // classical +/- rotation: (x1+x2)/sqrt2 and (x1-x2)/sqrt2
  out.push_back({"classical-pm",
                 RotationCase{c(json{{"const", r}}), c(json{{"const", r}}),
                              c(json{{"const", r}}), c(json{{"const", -r}})}});
  // cos/sin rotation with theta(t) = 2 pi t / T
  out.push_back({"bearman-cos-sin",
                 RotationCase{c(json{{"cos", {{"a", 2}}}}), c(json{{"sin", {{"a", 2}}}}),
                              c(json{{"op", "scale"},
                                     {"c", -1.0},
                                     {"args", json::array({json{{"sin", {{"a", 2}}}}})}}),
                              c(json{{"cos", {{"a", 2}}}})}});
  // disjoint indicators
  out.push_back({"indicator-disjoint",
                 RotationCase{c(json{{"ind", {0.0, T / 2}}}), c(json{{"ind", {T / 2, T}}}),
                              c(json{{"ind", {T / 2, T}}}), c(json{{"ind", {0.0, T / 2}}})}});
  // distinct-frequency swap/negate pairing
  out.push_back({"trig-family",
                 RotationCase{c(json{{"sin", {{"a", 1}}}}), c(json{{"sin", {{"a", 2}}}}),
                              c(json{{"sin", {{"a", 2}}}}),
                              c(json{{"op", "scale"},
                                     {"c", -1.0},
                                     {"args", json::array({json{{"sin", {{"a", 1}}}}})}})}});
  return out;
}

// disjoint-support (h1,h3) tuples for the three-path rotation
inline std::vector<std::pair<std::string, RotationCase>> rotation_configs_3d(double T,
                                                                             std::size_t M) {
  auto c = [&](const json& e) { return kexpr(e, T, M); };
  auto mul = [](const json& a, const json& b) {
    return json{{"op", "mul"}, {"args", json::array({a, b})}};
  };
  json indA = json{{"ind", {0.0, T / 2}}};
  json indB = json{{"ind", {T / 2, T}}};
  std::vector<std::pair<std::string, RotationCase>> out;
  out.emplace_back("halves-const", RotationCase{c(indA), c(json{{"const", 1.0}}), c(indB),
                                                c(json{{"const", 1.0}})});
  out.emplace_back("halves-trig",
                   RotationCase{c(mul(json{{"cos", {{"a", 2}}}}, indA)),
                                c(json{{"sin", {{"a", 1}}}}),
                                c(mul(json{{"cos", {{"a", 4}}}}, indB)), c(json{{"const", 0.7}})});
  out.emplace_back("quarters",
                   RotationCase{c(json{{"ind", {0.0, T / 4}}}), c(json{{"const", 0.5}}),
                                c(json{{"ind", {T / 2, 3 * T / 4}}}), c(json{{"sin", {{"a", 2}}}})});
  out.emplace_back("cosine-disjoint-pair",
                   RotationCase{c(mul(json{{"cos", {{"a", 4}}}}, indB)), c(json{{"const", 1.0}}),
                                c(mul(json{{"cos", {{"a", 6}}}}, indA)), c(json{{"const", 1.0}})});
  return out;
}

// ----- suite runners ---------------------------------------------------------

struct CheckResult {
  std::string name;
  bool pass = false;
  json detail;
};

struct SuiteResult {
  std::string name;
  std::vector<CheckResult> checks;

  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }

  // timestamp lives in exactly one field so golden-file comparisons can mask it
  json to_json(const std::string& timestamp) const {
    json arr = json::array();
    for (const auto& c : checks)
      arr.push_back(json{{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    return json{{"suite", name}, {"timestamp", timestamp}, {"pass", pass()}, {"checks", arr}};
  }
};

struct SuiteParams {
  std::uint64_t seed = 20240811;
  std::size_t n = 20000;
  std::size_t M = 256;
  double T = 1.0;
};

inline SuiteResult run_suite_examples(const SuiteParams& sp) {
  SuiteResult out;
  out.name = "examples";
  double T = sp.T;
  std::size_t M = sp.M;

  {
    auto rep = check_system(example_61(T, M), 1e-10);
    out.checks.push_back({"system-trig-indicator", rep.pass(), rep.to_json()});
  }
  for (auto [l, m, n] : {std::array<int, 3>{1, 2, 3}, std::array<int, 3>{2, 3, 5}}) {
    auto rep = check_system(example_62(l, m, n, T, M), 1e-10);
    out.checks.push_back({"system-trig-family-" + std::to_string(l) + std::to_string(m) +
                              std::to_string(n),
                          rep.pass(), rep.to_json()});
  }
  {
    DrawRng rng(sp.seed, 7);
    ExpCombo F = random_combo(rng, T, M);
    ExpCombo G = random_combo(rng, T, M);
    auto rep = verify_composed_identity(example_61(T, M), F, G, 1.0);
    out.checks.push_back({"composed-identity-indicator-system", rep.pass, rep.to_json()});
    auto rep2 = verify_composed_identity(example_62(1, 2, 3, T, M), F, G, -2.0);
    out.checks.push_back({"composed-identity-trig-system", rep2.pass, rep2.to_json()});
  }
  {
    // dyadic series family: residuals must shrink as the truncation deepens
    Kernel g1 = kexpr(json{{"sin", {{"a", 1}}}}, T, M);
    Kernel g2 = kexpr(json{{"cos", {{"a", 1}}}}, T, M);
    Kernel k = kexpr(json{{"const", 1.0}}, T, M);
    std::vector<double> residuals;
    bool monotone = true;
    for (std::size_t terms : {4, 8, 16, 32}) {
      auto rep = generate_family_haar(g1, g2, k, terms);
      residuals.push_back(rep.trunc_residual_A[0]);
      if (residuals.size() > 1 && residuals.back() >= residuals[residuals.size() - 2])
        monotone = false;
    }
    out.checks.push_back(
        {"haar-series-residual-decay", monotone, json{{"residuals", residuals}}});
  }
  return out;
}

inline SuiteResult run_suite_paper_identities(const SuiteParams& sp) {
  SuiteResult out;
  out.name = "paper-identities";
  double T = sp.T;
  std::size_t M = sp.M;
  for (int i = 0; i < 10; ++i) {
    auto r = draw_fft_of_cto_factorization(sp.seed + std::uint64_t(i), T, M);
    out.checks.push_back({"fft-of-cto-factorization-" + std::to_string(i), r.pass,
                          json{{"q", r.q},
                               {"max_coeff_rel", r.diff.max_coeff_rel},
                               {"matched", r.diff.matched}}});
    auto r2 = draw_cto_of_ffts_factorization(sp.seed + std::uint64_t(i), T, M);
    out.checks.push_back({"cto-of-ffts-factorization-" + std::to_string(i), r2.pass,
                          json{{"q", r2.q},
                               {"max_coeff_rel", r2.diff.max_coeff_rel},
                               {"matched", r2.diff.matched}}});
  }
  for (int i = 0; i < 5; ++i) {
    KernelSystem sys = draw_trig_system(sp.seed + 100 + std::uint64_t(i), T, M);
    DrawRng rng(sp.seed + 200 + std::uint64_t(i), 9);
    auto rep = verify_composed_identity(sys, random_combo(rng, T, M), random_combo(rng, T, M),
                                        rng.uniform(0.5, 2.5) * (rng.coin() ? 1 : -1));
    out.checks.push_back({"composed-identity-random-system-" + std::to_string(i), rep.pass,
                          rep.to_json()});
  }
  return out;
}

inline SuiteResult run_suite_mc_battery(const SuiteParams& sp) {
  SuiteResult out;
  out.name = "mc-battery";
  double T = sp.T;
  std::size_t M = sp.M;
  auto funcs = battery_2d(T, M);
  auto configs = rotation_configs(T, M);
  PathSampler sampler(sp.seed, M, T);
  for (const auto& [cname, rc] : configs)
    for (std::size_t fi = 0; fi < funcs.size(); ++fi) {
      auto rep = verify_rotation_2d(rc, funcs[fi], sampler, sp.n);
      out.checks.push_back(
          {"rotation2d-" + cname + "-f" + std::to_string(fi), rep.pass, rep.to_json()});
    }
  auto funcs3 = battery_2d(T, M);
  auto configs3 = rotation_configs_3d(T, M);
  for (const auto& [cname, rc] : configs3) {
    auto rep = verify_rotation_3d(rc, funcs3[0], sampler, sp.n);
    out.checks.push_back({"rotation3d-" + cname, rep.pass, rep.to_json()});
  }
  {
    // product-split form on the classical +/- configuration
    auto f1 = battery_1d(T, M);
    auto rep = verify_product_split_2d(f1[0], f1[2], configs[0].second, sampler, sp.n);
    out.checks.push_back({"product-split-classical-pm", rep.pass, rep.to_json()});
  }
  {
    // negative control: broken independence must be detected loudly
    auto c = [&](const json& e) { return kexpr(e, T, M); };
    RotationCase bad{c(json{{"const", 1.0}}), c(json{{"const", 1.0}}), c(json{{"const", 1.0}}),
                     c(json{{"const", 1.0}})};
    auto cov = empirical_cross_covariance(bad, {{T, T}}, sampler, sp.n);
    bool detected = std::abs(cov[0].mean) > 5.0 * cov[0].std_error;
    out.checks.push_back({"negative-control-dependence-detected", detected,
                          json{{"estimate", cov[0].mean.real()}, {"se", cov[0].std_error}}});
  }
  return out;
}

inline SuiteResult run_suite(const std::string& name, const SuiteParams& sp) {
  if (name == "examples") return run_suite_examples(sp);
  if (name == "paper-identities") return run_suite_paper_identities(sp);
  if (name == "mc-battery") return run_suite_mc_battery(sp);
  throw std::invalid_argument("unknown suite '" + name + "'");
}

}  // namespace ffc::suites
