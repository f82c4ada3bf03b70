#pragma once

// Statistical verification of the rotation identities: a sum of independent
// Gaussian processes Z_{h1}(x1) + Z_{h2}(x2) matches Z_s(x) with
// s^2 = h1^2 + h2^2 in distribution, and two such sums built from a common
// path are independent exactly when h1 h3 + h2 h4 vanishes.

#include <complex>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "functional.hpp"
#include "kernel.hpp"
#include "path.hpp"

namespace ffc {

using Functional2 = std::function<Complex(const WienerPath&, const WienerPath&)>;

struct IndependenceCheck {
  bool independent = false;
  Kernel residual;  // h1 h3 + h2 h4 on the grid
};

inline IndependenceCheck independence_criterion(const Kernel& h1, const Kernel& h2,
                                                const Kernel& h3, const Kernel& h4,
                                                double tol = 1e-10) {
  Kernel residual = pointwise_lincomb(1.0, pointwise_product(h1, h3), 1.0,
                                      pointwise_product(h2, h4));
  bool ok = residual.max_abs() <= tol;
  return {ok, std::move(residual)};
}

struct RotationCase {
  Kernel h1, h2, h3, h4;
  double se_multiplier = 3.0;

  void validate() const {
    require_same_grid(h1, h2);
    require_same_grid(h1, h3);
    require_same_grid(h1, h4);
    require_nonzero(h1, "RotationCase.h1");
    require_nonzero(h2, "RotationCase.h2");
    require_nonzero(h3, "RotationCase.h3");
    require_nonzero(h4, "RotationCase.h4");
  }
};

struct RotationReport {
  McEstimate lhs, rhs;
  double delta = 0;
  double combined_se = 0;
  bool pass = false;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::size_t M = 0;

  json to_json() const {
    return json{
        {"lhs", json{{"mean", {lhs.mean.real(), lhs.mean.imag()}}, {"se", lhs.std_error}}},
        {"rhs", json{{"mean", {rhs.mean.real(), rhs.mean.imag()}}, {"se", rhs.std_error}}},
        {"delta", delta},
        {"combined_se", combined_se},
        {"pass", pass},
        {"seeds", {seed}},
        {"n", n},
        {"M", M}};
  }
};

inline RotationReport make_report(const McEstimate& lhs, const McEstimate& rhs,
                                  double se_multiplier, const PathSampler& sampler,
                                  std::size_t n) {
  RotationReport r;
  r.lhs = lhs;
  r.rhs = rhs;
  r.delta = std::abs(lhs.mean - rhs.mean);
  r.combined_se = std::hypot(lhs.std_error, rhs.std_error);
  // constants come back with zero SE; leave a floor so exact agreement passes
  r.pass = r.delta <= se_multiplier * r.combined_se + 1e-12;
  r.seed = sampler.seed();
  r.n = n;
  r.M = sampler.M();
  return r;
}

namespace detail {

// z = Z_{a}(x1,.) + Z_{b}(x2,.) accumulated in one pass
inline void gp_pair_sum(const Kernel& a, const Kernel& b, const std::vector<double>& x1,
                        const std::vector<double>& x2, WienerPath& out) {
  const auto& ga = a.grid();
  const auto& gb = b.grid();
  out.samples.resize(x1.size());
  out.samples[0] = 0;
  double acc = 0;
  for (std::size_t i = 0; i + 1 < x1.size(); ++i) {
    acc += ga[i] * (x1[i + 1] - x1[i]) + gb[i] * (x2[i + 1] - x2[i]);
    out.samples[i + 1] = acc;
  }
}

}  // namespace detail

// E[(Z_{h1}(x1,s)+Z_{h2}(x2,s)) (Z_{h3}(x1,t)+Z_{h4}(x2,t))] at requested (s,t)
inline std::vector<McEstimate> empirical_cross_covariance(
    const RotationCase& rc, const std::vector<std::pair<double, double>>& st_points,
    const PathSampler& sampler, std::size_t n) {
  rc.validate();
  std::size_t M = sampler.M();
  double T = sampler.T();
  auto to_index = [&](double t) {
    auto i = std::size_t(t / T * double(M) + 0.5);
    return std::min(i, M);
  };
  std::vector<McEstimate> out;
  for (auto [s, t] : st_points) {
    std::size_t is = to_index(s);
    std::size_t it = to_index(t);
    auto f = [&](const std::vector<WienerPath>& xs) {
      WienerPath za, zb;
      za.T = zb.T = T;
      detail::gp_pair_sum(rc.h1, rc.h2, xs[0].samples, xs[1].samples, za);
      detail::gp_pair_sum(rc.h3, rc.h4, xs[0].samples, xs[1].samples, zb);
      return Complex(za.samples[is] * zb.samples[it], 0.0);
    };
    out.push_back(mc_expectation(f, sampler, n, 2));
  }
  return out;
}

// two-sided check of the rotation identity on two coupled coordinates:
// E_{x1,x2}[F(Z_{h1}(x1)+Z_{h2}(x2), Z_{h3}(x1)+Z_{h4}(x2))]
//   = E_{x,y}[F(Z_{s(h1,h2)}(x), Z_{s(h3,h4)}(y))]
inline RotationReport verify_rotation_2d(const RotationCase& rc, const Functional2& F,
                                         const PathSampler& sampler, std::size_t n) {
  rc.validate();
  auto crit = independence_criterion(rc.h1, rc.h2, rc.h3, rc.h4);
  if (!crit.independent)
    throw std::invalid_argument(
        "verify_rotation_2d: h1 h3 + h2 h4 != 0, identity hypotheses unmet");

  double T = sampler.T();
  auto lhs_f = [&](const std::vector<WienerPath>& xs) {
    WienerPath za, zb;
    za.T = zb.T = T;
    detail::gp_pair_sum(rc.h1, rc.h2, xs[0].samples, xs[1].samples, za);
    detail::gp_pair_sum(rc.h3, rc.h4, xs[0].samples, xs[1].samples, zb);
    return F(za, zb);
  };
  McEstimate lhs = mc_expectation(lhs_f, sampler, n, 2);

  Kernel s12 = combine_s(rc.h1, rc.h2);
  Kernel s34 = combine_s(rc.h3, rc.h4);
  auto rhs_f = [&](const std::vector<WienerPath>& xs) {
    return F(gaussian_process_path(s12, xs[0]), gaussian_process_path(s34, xs[1]));
  };
  // fresh stream slots keep the two sides independent
  PathSampler rhs_sampler(sampler.seed() ^ 0x5DEECE66DULL, sampler.M(), sampler.T(),
                          sampler.antithetic());
  McEstimate rhs = mc_expectation(rhs_f, rhs_sampler, n, 2);

  return make_report(lhs, rhs, rc.se_multiplier, sampler, n);
}

// product form: one coupled double estimate against the product of two
// independent single estimates (delta-method SE for the product)
inline RotationReport verify_product_split_2d(const Functional& F, const Functional& G,
                                              const RotationCase& rc,
                                              const PathSampler& sampler, std::size_t n) {
  rc.validate();
  auto crit = independence_criterion(rc.h1, rc.h2, rc.h3, rc.h4);
  if (!crit.independent)
    throw std::invalid_argument(
        "verify_product_split_2d: h1 h3 + h2 h4 != 0, identity hypotheses unmet");

  double T = sampler.T();
  auto lhs_f = [&](const std::vector<WienerPath>& xs) {
    WienerPath za, zb;
    za.T = zb.T = T;
    detail::gp_pair_sum(rc.h1, rc.h2, xs[0].samples, xs[1].samples, za);
    detail::gp_pair_sum(rc.h3, rc.h4, xs[0].samples, xs[1].samples, zb);
    return F(za) * G(zb);
  };
  McEstimate lhs = mc_expectation(lhs_f, sampler, n, 2);

  Kernel s12 = combine_s(rc.h1, rc.h2);
  Kernel s34 = combine_s(rc.h3, rc.h4);
  PathSampler rs(sampler.seed() ^ 0x5DEECE66DULL, sampler.M(), sampler.T(),
                 sampler.antithetic());
  McEstimate ef = mc_expectation(
      [&](const std::vector<WienerPath>& xs) { return F(gaussian_process_path(s12, xs[0])); },
      rs, n, 1);
  PathSampler rs2(sampler.seed() ^ 0xB5026F5AA96619E9ULL, sampler.M(), sampler.T(),
                  sampler.antithetic());
  McEstimate eg = mc_expectation(
      [&](const std::vector<WienerPath>& xs) { return G(gaussian_process_path(s34, xs[0])); },
      rs2, n, 1);

  McEstimate rhs;
  rhs.mean = ef.mean * eg.mean;
  rhs.std_error = std::hypot(std::abs(eg.mean) * ef.std_error,
                             std::abs(ef.mean) * eg.std_error);
  rhs.n_samples = n;
  return make_report(lhs, rhs, rc.se_multiplier, sampler, n);
}

// three-path rotation: F(Z_{h1}(x1)+Z_{h2}(x2), Z_{h3}(x1)+Z_{h4}(x3));
// hypotheses require supp(h1) and supp(h3) to overlap in at most measure zero
inline RotationReport verify_rotation_3d(const RotationCase& rc, const Functional2& F,
                                         const PathSampler& sampler, std::size_t n,
                                         double support_tol = 1e-12) {
  rc.validate();
  SupportSet s1 = support(rc.h1, support_tol);
  SupportSet s3 = support(rc.h3, support_tol);
  double cell = sampler.T() / double(sampler.M());
  if (s1.intersection_measure(s3) > cell + 1e-12)
    throw std::invalid_argument(
        "verify_rotation_3d: supp(h1) and supp(h3) overlap, identity hypotheses unmet");

  double T = sampler.T();
  auto lhs_f = [&](const std::vector<WienerPath>& xs) {
    WienerPath za, zb;
    za.T = zb.T = T;
    detail::gp_pair_sum(rc.h1, rc.h2, xs[0].samples, xs[1].samples, za);
    detail::gp_pair_sum(rc.h3, rc.h4, xs[0].samples, xs[2].samples, zb);
    return F(za, zb);
  };
  McEstimate lhs = mc_expectation(lhs_f, sampler, n, 3);

  Kernel s12 = combine_s(rc.h1, rc.h2);
  Kernel s34 = combine_s(rc.h3, rc.h4);
  auto rhs_f = [&](const std::vector<WienerPath>& xs) {
    return F(gaussian_process_path(s12, xs[0]), gaussian_process_path(s34, xs[1]));
  };
  PathSampler rhs_sampler(sampler.seed() ^ 0x5DEECE66DULL, sampler.M(), sampler.T(),
                          sampler.antithetic());
  McEstimate rhs = mc_expectation(rhs_f, rhs_sampler, n, 2);

  return make_report(lhs, rhs, rc.se_multiplier, sampler, n);
}

// product form of the three-path rotation: coupled triple estimate of
// F(.) G(.) against the product of two independent single estimates
inline RotationReport verify_product_split_3d(const Functional& F, const Functional& G,
                                              const RotationCase& rc,
                                              const PathSampler& sampler, std::size_t n,
                                              double support_tol = 1e-12) {
  rc.validate();
  SupportSet s1 = support(rc.h1, support_tol);
  SupportSet s3 = support(rc.h3, support_tol);
  double cell = sampler.T() / double(sampler.M());
  if (s1.intersection_measure(s3) > cell + 1e-12)
    throw std::invalid_argument(
        "verify_product_split_3d: supp(h1) and supp(h3) overlap, identity hypotheses unmet");

  double T = sampler.T();
  auto lhs_f = [&](const std::vector<WienerPath>& xs) {
    WienerPath za, zb;
    za.T = zb.T = T;
    detail::gp_pair_sum(rc.h1, rc.h2, xs[0].samples, xs[1].samples, za);
    detail::gp_pair_sum(rc.h3, rc.h4, xs[0].samples, xs[2].samples, zb);
    return F(za) * G(zb);
  };
  McEstimate lhs = mc_expectation(lhs_f, sampler, n, 3);

  Kernel s12 = combine_s(rc.h1, rc.h2);
  Kernel s34 = combine_s(rc.h3, rc.h4);
  PathSampler rs(sampler.seed() ^ 0x5DEECE66DULL, sampler.M(), sampler.T(),
                 sampler.antithetic());
  McEstimate ef = mc_expectation(
      [&](const std::vector<WienerPath>& xs) { return F(gaussian_process_path(s12, xs[0])); },
      rs, n, 1);
  PathSampler rs2(sampler.seed() ^ 0xB5026F5AA96619E9ULL, sampler.M(), sampler.T(),
                  sampler.antithetic());
  McEstimate eg = mc_expectation(
      [&](const std::vector<WienerPath>& xs) { return G(gaussian_process_path(s34, xs[0])); },
      rs2, n, 1);

  McEstimate rhs;
  rhs.mean = ef.mean * eg.mean;
  rhs.std_error = std::hypot(std::abs(eg.mean) * ef.std_error,
                             std::abs(ef.mean) * eg.std_error);
  rhs.n_samples = n;
  return make_report(lhs, rhs, rc.se_multiplier, sampler, n);
}

}  // namespace ffc
