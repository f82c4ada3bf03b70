#include <doctest.h>

#include <cmath>

#include <ffc/path.hpp>
#include <ffc/suites.hpp>

using namespace ffc;

namespace {
Kernel ke(const json& e, double T = 1.0, std::size_t M = 256) {
  return Kernel::from_expr(e, T, M);
}
}  // namespace

TEST_CASE("path sampler statistics match the Wiener law") {
  double T = 1.0;
  std::size_t M = 256, n = 20000;
  PathSampler sampler(101, M, T);

  auto mean_T = mc_expectation(
      [](const std::vector<WienerPath>& xs) { return Complex(xs[0].terminal(), 0); }, sampler, n);
  CHECK(std::abs(mean_T.mean) <= 3.0 * mean_T.std_error);

  auto var_T = mc_expectation(
      [](const std::vector<WienerPath>& xs) {
        return Complex(xs[0].terminal() * xs[0].terminal(), 0);
      },
      sampler, n);
  CHECK(std::abs(var_T.mean.real() - T) <= 3.0 * var_T.std_error);

  // Cov(x(1/4), x(3/4)) = 1/4
  auto cov = mc_expectation(
      [M](const std::vector<WienerPath>& xs) {
        return Complex(xs[0].at_time_index(M / 4) * xs[0].at_time_index(3 * M / 4), 0);
      },
      sampler, n);
  CHECK(std::abs(cov.mean.real() - 0.25) <= 3.0 * cov.std_error);
}

TEST_CASE("pwz integral basics") {
  PathSampler sampler(5, 256, 1.0);
  WienerPath x = sampler.sample_path(0);
  CHECK(pwz_integral(ke(json{{"const", 0.0}}), x) == 0.0);
  CHECK(pwz_integral(ke(json{{"const", 1.0}}), x) == doctest::Approx(x.terminal()).epsilon(1e-14));
  CHECK_THROWS(pwz_integral(ke(json{{"const", 1.0}}, 1.0, 128), x));
}

TEST_CASE("pwz of sin kernel is Gaussian with variance 1/2") {
  std::size_t n = 20000;
  PathSampler sampler(7, 256, 1.0);
  Kernel v = ke(json{{"sin", {{"a", 2}}}});
  auto m = mc_expectation(
      [&](const std::vector<WienerPath>& xs) { return Complex(pwz_integral(v, xs[0]), 0); },
      sampler, n);
  CHECK(std::abs(m.mean) <= 3.0 * m.std_error);
  auto v2 = mc_expectation(
      [&](const std::vector<WienerPath>& xs) {
        double s = pwz_integral(v, xs[0]);
        return Complex(s * s, 0);
      },
      sampler, n);
  CHECK(std::abs(v2.mean.real() - 0.5) <= 3.0 * v2.std_error);
}

TEST_CASE("the process-integral identity holds exactly per path") {
  double T = 1.0;
  std::size_t M = 512;
  PathSampler sampler(11, M, T);
  std::vector<std::pair<Kernel, Kernel>> pairs;
  suites::DrawRng rng(2024, 3);
  for (int i = 0; i < 10; ++i)
    pairs.emplace_back(suites::random_primitive_kernel(rng, T, M),
                       suites::random_primitive_kernel(rng, T, M));
  for (std::size_t p = 0; p < 100; ++p) {
    WienerPath x = sampler.sample_path(p);
    for (const auto& [v, h] : pairs) {
      double lhs = pwz_integral(v, gaussian_process_path(h, x));
      double rhs = pwz_integral(pointwise_product(v, h), x);
      CHECK(std::abs(lhs - rhs) <= 1e-12);
    }
  }
}

TEST_CASE("gaussian_process_path endpoints") {
  PathSampler sampler(13, 256, 1.0);
  WienerPath x = sampler.sample_path(0);
  WienerPath same = gaussian_process_path(ke(json{{"const", 1.0}}), x);
  for (std::size_t i = 0; i < x.samples.size(); ++i)
    CHECK(same.samples[i] == doctest::Approx(x.samples[i]).epsilon(1e-13));
  WienerPath zero = gaussian_process_path(ke(json{{"const", 0.0}}), x);
  for (double s : zero.samples) CHECK(s == 0.0);
}

TEST_CASE("gaussian process cross-covariance matches the kernel overlap") {
  // Cov(Z_{chi_[0,1/2]}(x, 1/2), Z_1(x, 1)) = int_0^{1/2} chi = 1/2
  std::size_t M = 256, n = 20000;
  PathSampler sampler(17, M, 1.0);
  Kernel h1 = ke(json{{"ind", {0.0, 0.5}}});
  Kernel h2 = ke(json{{"const", 1.0}});
  auto cov = mc_expectation(
      [&](const std::vector<WienerPath>& xs) {
        WienerPath a = gaussian_process_path(h1, xs[0]);
        WienerPath b = gaussian_process_path(h2, xs[0]);
        return Complex(a.at_time_index(M / 2) * b.terminal(), 0);
      },
      sampler, n);
  CHECK(std::abs(cov.mean.real() - 0.5) <= 3.0 * cov.std_error);
}

TEST_CASE("exponential integration formula at modest scale") {
  // E[exp(<v, rho x>)] = exp(rho^2 ||v||^2 / 2)
  std::size_t n = 20000;
  PathSampler sampler(19, 256, 1.0);
  Kernel v = ke(json{{"sin", {{"a", 2}}}});
  double rho = 1.0;
  auto m = mc_expectation(
      [&](const std::vector<WienerPath>& xs) {
        return Complex(std::exp(rho * pwz_integral(v, xs[0])), 0);
      },
      sampler, n);
  CHECK(std::abs(m.mean.real() - std::exp(0.25)) <= 3.0 * m.std_error);
}

TEST_CASE("antithetic batches realize the sign symmetry exactly") {
  std::size_t n = 2000;
  PathSampler anti(23, 128, 1.0, true);
  auto f_plus = [](const std::vector<WienerPath>& xs) {
    return Complex(std::cos(xs[0].terminal()) + xs[0].terminal(), 0);
  };
  auto f_minus = [](const std::vector<WienerPath>& xs) {
    return Complex(std::cos(-xs[0].terminal()) - xs[0].terminal(), 0);
  };
  auto a = mc_expectation(f_plus, anti, n);
  auto b = mc_expectation(f_minus, anti, n);
  CHECK(a.mean.real() == doctest::Approx(b.mean.real()).epsilon(1e-12));
}

TEST_CASE("sampling is deterministic and slot-independent") {
  PathSampler s1(42, 128, 1.0), s2(42, 128, 1.0);
  WienerPath a = s1.sample_path(3, 1), b = s2.sample_path(3, 1);
  CHECK(a.samples == b.samples);
  WienerPath c = s1.sample_path(3, 2);
  CHECK(a.samples != c.samples);
  // constant functional has zero SE
  auto e = mc_expectation([](const std::vector<WienerPath>&) { return Complex(2.5, 0); }, s1, 100);
  CHECK(e.mean == Complex(2.5, 0));
  CHECK(e.std_error == 0.0);
}
