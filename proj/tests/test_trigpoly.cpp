#include <doctest.h>

#include <cmath>

#include <ffc/trigpoly.hpp>

using ffc::TrigPoly;

namespace {

double trapezoid(const TrigPoly& p, std::size_t M) {
  double T = p.horizon();
  double s = 0.5 * (p.eval(0.0) + p.eval(T));
  for (std::size_t i = 1; i < M; ++i) s += p.eval(T * double(i) / double(M));
  return s * T / double(M);
}

}  // namespace

TEST_CASE("polynomial and trigonometric integrals are exact") {
  double T = 1.0;
  TrigPoly t = TrigPoly::time(T);
  CHECK((t * t).integral() == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  TrigPoly s2 = TrigPoly::sin_wave(T, 2);  // sin(2 pi t)
  CHECK((s2 * s2).integral() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(s2.integral() == doctest::Approx(0.0).epsilon(1e-14));

  TrigPoly c2 = TrigPoly::cos_wave(T, 2);
  CHECK((c2 * c2).integral() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK((s2 * c2).integral() == doctest::Approx(0.0).epsilon(1e-14));

  // mixed power-trig term integrates via the antiderivative recurrence:
  // int_0^1 t sin(2 pi t) dt = -1/(2 pi)
  CHECK((t * s2).integral() == doctest::Approx(-1.0 / (2.0 * M_PI)).epsilon(1e-13));
}

TEST_CASE("trapezoid quadrature agrees with the closed form at M=4096") {
  double T = 1.0;
  TrigPoly p = TrigPoly::time(T) * TrigPoly::time(T);
  CHECK(std::abs(trapezoid(p, 4096) - 1.0 / 3.0) < 1e-6);
  TrigPoly q = TrigPoly::sin_wave(T, 2) * TrigPoly::sin_wave(T, 2);
  CHECK(std::abs(trapezoid(q, 4096) - 0.5) < 1e-6);
}

TEST_CASE("indicators integrate and multiply by interval intersection") {
  double T = 2.0;
  TrigPoly a = TrigPoly::indicator(T, 0.0, 1.5);
  TrigPoly b = TrigPoly::indicator(T, 1.0, 2.0);
  CHECK(a.integral() == doctest::Approx(1.5).epsilon(1e-14));
  CHECK((a * b).integral() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK((a - a).integral() == doctest::Approx(0.0));
}

TEST_CASE("evaluation uses the right-limit convention at jumps") {
  double T = 1.0;
  TrigPoly ind = TrigPoly::indicator(T, 0.25, 0.75);
  CHECK(ind.eval(0.25) == 1.0);   // left-closed
  CHECK(ind.eval(0.75) == 0.0);   // right-open
  CHECK(ind.eval(0.5) == 1.0);
  TrigPoly full = TrigPoly::indicator(T, 0.5, T);
  CHECK(full.eval(T) == 1.0);     // no jump inside the domain when d == T
  CHECK(full.eval(0.5) == 1.0);
}

TEST_CASE("piecewise-constant detection and exact square roots") {
  double T = 1.0;
  TrigPoly s = TrigPoly::sin_wave(T, 1);
  TrigPoly c = TrigPoly::cos_wave(T, 1);
  TrigPoly one = s * s + c * c;  // == 1 after product-to-sum cancellation
  CHECK(one.piecewise_constant());
  CHECK(one.piecewise_sqrt().eval(0.37) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_FALSE((s * s).piecewise_constant());

  TrigPoly mix = TrigPoly::indicator(T, 0.0, 0.5) * 4.0 + TrigPoly::indicator(T, 0.5, 1.0) * 9.0;
  TrigPoly root = mix.piecewise_sqrt();
  CHECK(root.eval(0.2) == doctest::Approx(2.0));
  CHECK(root.eval(0.8) == doctest::Approx(3.0));
}

TEST_CASE("triple angle identity holds as a trig polynomial") {
  // sin(3w) = 3 sin(w) - 4 sin^3(w) with w = 2 pi t / T
  double T = 1.0;
  TrigPoly s = TrigPoly::sin_wave(T, 2);
  TrigPoly lhs = TrigPoly::sin_wave(T, 6);
  TrigPoly rhs = s * 3.0 - s * s * s * 4.0;
  TrigPoly diff = lhs - rhs;
  for (int i = 0; i <= 64; ++i) CHECK(std::abs(diff.eval(double(i) / 64.0)) < 1e-12);
  CHECK(std::abs((diff * diff).integral()) < 1e-24);
}
