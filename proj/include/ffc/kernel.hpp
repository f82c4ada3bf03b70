#pragma once

// Kernels on [0,T]: the weight functions h, k, g, u, v of the transform and
// convolution machinery.  A kernel is a uniform grid of M+1 samples plus,
// when it was built from the symbolic primitive set, an exact piecewise
// trig-polynomial form used for closed-form quadrature.  Grid-only kernels
// are accepted; the caller asserts bounded variation for those.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "trigpoly.hpp"

namespace ffc {

using json = nlohmann::ordered_json;

struct Interval {
  double lo = 0;
  double hi = 0;
  double length() const { return hi - lo; }
};

// disjoint closed intervals inside [0,T], sorted
class SupportSet {
 public:
  SupportSet() = default;
  explicit SupportSet(std::vector<Interval> iv) : intervals_(std::move(iv)) {}

  const std::vector<Interval>& intervals() const { return intervals_; }
  bool empty() const { return intervals_.empty(); }

  double measure() const {
    double s = 0;
    for (const auto& iv : intervals_) s += iv.length();
    return s;
  }

  double intersection_measure(const SupportSet& o) const {
    double s = 0;
    for (const auto& a : intervals_)
      for (const auto& b : o.intervals_) {
        double lo = std::max(a.lo, b.lo);
        double hi = std::min(a.hi, b.hi);
        if (hi > lo) s += hi - lo;
      }
    return s;
  }

 private:
  std::vector<Interval> intervals_;
};

class Kernel {
 public:
  Kernel() = default;

  static Kernel from_expr(const json& expr, double T, std::size_t M);
  static Kernel from_literal(const json& literal);  // {"T":..,"M":..,"kernel":..}

  static Kernel from_grid(std::vector<double> grid, double T) {
    if (grid.size() < 2) throw std::invalid_argument("Kernel: grid needs at least 2 samples");
    Kernel k;
    k.T_ = T;
    k.M_ = grid.size() - 1;
    k.grid_ = std::move(grid);
    k.expr_ = json::object({{"grid", k.grid_}});
    return k;
  }

  static Kernel from_form(TrigPoly form, json expr, std::size_t M) {
    Kernel k;
    k.T_ = form.horizon();
    k.M_ = M;
    k.grid_.resize(M + 1);
    for (std::size_t i = 0; i <= M; ++i) k.grid_[i] = form.eval(k.T_ * double(i) / double(M));
    k.form_ = std::move(form);
    k.expr_ = std::move(expr);
    return k;
  }

  double T() const { return T_; }
  std::size_t M() const { return M_; }
  const std::vector<double>& grid() const { return grid_; }
  const json& expr() const { return expr_; }
  bool has_form() const { return form_.has_value(); }
  const std::optional<TrigPoly>& form() const { return form_; }

  double max_abs() const {
    double m = 0;
    for (double v : grid_) m = std::max(m, std::abs(v));
    return m;
  }

  bool is_zero(double tol = 0.0) const { return max_abs() <= tol; }

  // exact square when known: (self form)^2, or the stored square form for
  // kernels produced as square roots (combine_s results)
  std::optional<TrigPoly> squared_form() const {
    if (form_) return form_->squared();
    return form_sq_;
  }

  json to_literal() const {
    return json{{"T", T_}, {"M", M_}, {"kernel", expr_}};
  }

  friend Kernel combine_s(const Kernel& h1, const Kernel& h2);
  friend Kernel pointwise_product(const Kernel& a, const Kernel& b);
  friend Kernel pointwise_lincomb(double c1, const Kernel& a, double c2, const Kernel& b);

 private:
  double T_ = 1.0;
  std::size_t M_ = 0;
  std::vector<double> grid_;
  std::optional<TrigPoly> form_;     // exact form of the kernel itself
  std::optional<TrigPoly> form_sq_;  // exact form of its square when form_ is absent
  json expr_;
};

inline void require_same_grid(const Kernel& a, const Kernel& b) {
  if (a.M() != b.M() || std::abs(a.T() - b.T()) > 1e-12 * std::max(a.T(), b.T()))
    throw std::invalid_argument("kernel grid mismatch: all kernels in one computation must share (T,M)");
}

// \int_0^T v^2 dt; exact when a closed form is available, composite trapezoid otherwise
inline double l2_norm_sq(const Kernel& v) {
  if (auto sq = v.squared_form()) return sq->integral();
  const auto& g = v.grid();
  double dt = v.T() / double(v.M());
  double s = 0.5 * (g.front() * g.front() + g.back() * g.back());
  for (std::size_t i = 1; i < v.M(); ++i) s += g[i] * g[i];
  return s * dt;
}

// \int_0^T u^2 k^2 dt = ||u k||_2^2, usable when either factor only has an
// exact square (combined kernels s(h1,h2))
inline double l2_norm_sq_product(const Kernel& u, const Kernel& k) {
  require_same_grid(u, k);
  auto su = u.squared_form();
  auto sk = k.squared_form();
  if (su && sk) return ((*su) * (*sk)).integral();
  const auto& a = u.grid();
  const auto& b = k.grid();
  double dt = u.T() / double(u.M());
  auto f = [&](std::size_t i) { double p = a[i] * b[i]; return p * p; };
  double s = 0.5 * (f(0) + f(u.M()));
  for (std::size_t i = 1; i < u.M(); ++i) s += f(i);
  return s * dt;
}

inline Kernel pointwise_product(const Kernel& a, const Kernel& b) {
  require_same_grid(a, b);
  Kernel r;
  r.T_ = a.T_;
  r.M_ = a.M_;
  r.grid_.resize(a.grid_.size());
  for (std::size_t i = 0; i < r.grid_.size(); ++i) r.grid_[i] = a.grid_[i] * b.grid_[i];
  if (a.form_ && b.form_) r.form_ = (*a.form_) * (*b.form_);
  r.expr_ = json{{"op", "mul"}, {"args", json::array({a.expr_, b.expr_})}};
  return r;
}

inline Kernel pointwise_lincomb(double c1, const Kernel& a, double c2, const Kernel& b) {
  require_same_grid(a, b);
  Kernel r;
  r.T_ = a.T_;
  r.M_ = a.M_;
  r.grid_.resize(a.grid_.size());
  for (std::size_t i = 0; i < r.grid_.size(); ++i)
    r.grid_[i] = c1 * a.grid_[i] + c2 * b.grid_[i];
  if (a.form_ && b.form_) r.form_ = (*a.form_) * c1 + (*b.form_) * c2;
  r.expr_ = json{{"op", "add"},
                 {"args", json::array(
                     {json{{"op", "scale"}, {"c", c1}, {"args", json::array({a.expr_})}},
                      json{{"op", "scale"}, {"c", c2}, {"args", json::array({b.expr_})}}})}};
  return r;
}

inline Kernel scale_kernel(double c, const Kernel& a) {
  return pointwise_lincomb(c, a, 0.0, a);
}

// nonnegative root s with s^2 = h1^2 + h2^2 pointwise
inline Kernel combine_s(const Kernel& h1, const Kernel& h2) {
  require_same_grid(h1, h2);
  Kernel r;
  r.T_ = h1.T_;
  r.M_ = h1.M_;
  r.grid_.resize(h1.grid_.size());
  for (std::size_t i = 0; i < r.grid_.size(); ++i)
    r.grid_[i] = std::hypot(h1.grid_[i], h2.grid_[i]);
  auto s1 = h1.squared_form();
  auto s2 = h2.squared_form();
  if (s1 && s2) {
    TrigPoly sq = (*s1) + (*s2);
    if (sq.piecewise_constant())
      r.form_ = sq.piecewise_sqrt();
    else
      r.form_sq_ = std::move(sq);
  }
  r.expr_ = json{{"op", "hypot"}, {"args", json::array({h1.expr_, h2.expr_})}};
  return r;
}

// smallest union of grid-aligned intervals covering {t_i : |v(t_i)| > tol}
inline SupportSet support(const Kernel& v, double tol = 1e-12) {
  if (tol < 0) throw std::invalid_argument("support: tol must be nonnegative");
  std::vector<Interval> out;
  const auto& g = v.grid();
  double dt = v.T() / double(v.M());
  std::size_t i = 0;
  while (i < g.size()) {
    if (std::abs(g[i]) > tol) {
      std::size_t j = i;
      while (j + 1 < g.size() && std::abs(g[j + 1]) > tol) ++j;
      out.push_back({i * dt, j * dt});
      i = j + 1;
    } else {
      ++i;
    }
  }
  return SupportSet(std::move(out));
}

// Haar family: index 1 is the constant T^{-1/2}; indices >= 2 enumerate the
// dyadic wavelets level by level starting at level 1, so every one of them is
// supported inside [0,T/2] or inside [T/2,T].  The level-0 full-support
// wavelet is deliberately left out; completeness within each half interval,
// which is what the dyadic expansion machinery needs, is unaffected.
inline Kernel haar_function(int n, double T, std::size_t M) {
  if (n < 1) throw std::invalid_argument("haar_function: index must be >= 1");
  json expr = json{{"haar", json{{"n", n}}}};
  if (n == 1)
    return Kernel::from_form(TrigPoly::constant(T, 1.0 / std::sqrt(T)), expr, M);
  int rem = n - 2;
  int level = 1;
  while (rem >= (1 << level)) {
    rem -= (1 << level);
    ++level;
  }
  int pos = rem;
  std::size_t cells = std::size_t(1) << (level + 1);
  if (M < cells || M % cells != 0)
    throw std::invalid_argument("haar_function: grid too coarse for requested dyadic level");
  double width = T / double(std::size_t(1) << level);
  double lo = pos * width;
  double mid = lo + width / 2;
  double hi = lo + width;
  double amp = std::sqrt(double(std::size_t(1) << level) / T);
  TrigPoly up = TrigPoly::indicator(T, lo, mid) * amp;
  TrigPoly down = TrigPoly::indicator(T, mid, hi) * amp;
  return Kernel::from_form(up - down, expr, M);
}

inline std::vector<Kernel> haar_basis(int n_max, double T, std::size_t M) {
  if (n_max < 1) throw std::invalid_argument("haar_basis: n_max must be positive");
  std::vector<Kernel> out;
  out.reserve(std::size_t(n_max));
  for (int n = 1; n <= n_max; ++n) out.push_back(haar_function(n, T, M));
  return out;
}

// ----- expression parsing ---------------------------------------------------

namespace detail {

inline Kernel parse_expr(const json& e, double T, std::size_t M);

inline std::vector<Kernel> parse_args(const json& e, double T, std::size_t M) {
  if (!e.contains("args") || !e["args"].is_array() || e["args"].empty())
    throw std::invalid_argument("kernel expr: op node needs a nonempty args array");
  std::vector<Kernel> out;
  for (const auto& a : e["args"]) out.push_back(parse_expr(a, T, M));
  return out;
}

inline Kernel parse_expr(const json& e, double T, std::size_t M) {
  if (e.is_string() && e.get<std::string>() == "t")
    return Kernel::from_form(TrigPoly::time(T), e, M);
  if (!e.is_object()) throw std::invalid_argument("kernel expr: node must be an object or \"t\"");
  if (e.contains("const"))
    return Kernel::from_form(TrigPoly::constant(T, e["const"].get<double>()), e, M);
  if (e.contains("sin"))
    return Kernel::from_form(TrigPoly::sin_wave(T, e["sin"]["a"].get<int>()), e, M);
  if (e.contains("cos"))
    return Kernel::from_form(TrigPoly::cos_wave(T, e["cos"]["a"].get<int>()), e, M);
  if (e.contains("ind")) {
    double lo = e["ind"][0].get<double>();
    double hi = e["ind"][1].get<double>();
    return Kernel::from_form(TrigPoly::indicator(T, lo, hi), e, M);
  }
  if (e.contains("haar")) return haar_function(e["haar"]["n"].get<int>(), T, M);
  if (e.contains("grid")) {
    auto g = e["grid"].get<std::vector<double>>();
    if (g.size() != M + 1)
      throw std::invalid_argument("kernel expr: grid leaf must carry M+1 samples");
    return Kernel::from_grid(std::move(g), T);
  }
  if (e.contains("op")) {
    std::string op = e["op"].get<std::string>();
    auto args = parse_args(e, T, M);
    if (op == "add" || op == "mul") {
      Kernel acc = args[0];
      for (std::size_t i = 1; i < args.size(); ++i)
        acc = (op == "add") ? pointwise_lincomb(1.0, acc, 1.0, args[i])
                            : pointwise_product(acc, args[i]);
      return acc;
    }
    if (op == "sub") {
      if (args.size() != 2) throw std::invalid_argument("kernel expr: sub takes two args");
      return pointwise_lincomb(1.0, args[0], -1.0, args[1]);
    }
    if (op == "scale") {
      if (args.size() != 1 || !e.contains("c"))
        throw std::invalid_argument("kernel expr: scale takes one arg and a coefficient c");
      return scale_kernel(e["c"].get<double>(), args[0]);
    }
    if (op == "hypot") {
      if (args.size() != 2) throw std::invalid_argument("kernel expr: hypot takes two args");
      return combine_s(args[0], args[1]);
    }
    throw std::invalid_argument("kernel expr: unknown op '" + op + "'");
  }
  throw std::invalid_argument("kernel expr: unrecognized node: " + e.dump());
}

}  // namespace detail

inline Kernel Kernel::from_expr(const json& expr, double T, std::size_t M) {
  if (!(T > 0) || M < 1) throw std::invalid_argument("Kernel: need T > 0 and M >= 1");
  Kernel k = detail::parse_expr(expr, T, M);
  k.expr_ = expr;  // preserve the literal tree for lossless round-trips
  return k;
}

inline Kernel Kernel::from_literal(const json& literal) {
  if (!literal.contains("T") || !literal.contains("M") || !literal.contains("kernel"))
    throw std::invalid_argument("kernel literal: expected {\"T\":..,\"M\":..,\"kernel\":..}");
  return from_expr(literal["kernel"], literal["T"].get<double>(),
                   literal["M"].get<std::size_t>());
}

inline double max_abs_diff(const Kernel& a, const Kernel& b) {
  require_same_grid(a, b);
  double m = 0;
  for (std::size_t i = 0; i < a.grid().size(); ++i)
    m = std::max(m, std::abs(a.grid()[i] - b.grid()[i]));
  return m;
}

}  // namespace ffc
