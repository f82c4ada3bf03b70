#pragma once

// Piecewise trigonometric polynomials on [0,T] with exact integration.
//
// Each piece is a finite sum of terms  t^p * (a cos(k pi t / T) + b sin(k pi t / T))
// with integer p >= 0 and integer frequency index k >= 0.  The class is closed
// under addition, subtraction and multiplication, so squares and products of
// kernels built from {constants, t, sin(a pi t/T), cos(a pi t/T), indicators,
// Haar functions} stay in the class and integrate in closed form.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ffc {

struct TrigTerm {
  int pow = 0;   // power of t
  int freq = 0;  // frequency index: angular frequency is freq*pi/T
  double a = 0;  // coefficient of t^pow cos(freq pi t/T)
  double b = 0;  // coefficient of t^pow sin(freq pi t/T)
};

namespace detail {

// indefinite integrals of t^p cos(w t) and t^p sin(w t), evaluated at t
inline double antideriv_cos(int p, double w, double t);

inline double antideriv_sin(int p, double w, double t) {
  if (p == 0) return -std::cos(w * t) / w;
  return -std::pow(t, p) * std::cos(w * t) / w +
         (p / w) * antideriv_cos(p - 1, w, t);
}

inline double antideriv_cos(int p, double w, double t) {
  if (p == 0) return std::sin(w * t) / w;
  return std::pow(t, p) * std::sin(w * t) / w -
         (p / w) * antideriv_sin(p - 1, w, t);
}

}  // namespace detail

class TrigPoly {
 public:
  TrigPoly() = default;

  explicit TrigPoly(double T) : horizon_(T), breaks_{0.0, T}, pieces_(1) {
    if (!(T > 0)) throw std::invalid_argument("TrigPoly: horizon must be positive");
  }

  static TrigPoly constant(double T, double c) {
    TrigPoly p(T);
    if (c != 0.0) p.pieces_[0].push_back({0, 0, c, 0});
    return p;
  }

  static TrigPoly time(double T) {
    TrigPoly p(T);
    p.pieces_[0].push_back({1, 0, 1.0, 0});
    return p;
  }

  // sin(k pi t / T) resp. cos(k pi t / T)
  static TrigPoly sin_wave(double T, int k) {
    TrigPoly p(T);
    p.pieces_[0].push_back({0, k, 0, 1.0});
    return p;
  }

  static TrigPoly cos_wave(double T, int k) {
    TrigPoly p(T);
    p.pieces_[0].push_back({0, k, 1.0, 0});
    return p;
  }

  // indicator of [c,d); the sample at t==T belongs to the last piece, so an
  // indicator with d==T evaluates to 1 at T (no jump inside the domain)
  static TrigPoly indicator(double T, double c, double d) {
    if (c < 0 || d > T || c >= d)
      throw std::invalid_argument("TrigPoly: bad indicator interval");
    TrigPoly p(T);
    p.breaks_ = {0.0};
    if (c > 0) p.breaks_.push_back(c);
    p.breaks_.push_back(d < T ? d : T);
    if (d < T) p.breaks_.push_back(T);
    p.breaks_.erase(std::unique(p.breaks_.begin(), p.breaks_.end()), p.breaks_.end());
    p.pieces_.assign(p.breaks_.size() - 1, {});
    for (std::size_t i = 0; i + 1 < p.breaks_.size(); ++i) {
      double mid = 0.5 * (p.breaks_[i] + p.breaks_[i + 1]);
      if (mid >= c && mid < d) p.pieces_[i].push_back({0, 0, 1.0, 0});
    }
    return p;
  }

  double horizon() const { return horizon_; }

  // right-limit convention at interior breakpoints; t==T evaluates on the last piece
  double eval(double t) const {
    std::size_t i = piece_index(t);
    double s = 0;
    for (const auto& tm : pieces_[i]) {
      double tp = tm.pow == 0 ? 1.0 : std::pow(t, tm.pow);
      if (tm.freq == 0) {
        s += tp * tm.a;
      } else {
        double w = tm.freq * pi_ / horizon_;
        s += tp * (tm.a * std::cos(w * t) + tm.b * std::sin(w * t));
      }
    }
    return s;
  }

  double integral() const {
    double s = 0;
    for (std::size_t i = 0; i + 1 < breaks_.size(); ++i)
      s += piece_integral(pieces_[i], breaks_[i], breaks_[i + 1]);
    return s;
  }

  TrigPoly operator+(const TrigPoly& o) const { return combine(o, +1.0); }
  TrigPoly operator-(const TrigPoly& o) const { return combine(o, -1.0); }

  TrigPoly operator*(double c) const {
    TrigPoly r = *this;
    for (auto& piece : r.pieces_)
      for (auto& tm : piece) { tm.a *= c; tm.b *= c; }
    r.tidy();
    return r;
  }

  TrigPoly operator*(const TrigPoly& o) const {
    check_compatible(o);
    TrigPoly r(horizon_);
    r.breaks_ = merged_breaks(o);
    r.pieces_.assign(r.breaks_.size() - 1, {});
    for (std::size_t i = 0; i + 1 < r.breaks_.size(); ++i) {
      double mid = 0.5 * (r.breaks_[i] + r.breaks_[i + 1]);
      const auto& pa = pieces_[piece_index(mid)];
      const auto& pb = o.pieces_[o.piece_index(mid)];
      std::map<std::pair<int, int>, std::pair<double, double>> acc;
      for (const auto& x : pa)
        for (const auto& y : pb) mul_terms(x, y, acc);
      for (const auto& [key, ab] : acc)
        r.pieces_[i].push_back({key.first, key.second, ab.first, ab.second});
    }
    r.tidy();
    return r;
  }

  TrigPoly squared() const { return (*this) * (*this); }

  // true when every piece is a constant (within tol, relative to the largest
  // coefficient); used to recognize exact square roots of combined kernels
  bool piecewise_constant(double tol = 1e-13) const {
    double scale = 0;
    for (const auto& piece : pieces_)
      for (const auto& tm : piece) scale = std::max({scale, std::abs(tm.a), std::abs(tm.b)});
    double cut = tol * std::max(scale, 1.0);
    for (const auto& piece : pieces_)
      for (const auto& tm : piece)
        if ((tm.pow != 0 || tm.freq != 0) && (std::abs(tm.a) > cut || std::abs(tm.b) > cut))
          return false;
    return true;
  }

  // exact square root of a nonnegative piecewise-constant poly
  TrigPoly piecewise_sqrt() const {
    TrigPoly r(horizon_);
    r.breaks_ = breaks_;
    r.pieces_.assign(breaks_.size() - 1, {});
    for (std::size_t i = 0; i + 1 < breaks_.size(); ++i) {
      double c = 0;
      for (const auto& tm : pieces_[i])
        if (tm.pow == 0 && tm.freq == 0) c += tm.a;
      if (c < 0) c = 0;
      double root = std::sqrt(c);
      if (root != 0.0) r.pieces_[i].push_back({0, 0, root, 0});
    }
    return r;
  }

  const std::vector<double>& breakpoints() const { return breaks_; }

 private:
  static constexpr double pi_ = 3.141592653589793238462643383279502884;

  double horizon_ = 0;
  std::vector<double> breaks_;
  std::vector<std::vector<TrigTerm>> pieces_;

  std::size_t piece_index(double t) const {
    auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
    std::size_t i = (it == breaks_.begin()) ? 0 : std::size_t(it - breaks_.begin()) - 1;
    return std::min(i, pieces_.size() - 1);
  }

  void check_compatible(const TrigPoly& o) const {
    if (std::abs(horizon_ - o.horizon_) > 1e-12 * std::max(horizon_, o.horizon_))
      throw std::invalid_argument("TrigPoly: horizon mismatch");
  }

  std::vector<double> merged_breaks(const TrigPoly& o) const {
    std::vector<double> m = breaks_;
    m.insert(m.end(), o.breaks_.begin(), o.breaks_.end());
    std::sort(m.begin(), m.end());
    std::vector<double> out;
    double snap = 1e-12 * horizon_;
    for (double v : m)
      if (out.empty() || v - out.back() > snap) out.push_back(v);
    out.front() = 0.0;
    out.back() = horizon_;
    return out;
  }

  TrigPoly combine(const TrigPoly& o, double sign) const {
    check_compatible(o);
    TrigPoly r(horizon_);
    r.breaks_ = merged_breaks(o);
    r.pieces_.assign(r.breaks_.size() - 1, {});
    for (std::size_t i = 0; i + 1 < r.breaks_.size(); ++i) {
      double mid = 0.5 * (r.breaks_[i] + r.breaks_[i + 1]);
      std::map<std::pair<int, int>, std::pair<double, double>> acc;
      for (const auto& tm : pieces_[piece_index(mid)]) {
        auto& ab = acc[{tm.pow, tm.freq}];
        ab.first += tm.a;
        ab.second += tm.b;
      }
      for (const auto& tm : o.pieces_[o.piece_index(mid)]) {
        auto& ab = acc[{tm.pow, tm.freq}];
        ab.first += sign * tm.a;
        ab.second += sign * tm.b;
      }
      for (const auto& [key, ab] : acc)
        r.pieces_[i].push_back({key.first, key.second, ab.first, ab.second});
    }
    r.tidy();
    return r;
  }

  static void mul_terms(const TrigTerm& x, const TrigTerm& y,
                        std::map<std::pair<int, int>, std::pair<double, double>>& acc) {
    int p = x.pow + y.pow;
    int ks = x.freq + y.freq;
    int kd = x.freq - y.freq;
    // cos*cos, sin*sin, sin*cos, cos*sin product-to-sum expansion
    auto add = [&](int k, double ca, double cb) {
      if (k < 0) { k = -k; cb = -cb; }
      auto& ab = acc[{p, k}];
      ab.first += ca;
      ab.second += cb;
    };
    add(kd, 0.5 * (x.a * y.a + x.b * y.b), 0.5 * (x.b * y.a - x.a * y.b));
    add(ks, 0.5 * (x.a * y.a - x.b * y.b), 0.5 * (x.b * y.a + x.a * y.b));
  }

  void tidy() {
    double scale = 0;
    for (const auto& piece : pieces_)
      for (const auto& tm : piece) scale = std::max({scale, std::abs(tm.a), std::abs(tm.b)});
    double cut = 1e-15 * scale;
    for (auto& piece : pieces_) {
      std::vector<TrigTerm> keep;
      for (auto& tm : piece) {
        if (std::abs(tm.a) <= cut) tm.a = 0;
        if (std::abs(tm.b) <= cut) tm.b = 0;
        if (tm.a != 0 || tm.b != 0) keep.push_back(tm);
      }
      piece = std::move(keep);
    }
  }

  double piece_integral(const std::vector<TrigTerm>& terms, double x0, double x1) const {
    double s = 0;
    for (const auto& tm : terms) {
      if (tm.freq == 0) {
        s += tm.a * (std::pow(x1, tm.pow + 1) - std::pow(x0, tm.pow + 1)) / (tm.pow + 1);
      } else {
        double w = tm.freq * pi_ / horizon_;
        if (tm.a != 0)
          s += tm.a * (detail::antideriv_cos(tm.pow, w, x1) - detail::antideriv_cos(tm.pow, w, x0));
        if (tm.b != 0)
          s += tm.b * (detail::antideriv_sin(tm.pow, w, x1) - detail::antideriv_sin(tm.pow, w, x0));
      }
    }
    return s;
  }
};

}  // namespace ffc
