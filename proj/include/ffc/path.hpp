#pragma once

// Discretized Wiener paths and Paley--Wiener--Zygmund integrals.
//
// Paths live on the uniform grid t_i = i*T/M with x(0)=0 and i.i.d.
// Normal(0, T/M) increments.  Sampling is counter-based: path index and
// stream slot are hashed into the generator state, so any path of any batch
// can be regenerated independently and batches are bit-identical for a fixed
// seed regardless of evaluation order.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kernel.hpp"

namespace ffc {

namespace rng {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// xoshiro256++
class Xoshiro256 {
 public:
  Xoshiro256(std::uint64_t seed, std::uint64_t slot, std::uint64_t index) {
    std::uint64_t h = seed;
    h ^= 0xA0761D6478BD642FULL * (slot + 1);
    h ^= 0xE7037ED1A0B428DBULL * (index + 0x9E3779B97F4A7C15ULL);
    for (auto& word : s_) word = splitmix64(h);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // uniform in (0,1)
  double uniform() { return (double(next() >> 11) + 0.5) * 0x1.0p-53; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
};

// Ziggurat normal sampler (128 layers, Doornik layout)
class ZigguratNormal {
 public:
  double operator()(Xoshiro256& g) const {
    const Tables& tb = tables();
    for (;;) {
      double u = 2.0 * g.uniform() - 1.0;
      unsigned i = unsigned(g.next() & 0x7F);
      if (std::abs(u) < tb.ratio[i]) return u * tb.x[i];
      if (i == 0) return tail(g, u < 0);
      double x = u * tb.x[i];
      double f0 = std::exp(-0.5 * (tb.x[i] * tb.x[i] - x * x));
      double f1 = std::exp(-0.5 * (tb.x[i + 1] * tb.x[i + 1] - x * x));
      if (f1 + g.uniform() * (f0 - f1) < 1.0) return x;
    }
  }

 private:
  static constexpr double kR = 3.442619855899;
  static constexpr double kV = 9.91256303526217e-3;

  struct Tables {
    double x[129];
    double ratio[128];
    Tables() {
      double f = std::exp(-0.5 * kR * kR);
      x[0] = kV / f;
      x[1] = kR;
      x[128] = 0.0;
      for (int i = 2; i < 128; ++i) {
        x[i] = std::sqrt(-2.0 * std::log(kV / x[i - 1] + std::exp(-0.5 * x[i - 1] * x[i - 1])));
      }
      for (int i = 0; i < 128; ++i) ratio[i] = x[i + 1] / x[i];
    }
  };

  static const Tables& tables() {
    static const Tables tb;
    return tb;
  }

  static double tail(Xoshiro256& g, bool negative) {
    double x, y;
    do {
      x = std::log(g.uniform()) / kR;
      y = std::log(g.uniform());
    } while (-2.0 * y < x * x);
    return negative ? x - kR : kR - x;
  }
};

}  // namespace rng

struct WienerPath {
  std::vector<double> samples;  // M+1 values, samples[0] == 0
  double T = 1.0;

  std::size_t M() const { return samples.empty() ? 0 : samples.size() - 1; }
  double at_time_index(std::size_t i) const { return samples[i]; }
  double terminal() const { return samples.back(); }
};

struct McEstimate {
  std::complex<double> mean;
  double std_error = 0;
  std::size_t n_samples = 0;
};

class PathSampler {
 public:
  PathSampler(std::uint64_t seed, std::size_t M, double T, bool antithetic = false)
      : seed_(seed), M_(M), T_(T), antithetic_(antithetic) {
    if (M < 1 || !(T > 0)) throw std::invalid_argument("PathSampler: need M >= 1 and T > 0");
  }

  std::uint64_t seed() const { return seed_; }
  std::size_t M() const { return M_; }
  double T() const { return T_; }
  bool antithetic() const { return antithetic_; }

  // cumulative path; scale multiplies every increment
  void sample_path_into(std::vector<double>& samples, std::size_t index,
                        std::uint64_t slot = 0, double scale = 1.0) const {
    samples.resize(M_ + 1);
    std::size_t base = antithetic_ ? index / 2 : index;
    double sign = (antithetic_ && (index & 1)) ? -1.0 : 1.0;
    rng::Xoshiro256 gen(seed_, slot, base);
    rng::ZigguratNormal normal;
    const double step = sign * scale * std::sqrt(T_ / double(M_));
    double acc = 0;
    samples[0] = 0;
    for (std::size_t i = 1; i <= M_; ++i) {
      acc += step * normal(gen);
      samples[i] = acc;
    }
  }

  WienerPath sample_path(std::size_t index, std::uint64_t slot = 0, double scale = 1.0) const {
    WienerPath p;
    p.T = T_;
    sample_path_into(p.samples, index, slot, scale);
    return p;
  }

  std::vector<WienerPath> sample_paths(std::size_t n, std::uint64_t slot = 0) const {
    if (n < 1) throw std::invalid_argument("sample_paths: n must be >= 1");
    std::vector<WienerPath> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = sample_path(i, slot);
    return out;
  }

 private:
  std::uint64_t seed_;
  std::size_t M_;
  double T_;
  bool antithetic_;
};

inline void require_same_grid(const Kernel& v, const WienerPath& x) {
  if (v.M() != x.M() || std::abs(v.T() - x.T) > 1e-12 * std::max(v.T(), x.T))
    throw std::invalid_argument("pwz_integral: kernel and path grids do not match");
}

// left-endpoint Riemann--Stieltjes sum: sum_i v(t_i) (x(t_{i+1}) - x(t_i))
inline double pwz_integral(const Kernel& v, const WienerPath& x) {
  require_same_grid(v, x);
  const auto& g = v.grid();
  const auto& s = x.samples;
  double acc = 0;
  for (std::size_t i = 0; i < v.M(); ++i) acc += g[i] * (s[i + 1] - s[i]);
  return acc;
}

// Z_h(x, t_j) = sum_{i<j} h(t_i) (x(t_{i+1}) - x(t_i)); h == 1 reproduces x
inline WienerPath gaussian_process_path(const Kernel& h, const WienerPath& x) {
  require_same_grid(h, x);
  WienerPath z;
  z.T = x.T;
  z.samples.resize(x.samples.size());
  const auto& g = h.grid();
  const auto& s = x.samples;
  double acc = 0;
  z.samples[0] = 0;
  for (std::size_t i = 0; i < h.M(); ++i) {
    acc += g[i] * (s[i + 1] - s[i]);
    z.samples[i + 1] = acc;
  }
  return z;
}

// functional over a tuple of independent paths (one RNG stream per slot)
using PathFunctional = std::function<std::complex<double>(const std::vector<WienerPath>&)>;

inline McEstimate mc_expectation(const PathFunctional& f, const PathSampler& sampler,
                                 std::size_t n, std::size_t n_slots = 1,
                                 const std::vector<double>& scales = {}) {
  if (n < 2) throw std::invalid_argument("mc_expectation: need n >= 2");
  if (n_slots < 1) throw std::invalid_argument("mc_expectation: need at least one path slot");
  if (!scales.empty() && scales.size() != n_slots)
    throw std::invalid_argument("mc_expectation: scales must match the number of path slots");

  std::vector<WienerPath> paths(n_slots);
  for (auto& p : paths) p.T = sampler.T();

  std::complex<double> mean = 0;
  double m2 = 0;  // sum of |v - running mean|^2 (Welford)
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t s = 0; s < n_slots; ++s)
      sampler.sample_path_into(paths[s].samples, i, s, scales.empty() ? 1.0 : scales[s]);
    std::complex<double> v = f(paths);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw std::runtime_error("mc_expectation: non-finite functional value at sample index " +
                               std::to_string(i));
    std::complex<double> d = v - mean;
    mean += d / double(i + 1);
    m2 += std::norm(d) * double(i) / double(i + 1);
  }
  McEstimate e;
  e.mean = mean;
  e.std_error = std::sqrt(m2 / double(n - 1) / double(n));
  e.n_samples = n;
  return e;
}

}  // namespace ffc
