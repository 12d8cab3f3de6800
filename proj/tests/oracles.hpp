#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library's algorithms; structures are plain lists of index sets.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <vector>

namespace oracle {

using Sets = std::vector<std::vector<int>>;

inline bool contains_all(const std::vector<int>& set, std::uint64_t x) {
  return std::all_of(set.begin(), set.end(), [&](int i) { return (x >> i) & 1u; });
}

inline bool phi(const Sets& paths, std::uint64_t x) {
  return std::any_of(paths.begin(), paths.end(), [&](const auto& p) { return contains_all(p, x); });
}

/// Minimal cuts by subset search in order of size.
inline std::vector<std::uint64_t> cuts(const Sets& paths, int n) {
  std::vector<std::uint64_t> masks;
  for (const auto& p : paths) {
    std::uint64_t m = 0;
    for (int i : p) m |= std::uint64_t{1} << i;
    masks.push_back(m);
  }
  std::vector<std::uint64_t> out;
  for (int size = 1; size <= n; ++size) {
    for (std::uint64_t c = 0; c < (std::uint64_t{1} << n); ++c) {
      if (__builtin_popcountll(c) != size) continue;
      bool hits = std::all_of(masks.begin(), masks.end(), [&](std::uint64_t m) { return (m & c) != 0; });
      bool minimal = std::none_of(out.begin(), out.end(), [&](std::uint64_t k) { return (k & c) == k; });
      if (hits && minimal) out.push_back(c);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Sum over all 2^n states of P(x) phi(x).
inline double reliability(const Sets& paths, const std::vector<double>& p) {
  const int n = static_cast<int>(p.size());
  double h = 0.0;
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
    if (!phi(paths, x)) continue;
    double w = 1.0;
    for (int i = 0; i < n; ++i) w *= ((x >> i) & 1u) ? p[i] : 1.0 - p[i];
    h += w;
  }
  return h;
}

/// h(1_i, p) - h(0_i, p).
inline double birnbaum(const Sets& paths, std::vector<double> p, int i) {
  p[i] = 1.0;
  double up = reliability(paths, p);
  p[i] = 0.0;
  return up - reliability(paths, p);
}

/// Fraction of critical state vectors for i.
inline double structural(const Sets& paths, int n, int i) {
  std::uint64_t count = 0;
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
    if ((x >> i) & 1u) continue;
    if (phi(paths, x | (std::uint64_t{1} << i)) && !phi(paths, x)) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(std::uint64_t{1} << (n - 1));
}

/// Probability that i is the component whose failure stops the system, with
/// all failure orders equally likely. Enumerates n! orders.
inline std::vector<double> barlow_proschan(const Sets& paths, int n) {
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> hits(static_cast<std::size_t>(n), 0.0);
  double total = 0.0;
  do {
    std::uint64_t x = (std::uint64_t{1} << n) - 1;
    for (int i : order) {
      x &= ~(std::uint64_t{1} << i);
      if (!phi(paths, x)) {
        hits[static_cast<std::size_t>(i)] += 1.0;
        break;
      }
    }
    total += 1.0;
  } while (std::next_permutation(order.begin(), order.end()));
  for (double& h : hits) h /= total;
  return hits;
}

/// Random coherent structure: every component lies on some path.
inline Sets random_structure(std::mt19937_64& rng, int n) {
  std::uniform_int_distribution<int> count(1, std::max(1, n));
  std::bernoulli_distribution coin(0.35);
  for (;;) {
    Sets paths;
    int k = count(rng);
    for (int j = 0; j < k; ++j) {
      std::vector<int> p;
      for (int i = 0; i < n; ++i) {
        if (coin(rng)) p.push_back(i);
      }
      if (!p.empty()) paths.push_back(p);
    }
    std::set<int> used;
    for (const auto& p : paths) used.insert(p.begin(), p.end());
    if (static_cast<int>(used.size()) != n) continue;
    // Drop dominated paths so every component stays relevant.
    Sets minimal;
    for (const auto& p : paths) {
      bool dominated = false;
      for (const auto& q : paths) {
        if (&p == &q) continue;
        bool subset = std::includes(p.begin(), p.end(), q.begin(), q.end());
        if (subset && (q.size() < p.size() || &q < &p)) dominated = true;
      }
      if (!dominated) minimal.push_back(p);
    }
    std::set<int> relevant;
    for (const auto& p : minimal) relevant.insert(p.begin(), p.end());
    if (static_cast<int>(relevant.size()) == n) return minimal;
  }
}

/// Gauss-Legendre rule on [a, b] with m nodes (Newton on P_m).
class GaussLegendre {
 public:
  explicit GaussLegendre(int m) {
    for (int k = 1; k <= m; ++k) {
      double x = std::cos(M_PI * (k - 0.25) / (m + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int j = 2; j <= m; ++j) {
          double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
          p0 = p1;
          p1 = p2;
        }
        dp = m * (x * p1 - p0) / (x * x - 1.0);
        double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      nodes_.push_back(x);
      weights_.push_back(2.0 / ((1.0 - x * x) * dp * dp));
    }
  }

  template <typename F>
  double integrate(F f, double a, double b) const {
    double s = 0.0;
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
      s += weights_[k] * f(0.5 * (b - a) * nodes_[k] + 0.5 * (a + b));
    }
    return 0.5 * (b - a) * s;
  }

  /// Composite rule over `panels` equal pieces.
  template <typename F>
  double integrate(F f, double a, double b, int panels) const {
    double s = 0.0, h = (b - a) / panels;
    for (int j = 0; j < panels; ++j) s += integrate(f, a + j * h, a + (j + 1) * h);
    return s;
  }

 private:
  std::vector<double> nodes_, weights_;
};

/// Weibull survival exp(-(t/lambda)^k), written out independently.
inline double weibull_survival(double t, double lambda, double k) {
  return t <= 0.0 ? 1.0 : std::exp(-std::pow(t / lambda, k));
}

inline double weibull_density(double t, double lambda, double k) {
  if (t <= 0.0) return 0.0;
  return (k / lambda) * std::pow(t / lambda, k - 1.0) * std::exp(-std::pow(t / lambda, k));
}

/// Spearman rank correlation with average ranks for ties.
inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
    std::vector<double> r(v.size());
    for (std::size_t s = 0; s < idx.size();) {
      std::size_t e = s;
      while (e + 1 < idx.size() && v[idx[e + 1]] == v[idx[s]]) ++e;
      for (std::size_t k = s; k <= e; ++k) r[idx[k]] = 0.5 * static_cast<double>(s + e) + 1.0;
      s = e + 1;
    }
    return r;
  };
  auto ra = ranks(a), rb = ranks(b);
  const double n = static_cast<double>(a.size());
  double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n, mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

/// The bundled network's four routes as zero-based component indices.
inline Sets city_paths() { return {{0, 1, 2, 7, 11}, {0, 1, 4, 8, 10, 11}, {3, 5, 8, 10, 11}, {3, 6, 9, 10, 11}}; }

}  // namespace oracle
