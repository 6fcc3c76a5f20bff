#pragma once

// Brute-force reference implementations written straight from the metric definitions.
// They share nothing with the library beyond the Matrix container.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "socsim/matrix.hpp"

namespace oracle {

using socsim::Matrix;

inline double density_directed(const Matrix& a) {
  const std::size_t n = a.size();
  double s = 0.0;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v)
      if (u != v) s += a(u, v);
  return s / (double(n) * double(n - 1));
}

inline double density_undirected(const Matrix& a) {
  const std::size_t n = a.size();
  double s = 0.0;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v)
      if (u < v) s += a(u, v);
  return 2.0 * s / (double(n) * double(n - 1));
}

inline double out_strength(const Matrix& a, std::size_t u) {
  double k = 0.0;
  for (std::size_t v = 0; v < a.size(); ++v) k += a(u, v);
  return k;
}

inline std::vector<double> clustering_directed(const Matrix& a) {
  const std::size_t n = a.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t u = 0; u < n; ++u) {
    const double k = out_strength(a, u);
    if (k <= 1.0) continue;
    double num = 0.0;
    for (std::size_t v = 0; v < n; ++v)
      for (std::size_t w = 0; w < n; ++w)
        if (v != w) num += a(u, v) * a(v, w) * a(w, u);
    out[u] = num / (k * (k - 1.0));
  }
  return out;
}

inline std::vector<double> clustering_undirected(const Matrix& a) {
  const std::size_t n = a.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t u = 0; u < n; ++u) {
    const double k = out_strength(a, u);
    if (k <= 1.0) continue;
    int links = 0;
    for (std::size_t v = 0; v < n; ++v)
      for (std::size_t w = v + 1; w < n; ++w)
        if (a(u, v) > 0 && a(u, w) > 0 && a(v, w) > 0) ++links;
    out[u] = 2.0 * links / (k * (k - 1.0));
  }
  return out;
}

inline double mean(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return xs.empty() ? 0.0 : s / double(xs.size());
}

// Reachability closure of the underlying undirected graph.
inline std::vector<std::vector<bool>> weak_reach(const Matrix& a) {
  const std::size_t n = a.size();
  std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
  for (std::size_t u = 0; u < n; ++u) {
    r[u][u] = true;
    for (std::size_t v = 0; v < n; ++v)
      if (a(u, v) > 0 || a(v, u) > 0) r[u][v] = true;
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (r[i][k] && r[k][j]) r[i][j] = true;
  return r;
}

// Largest weak component; on equal sizes the one containing the smallest node index.
inline std::vector<std::size_t> largest_component(const Matrix& a) {
  const auto r = weak_reach(a);
  std::vector<std::size_t> best;
  for (std::size_t u = 0; u < a.size(); ++u) {
    std::vector<std::size_t> comp;
    for (std::size_t v = 0; v < a.size(); ++v)
      if (r[u][v]) comp.push_back(v);
    if (comp.size() > best.size()) best = comp;
  }
  return best;
}

inline double lcc(const Matrix& a) { return double(largest_component(a).size()) / double(a.size()); }

// Floyd-Warshall hop distances inside the largest component.
inline std::optional<double> aspl(const Matrix& a) {
  const auto members = largest_component(a);
  const std::size_t m = members.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> d(m, std::vector<double>(m, inf));
  for (std::size_t i = 0; i < m; ++i) {
    d[i][i] = 0.0;
    for (std::size_t j = 0; j < m; ++j)
      if (i != j && a(members[i], members[j]) > 0) d[i][j] = 1.0;
  }
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
  double sum = 0.0;
  int pairs = 0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (i != j && d[i][j] < inf) sum += d[i][j], ++pairs;
  if (pairs == 0) return std::nullopt;
  return sum / pairs;
}

inline double modularity(const Matrix& a, const std::vector<int>& g) {
  const std::size_t n = a.size();
  double e = 0.0;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v) e += a(u, v);
  std::vector<double> kout(n, 0.0), kin(n, 0.0);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v) kout[u] += a(u, v), kin[v] += a(u, v);
  double q = 0.0;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v)
      if (g[u] == g[v]) q += a(u, v) - kout[u] * kin[v] / e;
  return q / e;
}

inline double homophily(const Matrix& a, const std::vector<int>& g) {
  const std::size_t n = a.size();
  double e = 0.0, cross = 0.0;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v) {
      e += a(u, v);
      if (g[u] != g[v]) cross += a(u, v);
    }
  double sq = 0.0;
  const int groups = *std::max_element(g.begin(), g.end()) + 1;
  for (int r = 0; r < groups; ++r) {
    const double share = double(std::count(g.begin(), g.end(), r)) / double(n);
    sq += share * share;
  }
  return cross / (e * (1.0 - sq));
}

// Every set partition of n nodes as restricted growth strings.
inline std::vector<std::vector<int>> all_partitions(std::size_t n) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(n, 0);
  auto rec = [&](auto& self, std::size_t i, int used) -> void {
    if (i == n) {
      out.push_back(cur);
      return;
    }
    for (int c = 0; c <= used; ++c) {
      cur[i] = c;
      self(self, i + 1, std::max(used, c + 1));
    }
  };
  if (n == 0) return {{}};
  cur[0] = 0;
  rec(rec, 1, 1);
  return out;
}

struct BestPartition {
  double q = -2.0;
  std::vector<std::vector<int>> argmax;  // all partitions attaining q within tolerance
};

inline BestPartition best_partition(const Matrix& a, double tol = 1e-12) {
  BestPartition best;
  for (const auto& p : all_partitions(a.size())) {
    const double q = modularity(a, p);
    if (q > best.q + tol) {
      best.q = q;
      best.argmax = {p};
    } else if (std::abs(q - best.q) <= tol) {
      best.argmax.push_back(p);
    }
  }
  return best;
}

// Canonical relabeling in order of first appearance.
inline std::vector<int> canonical(const std::vector<int>& g) {
  std::vector<int> seen, out;
  for (int x : g) {
    auto it = std::find(seen.begin(), seen.end(), x);
    if (it == seen.end()) {
      out.push_back(int(seen.size()));
      seen.push_back(x);
    } else {
      out.push_back(int(it - seen.begin()));
    }
  }
  return out;
}

// --- random graphs --------------------------------------------------------

struct GraphClass {
  bool directed;
  bool weighted;
};

inline Matrix random_graph(std::mt19937_64& rng, std::size_t n, GraphClass cls) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double p = 0.15 + 0.7 * unit(rng);
  Matrix a(n);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v) {
      if (u == v || (!cls.directed && v < u)) continue;
      if (unit(rng) >= p) continue;
      const double w = cls.weighted ? 0.05 + 0.95 * unit(rng) : 1.0;
      a(u, v) = w;
      if (!cls.directed) a(v, u) = w;
    }
  return a;
}

inline std::vector<int> random_groups(std::mt19937_64& rng, std::size_t n, int k) {
  std::vector<int> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = int(i % std::size_t(k));
  std::shuffle(g.begin(), g.end(), rng);
  return g;
}

inline Matrix from_edges(std::size_t n, const std::vector<std::pair<int, int>>& edges, bool undirected,
                         double w = 1.0) {
  Matrix a(n);
  for (auto [u, v] : edges) {
    a(u, v) = w;
    if (undirected) a(v, u) = w;
  }
  return a;
}

}  // namespace oracle
