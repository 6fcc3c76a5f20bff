#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <vector>

#include "socsim/matrix.hpp"
#include "socsim/types.hpp"

// Network statistics over an adjacency matrix where A(u, v) > 0 means an edge u -> v.
// Undirected graphs are passed as symmetric matrices.
namespace socsim::metrics {

enum class Variant { Directed, Undirected };

struct FitDivergence : DomainError {
  using DomainError::DomainError;
};

inline double density(const Matrix& a, Variant variant) {
  const std::size_t n = a.size();
  if (n < 2) throw DomainError("density needs at least two nodes");
  double sum = 0.0;
  if (variant == Variant::Directed) {
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = 0; v < n; ++v)
        if (u != v) sum += a(u, v);
  } else {
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = u + 1; v < n; ++v) sum += 2.0 * a(u, v);
  }
  return sum / (static_cast<double>(n) * (n - 1));
}

struct Clustering {
  std::vector<double> local;
  double global = 0.0;
};

// Directed: closed 3-cycles u -> v -> v' -> u over k_out (k_out - 1).
// Undirected: 2 E_u / (k_u (k_u - 1)). Nodes with degree <= 1 score 0.
inline Clustering clustering(const Matrix& a, Variant variant) {
  const std::size_t n = a.size();
  Clustering out;
  out.local.assign(n, 0.0);
  std::vector<std::vector<std::size_t>> nbrs(n);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v)
      if (u != v && a(u, v) > 0.0) nbrs[u].push_back(v);

  for (std::size_t u = 0; u < n; ++u) {
    double k = 0.0;
    for (std::size_t v = 0; v < n; ++v) k += a(u, v);
    if (k <= 1.0) continue;
    if (variant == Variant::Directed) {
      double closed = 0.0;
      for (std::size_t v : nbrs[u])
        for (std::size_t w : nbrs[v])
          if (w != v && w != u) closed += a(u, v) * a(v, w) * a(w, u);
      out.local[u] = closed / (k * (k - 1.0));
    } else {
      int links = 0;
      const auto& nu = nbrs[u];
      for (std::size_t i = 0; i < nu.size(); ++i)
        for (std::size_t j = i + 1; j < nu.size(); ++j)
          if (a(nu[i], nu[j]) > 0.0) ++links;
      out.local[u] = 2.0 * links / (k * (k - 1.0));
    }
  }
  if (n > 0) out.global = std::accumulate(out.local.begin(), out.local.end(), 0.0) / n;
  return out;
}

// Weakly connected component labels (union-find over the underlying undirected graph).
inline std::vector<std::size_t> weak_components(const Matrix& a) {
  const std::size_t n = a.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v)
      if (u != v && a(u, v) > 0.0) {
        auto ru = find(u), rv = find(v);
        if (ru != rv) parent[std::max(ru, rv)] = std::min(ru, rv);
      }
  std::vector<std::size_t> label(n);
  for (std::size_t u = 0; u < n; ++u) label[u] = find(u);
  return label;
}

// Members of the largest weak component; ties go to the component holding the lowest index.
inline std::vector<std::size_t> largest_component(const Matrix& a) {
  const auto label = weak_components(a);
  std::map<std::size_t, std::size_t> sizes;
  for (auto l : label) ++sizes[l];
  std::size_t best = 0, best_size = 0;
  for (const auto& [root, size] : sizes)
    if (size > best_size) best = root, best_size = size;
  std::vector<std::size_t> members;
  for (std::size_t u = 0; u < label.size(); ++u)
    if (label[u] == best) members.push_back(u);
  return members;
}

inline double lcc(const Matrix& a) {
  if (a.size() == 0) throw DomainError("lcc needs at least one node");
  return static_cast<double>(largest_component(a).size()) / a.size();
}

// Mean directed hop distance over reachable ordered pairs inside the largest weak
// component. Empty when no pair is reachable.
inline std::optional<double> aspl(const Matrix& a) {
  const auto members = largest_component(a);
  std::vector<bool> in(a.size(), false);
  for (auto m : members) in[m] = true;

  double total = 0.0;
  std::size_t pairs = 0;
  std::vector<int> dist(a.size());
  for (std::size_t src : members) {
    std::fill(dist.begin(), dist.end(), -1);
    std::queue<std::size_t> q;
    dist[src] = 0;
    q.push(src);
    while (!q.empty()) {
      const auto x = q.front();
      q.pop();
      for (std::size_t y = 0; y < a.size(); ++y) {
        if (y == x || !in[y] || a(x, y) <= 0.0 || dist[y] >= 0) continue;
        dist[y] = dist[x] + 1;
        q.push(y);
      }
    }
    for (std::size_t dst : members)
      if (dst != src && dist[dst] > 0) total += dist[dst], ++pairs;
  }
  if (pairs == 0) return std::nullopt;
  return total / pairs;
}

inline double total_weight(const Matrix& a) {
  return std::accumulate(a.data().begin(), a.data().end(), 0.0);
}

// Community labels per node index; any integer labels are accepted.
using Partition = std::vector<int>;

inline double modularity(const Matrix& a, const Partition& g) {
  const std::size_t n = a.size();
  if (g.size() != n) throw DomainError("partition size does not match the graph");
  const double e = total_weight(a);
  if (!(e > 0.0)) throw DomainError("modularity is undefined on a graph without edges");
  std::map<int, double> internal, out_deg, in_deg;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v) {
      const double w = a(u, v);
      if (w == 0.0) continue;
      out_deg[g[u]] += w;
      in_deg[g[v]] += w;
      if (g[u] == g[v]) internal[g[u]] += w;
    }
  double q = 0.0;
  for (const auto& [c, kout] : out_deg) {
    auto it = in_deg.find(c);
    const double kin = it == in_deg.end() ? 0.0 : it->second;
    q -= kout * kin / (e * e);
  }
  for (const auto& [c, w] : internal) q += w / e;
  return q;
}

// Observed cross-group weight over its expectation under random mixing.
inline double homophily(const Matrix& a, const Partition& groups) {
  const std::size_t n = a.size();
  if (groups.size() != n) throw DomainError("grouping size does not match the graph");
  std::map<int, std::size_t> sizes;
  for (int g : groups) ++sizes[g];
  if (sizes.size() < 2) throw DomainError("homophily needs at least two groups");
  const double e = total_weight(a);
  if (!(e > 0.0)) throw DomainError("homophily is undefined on a graph without edges");
  double mix = 1.0;
  for (const auto& [g, size] : sizes) {
    const double share = static_cast<double>(size) / n;
    mix -= share * share;
  }
  double cross = 0.0;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v)
      if (groups[u] != groups[v]) cross += a(u, v);
  return cross / (e * mix);
}

enum class DegreeDirection { Out, In, Undirected };

// Unweighted degree (number of neighbours in the chosen direction) per node.
inline std::vector<int> degrees(const Matrix& a, DegreeDirection dir) {
  const std::size_t n = a.size();
  std::vector<int> k(n, 0);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v) {
      if (u == v || a(u, v) <= 0.0) continue;
      if (dir == DegreeDirection::In)
        ++k[v];
      else
        ++k[u];
    }
  return k;
}

// Empirical P(k); masses sum to 1.
inline std::map<int, double> degree_distribution(const Matrix& a, DegreeDirection dir) {
  const auto k = degrees(a, dir);
  std::map<int, double> hist;
  if (k.empty()) return hist;
  for (int d : k) hist[d] += 1.0;
  for (auto& [d, mass] : hist) mass /= static_cast<double>(k.size());
  return hist;
}

// Discrete power-law exponent via the continuous approximation of the MLE with a fixed
// lower cutoff: 1 + n / sum ln(k_i / (k_min - 1/2)).
inline double fit_power_law(const std::vector<int>& degrees, int k_min) {
  if (degrees.empty()) throw DomainError("cannot fit an empty degree sample");
  if (k_min < 1) throw DomainError("k_min must be >= 1");
  if (degrees.size() < 2) throw DomainError("power-law fit needs at least two samples");
  double log_sum = 0.0;
  bool all_at_min = true;
  for (int k : degrees) {
    if (k < k_min) throw DomainError("degree below k_min in power-law sample");
    if (k != k_min) all_at_min = false;
    log_sum += std::log(k / (k_min - 0.5));
  }
  // The exact discrete likelihood has no finite maximizer when every sample sits at k_min.
  if (all_at_min || !(log_sum > 0.0)) throw FitDivergence("power-law exponent diverges");
  return 1.0 + static_cast<double>(degrees.size()) / log_sum;
}

}  // namespace socsim::metrics
