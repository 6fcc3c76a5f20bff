#pragma once

#include <map>
#include <vector>

#include "socsim/metrics.hpp"

namespace socsim::metrics {

struct Communities {
  Partition labels;  // 1..C in order of first appearance
  double modularity = 0.0;
};

namespace detail {

inline Partition relabel(const Partition& g) {
  std::map<int, int> ids;
  Partition out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto [it, fresh] = ids.emplace(g[i], static_cast<int>(ids.size()) + 1);
    out[i] = it->second;
  }
  return out;
}

}  // namespace detail

// Greedy agglomerative modularity maximization followed by single-node refinement moves.
// Merges pick the largest gain; equal gains go to the pair with the lowest community ids.
inline Communities detect_communities(const Matrix& a) {
  constexpr double kMinGain = 1e-12;
  const std::size_t n = a.size();
  const double e = total_weight(a);
  if (!(e > 0.0)) throw DomainError("community detection needs at least one edge");

  // between[c][d]: weight from community c to community d
  std::vector<std::vector<double>> between(n, std::vector<double>(n, 0.0));
  std::vector<double> kout(n, 0.0), kin(n, 0.0);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v) {
      between[u][v] = a(u, v);
      kout[u] += a(u, v);
      kin[v] += a(u, v);
    }
  std::vector<bool> alive(n, true);
  Partition label(n);
  for (std::size_t i = 0; i < n; ++i) label[i] = static_cast<int>(i);

  while (true) {
    double best = kMinGain;
    std::size_t bc = n, bd = n;
    for (std::size_t c = 0; c < n; ++c) {
      if (!alive[c]) continue;
      for (std::size_t d = c + 1; d < n; ++d) {
        if (!alive[d]) continue;
        const double gain =
            (between[c][d] + between[d][c]) / e - (kout[c] * kin[d] + kout[d] * kin[c]) / (e * e);
        if (gain > best) best = gain, bc = c, bd = d;
      }
    }
    if (bc == n) break;
    for (std::size_t x = 0; x < n; ++x) {
      between[bc][x] += between[bd][x];
      between[bd][x] = 0.0;
    }
    for (std::size_t x = 0; x < n; ++x) {
      between[x][bc] += between[x][bd];
      between[x][bd] = 0.0;
    }
    kout[bc] += kout[bd];
    kin[bc] += kin[bd];
    alive[bd] = false;
    for (auto& l : label)
      if (l == static_cast<int>(bd)) l = static_cast<int>(bc);
  }

  double current = modularity(a, label);
  for (int pass = 0; pass < 100; ++pass) {
    bool moved = false;
    for (std::size_t u = 0; u < n; ++u) {
      std::vector<int> targets;
      for (int l : label)
        if (l != label[u] && std::find(targets.begin(), targets.end(), l) == targets.end())
          targets.push_back(l);
      std::sort(targets.begin(), targets.end());
      const int home = label[u];
      int best_label = home;
      double best_q = current;
      for (int t : targets) {
        label[u] = t;
        const double q = modularity(a, label);
        if (q > best_q + kMinGain) best_q = q, best_label = t;
      }
      label[u] = best_label;
      if (best_label != home) {
        current = best_q;
        moved = true;
      }
    }
    if (!moved) break;
  }

  Communities out;
  out.labels = detail::relabel(label);
  out.modularity = modularity(a, out.labels);
  return out;
}

}  // namespace socsim::metrics
