#pragma once

// Small helpers shared by the unit suites.

#include <algorithm>
#include <cmath>
#include <vector>

#include "mgd/model.hpp"

namespace mgd::test {

inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double variance_of(const std::vector<double>& v) {
  const double mu = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - mu) * (x - mu);
  return s / static_cast<double>(v.size() - 1);
}

inline double correlation_of(const std::vector<double>& a, const std::vector<double>& b) {
  const double ma = mean_of(a), mb = mean_of(b);
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

inline GraphEnsemble ensemble_from(int n, std::vector<std::vector<double>> weights) {
  std::vector<WeightedGraph> graphs;
  for (auto& w : weights) graphs.emplace_back(n, std::move(w));
  const int m = static_cast<int>(graphs.size());
  return GraphEnsemble(ModelParams{n, m, 0.0}, std::move(graphs));
}

// Every permutation of [n] in lexicographic order.
inline std::vector<Permutation> all_permutations(int n) {
  std::vector<int> p(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) p[i] = i;
  std::vector<Permutation> out;
  do {
    out.emplace_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

}  // namespace mgd::test
