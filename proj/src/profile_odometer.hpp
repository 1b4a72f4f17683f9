#pragma once

// Private helpers for walking every permutation profile in lexicographic
// order. Profile index r has mixed-radix digits (d_2, ..., d_m), d_2 most
// significant, each digit the lexicographic rank of pi_{1k} in S_n.

#include <cstdint>
#include <vector>

#include "mgd/model.hpp"

namespace mgd::detail {

std::uint64_t factorial_saturating(int n);

/// Lexicographic rank -> permutation via the factorial number system.
Permutation unrank_permutation(int n, std::uint64_t rank);

/// out[e] = storage index of the image of reference edge e under pi.
void fill_edge_map(const Permutation& pi, std::vector<std::size_t>& out);

class ProfileOdometer {
 public:
  ProfileOdometer(int n, int m, std::uint64_t start);

  /// Edge maps for graphs 0..m-1 at the current profile (graph 0 is fixed).
  const std::vector<std::vector<std::size_t>>& edge_maps() const noexcept { return maps_; }
  std::uint64_t index() const noexcept { return index_; }
  void advance();

  PermutationProfile profile() const;
  static PermutationProfile profile_at(int n, int m, std::uint64_t index);

 private:
  int n_;
  int m_;
  std::uint64_t perms_;
  std::uint64_t index_;
  std::vector<std::uint64_t> digit_;
  std::vector<std::vector<std::size_t>> maps_;
};

}  // namespace mgd::detail
