#include "profile_odometer.hpp"

#include <limits>
#include <numeric>

namespace mgd::detail {

std::uint64_t factorial_saturating(int n) {
  std::uint64_t f = 1;
  for (int i = 2; i <= n; ++i) {
    if (f > std::numeric_limits<std::uint64_t>::max() / static_cast<std::uint64_t>(i)) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    f *= static_cast<std::uint64_t>(i);
  }
  return f;
}

Permutation unrank_permutation(int n, std::uint64_t rank) {
  std::vector<int> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), 0);
  std::vector<int> images(static_cast<std::size_t>(n));
  std::uint64_t block = factorial_saturating(n - 1);
  for (int i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(rank / block);
    rank %= block;
    images[i] = pool[idx];
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(idx));
    if (i + 1 < n) block /= static_cast<std::uint64_t>(n - 1 - i);
  }
  return Permutation(std::move(images));
}

void fill_edge_map(const Permutation& pi, std::vector<std::size_t>& out) {
  const int n = pi.size();
  out.resize(edge_count(n));
  std::size_t e = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++e) out[e] = edge_index(n, pi(i), pi(j));
  }
}

ProfileOdometer::ProfileOdometer(int n, int m, std::uint64_t start)
    : n_(n),
      m_(m),
      perms_(factorial_saturating(n)),
      index_(start),
      digit_(static_cast<std::size_t>(m), 0),
      maps_(static_cast<std::size_t>(m)) {
  std::uint64_t rest = start;
  for (int k = m - 1; k >= 1; --k) {
    digit_[k] = rest % perms_;
    rest /= perms_;
  }
  fill_edge_map(Permutation::identity(n), maps_[0]);
  for (int k = 1; k < m; ++k) fill_edge_map(unrank_permutation(n, digit_[k]), maps_[k]);
}

void ProfileOdometer::advance() {
  ++index_;
  for (int k = m_ - 1; k >= 1; --k) {
    if (++digit_[k] < perms_) {
      fill_edge_map(unrank_permutation(n_, digit_[k]), maps_[k]);
      return;
    }
    digit_[k] = 0;
    fill_edge_map(Permutation::identity(n_), maps_[k]);
  }
}

PermutationProfile ProfileOdometer::profile() const {
  std::vector<Permutation> maps;
  for (int k = 1; k < m_; ++k) maps.push_back(unrank_permutation(n_, digit_[k]));
  return PermutationProfile(n_, std::move(maps));
}

PermutationProfile ProfileOdometer::profile_at(int n, int m, std::uint64_t index) {
  return ProfileOdometer(n, m, index).profile();
}

}  // namespace mgd::detail
