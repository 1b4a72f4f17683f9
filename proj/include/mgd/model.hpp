#pragma once

// Generative model for m correlated Gaussian-weighted complete graphs observed
// under unknown node labelings, and the covariance algebra of one edge tuple.
//
// Conventions used throughout the library:
//   * nodes are 0-based, 0 <= i < n;
//   * graph indices are 0-based, 0 <= k < m; graph 0 is the reference graph;
//   * an undirected edge {i, j}, i < j, is stored at the row-major
//     upper-triangular index  i * (2n - i - 1) / 2 + (j - i - 1).

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace mgd {

struct ModelParams {
  int n = 2;
  int m = 2;
  double rho = 0.0;

  /// Throws std::invalid_argument unless n >= 2, m >= 2 and 0 <= rho < 1.
  void validate() const;
};

/// Throws std::invalid_argument unless 0 <= rho < 1.
void require_rho(double rho);

constexpr std::size_t edge_count(int n) noexcept {
  return static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2;
}

/// Storage index of the edge {i, j}; symmetric in (i, j), requires i != j.
constexpr std::size_t edge_index(int n, int i, int j) noexcept {
  if (i > j) std::swap(i, j);
  const auto ii = static_cast<std::size_t>(i);
  return ii * (2 * static_cast<std::size_t>(n) - ii - 1) / 2 +
         static_cast<std::size_t>(j - i - 1);
}

/// Complete graph on n nodes with one real weight per unordered edge.
class WeightedGraph {
 public:
  WeightedGraph() = default;
  explicit WeightedGraph(int n);
  WeightedGraph(int n, std::vector<double> weights);

  int nodes() const noexcept { return n_; }
  std::size_t edges() const noexcept { return weights_.size(); }

  double at(int i, int j) const { return weights_[edge_index(n_, i, j)]; }
  void set(int i, int j, double value) { weights_[edge_index(n_, i, j)] = value; }

  std::span<const double> weights() const noexcept { return weights_; }
  std::span<double> weights() noexcept { return weights_; }

  /// Symmetric n x n matrix with zero diagonal.
  Eigen::MatrixXd dense() const;

  bool operator==(const WeightedGraph&) const = default;

 private:
  int n_ = 0;
  std::vector<double> weights_;
};

/// Bijection on {0, ..., n-1}.
class Permutation {
 public:
  Permutation() = default;
  /// Throws std::invalid_argument if `images` is not a bijection.
  explicit Permutation(std::vector<int> images);
  static Permutation identity(int n);

  int size() const noexcept { return static_cast<int>(images_.size()); }
  int operator()(int i) const { return images_[static_cast<std::size_t>(i)]; }
  std::span<const int> images() const noexcept { return images_; }

  Permutation inverse() const;
  bool is_identity() const noexcept;

  /// Lexicographic on the image sequence.
  auto operator<=>(const Permutation&) const = default;
  bool operator==(const Permutation&) const = default;

 private:
  std::vector<int> images_;
};

/// (outer o inner)(i) = outer(inner(i)).
Permutation compose(const Permutation& outer, const Permutation& inner);

/// Uniformly random permutation (Fisher-Yates) drawn from the stream `key`.
Permutation uniform_permutation(int n, std::uint64_t key);

/// The alignment maps pi_{1k} for k = 2..m, i.e. where each node of the
/// reference graph sits in graph k. Stored 0-based: from_reference(k) for
/// k = 1..m-1, with from_reference(0) the identity.
class PermutationProfile {
 public:
  PermutationProfile() = default;
  /// `maps` holds pi_{1k} for graphs 1..m-1; all must have size n.
  PermutationProfile(int n, std::vector<Permutation> maps);
  static PermutationProfile identity(int n, int m);

  int nodes() const noexcept { return n_; }
  int graphs() const noexcept { return static_cast<int>(maps_.size()) + 1; }

  const Permutation& from_reference(int k) const;
  /// pi_{kl} = pi_{1l} o pi_{1k}^{-1}.
  Permutation between(int k, int l) const;
  std::span<const Permutation> maps() const noexcept { return maps_; }

  /// Lexicographic: compares pi_{12} first, then pi_{13}, ...
  std::weak_ordering operator<=>(const PermutationProfile& other) const {
    return maps_ <=> other.maps_;
  }
  bool operator==(const PermutationProfile& other) const { return maps_ == other.maps_; }

 private:
  int n_ = 0;
  std::vector<Permutation> maps_;
  Permutation reference_identity_;
};

/// The observation X = (X^1, ..., X^m).
class GraphEnsemble {
 public:
  GraphEnsemble() = default;
  /// Throws std::invalid_argument unless there are exactly params.m graphs,
  /// each on params.n nodes.
  GraphEnsemble(ModelParams params, std::vector<WeightedGraph> graphs);

  const ModelParams& params() const noexcept { return params_; }
  int nodes() const noexcept { return params_.n; }
  int graphs() const noexcept { return params_.m; }

  const WeightedGraph& graph(int k) const;
  double at(int k, int i, int j) const { return graph(k).at(i, j); }
  std::span<const WeightedGraph> all() const noexcept { return graphs_; }

  bool operator==(const GraphEnsemble& other) const {
    return params_.n == other.params_.n && params_.m == other.params_.m &&
           graphs_ == other.graphs_;
  }

 private:
  ModelParams params_;
  std::vector<WeightedGraph> graphs_;
};

enum class Hypothesis { Null = 0, Alternative = 1 };

/// Seed of one Monte Carlo trial: a hash of (master_seed, n, m, bits of rho,
/// trial, hypothesis). Cells of a sweep never share streams, and adding grid
/// values does not disturb existing cells.
std::uint64_t trial_seed(std::uint64_t master_seed, const ModelParams& params,
                         std::uint64_t trial, Hypothesis hypothesis);

/// Throws std::invalid_argument if the profile's n or m disagrees.
void require_compatible(const GraphEnsemble& ensemble, const PermutationProfile& profile);

struct PlantedEnsemble {
  GraphEnsemble ensemble;
  PermutationProfile profile;
};

/// All m * C(n,2) weights i.i.d. N(0,1). Ignores params.rho.
GraphEnsemble sample_null(const ModelParams& params, std::uint64_t seed);

/// Draws pi_{12..1m} uniformly and independently, then for every reference
/// edge {i,j} writes Y_k = sqrt(rho) W_0 + sqrt(1-rho) W_k into graph k at
/// {pi_{1k}(i), pi_{1k}(j)}. Graph k's independent component uses the same
/// stream as sample_null, so at rho = 0 the result is exactly sample_null
/// relabeled by the drawn profile.
PlantedEnsemble sample_alternative(const ModelParams& params, std::uint64_t seed);

/// Returns g' with g'(sigma(i), sigma(j)) = g(i, j).
WeightedGraph relabel(const WeightedGraph& graph, const Permutation& sigma);
GraphEnsemble relabel(const GraphEnsemble& ensemble, int graph_index,
                      const Permutation& sigma);

struct CovarianceSpec {
  int m = 2;
  double rho = 0.0;
  Eigen::MatrixXd sigma;  // (1 - rho) I + rho E
  double det_sigma = 1.0;
};

CovarianceSpec covariance_spec(int m, double rho);

/// Closed form of Sigma^{-1} - I for Sigma = (1 - rho) I + rho E.
Eigen::MatrixXd sigma_inverse_minus_identity(int m, double rho);

/// (1 - rho)^{m-1} (1 + (m - 1) rho).
double det_sigma(int m, double rho);

/// Sum of graphs 1..m-1 after aligning each to graph 1 with
/// pi_{2k} = pi_{1k} o pi_{12}^{-1}. For m = 2 this is graph 1 itself.
WeightedGraph aggregate_aligned(const GraphEnsemble& ensemble,
                                const PermutationProfile& profile);

/// Correlation between X^1 and the aggregate of the other m - 1 aligned
/// graphs: rho * sqrt((m - 1) / (1 + (m - 2) rho)). Requires m >= 3.
double effective_rho(int m, double rho);

struct GaussianMoments {
  double mean = 0.0;
  double variance = 1.0;
};

/// Law of the reference-graph entry given the aligned aggregate entry of the
/// other m - 1 graphs. For m = 3: N(rho x / (1 + rho), (1 + rho - 2 rho^2) / (1 + rho)).
GaussianMoments conditional_x1_channel(double aggregate_entry, double rho, int m = 3);

}  // namespace mgd
