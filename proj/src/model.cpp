#include "mgd/model.hpp"

#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "mgd/rng.hpp"

namespace mgd {

namespace {

// Stream tags. Graph k's independent component is keyed by tag k itself, so
// the null and alternative samplers share it.
constexpr std::uint64_t kSharedTag = 0x5348415245440000ULL;
constexpr std::uint64_t kPermutationTag = 0x5045524D00000000ULL;

}  // namespace

void require_rho(double rho) {
  if (!(rho >= 0.0 && rho < 1.0)) {
    throw std::invalid_argument("rho must lie in [0, 1), got " + std::to_string(rho));
  }
}

void ModelParams::validate() const {
  if (n < 2) throw std::invalid_argument("n must be at least 2");
  if (m < 2) throw std::invalid_argument("m must be at least 2");
  require_rho(rho);
}

// --- WeightedGraph -----------------------------------------------------------

WeightedGraph::WeightedGraph(int n) : n_(n), weights_(edge_count(n), 0.0) {
  if (n < 2) throw std::invalid_argument("graph needs at least 2 nodes");
}

WeightedGraph::WeightedGraph(int n, std::vector<double> weights)
    : n_(n), weights_(std::move(weights)) {
  if (n < 2) throw std::invalid_argument("graph needs at least 2 nodes");
  if (weights_.size() != edge_count(n)) {
    throw std::invalid_argument("graph on " + std::to_string(n) + " nodes needs " +
                                std::to_string(edge_count(n)) + " weights, got " +
                                std::to_string(weights_.size()));
  }
}

Eigen::MatrixXd WeightedGraph::dense() const {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_, n_);
  std::size_t e = 0;
  for (int i = 0; i < n_; ++i) {
    for (int j = i + 1; j < n_; ++j, ++e) {
      a(i, j) = weights_[e];
      a(j, i) = weights_[e];
    }
  }
  return a;
}

// --- Permutation -------------------------------------------------------------

Permutation::Permutation(std::vector<int> images) : images_(std::move(images)) {
  std::vector<char> seen(images_.size(), 0);
  for (int v : images_) {
    if (v < 0 || static_cast<std::size_t>(v) >= images_.size() || seen[v]) {
      throw std::invalid_argument("permutation images must be a bijection on [0, n)");
    }
    seen[v] = 1;
  }
}

Permutation Permutation::identity(int n) {
  std::vector<int> images(static_cast<std::size_t>(n));
  std::iota(images.begin(), images.end(), 0);
  return Permutation(std::move(images));
}

Permutation Permutation::inverse() const {
  std::vector<int> inv(images_.size());
  for (std::size_t i = 0; i < images_.size(); ++i) inv[images_[i]] = static_cast<int>(i);
  return Permutation(std::move(inv));
}

bool Permutation::is_identity() const noexcept {
  for (std::size_t i = 0; i < images_.size(); ++i) {
    if (images_[i] != static_cast<int>(i)) return false;
  }
  return true;
}

Permutation compose(const Permutation& outer, const Permutation& inner) {
  if (outer.size() != inner.size()) {
    throw std::invalid_argument("compose: permutation sizes differ");
  }
  std::vector<int> images(static_cast<std::size_t>(inner.size()));
  for (int i = 0; i < inner.size(); ++i) images[i] = outer(inner(i));
  return Permutation(std::move(images));
}

Permutation uniform_permutation(int n, std::uint64_t key) {
  std::vector<int> images(static_cast<std::size_t>(n));
  std::iota(images.begin(), images.end(), 0);
  CounterStream stream(key);
  for (int i = n - 1; i > 0; --i) {
    const auto j = static_cast<int>(stream.next_below(static_cast<std::uint64_t>(i) + 1));
    std::swap(images[i], images[j]);
  }
  return Permutation(std::move(images));
}

// --- PermutationProfile ------------------------------------------------------

PermutationProfile::PermutationProfile(int n, std::vector<Permutation> maps)
    : n_(n), maps_(std::move(maps)), reference_identity_(Permutation::identity(n)) {
  if (n < 1) throw std::invalid_argument("profile needs n >= 1");
  for (const auto& p : maps_) {
    if (p.size() != n) throw std::invalid_argument("profile permutation has wrong size");
  }
}

PermutationProfile PermutationProfile::identity(int n, int m) {
  return PermutationProfile(n, std::vector<Permutation>(static_cast<std::size_t>(m - 1),
                                                        Permutation::identity(n)));
}

const Permutation& PermutationProfile::from_reference(int k) const {
  if (k < 0 || k >= graphs()) throw std::out_of_range("profile graph index out of range");
  return k == 0 ? reference_identity_ : maps_[static_cast<std::size_t>(k - 1)];
}

Permutation PermutationProfile::between(int k, int l) const {
  return compose(from_reference(l), from_reference(k).inverse());
}

// --- GraphEnsemble -----------------------------------------------------------

GraphEnsemble::GraphEnsemble(ModelParams params, std::vector<WeightedGraph> graphs)
    : params_(params), graphs_(std::move(graphs)) {
  params_.validate();
  if (graphs_.size() != static_cast<std::size_t>(params_.m)) {
    throw std::invalid_argument("ensemble needs exactly m graphs");
  }
  for (const auto& g : graphs_) {
    if (g.nodes() != params_.n) throw std::invalid_argument("ensemble graph has wrong n");
  }
}

const WeightedGraph& GraphEnsemble::graph(int k) const {
  if (k < 0 || k >= params_.m) throw std::out_of_range("graph index out of range");
  return graphs_[static_cast<std::size_t>(k)];
}

std::uint64_t trial_seed(std::uint64_t master_seed, const ModelParams& params,
                         std::uint64_t trial, Hypothesis hypothesis) {
  return derive_key(master_seed, {static_cast<std::uint64_t>(params.n),
                                  static_cast<std::uint64_t>(params.m),
                                  std::bit_cast<std::uint64_t>(params.rho), trial,
                                  static_cast<std::uint64_t>(hypothesis)});
}

void require_compatible(const GraphEnsemble& ensemble, const PermutationProfile& profile) {
  if (profile.nodes() != ensemble.nodes() || profile.graphs() != ensemble.graphs()) {
    throw std::invalid_argument("profile dimensions do not match the ensemble");
  }
}

// --- Sampling ----------------------------------------------------------------

GraphEnsemble sample_null(const ModelParams& params, std::uint64_t seed) {
  params.validate();
  const std::size_t edges = edge_count(params.n);
  std::vector<WeightedGraph> graphs;
  graphs.reserve(static_cast<std::size_t>(params.m));
  for (int k = 0; k < params.m; ++k) {
    std::vector<double> w(edges);
    for (std::size_t e = 0; e < edges; ++e) {
      w[e] = gaussian_at(derive_key(seed, {static_cast<std::uint64_t>(k), e}));
    }
    graphs.emplace_back(params.n, std::move(w));
  }
  return GraphEnsemble(params, std::move(graphs));
}

PlantedEnsemble sample_alternative(const ModelParams& params, std::uint64_t seed) {
  params.validate();
  const int n = params.n;
  const int m = params.m;
  const std::size_t edges = edge_count(n);

  std::vector<Permutation> maps;
  maps.reserve(static_cast<std::size_t>(m - 1));
  for (int k = 1; k < m; ++k) {
    maps.push_back(uniform_permutation(
        n, derive_key(seed, {kPermutationTag, static_cast<std::uint64_t>(k)})));
  }
  PermutationProfile profile(n, std::move(maps));

  const double shared_scale = std::sqrt(params.rho);
  const double own_scale = std::sqrt(1.0 - params.rho);
  std::vector<std::vector<double>> w(static_cast<std::size_t>(m), std::vector<double>(edges));
  std::size_t e = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++e) {
      const double shared = gaussian_at(derive_key(seed, {kSharedTag, e}));
      for (int k = 0; k < m; ++k) {
        const double own = gaussian_at(derive_key(seed, {static_cast<std::uint64_t>(k), e}));
        const auto& pi = profile.from_reference(k);
        w[k][edge_index(n, pi(i), pi(j))] = shared_scale * shared + own_scale * own;
      }
    }
  }

  std::vector<WeightedGraph> graphs;
  graphs.reserve(static_cast<std::size_t>(m));
  for (auto& wk : w) graphs.emplace_back(n, std::move(wk));
  return {GraphEnsemble(params, std::move(graphs)), std::move(profile)};
}

WeightedGraph relabel(const WeightedGraph& graph, const Permutation& sigma) {
  const int n = graph.nodes();
  if (sigma.size() != n) throw std::invalid_argument("relabel: permutation size mismatch");
  WeightedGraph out(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) out.set(sigma(i), sigma(j), graph.at(i, j));
  }
  return out;
}

GraphEnsemble relabel(const GraphEnsemble& ensemble, int graph_index,
                      const Permutation& sigma) {
  if (graph_index < 0 || graph_index >= ensemble.graphs()) {
    throw std::out_of_range("relabel: graph index out of range");
  }
  std::vector<WeightedGraph> graphs(ensemble.all().begin(), ensemble.all().end());
  graphs[static_cast<std::size_t>(graph_index)] = relabel(graphs[graph_index], sigma);
  return GraphEnsemble(ensemble.params(), std::move(graphs));
}

// --- Covariance algebra ------------------------------------------------------

CovarianceSpec covariance_spec(int m, double rho) {
  if (m < 2) throw std::invalid_argument("m must be at least 2");
  require_rho(rho);
  CovarianceSpec spec;
  spec.m = m;
  spec.rho = rho;
  spec.sigma = Eigen::MatrixXd::Constant(m, m, rho);
  spec.sigma.diagonal().setOnes();
  spec.det_sigma = det_sigma(m, rho);
  return spec;
}

Eigen::MatrixXd sigma_inverse_minus_identity(int m, double rho) {
  if (m < 2) throw std::invalid_argument("m must be at least 2");
  require_rho(rho);
  const double md = static_cast<double>(m);
  const double denom = 1.0 + (md - 2.0) * rho - (md - 1.0) * rho * rho;
  const double diag = rho + (md - 1.0) * rho * rho;
  Eigen::MatrixXd out = Eigen::MatrixXd::Constant(m, m, -rho / denom);
  out.diagonal().setConstant((diag - rho) / denom);
  return out;
}

double det_sigma(int m, double rho) {
  if (m < 2) throw std::invalid_argument("m must be at least 2");
  require_rho(rho);
  return std::pow(1.0 - rho, m - 1) * (1.0 + (m - 1) * rho);
}

// --- Genie constructions -----------------------------------------------------

WeightedGraph aggregate_aligned(const GraphEnsemble& ensemble,
                                const PermutationProfile& profile) {
  require_compatible(ensemble, profile);
  const int n = ensemble.nodes();
  WeightedGraph out(n);
  auto acc = out.weights();
  for (int k = 1; k < ensemble.graphs(); ++k) {
    const Permutation to_k = profile.between(1, k);
    const auto& g = ensemble.graph(k);
    std::size_t e = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j, ++e) acc[e] += g.at(to_k(i), to_k(j));
    }
  }
  return out;
}

double effective_rho(int m, double rho) {
  if (m < 3) throw std::invalid_argument("effective_rho requires m >= 3");
  require_rho(rho);
  return rho * std::sqrt((m - 1.0) / (1.0 + (m - 2.0) * rho));
}

GaussianMoments conditional_x1_channel(double aggregate_entry, double rho, int m) {
  if (m < 2) throw std::invalid_argument("m must be at least 2");
  require_rho(rho);
  // Cov(X^1, S) = (m-1) rho, Var(S) = (m-1)(1 + (m-2) rho).
  const double spread = 1.0 + (m - 2.0) * rho;
  if (m == 3) {
    return {rho * aggregate_entry / (1.0 + rho),
            (1.0 + rho - 2.0 * rho * rho) / (1.0 + rho)};
  }
  return {rho * aggregate_entry / spread, 1.0 - (m - 1.0) * rho * rho / spread};
}

}  // namespace mgd
