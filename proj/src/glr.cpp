#include "mgd/glr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Eigenvalues>

#include "mgd/assignment.hpp"
#include "mgd/parallel.hpp"
#include "mgd/rng.hpp"
#include "profile_odometer.hpp"

namespace mgd {

void ThresholdParams::validate() const {
  if (!(c > 1.0 && c < 1.5)) {
    throw std::invalid_argument("threshold exponent c must lie strictly inside (1, 1.5)");
  }
  require_rho(rho);
}

std::string to_string(Decision d) { return d == Decision::H1 ? "H1" : "H0"; }

std::string to_string(StatisticMode mode) {
  switch (mode) {
    case StatisticMode::Exact:
      return "exact";
    case StatisticMode::Heuristic:
      return "heuristic";
    case StatisticMode::Planted:
      return "planted";
  }
  return "unknown";
}

namespace {

using detail::factorial_saturating;
using detail::fill_edge_map;

// The one summation routine behind every overlap value in this file.
double overlap_kernel(const GraphEnsemble& ensemble,
                      const std::vector<std::vector<std::size_t>>& maps) {
  const int m = ensemble.graphs();
  const std::size_t edges = edge_count(ensemble.nodes());
  std::vector<const double*> w(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) w[k] = ensemble.graph(k).weights().data();
  double total = 0.0;
  for (std::size_t e = 0; e < edges; ++e) {
    for (int k = 0; k < m; ++k) {
      const double xk = w[k][maps[k][e]];
      for (int l = k + 1; l < m; ++l) total += xk * w[l][maps[l][e]];
    }
  }
  return total;
}

std::vector<std::vector<std::size_t>> edge_maps(const PermutationProfile& profile) {
  std::vector<std::vector<std::size_t>> maps(static_cast<std::size_t>(profile.graphs()));
  for (int k = 0; k < profile.graphs(); ++k) fill_edge_map(profile.from_reference(k), maps[k]);
  return maps;
}

}  // namespace

double pairwise_overlap(const GraphEnsemble& ensemble, const PermutationProfile& profile) {
  require_compatible(ensemble, profile);
  return overlap_kernel(ensemble, edge_maps(profile));
}

std::uint64_t profile_count(int n, int m) {
  const std::uint64_t f = factorial_saturating(n);
  std::uint64_t total = 1;
  for (int k = 1; k < m; ++k) {
    if (f != 0 && total > std::numeric_limits<std::uint64_t>::max() / f) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    total *= f;
  }
  return total;
}

GlrResult exact_glr(const GraphEnsemble& ensemble, std::uint64_t budget) {
  const int n = ensemble.nodes();
  const int m = ensemble.graphs();
  const std::uint64_t total = profile_count(n, m);
  if (total > budget) {
    throw BudgetExceeded("exact GLR needs " + std::to_string(total) +
                         " profiles, budget is " + std::to_string(budget));
  }

  // Contiguous index ranges per worker; ties resolve to the smallest index
  // both within a range (strict >) and across ranges (merged in order).
  struct Best {
    double value = -std::numeric_limits<double>::infinity();
    std::uint64_t index = 0;
    bool found = false;
  };
  const auto workers =
      static_cast<std::size_t>(std::min<std::uint64_t>(worker_count(), total));
  std::vector<Best> best(workers);
  const std::uint64_t chunk = total / workers;
  const std::uint64_t extra = total % workers;

  parallel_ranges(workers, [&](std::size_t wb, std::size_t we) {
    for (std::size_t w = wb; w < we; ++w) {
      const std::uint64_t begin = w * chunk + std::min<std::uint64_t>(w, extra);
      const std::uint64_t end = begin + chunk + (w < extra ? 1 : 0);
      detail::ProfileOdometer odometer(n, m, begin);
      Best local;
      for (std::uint64_t r = begin; r < end; ++r) {
        const double value = overlap_kernel(ensemble, odometer.edge_maps());
        if (!local.found || value > local.value) local = {value, r, true};
        if (r + 1 < end) odometer.advance();
      }
      best[w] = local;
    }
  });

  Best winner;
  for (const auto& b : best) {
    if (b.found && (!winner.found || b.value > winner.value)) winner = b;
  }
  return {winner.value, detail::ProfileOdometer::profile_at(n, m, winner.index),
          StatisticMode::Exact};
}

// --- Two-graph matching ------------------------------------------------------

double match_objective(const WeightedGraph& a, const WeightedGraph& b, const Permutation& pi) {
  const int n = a.nodes();
  if (b.nodes() != n || pi.size() != n) {
    throw std::invalid_argument("match_objective: size mismatch");
  }
  double total = 0.0;
  std::size_t e = 0;
  const auto wa = a.weights();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++e) total += wa[e] * b.at(pi(i), pi(j));
  }
  return total;
}

namespace {

Permutation transposition_search(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                 std::vector<int> pi) {
  const auto n = static_cast<int>(pi.size());
  constexpr double kMinGain = 1e-12;
  bool improved = true;
  while (improved) {
    improved = false;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const int pi_i = pi[i];
        const int pi_j = pi[j];
        double gain = 0.0;
        for (int u = 0; u < n; ++u) {
          if (u == i || u == j) continue;
          gain += (a(u, i) - a(u, j)) * (b(pi[u], pi_j) - b(pi[u], pi_i));
        }
        if (gain > kMinGain) {
          std::swap(pi[i], pi[j]);
          improved = true;
        }
      }
    }
  }
  return Permutation(std::move(pi));
}

Permutation exhaustive_match(const WeightedGraph& a, const WeightedGraph& b) {
  const int n = a.nodes();
  std::vector<int> pi(static_cast<std::size_t>(n));
  std::iota(pi.begin(), pi.end(), 0);
  std::vector<int> best = pi;
  double best_value = -std::numeric_limits<double>::infinity();
  const auto wa = a.weights();
  do {
    double value = 0.0;
    std::size_t e = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j, ++e) value += wa[e] * b.at(pi[i], pi[j]);
    }
    if (value > best_value) {
      best_value = value;
      best = pi;
    }
  } while (std::next_permutation(pi.begin(), pi.end()));
  return Permutation(std::move(best));
}

Eigen::VectorXd leading_eigenvector(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
  return solver.eigenvectors().col(a.rows() - 1);
}

Permutation spectral_match(const WeightedGraph& a, const WeightedGraph& b) {
  const Eigen::MatrixXd da = a.dense();
  const Eigen::MatrixXd db = b.dense();
  const Eigen::VectorXd u = leading_eigenvector(da);
  const Eigen::VectorXd v = leading_eigenvector(db);
  const Eigen::MatrixXd similarity = u * v.transpose();
  Permutation plus = linear_assignment(similarity);
  Permutation minus = linear_assignment(-similarity);
  const Permutation& start =
      match_objective(a, b, minus) > match_objective(a, b, plus) ? minus : plus;
  return transposition_search(da, db, std::vector<int>(start.images().begin(),
                                                       start.images().end()));
}

}  // namespace

Permutation improve_by_transpositions(const WeightedGraph& a, const WeightedGraph& b,
                                      Permutation start) {
  if (a.nodes() != b.nodes() || start.size() != a.nodes()) {
    throw std::invalid_argument("improve_by_transpositions: size mismatch");
  }
  return transposition_search(a.dense(), b.dense(),
                              std::vector<int>(start.images().begin(), start.images().end()));
}

Permutation pairwise_match(const WeightedGraph& a, const WeightedGraph& b, MatchMethod method) {
  if (a.nodes() != b.nodes()) throw std::invalid_argument("pairwise_match: node counts differ");
  switch (method) {
    case MatchMethod::Exhaustive:
      if (a.nodes() > kExhaustiveMatchMaxNodes) {
        throw std::invalid_argument("exhaustive matching is limited to n <= 8");
      }
      return exhaustive_match(a, b);
    case MatchMethod::Spectral:
      return spectral_match(a, b);
  }
  throw std::invalid_argument("pairwise_match: unknown method");
}

// --- Heuristic GLR -----------------------------------------------------------

namespace {

// Graph k seen through the reference labeling: g(i, j) = X^k(pi(i), pi(j)).
void add_aligned(const WeightedGraph& g, const Permutation& pi, std::span<double> acc) {
  const int n = g.nodes();
  std::size_t e = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++e) acc[e] += g.at(pi(i), pi(j));
  }
}

GlrResult coordinate_ascent(const GraphEnsemble& ensemble, std::vector<Permutation> maps,
                            const HeuristicOptions& options) {
  const int n = ensemble.nodes();
  const int m = ensemble.graphs();
  constexpr double kMinGain = 1e-12;
  PermutationProfile profile(n, maps);
  double value = pairwise_overlap(ensemble, profile);

  bool improved = true;
  while (improved) {
    improved = false;
    for (int k = 1; k < m; ++k) {
      WeightedGraph target(n);
      for (int l = 0; l < m; ++l) {
        if (l != k) add_aligned(ensemble.graph(l), profile.from_reference(l), target.weights());
      }
      const auto& xk = ensemble.graph(k);
      Permutation candidate;
      if (n <= std::min(options.exhaustive_max_nodes, kExhaustiveMatchMaxNodes)) {
        candidate = pairwise_match(target, xk, MatchMethod::Exhaustive);
      } else {
        Permutation local = improve_by_transpositions(target, xk, maps[k - 1]);
        Permutation spectral = pairwise_match(target, xk, MatchMethod::Spectral);
        candidate = match_objective(target, xk, spectral) > match_objective(target, xk, local)
                        ? std::move(spectral)
                        : std::move(local);
      }
      if (candidate == maps[k - 1]) continue;
      std::vector<Permutation> trial = maps;
      trial[k - 1] = candidate;
      PermutationProfile trial_profile(n, trial);
      const double trial_value = pairwise_overlap(ensemble, trial_profile);
      if (trial_value > value + kMinGain) {
        maps = std::move(trial);
        profile = std::move(trial_profile);
        value = trial_value;
        improved = true;
      }
    }
  }
  return {value, std::move(profile), StatisticMode::Heuristic};
}

}  // namespace

GlrResult heuristic_glr(const GraphEnsemble& ensemble, const HeuristicOptions& options) {
  const int n = ensemble.nodes();
  const int m = ensemble.graphs();
  const int restarts = std::max(options.restarts, 1);
  GlrResult best;
  bool have_best = false;
  for (int r = 0; r < restarts; ++r) {
    std::vector<Permutation> init;
    init.reserve(static_cast<std::size_t>(m - 1));
    for (int k = 1; k < m; ++k) {
      if (r == 0) {
        init.push_back(Permutation::identity(n));
      } else if (r == 1) {
        init.push_back(pairwise_match(ensemble.graph(0), ensemble.graph(k), MatchMethod::Spectral));
      } else {
        init.push_back(uniform_permutation(
            n, derive_key(options.seed,
                          {static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(k)})));
      }
    }
    GlrResult result = coordinate_ascent(ensemble, std::move(init), options);
    if (!have_best || result.statistic > best.statistic) {
      best = std::move(result);
      have_best = true;
    }
  }
  return best;
}

// --- Threshold and test ------------------------------------------------------

double threshold(const ModelParams& params, const ThresholdParams& tp) {
  params.validate();
  tp.validate();
  const double pairs_n = static_cast<double>(edge_count(params.n));
  const double pairs_m = static_cast<double>(edge_count(params.m));
  return pairs_n * pairs_m * tp.rho - std::pow(static_cast<double>(params.n), tp.c);
}

TestOutcome glr_test(const GraphEnsemble& ensemble, const ThresholdParams& tp,
                     const GlrMode& mode) {
  const double tau = threshold(ensemble.params(), tp);
  GlrResult result = std::visit(
      [&](const auto& m) -> GlrResult {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, ExactMode>) {
          return exact_glr(ensemble, m.budget);
        } else if constexpr (std::is_same_v<M, HeuristicMode>) {
          return heuristic_glr(ensemble, m.options);
        } else {
          return {pairwise_overlap(ensemble, m.profile), m.profile, StatisticMode::Planted};
        }
      },
      mode);
  TestOutcome out;
  out.statistic = result.statistic;
  out.threshold = tau;
  out.decision = result.statistic >= tau ? Decision::H1 : Decision::H0;
  out.maximizer = std::move(result.maximizer);
  out.mode = result.mode;
  return out;
}

double miss_bound(const ModelParams& params, const ThresholdParams& tp) {
  const double tau = threshold(params, tp);
  const double md = static_cast<double>(params.m);
  const double rho = params.rho;
  const double pairs_n = static_cast<double>(edge_count(params.n));
  const double mean = pairs_n * static_cast<double>(edge_count(params.m)) * rho;
  const double t = mean - tau;
  if (t <= 0.0) return 1.0;
  const double lambda_max = ((md - 1.0) + (md - 1.0) * (md - 1.0) * rho) / 2.0;
  const double lambda_min = (rho - 1.0) / 2.0;
  const double spread =
      pairs_n * (lambda_max * lambda_max + (md - 1.0) * lambda_min * lambda_min);
  return std::exp(-0.25 * t * t / (spread + lambda_max * t));
}

}  // namespace mgd
