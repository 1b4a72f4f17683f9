#pragma once

// Generalized likelihood-ratio statistic
//
//   T(X) = max over profiles of  sum_{i<j} sum_{k<l} X^k_{pi_k(i) pi_k(j)} X^l_{pi_l(i) pi_l(j)}
//
// its exact and heuristic evaluation, the detection threshold and the
// resulting test.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>

#include "mgd/model.hpp"

namespace mgd {

inline constexpr std::uint64_t kDefaultProfileBudget = 10'000'000;
inline constexpr double kDefaultThresholdExponent = 1.25;

/// Raised when exhaustive enumeration would visit more profiles than allowed.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ThresholdParams {
  double c = kDefaultThresholdExponent;  // strictly inside (1, 1.5)
  double rho = 0.0;                      // correlation the threshold is placed for

  void validate() const;
};

enum class Decision { H0, H1 };
enum class StatisticMode { Exact, Heuristic, Planted };

std::string to_string(Decision d);
std::string to_string(StatisticMode mode);

/// A statistic value together with the profile that attains it.
struct GlrResult {
  double statistic = 0.0;
  PermutationProfile maximizer;
  StatisticMode mode = StatisticMode::Exact;
};

struct TestOutcome {
  double statistic = 0.0;
  double threshold = 0.0;
  Decision decision = Decision::H0;
  PermutationProfile maximizer;
  StatisticMode mode = StatisticMode::Exact;
};

/// Overlap of the ensemble under `profile`. Summation runs over edges in
/// storage order, and within an edge over pairs (k, l), k < l, in
/// lexicographic order, accumulating into one running sum.
double pairwise_overlap(const GraphEnsemble& ensemble, const PermutationProfile& profile);

/// (n!)^(m-1), saturating at UINT64_MAX.
std::uint64_t profile_count(int n, int m);

/// Exact maximum of pairwise_overlap over every profile, and the
/// lexicographically smallest maximizer. Enumeration may be split across
/// MGD_THREADS workers; the result does not depend on the split.
/// Throws BudgetExceeded when profile_count(n, m) > budget.
GlrResult exact_glr(const GraphEnsemble& ensemble,
                    std::uint64_t budget = kDefaultProfileBudget);

enum class MatchMethod { Exhaustive, Spectral };

inline constexpr int kExhaustiveMatchMaxNodes = 8;

/// sum_{i<j} a(i, j) * b(pi(i), pi(j)).
double match_objective(const WeightedGraph& a, const WeightedGraph& b, const Permutation& pi);

/// Two-graph alignment maximizing match_objective.
///
/// Exhaustive: exact argmax over S_n with the lexicographically smallest
/// winner; throws std::invalid_argument for n > 8.
/// Spectral: outer product of the leading eigenvectors of a and b (both
/// signs tried), rounded by linear_assignment, then improved by
/// transposition search to a local optimum.
Permutation pairwise_match(const WeightedGraph& a, const WeightedGraph& b, MatchMethod method);

/// Applies improving transpositions pi(i) <-> pi(j) until none gains more
/// than 1e-12.
Permutation improve_by_transpositions(const WeightedGraph& a, const WeightedGraph& b,
                                      Permutation start);

struct HeuristicOptions {
  int restarts = 10;
  std::uint64_t seed = 0;
  /// Inner re-matching is exhaustive up to this many nodes, spectral plus
  /// transposition search above it.
  int exhaustive_max_nodes = 7;
};

/// Coordinate ascent over the profile. Restart 0 starts from the identity,
/// restart 1 from spectral two-graph matches against the reference graph,
/// the rest from random profiles. Each sweep re-matches graphs 2..m in turn
/// against the sum of the other aligned graphs; a move is kept only if T
/// grows by more than 1e-12. The returned statistic is pairwise_overlap at
/// the returned profile, so it never exceeds exact_glr.
GlrResult heuristic_glr(const GraphEnsemble& ensemble, const HeuristicOptions& options = {});

/// mu - n^c with mu = C(n,2) C(m,2) tp.rho.
double threshold(const ModelParams& params, const ThresholdParams& tp);

struct ExactMode {
  std::uint64_t budget = kDefaultProfileBudget;
};
struct HeuristicMode {
  HeuristicOptions options;
};
struct PlantedMode {
  PermutationProfile profile;
};
using GlrMode = std::variant<ExactMode, HeuristicMode, PlantedMode>;

/// Computes T in the requested mode and declares H1 iff T >= tau.
TestOutcome glr_test(const GraphEnsemble& ensemble, const ThresholdParams& tp,
                     const GlrMode& mode);

/// Upper bound on P(T* <= tau) for the planted statistic:
///   exp(-t^2 / (4 (C(n,2) (lmax^2 + (m-1) lmin^2) + lmax t)))
/// with t = E[T*] - tau (= n^c when tp.rho == params.rho) and the edge-tuple
/// eigenvalues at params.rho. Returns 1 when t <= 0.
double miss_bound(const ModelParams& params, const ThresholdParams& tp);

}  // namespace mgd
