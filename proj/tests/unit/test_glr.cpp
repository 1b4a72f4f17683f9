#include <doctest.h>

#include <cmath>
#include <limits>

#include "mgd/bounds.hpp"
#include "mgd/glr.hpp"
#include "mgd/rng.hpp"
#include "support.hpp"

using namespace mgd;
using mgd::test::all_permutations;
using mgd::test::ensemble_from;

namespace {

// Overlap summed edge by edge, pairs (k, l) in order, as the library contract states.
double overlap_by_hand(const GraphEnsemble& ens, const std::vector<Permutation>& maps) {
  const int n = ens.nodes();
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      for (int k = 0; k < ens.graphs(); ++k) {
        for (int l = k + 1; l < ens.graphs(); ++l) {
          total += ens.at(k, maps[k](i), maps[k](j)) * ens.at(l, maps[l](i), maps[l](j));
        }
      }
    }
  }
  return total;
}

double brute_force_max(const GraphEnsemble& ens) {
  const auto perms = all_permutations(ens.nodes());
  const Permutation id = Permutation::identity(ens.nodes());
  double best = -std::numeric_limits<double>::infinity();
  if (ens.graphs() == 2) {
    for (const auto& p : perms) best = std::max(best, overlap_by_hand(ens, {id, p}));
  } else {
    for (const auto& p : perms) {
      for (const auto& q : perms) best = std::max(best, overlap_by_hand(ens, {id, p, q}));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("pairwise_overlap hand examples") {
  const auto one_edge = ensemble_from(2, {{1.0}, {2.0}});
  CHECK(pairwise_overlap(one_edge, PermutationProfile::identity(2, 2)) == 2.0);
  CHECK(pairwise_overlap(one_edge, PermutationProfile(2, {Permutation({1, 0})})) == 2.0);

  const auto three = ensemble_from(3, {{1, 2, 3}, {4, 5, 6}});
  CHECK(pairwise_overlap(three, PermutationProfile::identity(3, 2)) == 32.0);

  const std::vector<double> x{0.5, -1.5, 2.0};
  const auto same = ensemble_from(3, {x, x, x});
  CHECK(pairwise_overlap(same, PermutationProfile::identity(3, 3)) ==
        doctest::Approx(3 * (0.25 + 2.25 + 4.0)));
}

TEST_CASE("pairwise_overlap agrees with a hand loop bit for bit") {
  const auto planted = sample_alternative(ModelParams{6, 4, 0.3}, 17);
  const auto& maps = planted.profile.maps();
  std::vector<Permutation> all{Permutation::identity(6)};
  all.insert(all.end(), maps.begin(), maps.end());
  CHECK(pairwise_overlap(planted.ensemble, planted.profile) ==
        overlap_by_hand(planted.ensemble, all));
}

TEST_CASE("exact_glr small cases") {
  const auto two = sample_null(ModelParams{2, 4, 0.0}, 1);
  CHECK(exact_glr(two).statistic ==
        pairwise_overlap(two, PermutationProfile::identity(2, 4)));

  const auto four = sample_null(ModelParams{4, 2, 0.0}, 42);
  const GlrResult r = exact_glr(four);
  CHECK(r.statistic == brute_force_max(four));
  CHECK(pairwise_overlap(four, r.maximizer) == r.statistic);
  CHECK(r.mode == StatisticMode::Exact);
}

TEST_CASE("exact_glr budget") {
  CHECK(profile_count(7, 3) == 5040ULL * 5040ULL);
  CHECK(profile_count(30, 3) == std::numeric_limits<std::uint64_t>::max());
  const auto ens = sample_null(ModelParams{7, 3, 0.0}, 2);
  CHECK_THROWS_AS(exact_glr(ens), BudgetExceeded);
  CHECK_THROWS_AS((exact_glr(sample_null(ModelParams{4, 2, 0.0}, 2), 23)), BudgetExceeded);
  CHECK_NOTHROW((exact_glr(sample_null(ModelParams{4, 2, 0.0}, 2), 24)));
}

TEST_CASE("planted dominance and label invariance") {
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 3 + trial % 3;
    const int m = 2 + trial % 2;
    const auto planted = sample_alternative(ModelParams{n, m, 0.5}, 300 + trial);
    const GlrResult exact = exact_glr(planted.ensemble);
    CHECK(pairwise_overlap(planted.ensemble, planted.profile) <= exact.statistic);

    const Permutation sigma = uniform_permutation(n, 900 + trial);
    // Relabeling the reference graph reorders the edge sum, so only that case is approximate.
    CHECK(exact_glr(relabel(planted.ensemble, 0, sigma)).statistic ==
          doctest::Approx(exact.statistic).epsilon(1e-12));
    for (int l = 1; l < m; ++l) {
      CHECK(exact_glr(relabel(planted.ensemble, l, sigma)).statistic == exact.statistic);
    }
  }
}

TEST_CASE("statistic under the null does not depend on rho") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    CHECK(exact_glr(sample_null(ModelParams{5, 2, 0.1}, seed)).statistic ==
          exact_glr(sample_null(ModelParams{5, 2, 0.8}, seed)).statistic);
  }
}

TEST_CASE("heuristic_glr is sound") {
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + trial % 4;
    const int m = 2 + trial % 2;
    const ModelParams params{n, m, 0.4};
    const GraphEnsemble ens = trial % 2 ? sample_null(params, trial)
                                        : sample_alternative(params, trial).ensemble;
    const GlrResult h = heuristic_glr(ens, HeuristicOptions{10, 5});
    CHECK(h.statistic <= exact_glr(ens).statistic);
    CHECK(h.statistic >= pairwise_overlap(ens, PermutationProfile::identity(n, m)));
    CHECK(pairwise_overlap(ens, h.maximizer) == h.statistic);
    CHECK(h.mode == StatisticMode::Heuristic);
  }
}

TEST_CASE("heuristic_glr recovers strong planted signals") {
  int recovered = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto planted = sample_alternative(ModelParams{6, 2, 0.95}, 5000 + trial);
    const double h = heuristic_glr(planted.ensemble, HeuristicOptions{10, 1}).statistic;
    if (h >= pairwise_overlap(planted.ensemble, planted.profile)) ++recovered;
  }
  CHECK(recovered >= 16);
}

TEST_CASE("heuristic_glr on a larger near-noiseless instance reaches the planted value") {
  const auto planted = sample_alternative(ModelParams{30, 3, 0.995}, 31);
  const double h = heuristic_glr(planted.ensemble).statistic;
  CHECK(h >= pairwise_overlap(planted.ensemble, planted.profile));
}

TEST_CASE("pairwise_match") {
  const auto ens = sample_null(ModelParams{6, 2, 0.0}, 61);
  const WeightedGraph& a = ens.graph(0);
  CHECK(pairwise_match(a, a, MatchMethod::Exhaustive).is_identity());

  const Permutation sigma({4, 2, 5, 0, 1, 3});
  const WeightedGraph b = relabel(a, sigma);
  const Permutation found = pairwise_match(a, b, MatchMethod::Exhaustive);
  double self = 0.0;
  for (double w : a.weights()) self += w * w;
  CHECK(match_objective(a, b, found) == doctest::Approx(self).epsilon(1e-12));
  CHECK(found == sigma);

  for (int trial = 0; trial < 100; ++trial) {
    const auto pair = sample_null(ModelParams{6, 2, 0.0}, 7000 + trial);
    const double spectral =
        match_objective(pair.graph(0), pair.graph(1),
                        pairwise_match(pair.graph(0), pair.graph(1), MatchMethod::Spectral));
    const double exhaustive =
        match_objective(pair.graph(0), pair.graph(1),
                        pairwise_match(pair.graph(0), pair.graph(1), MatchMethod::Exhaustive));
    CHECK(spectral <= exhaustive);
  }
  CHECK_THROWS_AS(pairwise_match(WeightedGraph(9), WeightedGraph(9), MatchMethod::Exhaustive),
                  std::invalid_argument);
}

TEST_CASE("spectral matching finds a noiseless relabeling") {
  const auto ens = sample_null(ModelParams{40, 2, 0.0}, 62);
  const Permutation sigma = uniform_permutation(40, 63);
  const WeightedGraph b = relabel(ens.graph(0), sigma);
  CHECK(pairwise_match(ens.graph(0), b, MatchMethod::Spectral) == sigma);
}

TEST_CASE("threshold arithmetic") {
  CHECK(threshold(ModelParams{100, 2, 0.0}, ThresholdParams{1.25, 0.0}) ==
        doctest::Approx(-std::pow(100.0, 1.25)));
  CHECK(threshold(ModelParams{100, 2, 0.3}, ThresholdParams{1.25, 0.3}) ==
        doctest::Approx(1168.7722339831621).epsilon(1e-12));
  CHECK(threshold(ModelParams{100, 3, 0.3}, ThresholdParams{1.25, 0.3}) ==
        doctest::Approx(4138.7722339831621).epsilon(1e-12));
  CHECK_THROWS_AS((ThresholdParams({1.0, 0.3}).validate()), std::invalid_argument);
  CHECK_THROWS_AS((ThresholdParams({1.5, 0.3}).validate()), std::invalid_argument);
}

TEST_CASE("glr_test decision contract") {
  for (int trial = 0; trial < 10; ++trial) {
    const auto planted = sample_alternative(ModelParams{5, 2, 0.6}, 40 + trial);
    for (double rho : {0.0, 0.3, 0.6}) {
      const ThresholdParams tp{1.1, rho};
      const auto exact = glr_test(planted.ensemble, tp, ExactMode{});
      const auto pl = glr_test(planted.ensemble, tp, PlantedMode{planted.profile});
      CHECK((exact.decision == Decision::H1) == (exact.statistic >= exact.threshold));
      CHECK((pl.decision == Decision::H1) == (pl.statistic >= pl.threshold));
      CHECK(pl.threshold == exact.threshold);
      if (pl.decision == Decision::H1) CHECK(exact.decision == Decision::H1);
      CHECK(pl.statistic <= exact.statistic);
    }
  }
}

TEST_CASE("planted mode misses rarely at the boundary") {
  const int n = 100;
  const double rho = std::sqrt(8.0 * std::log(100.0) / (2.0 * 99.0));
  int misses = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto planted =
        sample_alternative(ModelParams{n, 2, rho}, derive_key(71, {std::uint64_t(trial)}));
    const auto out =
        glr_test(planted.ensemble, ThresholdParams{1.25, rho}, PlantedMode{planted.profile});
    if (out.decision == Decision::H0) ++misses;
  }
  CHECK(misses <= 10);
}

TEST_CASE("planted statistic has mean mu") {
  const int n = 30, m = 3;
  const double rho = 0.4;
  std::vector<double> t;
  for (int trial = 0; trial < 400; ++trial) {
    const auto planted = sample_alternative(ModelParams{n, m, rho}, 9000 + trial);
    t.push_back(pairwise_overlap(planted.ensemble, planted.profile));
  }
  const double mu = 435.0 * 3.0 * rho;
  CHECK(std::abs(test::mean_of(t) - mu) < 4.0 * std::sqrt(test::variance_of(t) / 400.0));
}

TEST_CASE("miss_bound") {
  const double rho = 0.4313;
  const ModelParams params{100, 2, rho};
  const double b = miss_bound(params, ThresholdParams{1.25, rho});
  CHECK(b > 0.0);
  CHECK(b <= 1.0);
  // Second path: the replicated edge-tuple spectrum through the first Hanson-Wright form.
  const auto spec = scale_and_replicate(lemma2_spec(2, rho), 4950);
  CHECK(b == doctest::Approx(hw_bound_eq3(spec, std::pow(100.0, 1.25))).epsilon(1e-12));

  double previous = 2.0;
  for (double c = 1.01; c < 1.5; c += 0.02) {
    const double v = miss_bound(params, ThresholdParams{c, rho});
    CHECK(v <= previous);
    previous = v;
  }
  CHECK(miss_bound(ModelParams{100, 2, 0.1}, ThresholdParams{1.25, 0.5}) == 1.0);
}
