#include <doctest.h>

#include <cmath>

#include "mgd/glr.hpp"
#include "mgd/oracle.hpp"
#include "support.hpp"

using namespace mgd;
using mgd::test::all_permutations;
using mgd::test::ensemble_from;

TEST_CASE("loglr_given_profile") {
  const auto ens = sample_null(ModelParams{5, 3, 0.0}, 4);
  CHECK(loglr_given_profile(ens, PermutationProfile::identity(5, 3), 0.0) == 0.0);

  const auto one = ensemble_from(2, {{1.0}, {1.0}});
  const double expected = -0.5 * std::log(0.75) - 0.5 * (1.0 / 3 + 1.0 / 3 - 4.0 / 3);
  CHECK(loglr_given_profile(one, PermutationProfile::identity(2, 2), 0.5) ==
        doctest::Approx(expected).epsilon(1e-14));
  CHECK(expected == doctest::Approx(0.47717).epsilon(1e-5));
}

TEST_CASE("per-edge log ratio gradient matches finite differences") {
  const int m = 3;
  const double rho = 0.45;
  const Eigen::MatrixXd sigma = (1.0 - rho) * Eigen::MatrixXd::Identity(m, m) +
                                rho * Eigen::MatrixXd::Ones(m, m);
  const Eigen::MatrixXd precision_minus_identity =
      sigma.inverse() - Eigen::MatrixXd::Identity(m, m);
  const Eigen::Vector3d x(0.3, -1.1, 0.8);
  const Eigen::Vector3d grad = -precision_minus_identity * x;
  const double h = 1e-5;
  for (int k = 0; k < m; ++k) {
    auto at = [&](double shift) {
      std::vector<std::vector<double>> w{{x(0)}, {x(1)}, {x(2)}};
      w[k][0] += shift;
      return loglr_given_profile(ensemble_from(2, w), PermutationProfile::identity(2, m), rho);
    };
    CHECK(std::abs((at(h) - at(-h)) / (2 * h) - grad(k)) < 1e-6);
  }
}

TEST_CASE("likelihood ratio basics") {
  const auto ens = sample_null(ModelParams{4, 3, 0.0}, 12);
  CHECK(exact_likelihood_ratio(ens, 0.0) == 1.0);

  const auto one = sample_alternative(ModelParams{2, 3, 0.6}, 3).ensemble;
  CHECK(exact_likelihood_ratio(one, 0.6) ==
        doctest::Approx(std::exp(loglr_given_profile(one, PermutationProfile::identity(2, 3), 0.6)))
            .epsilon(1e-14));

  CHECK_THROWS_AS((exact_likelihood_ratio(sample_null(ModelParams{7, 3, 0.0}, 1), 0.5)),
                  BudgetExceeded);
}

TEST_CASE("averaging per-profile ratios reproduces the likelihood ratio") {
  const auto ens = sample_alternative(ModelParams{4, 3, 0.5}, 21).ensemble;
  const auto perms = all_permutations(4);
  const Permutation id = Permutation::identity(4);
  double sum = 0.0;
  for (const auto& p : perms) {
    for (const auto& q : perms) {
      sum += std::exp(loglr_given_profile(ens, PermutationProfile(4, {p, q}), 0.5));
    }
  }
  CHECK(exact_likelihood_ratio(ens, 0.5) ==
        doctest::Approx(sum / (24.0 * 24.0)).epsilon(1e-12));
}

TEST_CASE("likelihood ratio is invariant under relabeling one graph") {
  const auto ens = sample_alternative(ModelParams{3, 2, 0.7}, 31).ensemble;
  const double base = exact_likelihood_ratio(ens, 0.7);
  for (const auto& sigma : all_permutations(3)) {
    for (int k = 0; k < 2; ++k) {
      CHECK(exact_likelihood_ratio(relabel(ens, k, sigma), 0.7) ==
            doctest::Approx(base).epsilon(1e-12));
    }
  }
}

TEST_CASE("log-sum-exp survives large log ratios") {
  const auto ens = sample_alternative(ModelParams{6, 2, 0.99}, 5).ensemble;
  const double log_l = log_likelihood_ratio(ens, 0.99);
  CHECK(std::isfinite(log_l));
  CHECK(log_l > 10.0);
}

TEST_CASE("likelihood ratio has unit mean under the null") {
  const ModelParams params{4, 2, 0.5};
  std::vector<double> l;
  for (std::uint64_t t = 0; t < 10'000; ++t) {
    l.push_back(exact_likelihood_ratio(sample_null(params, trial_seed(77, params, t, Hypothesis::Null)),
                                       0.5));
  }
  CHECK(std::abs(test::mean_of(l) - 1.0) < 4.0 * std::sqrt(test::variance_of(l) / l.size()));
}

TEST_CASE("estimate_tv") {
  const auto zero = estimate_tv(ModelParams{4, 2, 0.0}, 500, kDefaultProfileBudget, 9);
  CHECK(zero.value == 0.0);
  CHECK(zero.std_error == 0.0);
  CHECK(zero.trials == 500);

  std::vector<double> values, errors;
  for (double rho : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const auto tv = estimate_tv(ModelParams{4, 2, rho}, 2000, kDefaultProfileBudget, 9);
    CHECK(tv.value >= 0.0);
    CHECK(tv.value <= 1.0);
    values.push_back(tv.value);
    errors.push_back(tv.std_error);
  }
  for (std::size_t i = 1; i < values.size(); ++i) {
    CHECK(values[i] >= values[i - 1] -
                           3.0 * std::sqrt(errors[i] * errors[i] + errors[i - 1] * errors[i - 1]));
  }
  CHECK(values.back() > 0.0);

  const auto q = estimate_tv(ModelParams{4, 2, 0.9}, 10'000, kDefaultProfileBudget, 10);
  const auto p = estimate_tv(ModelParams{4, 2, 0.9}, 10'000, kDefaultProfileBudget, 10,
                             Hypothesis::Alternative);
  CHECK(std::abs(q.value - p.value) <=
        3.0 * std::sqrt(q.std_error * q.std_error + p.std_error * p.std_error));
  CHECK(estimate_tv(ModelParams{4, 2, 0.5}, 300, kDefaultProfileBudget, 4).value ==
        estimate_tv(ModelParams{4, 2, 0.5}, 300, kDefaultProfileBudget, 4).value);
}

TEST_CASE("bayes_test_error") {
  const auto guess = bayes_test_error(ModelParams{4, 2, 0.0}, 200, kDefaultProfileBudget, 1);
  CHECK(guess.type1 == 1.0);
  CHECK(guess.type2 == 0.0);
  CHECK(guess.total == 1.0);

  const ModelParams strong{4, 3, 0.9};
  const auto b = bayes_test_error(strong, 2000, kDefaultProfileBudget, 2);
  CHECK(b.total < 0.9);
  CHECK(b.total >= 0.0);
  // The alternative-side form is bounded; the null-side one is heavy tailed at this rho.
  const auto tv = estimate_tv(strong, 2000, kDefaultProfileBudget, 2, Hypothesis::Alternative);
  CHECK(std::abs(b.total - (1.0 - tv.value)) <=
        3.0 * std::sqrt(b.std_error * b.std_error + tv.std_error * tv.std_error));
}
