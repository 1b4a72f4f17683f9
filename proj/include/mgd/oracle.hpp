#pragma once

// Exact Bayes-optimal quantities at desk scale: the likelihood ratio
// averaged over every permutation profile, and Monte Carlo estimates of the
// total-variation distance between the two hypotheses.

#include <cstdint>

#include "mgd/glr.hpp"
#include "mgd/model.hpp"

namespace mgd {

/// ln P(X | profile) / Q(X) = sum_{i<j} [-1/2 ln det Sigma - 1/2 x_ij^T (Sigma^{-1} - I) x_ij]
/// with x_ij the edge tuple assembled through the profile.
double loglr_given_profile(const GraphEnsemble& ensemble, const PermutationProfile& profile,
                           double rho);

/// ln of the profile-averaged likelihood ratio, by streaming log-sum-exp.
/// Throws BudgetExceeded when (n!)^(m-1) > budget.
double log_likelihood_ratio(const GraphEnsemble& ensemble, double rho,
                            std::uint64_t budget = kDefaultProfileBudget);

/// exp(log_likelihood_ratio(...)).
double exact_likelihood_ratio(const GraphEnsemble& ensemble, double rho,
                              std::uint64_t budget = kDefaultProfileBudget);

struct TVEstimate {
  double value = 0.0;
  double std_error = 0.0;  // sample standard deviation / sqrt(trials)
  std::int64_t trials = 0;
  Hypothesis side = Hypothesis::Null;
};

/// Monte Carlo total-variation distance between the hypotheses at `params`.
/// Null side: mean of |L - 1| / 2 over null ensembles.
/// Alternative side: mean of 1 - min(1, 1/L) over planted ensembles.
/// Trial t uses trial_seed(seed, params, t, side); means use pairwise summation
/// in trial order.
TVEstimate estimate_tv(const ModelParams& params, std::int64_t trials,
                       std::uint64_t budget, std::uint64_t seed,
                       Hypothesis side = Hypothesis::Null);

struct BayesError {
  double type1 = 0.0;  // null ensembles with L >= 1
  double type2 = 0.0;  // planted ensembles with L < 1
  double total = 0.0;
  double std_error = 0.0;
  std::int64_t trials = 0;
};

/// Empirical error of "declare H1 iff L >= 1" over `trials` ensembles from
/// each hypothesis, drawn with the same trial seeds as estimate_tv.
BayesError bayes_test_error(const ModelParams& params, std::int64_t trials,
                            std::uint64_t budget, std::uint64_t seed);

}  // namespace mgd
