#include "mgd/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "mgd/parallel.hpp"
#include "profile_odometer.hpp"

namespace mgd {

namespace {

// Per-edge log-ratio pieces shared by every profile of one (m, rho).
struct EdgeLogRatio {
  explicit EdgeLogRatio(int m, double rho)
      : precision_minus_identity(sigma_inverse_minus_identity(m, rho)),
        half_log_det(0.5 * std::log(det_sigma(m, rho))),
        x(static_cast<std::size_t>(m)) {}

  // Sum over edges of -1/2 ln det Sigma - 1/2 x^T (Sigma^{-1} - I) x.
  double sum(const GraphEnsemble& ensemble,
             const std::vector<std::vector<std::size_t>>& maps) {
    const int m = ensemble.graphs();
    const std::size_t edges = edge_count(ensemble.nodes());
    double total = 0.0;
    for (std::size_t e = 0; e < edges; ++e) {
      for (int k = 0; k < m; ++k) x[k] = ensemble.graph(k).weights()[maps[k][e]];
      double quad = 0.0;
      for (int k = 0; k < m; ++k) {
        for (int l = 0; l < m; ++l) quad += x[k] * precision_minus_identity(k, l) * x[l];
      }
      total += -half_log_det - 0.5 * quad;
    }
    return total;
  }

  Eigen::MatrixXd precision_minus_identity;
  double half_log_det;
  std::vector<double> x;
};

double sample_std_error(std::span<const double> values, double mean) {
  const auto count = values.size();
  if (count < 2) return 0.0;
  std::vector<double> sq(count);
  for (std::size_t i = 0; i < count; ++i) sq[i] = (values[i] - mean) * (values[i] - mean);
  const double var = pairwise_sum(sq) / static_cast<double>(count - 1);
  return std::sqrt(var / static_cast<double>(count));
}

}  // namespace

double loglr_given_profile(const GraphEnsemble& ensemble, const PermutationProfile& profile,
                           double rho) {
  require_compatible(ensemble, profile);
  std::vector<std::vector<std::size_t>> maps(static_cast<std::size_t>(ensemble.graphs()));
  for (int k = 0; k < ensemble.graphs(); ++k) {
    detail::fill_edge_map(profile.from_reference(k), maps[k]);
  }
  EdgeLogRatio edge(ensemble.graphs(), rho);
  return edge.sum(ensemble, maps);
}

double log_likelihood_ratio(const GraphEnsemble& ensemble, double rho, std::uint64_t budget) {
  const int n = ensemble.nodes();
  const int m = ensemble.graphs();
  const std::uint64_t total = profile_count(n, m);
  if (total > budget) {
    throw BudgetExceeded("likelihood ratio needs " + std::to_string(total) +
                         " profiles, budget is " + std::to_string(budget));
  }
  EdgeLogRatio edge(m, rho);
  detail::ProfileOdometer odometer(n, m, 0);
  // Streaming log-sum-exp: running max and the sum of exp(v - max).
  double peak = -std::numeric_limits<double>::infinity();
  double scaled = 0.0;
  for (std::uint64_t r = 0; r < total; ++r) {
    const double v = edge.sum(ensemble, odometer.edge_maps());
    if (v > peak) {
      scaled = scaled * std::exp(peak - v) + 1.0;
      peak = v;
    } else {
      scaled += std::exp(v - peak);
    }
    if (r + 1 < total) odometer.advance();
  }
  return peak + std::log(scaled / static_cast<double>(total));
}

double exact_likelihood_ratio(const GraphEnsemble& ensemble, double rho, std::uint64_t budget) {
  return std::exp(log_likelihood_ratio(ensemble, rho, budget));
}

TVEstimate estimate_tv(const ModelParams& params, std::int64_t trials, std::uint64_t budget,
                       std::uint64_t seed, Hypothesis side) {
  params.validate();
  if (trials < 1) throw std::invalid_argument("estimate_tv: trials must be >= 1");
  if (profile_count(params.n, params.m) > budget) {
    throw BudgetExceeded("estimate_tv: likelihood ratio exceeds the profile budget");
  }
  std::vector<double> terms(static_cast<std::size_t>(trials));
  parallel_ranges(terms.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      const std::uint64_t s = trial_seed(seed, params, t, side);
      if (side == Hypothesis::Null) {
        const double lr = exact_likelihood_ratio(sample_null(params, s), params.rho, budget);
        terms[t] = 0.5 * std::abs(lr - 1.0);
      } else {
        const double lr =
            exact_likelihood_ratio(sample_alternative(params, s).ensemble, params.rho, budget);
        terms[t] = 1.0 - std::min(1.0, 1.0 / lr);
      }
    }
  });
  TVEstimate out;
  out.trials = trials;
  out.side = side;
  out.value = pairwise_sum(terms) / static_cast<double>(trials);
  out.std_error = sample_std_error(terms, out.value);
  return out;
}

BayesError bayes_test_error(const ModelParams& params, std::int64_t trials,
                            std::uint64_t budget, std::uint64_t seed) {
  params.validate();
  if (trials < 1) throw std::invalid_argument("bayes_test_error: trials must be >= 1");
  if (profile_count(params.n, params.m) > budget) {
    throw BudgetExceeded("bayes_test_error: likelihood ratio exceeds the profile budget");
  }
  std::vector<double> false_alarm(static_cast<std::size_t>(trials));
  std::vector<double> miss(static_cast<std::size_t>(trials));
  parallel_ranges(false_alarm.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      // Ties at L = 1 declare H1.
      const double lr_null = exact_likelihood_ratio(
          sample_null(params, trial_seed(seed, params, t, Hypothesis::Null)), params.rho,
          budget);
      false_alarm[t] = lr_null >= 1.0 ? 1.0 : 0.0;
      const double lr_alt = exact_likelihood_ratio(
          sample_alternative(params, trial_seed(seed, params, t, Hypothesis::Alternative))
              .ensemble,
          params.rho, budget);
      miss[t] = lr_alt < 1.0 ? 1.0 : 0.0;
    }
  });
  BayesError out;
  out.trials = trials;
  const auto count = static_cast<double>(trials);
  out.type1 = pairwise_sum(false_alarm) / count;
  out.type2 = pairwise_sum(miss) / count;
  out.total = out.type1 + out.type2;
  out.std_error =
      std::sqrt(out.type1 * (1.0 - out.type1) / count + out.type2 * (1.0 - out.type2) / count);
  return out;
}

}  // namespace mgd
