#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "mgd/bounds.hpp"
#include "mgd/rng.hpp"
#include "support.hpp"

using namespace mgd;

namespace {

QuadFormSpec unit_spec() { return QuadFormSpec({{1.0, 1}}); }

// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
  }
  return d;
}

}  // namespace

TEST_CASE("lemma2_spec closed forms") {
  for (int m : {2, 3, 6}) {
    const auto spec = lemma2_spec(m, 0.0);
    REQUIRE(spec.eigenvalues().size() == 2);
    CHECK(spec.eigenvalues()[0].value == (m - 1) / 2.0);
    CHECK(spec.eigenvalues()[0].multiplicity == 1);
    CHECK(spec.eigenvalues()[1].value == -0.5);
    CHECK(spec.eigenvalues()[1].multiplicity == m - 1);
    CHECK(spec.dimension() == m);
  }
  const auto spec = lemma2_spec(3, 0.5);
  CHECK(spec.eigenvalues()[0].value == 2.0);
  CHECK(spec.eigenvalues()[1].value == -0.25);
  CHECK(spec.eigenvalues()[1].multiplicity == 2);
  CHECK(spec.trace() == 1.5);
  CHECK(spec.frobenius_sq() >= spec.spectral() * spec.spectral());
}

TEST_CASE("scale_and_replicate") {
  const auto base = lemma2_spec(3, 0.3);
  const auto same = scale_and_replicate(base, 1);
  CHECK(same.frobenius_sq() == base.frobenius_sq());
  const auto rep = scale_and_replicate(lemma2_spec(2, 0.0), 10);
  CHECK(rep.frobenius_sq() == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(rep.spectral() == 0.5);
  const auto big = scale_and_replicate(base, 7);
  CHECK(big.trace() == doctest::Approx(7 * base.trace()).epsilon(1e-14));
  CHECK_THROWS_AS(scale_and_replicate(base, 0), std::invalid_argument);
}

TEST_CASE("Hanson-Wright forms") {
  const auto u = unit_spec();
  CHECK(hw_bound_eq3(u, 0.0) == 1.0);
  CHECK(hw_bound_eq3(u, 2.0) == doctest::Approx(std::exp(-4.0 / 12.0)).epsilon(1e-14));
  CHECK(hw_bound_eq4(u, 0.0, 0.5) == 1.0);
  CHECK(hw_bound_eq4(u, 2.0, 0.5) == doctest::Approx(std::exp(-0.25)).epsilon(1e-14));
  CHECK_THROWS_AS(hw_bound_eq4(u, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(hw_bound_eq3(u, -1.0), std::invalid_argument);

  for (int m : {2, 3, 5}) {
    for (double rho : {0.0, 0.3, 0.6}) {
      const auto spec = lemma2_spec(m, rho);
      double previous = 1.0;
      for (double t = 0.0; t <= 20.0; t += 0.25) {
        const double eq3 = hw_bound_eq3(spec, t);
        CHECK(eq3 <= previous);
        previous = eq3;
        CHECK(chernoff_optimized(spec, t) <= eq3 * (1 + 1e-12));
        for (int g = 1; g <= 9; ++g) CHECK(eq3 <= hw_bound_eq4(spec, t, g / 10.0) * (1 + 1e-12));
      }
    }
  }
}

TEST_CASE("chernoff_optimized matches a fine theta scan") {
  const auto u = unit_spec();
  CHECK(chernoff_optimized(u, 0.0) == 1.0);
  const double t = 2.0;
  const double hi = 0.5;  // 1 / (2 |A|)
  double best = 0.0;
  const int grid = 1'000'000;
  for (int i = 1; i < grid; ++i) {
    const double theta = hi * i / grid;
    best = std::min(best, theta * theta / (1.0 - 2.0 * theta) - theta * t);
  }
  CHECK(chernoff_optimized(u, t) == doctest::Approx(std::exp(best)).epsilon(1e-6));
}

TEST_CASE("exact_mgf_log") {
  const QuadFormSpec half({{0.5, 1}});
  CHECK(exact_mgf_log(half, 0.0) == 0.0);
  CHECK(exact_mgf_log(half, 0.5) == doctest::Approx(-0.5 * std::log(0.5)).epsilon(1e-14));
  CHECK_THROWS_AS(exact_mgf_log(half, 1.0), std::domain_error);

  const auto spec = lemma2_spec(3, 0.4);
  const double h = 1e-3;
  for (double theta = -0.4; theta < 0.2; theta += 0.01) {
    const double second = (exact_mgf_log(spec, theta + h) - 2 * exact_mgf_log(spec, theta) +
                           exact_mgf_log(spec, theta - h)) /
                          (h * h);
    CHECK(second >= -1e-8);
  }

  const auto z = sample_quadform(spec, 808, 1'000'000);
  for (double theta : {-0.05, 0.02, 0.05}) {
    std::vector<double> e(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) e[i] = std::exp(theta * z[i]);
    const double mean = test::mean_of(e);
    const double se = std::sqrt(test::variance_of(e) / e.size()) / mean;  // delta method
    CHECK(std::abs(std::log(mean) - exact_mgf_log(spec, theta)) < 3.0 * se);
  }
}

TEST_CASE("sample_quadform moments") {
  const int count = 200'000;
  const auto chi = sample_quadform(unit_spec(), 1, count);
  CHECK(std::abs(test::mean_of(chi) - 1.0) < 4.0 * std::sqrt(2.0 / count));

  for (double rho : {0.0, 0.5}) {
    const auto spec = lemma2_spec(2, rho);
    const auto z = sample_quadform(spec, 2, count);
    const double se_mean = std::sqrt(test::variance_of(z) / count);
    CHECK(std::abs(test::mean_of(z) - rho) < 4.0 * se_mean);
  }
  const auto spec = lemma2_spec(4, 0.3);
  const auto z = sample_quadform(spec, 3, count);
  CHECK(std::abs(test::mean_of(z) - spec.trace()) < 4.0 * std::sqrt(spec.variance() / count));
  CHECK(z == sample_quadform(spec, 3, count));
  CHECK_THROWS_AS(sample_quadform(spec, 3, 0), std::invalid_argument);
}

TEST_CASE("eigen representation has the law of the direct pair sum") {
  const int count = 100'000;
  for (int m : {2, 4}) {
    const double rho = 0.35;
    const auto via_spec = sample_quadform(lemma2_spec(m, rho), 11, count);
    std::vector<double> direct(count);
    std::vector<double> y(m);
    for (int s = 0; s < count; ++s) {
      CounterStream stream(derive_key(12, {std::uint64_t(s)}));
      const double shared = stream.next_gaussian();
      for (int k = 0; k < m; ++k) {
        y[k] = std::sqrt(rho) * shared + std::sqrt(1.0 - rho) * stream.next_gaussian();
      }
      double z = 0.0;
      for (int k = 0; k < m; ++k) {
        for (int l = k + 1; l < m; ++l) z += y[k] * y[l];
      }
      direct[s] = z;
    }
    // Critical value at level 1e-3: sqrt(ln(2 / 1e-3) / 2) * sqrt(2 / count).
    const double critical = std::sqrt(std::log(2000.0) / 2.0) * std::sqrt(2.0 / count);
    CHECK(ks_statistic(via_spec, direct) < critical);
  }
}

TEST_CASE("false_alarm_exponent components") {
  const int n = 1000, m = 3;
  const double rho = std::sqrt(8.0 / m * std::log(double(n)) / (n - 1));
  const auto f = false_alarm_exponent(ModelParams{n, m, rho}, ThresholdParams{1.25, rho});
  const double log_n = std::log(double(n));
  CHECK(f.union_term == doctest::Approx(2 * n * log_n).epsilon(1e-14));
  CHECK(f.log_term == doctest::Approx(log_n).epsilon(1e-14));
  CHECK(f.stirling_term == -2.0 * (n - 1));
  CHECK(f.mu == doctest::Approx(499500.0 * 3 * rho).epsilon(1e-14));
  CHECK(f.tau == doctest::Approx(f.mu - std::pow(double(n), 1.25)).epsilon(1e-14));
  CHECK(f.total == doctest::Approx(f.union_term + f.log_term + f.stirling_term + f.quad_term)
                       .epsilon(1e-14));
  CHECK(f.total <= f.relaxed_total);
  CHECK_THROWS_AS((false_alarm_exponent(ModelParams{n, m, 0.0}, ThresholdParams{1.25, 0.0})),
                  std::domain_error);
}

TEST_CASE("false_alarm_exponent turns strongly negative as n grows") {
  // At the detection boundary with c = 1.25 the exponent is still positive at
  // n = 1e4 (751.3 for m = 2); the union bound only bites from about 1e5 on.
  double previous = 0.0;
  for (int n : {100'000, 1'000'000}) {
    const double rho = std::sqrt(8.0 / 2 * std::log(double(n)) / (n - 1));
    const auto f = false_alarm_exponent(ModelParams{n, 2, rho}, ThresholdParams{1.25, rho});
    CHECK(f.total < -1e4);
    CHECK(f.total < previous);
    previous = f.total;
  }
  const double rho4 = std::sqrt(4.0 * std::log(1e4) / 9999.0);
  CHECK(false_alarm_exponent(ModelParams{10'000, 2, rho4}, ThresholdParams{1.25, rho4}).total ==
        doctest::Approx(751.3).epsilon(1e-4));
}
