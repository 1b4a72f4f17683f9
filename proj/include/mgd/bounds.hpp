#pragma once

// Tail bounds for Gaussian quadratic forms Z = X^T A X, with A described by
// its spectrum. Every form that appears in the detection analysis has a known
// spectrum, so norms here are exact.

#include <cstdint>
#include <vector>

#include "mgd/glr.hpp"
#include "mgd/model.hpp"

namespace mgd {

struct Eigenvalue {
  double value = 0.0;
  std::int64_t multiplicity = 1;
};

class QuadFormSpec {
 public:
  QuadFormSpec() = default;
  /// Throws std::invalid_argument if a multiplicity is < 1 or a value is not finite.
  explicit QuadFormSpec(std::vector<Eigenvalue> eigs);

  std::span<const Eigenvalue> eigenvalues() const noexcept { return eigs_; }
  std::int64_t dimension() const noexcept;

  double frobenius_sq() const noexcept;  // sum mult * lambda^2
  double spectral() const noexcept;      // max |lambda|
  double trace() const noexcept;         // sum mult * lambda  == E[Z]
  double variance() const noexcept { return 2.0 * frobenius_sq(); }

 private:
  std::vector<Eigenvalue> eigs_;
};

/// Spectrum of sum_{k<l} Y_k Y_l for a unit-variance Gaussian m-vector with
/// pairwise correlation rho: ((m-1) + (m-1)^2 rho)/2 once and (rho-1)/2 with
/// multiplicity m-1.
QuadFormSpec lemma2_spec(int m, double rho);

/// Spectrum of the sum of `copies` independent copies of the form.
QuadFormSpec scale_and_replicate(const QuadFormSpec& spec, std::int64_t copies);

/// exp(-t^2 / (4 (|A|_F^2 + |A| t))).
double hw_bound_eq3(const QuadFormSpec& spec, double t);

/// exp(-min{gamma t^2 / |A|_F^2, (1 - gamma) t / |A|} / 4), 0 < gamma < 1.
double hw_bound_eq4(const QuadFormSpec& spec, double t, double gamma);

/// min over theta in (0, 1/(2|A|)) of exp(theta^2 |A|_F^2 / (1 - 2 |A| theta) - theta t),
/// by golden-section search on the log. Never larger than hw_bound_eq3.
double chernoff_optimized(const QuadFormSpec& spec, double t);

/// ln E[exp(theta Z)] = -1/2 sum mult * ln(1 - 2 lambda theta).
/// Throws std::domain_error outside the convergence region.
double exact_mgf_log(const QuadFormSpec& spec, double theta);

/// `count` independent draws of Z = sum lambda_k W_k^2. Draw s uses the
/// Gaussian stream keyed by (seed, s), so output is independent of threading.
std::vector<double> sample_quadform(const QuadFormSpec& spec, std::uint64_t seed,
                                    std::int64_t count);

/// Log of the union-bound estimate of Q(T > tau) and its pieces.
struct FalseAlarmExponent {
  double total = 0.0;          // union + log + stirling + quad
  double union_term = 0.0;     // (m-1) n log n
  double log_term = 0.0;       // ((m-1)/2) log n
  double stirling_term = 0.0;  // -(m-1)(n-1)
  double quad_term = 0.0;      // -tau^2 / (C(n,2) m (m-1) + 2 (m-1) tau)
  double a_n = 0.0;            // (m-1) n log n * 2 (m-1) mu / (C(n,2) m (m-1))
  double b_n = 0.0;            // (m-1) n log n * 2 n^c / mu + ((m-1)/2) log n
  double mu = 0.0;             // C(n,2) C(m,2) rho
  double tau = 0.0;            // mu - n^c
  /// The exponent after relaxing quad_term with 1/(1+x) >= 1 - x and
  /// tau^2 >= mu^2 (1 - 2 n^c / mu), and dropping the positive cross term:
  ///   union + log + stirling - U (1 - a - b),  U = mu^2 / (C(n,2) m (m-1)).
  /// Equals stirling + a_n + b_n when union_term == U.
  double relaxed_total = 0.0;
};

/// Throws std::domain_error when tau <= 0 (the bound is vacuous).
FalseAlarmExponent false_alarm_exponent(const ModelParams& params, const ThresholdParams& tp);

}  // namespace mgd
