#include "mgd/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mgd/parallel.hpp"
#include "mgd/rng.hpp"

namespace mgd {

QuadFormSpec::QuadFormSpec(std::vector<Eigenvalue> eigs) : eigs_(std::move(eigs)) {
  for (const auto& e : eigs_) {
    if (e.multiplicity < 1) throw std::invalid_argument("eigenvalue multiplicity must be >= 1");
    if (!std::isfinite(e.value)) throw std::invalid_argument("eigenvalue must be finite");
  }
}

std::int64_t QuadFormSpec::dimension() const noexcept {
  std::int64_t d = 0;
  for (const auto& e : eigs_) d += e.multiplicity;
  return d;
}

double QuadFormSpec::frobenius_sq() const noexcept {
  double s = 0.0;
  for (const auto& e : eigs_) s += static_cast<double>(e.multiplicity) * e.value * e.value;
  return s;
}

double QuadFormSpec::spectral() const noexcept {
  double s = 0.0;
  for (const auto& e : eigs_) s = std::max(s, std::abs(e.value));
  return s;
}

double QuadFormSpec::trace() const noexcept {
  double s = 0.0;
  for (const auto& e : eigs_) s += static_cast<double>(e.multiplicity) * e.value;
  return s;
}

QuadFormSpec lemma2_spec(int m, double rho) {
  if (m < 2) throw std::invalid_argument("lemma2_spec: m must be at least 2");
  require_rho(rho);
  const double md = static_cast<double>(m);
  return QuadFormSpec({{((md - 1.0) + (md - 1.0) * (md - 1.0) * rho) / 2.0, 1},
                       {(rho - 1.0) / 2.0, m - 1}});
}

QuadFormSpec scale_and_replicate(const QuadFormSpec& spec, std::int64_t copies) {
  if (copies < 1) throw std::invalid_argument("scale_and_replicate: copies must be >= 1");
  std::vector<Eigenvalue> eigs(spec.eigenvalues().begin(), spec.eigenvalues().end());
  for (auto& e : eigs) e.multiplicity *= copies;
  return QuadFormSpec(std::move(eigs));
}

namespace {

void require_nonnegative_t(double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("tail bound needs t >= 0");
}

}  // namespace

double hw_bound_eq3(const QuadFormSpec& spec, double t) {
  require_nonnegative_t(t);
  if (t == 0.0) return 1.0;
  return std::exp(-t * t / (4.0 * (spec.frobenius_sq() + spec.spectral() * t)));
}

double hw_bound_eq4(const QuadFormSpec& spec, double t, double gamma) {
  require_nonnegative_t(t);
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("hw_bound_eq4: gamma must lie in (0, 1)");
  }
  if (t == 0.0) return 1.0;
  const double quadratic = gamma * t * t / spec.frobenius_sq();
  const double linear = (1.0 - gamma) * t / spec.spectral();
  return std::exp(-0.25 * std::min(quadratic, linear));
}

double chernoff_optimized(const QuadFormSpec& spec, double t) {
  require_nonnegative_t(t);
  const double norm = spec.spectral();
  if (!(norm > 0.0)) throw std::invalid_argument("chernoff_optimized: spectral norm must be > 0");
  if (t == 0.0) return 1.0;
  const double frob = spec.frobenius_sq();
  auto log_bound = [&](double theta) {
    return theta * theta * frob / (1.0 - 2.0 * norm * theta) - theta * t;
  };

  // The log bound is convex on the open interval, so golden section finds the
  // minimum.
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0;
  double hi = (1.0 - 1e-12) / (2.0 * norm);
  double x1 = hi - invphi * (hi - lo);
  double x2 = lo + invphi * (hi - lo);
  double f1 = log_bound(x1);
  double f2 = log_bound(x2);
  for (int iter = 0; iter < 400 && hi - lo > 1e-16 * hi; ++iter) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - invphi * (hi - lo);
      f1 = log_bound(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + invphi * (hi - lo);
      f2 = log_bound(x2);
    }
  }
  // The closed-form choice behind hw_bound_eq3 is a feasible point, and
  // theta -> 0 gives exp(0).
  const double theta_eq3 = t / (2.0 * (frob + norm * t));
  const double best = std::min({f1, f2, log_bound(theta_eq3), 0.0});
  return std::exp(best);
}

double exact_mgf_log(const QuadFormSpec& spec, double theta) {
  double s = 0.0;
  for (const auto& e : spec.eigenvalues()) {
    const double arg = 1.0 - 2.0 * e.value * theta;
    if (!(arg > 0.0)) {
      throw std::domain_error("exact_mgf_log: theta outside the convergence region");
    }
    s += static_cast<double>(e.multiplicity) * std::log(arg);
  }
  return -0.5 * s;
}

std::vector<double> sample_quadform(const QuadFormSpec& spec, std::uint64_t seed,
                                    std::int64_t count) {
  if (count < 1) throw std::invalid_argument("sample_quadform: count must be >= 1");
  std::vector<double> out(static_cast<std::size_t>(count));
  const auto eigs = spec.eigenvalues();
  parallel_ranges(out.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t s = begin; s < end; ++s) {
      CounterStream stream(derive_key(seed, {s}));
      double z = 0.0;
      for (const auto& e : eigs) {
        double chi = 0.0;
        for (std::int64_t r = 0; r < e.multiplicity; ++r) {
          const double w = stream.next_gaussian();
          chi += w * w;
        }
        z += e.value * chi;
      }
      out[s] = z;
    }
  });
  return out;
}

FalseAlarmExponent false_alarm_exponent(const ModelParams& params, const ThresholdParams& tp) {
  params.validate();
  tp.validate();
  const double n = params.n;
  const double m = params.m;
  const double log_n = std::log(n);
  const double pairs_n = static_cast<double>(edge_count(params.n));
  const double n_c = std::pow(n, tp.c);

  FalseAlarmExponent out;
  out.mu = pairs_n * static_cast<double>(edge_count(params.m)) * tp.rho;
  out.tau = out.mu - n_c;
  if (!(out.tau > 0.0)) {
    throw std::domain_error("false_alarm_exponent: threshold must be positive");
  }
  const double null_scale = pairs_n * m * (m - 1.0);  // C(n,2) m (m-1)

  out.union_term = (m - 1.0) * n * log_n;
  out.log_term = (m - 1.0) / 2.0 * log_n;
  out.stirling_term = -(m - 1.0) * (n - 1.0);
  out.quad_term = -out.tau * out.tau / (null_scale + 2.0 * (m - 1.0) * out.tau);
  out.total = out.union_term + out.log_term + out.stirling_term + out.quad_term;

  const double shrink_denominator = 2.0 * (m - 1.0) * out.mu / null_scale;
  const double shrink_threshold = 2.0 * n_c / out.mu;
  out.a_n = out.union_term * shrink_denominator;
  out.b_n = out.union_term * shrink_threshold + out.log_term;

  const double u = out.mu * out.mu / null_scale;
  out.relaxed_total = out.union_term + out.log_term + out.stirling_term -
                      u * (1.0 - shrink_denominator - shrink_threshold);
  return out;
}

}  // namespace mgd
