#include "mgd/harness.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "mgd/bounds.hpp"
#include "mgd/ensemble_io.hpp"
#include "mgd/oracle.hpp"
#include "mgd/parallel.hpp"
#include "mgd/rng.hpp"

namespace mgd {

namespace {

constexpr std::uint64_t kHeuristicTag = 0x6865757269737469ULL;
constexpr std::uint64_t kBoundsTag = 0x626f756e6473ULL;

std::string join_reals(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format_real(values[i]);
  }
  return out;
}

template <typename T>
std::vector<T> sorted_unique(std::vector<T> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

double binomial_variance(double p, double trials) { return p * (1.0 - p) / trials; }

void write_or_throw(const std::string& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open output file: " + path);
  file << text;
  if (!file) throw std::runtime_error("failed writing output file: " + path);
}

}  // namespace

double signal_strength(int n, int m, double rho) {
  return rho * rho * m * (n - 1) / (8.0 * std::log(static_cast<double>(n)));
}

double rho_for_strength(int n, int m, double strength) {
  return std::sqrt(strength * 8.0 * std::log(static_cast<double>(n)) / (m * (n - 1.0)));
}

void ExperimentConfig::validate() const {
  // The model constraints are per-field, so each axis is checked on its own.
  for (int n : n_values) ModelParams{n, 2, 0.0}.validate();
  for (int m : m_values) ModelParams{2, m, 0.0}.validate();
  for (double rho : rho_values) require_rho(rho);
  if (trials_per_point < 1) throw std::invalid_argument("trials_per_point must be >= 1");
  ThresholdParams{c, 0.0}.validate();
  if (mode == StatisticMode::Heuristic && heuristic_restarts < 1) {
    throw std::invalid_argument("heuristic restarts must be >= 1");
  }
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  std::ostringstream text;
  text << "n=";
  for (int n : config.n_values) text << n << ',';
  text << ";m=";
  for (int m : config.m_values) text << m << ',';
  text << ";rho=" << join_reals(config.rho_values) << ";trials=" << config.trials_per_point
       << ";c=" << format_real(config.c) << ";mode=" << to_string(config.mode)
       << ";seed=" << config.master_seed << ";budget=" << config.budget
       << ";restarts=" << config.heuristic_restarts;
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text.str()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

PhasePoint run_point(int n, int m, double rho, std::int64_t trials, double c,
                     StatisticMode mode, std::uint64_t seed, std::uint64_t budget,
                     int heuristic_restarts) {
  const ModelParams params{n, m, rho};
  params.validate();
  if (trials < 1) throw std::invalid_argument("run_point: trials must be >= 1");
  const ThresholdParams tp{c, rho};
  tp.validate();
  if (mode == StatisticMode::Exact && profile_count(n, m) > budget) {
    throw BudgetExceeded("exact mode needs " + std::to_string(profile_count(n, m)) +
                         " profiles at n=" + std::to_string(n) + ", m=" + std::to_string(m) +
                         ", budget is " + std::to_string(budget));
  }
  if (mode == StatisticMode::Heuristic && heuristic_restarts < 1) {
    throw std::invalid_argument("run_point: heuristic restarts must be >= 1");
  }

  auto mode_for = [&](std::uint64_t s, const PermutationProfile& planted) -> GlrMode {
    switch (mode) {
      case StatisticMode::Exact:
        return ExactMode{budget};
      case StatisticMode::Heuristic:
        return HeuristicMode{HeuristicOptions{heuristic_restarts, derive_key(s, {kHeuristicTag})}};
      case StatisticMode::Planted:
        return PlantedMode{planted};
    }
    throw std::logic_error("unreachable statistic mode");
  };

  const PermutationProfile identity = PermutationProfile::identity(n, m);
  std::vector<double> false_alarm(static_cast<std::size_t>(trials));
  std::vector<double> miss(static_cast<std::size_t>(trials));
  parallel_ranges(false_alarm.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      const std::uint64_t s_alt = trial_seed(seed, params, t, Hypothesis::Alternative);
      const PlantedEnsemble planted = sample_alternative(params, s_alt);
      miss[t] = glr_test(planted.ensemble, tp, mode_for(s_alt, planted.profile)).decision ==
                        Decision::H0
                    ? 1.0
                    : 0.0;
      const std::uint64_t s_null = trial_seed(seed, params, t, Hypothesis::Null);
      const GraphEnsemble null = sample_null(params, s_null);
      false_alarm[t] =
          glr_test(null, tp, mode_for(s_null, identity)).decision == Decision::H1 ? 1.0 : 0.0;
    }
  });

  PhasePoint p;
  p.n = n;
  p.m = m;
  p.rho = rho;
  p.signal_strength = signal_strength(n, m, rho);
  p.trials = trials;
  p.mode = to_string(mode);
  const auto count = static_cast<double>(trials);
  p.type1_rate = pairwise_sum(false_alarm) / count;
  p.type2_rate = pairwise_sum(miss) / count;
  p.total_error = p.type1_rate + p.type2_rate;
  p.stderr_total =
      std::sqrt(binomial_variance(p.type1_rate, count) + binomial_variance(p.type2_rate, count));
  return p;
}

std::string phase_csv_header() {
  return "n,m,rho,signal_strength,type1_rate,type2_rate,total_error,stderr_total,trials,mode";
}

std::string phase_csv_row(const PhasePoint& p) {
  std::ostringstream row;
  row << p.n << ',' << p.m << ',' << format_real(p.rho) << ',' << format_real(p.signal_strength)
      << ',' << format_real(p.type1_rate) << ',' << format_real(p.type2_rate) << ','
      << format_real(p.total_error) << ',' << format_real(p.stderr_total) << ',' << p.trials
      << ',' << p.mode;
  return row.str();
}

std::vector<PhasePoint> phase_diagram(const ExperimentConfig& config) {
  config.validate();
  std::vector<PhasePoint> points;
  for (int n : sorted_unique(config.n_values)) {
    for (int m : sorted_unique(config.m_values)) {
      for (double rho : sorted_unique(config.rho_values)) {
        try {
          points.push_back(run_point(n, m, rho, config.trials_per_point, config.c, config.mode,
                                     config.master_seed, config.budget,
                                     config.heuristic_restarts));
        } catch (const BudgetExceeded&) {
          const double nan = std::numeric_limits<double>::quiet_NaN();
          points.push_back(PhasePoint{n, m, rho, signal_strength(n, m, rho), nan, nan, nan, nan,
                                      0, "skipped"});
        }
      }
    }
  }
  if (!config.output_path.empty()) {
    std::ostringstream text;
    write_phase_csv(text, config, points);
    write_or_throw(config.output_path, text.str());
  }
  return points;
}

void write_phase_csv(std::ostream& out, const ExperimentConfig& config,
                     const std::vector<PhasePoint>& points) {
  out << phase_csv_header() << '\n';
  for (const auto& p : points) out << phase_csv_row(p) << '\n';
  char footer[96];
  std::snprintf(footer, sizeof footer, "# config_hash=%016llx master_seed=%llu\n",
                static_cast<unsigned long long>(config_hash(config)),
                static_cast<unsigned long long>(config.master_seed));
  out << footer;
}

std::vector<PhasePoint> m_separation_report(int n, const std::vector<int>& m_values, double rho,
                                            std::int64_t trials, std::uint64_t seed, double c) {
  std::vector<PhasePoint> out;
  for (int m : m_values) {
    out.push_back(run_point(n, m, rho, trials, c, StatisticMode::Planted, seed));
  }
  return out;
}

std::vector<BoundRow> validate_bounds(const std::vector<int>& m_values,
                                      const std::vector<double>& rho_values, int t_points,
                                      std::int64_t samples, std::uint64_t seed) {
  if (samples < 10'000) throw std::invalid_argument("validate_bounds: samples must be >= 10^4");
  if (t_points < 1) throw std::invalid_argument("validate_bounds: t_points must be >= 1");
  static constexpr double kGammas[] = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  constexpr double kSlack = 1.0 + 1e-12;

  std::vector<BoundRow> rows;
  for (int m : m_values) {
    for (double rho : rho_values) {
      const QuadFormSpec spec = lemma2_spec(m, rho);
      const std::vector<double> z = sample_quadform(
          spec, derive_key(seed, {kBoundsTag, static_cast<std::uint64_t>(m),
                                  std::bit_cast<std::uint64_t>(rho)}),
          samples);
      const auto count = static_cast<double>(samples);
      const double mean = pairwise_sum(z) / count;
      std::vector<double> central2(z.size());
      std::vector<double> central4(z.size());
      for (std::size_t s = 0; s < z.size(); ++s) {
        const double d = z[s] - mean;
        central2[s] = d * d;
        central4[s] = d * d * d * d;
      }
      const double var = pairwise_sum(central2) / (count - 1.0);
      const double m4 = pairwise_sum(central4) / count;
      const double trace = spec.trace();
      const double sd = std::sqrt(spec.variance());

      std::vector<double> centered(z.size());
      for (std::size_t s = 0; s < z.size(); ++s) centered[s] = z[s] - trace;
      std::sort(centered.begin(), centered.end());

      for (int j = 1; j <= t_points; ++j) {
        BoundRow row;
        row.m = m;
        row.rho = rho;
        row.t = 4.0 * sd * j / t_points;
        const auto below = std::lower_bound(centered.begin(), centered.end(), row.t);
        const auto hits = static_cast<double>(centered.end() - below);
        row.empirical_tail = hits / count;
        row.mc_stderr = std::sqrt(binomial_variance(row.empirical_tail, count));
        row.eq3 = hw_bound_eq3(spec, row.t);
        row.eq4_half = hw_bound_eq4(spec, row.t, 0.5);
        row.chernoff_opt = chernoff_optimized(spec, row.t);
        row.pass = row.empirical_tail <= row.eq3 + 3.0 * row.mc_stderr;
        row.ordered = row.chernoff_opt <= row.eq3 * kSlack;
        for (double g : kGammas) {
          row.ordered = row.ordered && row.eq3 <= hw_bound_eq4(spec, row.t, g) * kSlack;
        }
        row.empirical_mean = mean;
        row.mean_stderr = std::sqrt(var / count);
        row.empirical_variance = var;
        row.variance_stderr = std::sqrt(std::max(m4 - var * var, 0.0) / count);
        row.trace = trace;
        row.expected_variance = spec.variance();
        rows.push_back(row);
      }
    }
  }
  return rows;
}

void write_bounds_csv(std::ostream& out, const std::vector<BoundRow>& rows) {
  out << "m,rho,t,empirical_tail,mc_stderr,eq3,eq4_gamma_0.5,chernoff_opt,pass,ordered,"
         "empirical_mean,mean_stderr,expected_mean,empirical_variance,variance_stderr,"
         "expected_variance\n";
  for (const auto& r : rows) {
    out << r.m << ',' << format_real(r.rho) << ',' << format_real(r.t) << ','
        << format_real(r.empirical_tail) << ',' << format_real(r.mc_stderr) << ','
        << format_real(r.eq3) << ',' << format_real(r.eq4_half) << ','
        << format_real(r.chernoff_opt) << ',' << (r.pass ? "true" : "false") << ','
        << (r.ordered ? "true" : "false") << ',' << format_real(r.empirical_mean) << ','
        << format_real(r.mean_stderr) << ',' << format_real(r.trace) << ','
        << format_real(r.empirical_variance) << ',' << format_real(r.variance_stderr) << ','
        << format_real(r.expected_variance) << '\n';
  }
}

std::vector<TvRow> tv_sweep(int n, int m, const std::vector<double>& rho_values,
                            std::int64_t trials, std::uint64_t budget, std::uint64_t seed) {
  std::vector<TvRow> rows;
  for (double rho : rho_values) {
    const ModelParams params{n, m, rho};
    const TVEstimate tv = estimate_tv(params, trials, budget, seed);
    const BayesError bayes = bayes_test_error(params, trials, budget, seed);
    rows.push_back(TvRow{rho, tv.value, tv.std_error, bayes.total, trials});
  }
  return rows;
}

void write_tv_csv(std::ostream& out, const std::vector<TvRow>& rows) {
  out << "rho,tv_estimate,stderr,bayes_error,trials\n";
  for (const auto& r : rows) {
    out << format_real(r.rho) << ',' << format_real(r.tv_estimate) << ','
        << format_real(r.std_error) << ',' << format_real(r.bayes_error) << ',' << r.trials
        << '\n';
  }
}

}  // namespace mgd
