#pragma once

// Monte Carlo experiment orchestration and CSV emission.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mgd/glr.hpp"
#include "mgd/model.hpp"

namespace mgd {

/// rho^2 m (n - 1) / (8 log n); equals 1 exactly on the detection boundary
/// rho^2 = (8 / m) log n / (n - 1).
double signal_strength(int n, int m, double rho);

/// The rho at which signal_strength(n, m, rho) == strength.
double rho_for_strength(int n, int m, double strength);

struct ExperimentConfig {
  std::vector<int> n_values;
  std::vector<int> m_values;
  std::vector<double> rho_values;
  std::int64_t trials_per_point = 100;
  double c = kDefaultThresholdExponent;
  StatisticMode mode = StatisticMode::Planted;
  std::uint64_t master_seed = 0;
  std::uint64_t budget = kDefaultProfileBudget;
  int heuristic_restarts = 10;
  std::string output_path;

  /// Throws std::invalid_argument on any invalid grid value or setting.
  void validate() const;
};

/// FNV-1a over a canonical text form of every field except output_path.
std::uint64_t config_hash(const ExperimentConfig& config);

struct PhasePoint {
  int n = 0;
  int m = 0;
  double rho = 0.0;
  double signal_strength = 0.0;
  double type1_rate = 0.0;
  double type2_rate = 0.0;
  double total_error = 0.0;
  double stderr_total = 0.0;
  std::int64_t trials = 0;
  std::string mode;  // exact | heuristic | planted | skipped
};

/// Runs `trials` independent (alternative, null) pairs through glr_test with
/// tp = {c, rho}. Type-I counts null samples declared H1, type-II planted
/// samples declared H0. In planted mode the planted side uses the true
/// profile and the null side the identity profile. Trial seeds come from
/// trial_seed(seed, {n, m, rho}, trial, hypothesis).
/// Throws BudgetExceeded if exact mode is infeasible at (n, m, budget).
PhasePoint run_point(int n, int m, double rho, std::int64_t trials, double c,
                     StatisticMode mode, std::uint64_t seed,
                     std::uint64_t budget = kDefaultProfileBudget, int heuristic_restarts = 10);

std::string phase_csv_header();
std::string phase_csv_row(const PhasePoint& point);

/// One row per (n, m, rho) cell in lexicographic order (grid values sorted),
/// infeasible cells marked `skipped`, then a `# config_hash=... master_seed=...`
/// line. Writes config.output_path when it is non-empty.
std::vector<PhasePoint> phase_diagram(const ExperimentConfig& config);
void write_phase_csv(std::ostream& out, const ExperimentConfig& config,
                     const std::vector<PhasePoint>& points);

/// Planted-mode run_point for each m at fixed (n, rho).
std::vector<PhasePoint> m_separation_report(int n, const std::vector<int>& m_values,
                                            double rho, std::int64_t trials,
                                            std::uint64_t seed,
                                            double c = kDefaultThresholdExponent);

struct BoundRow {
  int m = 0;
  double rho = 0.0;
  double t = 0.0;
  double empirical_tail = 0.0;  // P(Z - E[Z] >= t)
  double mc_stderr = 0.0;
  double eq3 = 0.0;
  double eq4_half = 0.0;  // gamma = 1/2
  double chernoff_opt = 0.0;
  bool pass = false;     // empirical_tail <= eq3 + 3 mc_stderr
  bool ordered = false;  // chernoff_opt <= eq3 <= eq4(gamma) for gamma = 0.1..0.9
  double empirical_mean = 0.0;
  double mean_stderr = 0.0;
  double empirical_variance = 0.0;
  double variance_stderr = 0.0;
  double trace = 0.0;              // exact E[Z]
  double expected_variance = 0.0;  // 2 |A|_F^2
};

/// For each (m, rho): samples the edge-tuple form, compares empirical tails at
/// t = 4 sd * j / t_points (j = 1..t_points) against the three bounds, and
/// reports the first two moments. Requires samples >= 10^4.
std::vector<BoundRow> validate_bounds(const std::vector<int>& m_values,
                                      const std::vector<double>& rho_values, int t_points,
                                      std::int64_t samples, std::uint64_t seed);
void write_bounds_csv(std::ostream& out, const std::vector<BoundRow>& rows);

struct TvRow {
  double rho = 0.0;
  double tv_estimate = 0.0;
  double std_error = 0.0;
  double bayes_error = 0.0;
  std::int64_t trials = 0;
};

std::vector<TvRow> tv_sweep(int n, int m, const std::vector<double>& rho_values,
                            std::int64_t trials, std::uint64_t budget, std::uint64_t seed);
void write_tv_csv(std::ostream& out, const std::vector<TvRow>& rows);

/// Command-line entry point. Returns 0 on success, 2 on usage errors and 1 on
/// runtime errors.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mgd
