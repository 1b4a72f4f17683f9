// Subcommand dispatch for the mgd command-line tool.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mgd/bounds.hpp"
#include "mgd/ensemble_io.hpp"
#include "mgd/glr.hpp"
#include "mgd/harness.hpp"
#include "mgd/model.hpp"

namespace mgd {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Splices `key = value` lines from --config FILE into the argument list as
// --key=value, skipping keys that were also given on the command line.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config requires a file argument");
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                 args.begin() + static_cast<std::ptrdiff_t>(i + 2));
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (!path) return args;
  std::ifstream file(*path);
  if (!file) throw UsageError("cannot read config file " + *path);

  auto given = [&](const std::string& key) {
    const std::string flag = "--" + key;
    return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
  };
  std::string line;
  int lineno = 0;
  while (std::getline(file, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw UsageError("config line " + std::to_string(lineno) + ": empty key");
    if (!given(key)) args.push_back("--" + key + "=" + value);
  }
  return args;
}

template <typename T>
std::vector<T> parse_list(const std::string& text, const std::string& flag) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    T value{};
    std::istringstream is(item);
    if (item.empty() || !(is >> value) || !is.eof()) {
      throw UsageError("--" + flag + ": cannot parse '" + item + "'");
    }
    out.push_back(value);
  }
  return out;
}

StatisticMode parse_mode(const std::string& name) {
  if (name == "exact") return StatisticMode::Exact;
  if (name == "heuristic") return StatisticMode::Heuristic;
  if (name == "planted") return StatisticMode::Planted;
  throw UsageError("--mode must be exact, heuristic or planted");
}

struct Shared {
  std::uint64_t seed = 0;
  std::string out;
  double c = kDefaultThresholdExponent;
  std::uint64_t budget = kDefaultProfileBudget;
  std::string mode;
};

void add_shared(CLI::App* sub, Shared& s, const std::string& default_mode) {
  s.mode = default_mode;
  sub->add_option("--seed", s.seed, "master seed")->capture_default_str();
  sub->add_option("--out", s.out, "output path (default: stdout)");
  sub->add_option("--c", s.c, "threshold exponent in (1, 1.5)")->capture_default_str();
  sub->add_option("--budget", s.budget, "profile enumeration cap")->capture_default_str();
  sub->add_option("--mode", s.mode, "exact | heuristic | planted")->capture_default_str();
}

// Runs `emit` against the --out file or the standard stream. The file is only
// opened once the result exists, so failed runs leave nothing behind.
template <typename Emit>
void deliver(const Shared& s, std::ostream& out, Emit&& emit) {
  if (s.out.empty()) {
    emit(out);
    return;
  }
  std::ostringstream text;
  emit(text);
  std::ofstream file(s.out, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open output file: " + s.out);
  file << text.str();
  if (!file) throw std::runtime_error("failed writing output file: " + s.out);
}

std::string format_profile(const PermutationProfile& profile) {
  std::string text;
  for (std::size_t k = 0; k < profile.maps().size(); ++k) {
    if (k) text += " |";
    for (int image : profile.maps()[k].images()) text += ' ' + std::to_string(image);
  }
  return text;
}

GlrMode make_mode(StatisticMode mode, const Shared& s, int restarts,
                  const std::optional<PermutationProfile>& planted) {
  switch (mode) {
    case StatisticMode::Exact:
      return ExactMode{s.budget};
    case StatisticMode::Heuristic:
      return HeuristicMode{HeuristicOptions{restarts, s.seed}};
    case StatisticMode::Planted:
      if (!planted) throw std::runtime_error("planted mode needs a profile in the ensemble file");
      return PlantedMode{*planted};
  }
  throw std::logic_error("unreachable statistic mode");
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    args = expand_config(std::move(args));
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  CLI::App app{"Multi-graph Gaussian correlation detection: simulation and tests", "mgd"};
  app.require_subcommand(1);

  // gen
  Shared gen_s;
  int gen_n = 0, gen_m = 0;
  double gen_rho = 0.0;
  std::string gen_hyp = "alt";
  auto* gen = app.add_subcommand("gen", "sample an ensemble under H0 or H1");
  add_shared(gen, gen_s, "planted");
  gen->add_option("--n", gen_n, "nodes")->required();
  gen->add_option("--m", gen_m, "graphs")->required();
  gen->add_option("--rho", gen_rho, "correlation")->capture_default_str();
  gen->add_option("--hypothesis", gen_hyp, "null | alt")
      ->check(CLI::IsMember({"null", "alt"}))
      ->capture_default_str();

  // stat
  Shared stat_s;
  std::string stat_in;
  int stat_restarts = 10;
  auto* stat = app.add_subcommand("stat", "compute the GLR statistic of an ensemble file");
  add_shared(stat, stat_s, "exact");
  stat->add_option("--in", stat_in, "ensemble file")->required();
  stat->add_option("--restarts", stat_restarts, "heuristic restarts")->capture_default_str();

  // test
  Shared test_s;
  std::string test_in;
  std::optional<double> test_rho;
  int test_restarts = 10;
  auto* test = app.add_subcommand("test", "run the thresholded GLR test on an ensemble file");
  add_shared(test, test_s, "exact");
  test->add_option("--in", test_in, "ensemble file")->required();
  test->add_option("--rho", test_rho, "correlation the threshold targets (default: file)");
  test->add_option("--restarts", test_restarts, "heuristic restarts")->capture_default_str();

  // mc
  Shared mc_s;
  std::string mc_n, mc_m, mc_rho;
  std::int64_t mc_trials = 100;
  int mc_restarts = 10;
  auto* mc = app.add_subcommand("mc", "Monte Carlo phase diagram over an (n, m, rho) grid");
  add_shared(mc, mc_s, "planted");
  mc->add_option("--n", mc_n, "comma-separated n values")->required();
  mc->add_option("--m", mc_m, "comma-separated m values")->required();
  mc->add_option("--rho", mc_rho, "comma-separated rho values")->required();
  mc->add_option("--trials", mc_trials, "trial pairs per grid cell")->capture_default_str();
  mc->add_option("--restarts", mc_restarts, "heuristic restarts")->capture_default_str();

  // tv
  Shared tv_s;
  int tv_n = 4, tv_m = 2;
  std::string tv_rho = "0,0.5,0.9";
  std::int64_t tv_trials = 1000;
  auto* tv = app.add_subcommand("tv", "total variation and Bayes error via the exact likelihood ratio");
  add_shared(tv, tv_s, "exact");
  tv->add_option("--n", tv_n, "nodes")->capture_default_str();
  tv->add_option("--m", tv_m, "graphs")->capture_default_str();
  tv->add_option("--rho", tv_rho, "comma-separated rho values")->capture_default_str();
  tv->add_option("--trials", tv_trials, "trials per rho")->capture_default_str();

  // bounds
  Shared bounds_s;
  std::string bounds_m = "2,3,5", bounds_rho = "0,0.25,0.5,0.75";
  int bounds_t = 10;
  std::int64_t bounds_samples = 100'000;
  auto* bounds = app.add_subcommand("bounds", "check the quadratic-form tail bounds by sampling");
  add_shared(bounds, bounds_s, "exact");
  bounds->add_option("--m", bounds_m, "comma-separated m values")->capture_default_str();
  bounds->add_option("--rho", bounds_rho, "comma-separated rho values")->capture_default_str();
  bounds->add_option("--t-points", bounds_t, "tail points per (m, rho)")->capture_default_str();
  bounds->add_option("--samples", bounds_samples, "samples per (m, rho)")->capture_default_str();

  // msep
  Shared msep_s;
  int msep_n = 200;
  std::string msep_m = "2,3,4";
  std::optional<double> msep_rho;
  std::int64_t msep_trials = 500;
  auto* msep = app.add_subcommand("msep", "planted-mode error as a function of m at fixed rho");
  add_shared(msep, msep_s, "planted");
  msep->add_option("--n", msep_n, "nodes")->capture_default_str();
  msep->add_option("--m", msep_m, "comma-separated m values")->capture_default_str();
  msep->add_option("--rho", msep_rho, "correlation (default: signal strength 0.75 at m=2)");
  msep->add_option("--trials", msep_trials, "trial pairs per m")->capture_default_str();

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (gen->parsed()) {
      const ModelParams params{gen_n, gen_m, gen_rho};
      params.validate();
      std::optional<PermutationProfile> profile;
      GraphEnsemble ensemble;
      if (gen_hyp == "null") {
        ensemble = sample_null(params, gen_s.seed);
      } else {
        auto planted = sample_alternative(params, gen_s.seed);
        ensemble = std::move(planted.ensemble);
        profile = std::move(planted.profile);
      }
      deliver(gen_s, out, [&](std::ostream& os) { write_ensemble(os, ensemble, profile); });
    } else if (stat->parsed()) {
      const StatisticMode mode = parse_mode(stat_s.mode);
      const EnsembleFile file = read_ensemble_file(stat_in);
      GlrResult result;
      if (mode == StatisticMode::Exact) {
        result = exact_glr(file.ensemble, stat_s.budget);
      } else if (mode == StatisticMode::Heuristic) {
        result = heuristic_glr(file.ensemble, HeuristicOptions{stat_restarts, stat_s.seed});
      } else {
        if (!file.profile) throw std::runtime_error("planted mode needs a profile in the ensemble file");
        result = GlrResult{pairwise_overlap(file.ensemble, *file.profile), *file.profile,
                           StatisticMode::Planted};
      }
      deliver(stat_s, out, [&](std::ostream& os) {
        os << "T " << format_real(result.statistic) << '\n'
           << "mode " << to_string(result.mode) << '\n'
           << "profile" << format_profile(result.maximizer) << '\n';
      });
    } else if (test->parsed()) {
      const StatisticMode mode = parse_mode(test_s.mode);
      const EnsembleFile file = read_ensemble_file(test_in);
      const ThresholdParams tp{test_s.c, test_rho.value_or(file.ensemble.params().rho)};
      tp.validate();
      const TestOutcome outcome =
          glr_test(file.ensemble, tp, make_mode(mode, test_s, test_restarts, file.profile));
      deliver(test_s, out, [&](std::ostream& os) {
        os << "T " << format_real(outcome.statistic) << '\n'
           << "tau " << format_real(outcome.threshold) << '\n'
           << "decision " << to_string(outcome.decision) << '\n'
           << "mode " << to_string(outcome.mode) << '\n';
      });
    } else if (mc->parsed()) {
      ExperimentConfig config;
      config.n_values = parse_list<int>(mc_n, "n");
      config.m_values = parse_list<int>(mc_m, "m");
      config.rho_values = parse_list<double>(mc_rho, "rho");
      config.trials_per_point = mc_trials;
      config.c = mc_s.c;
      config.mode = parse_mode(mc_s.mode);
      config.master_seed = mc_s.seed;
      config.budget = mc_s.budget;
      config.heuristic_restarts = mc_restarts;
      config.validate();
      const auto points = phase_diagram(config);
      deliver(mc_s, out, [&](std::ostream& os) { write_phase_csv(os, config, points); });
    } else if (tv->parsed()) {
      const auto rhos = parse_list<double>(tv_rho, "rho");
      for (double rho : rhos) ModelParams{tv_n, tv_m, rho}.validate();
      if (tv_trials < 1) throw UsageError("--trials must be >= 1");
      const auto rows = tv_sweep(tv_n, tv_m, rhos, tv_trials, tv_s.budget, tv_s.seed);
      deliver(tv_s, out, [&](std::ostream& os) { write_tv_csv(os, rows); });
    } else if (bounds->parsed()) {
      const auto ms = parse_list<int>(bounds_m, "m");
      const auto rhos = parse_list<double>(bounds_rho, "rho");
      for (int m : ms) {
        for (double rho : rhos) ModelParams{2, m, rho}.validate();
      }
      const auto rows = validate_bounds(ms, rhos, bounds_t, bounds_samples, bounds_s.seed);
      deliver(bounds_s, out, [&](std::ostream& os) { write_bounds_csv(os, rows); });
    } else if (msep->parsed()) {
      if (parse_mode(msep_s.mode) != StatisticMode::Planted) {
        throw UsageError("msep supports only --mode planted");
      }
      const auto ms = parse_list<int>(msep_m, "m");
      const double rho = msep_rho.value_or(rho_for_strength(msep_n, 2, 0.75));
      for (int m : ms) ModelParams{msep_n, m, rho}.validate();
      ThresholdParams{msep_s.c, rho}.validate();
      if (msep_trials < 1) throw UsageError("--trials must be >= 1");
      const auto points = m_separation_report(msep_n, ms, rho, msep_trials, msep_s.seed, msep_s.c);
      deliver(msep_s, out, [&](std::ostream& os) {
        os << phase_csv_header() << '\n';
        for (const auto& p : points) os << phase_csv_row(p) << '\n';
      });
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace mgd
