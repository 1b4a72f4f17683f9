#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "mgd/bounds.hpp"
#include "mgd/ensemble_io.hpp"
#include "mgd/glr.hpp"
#include "mgd/harness.hpp"
#include "mgd/model.hpp"
#include "mgd/oracle.hpp"

namespace py = pybind11;
using namespace mgd;

namespace {

std::vector<int> images_of(const Permutation& p) {
  return {p.images().begin(), p.images().end()};
}

std::vector<std::vector<int>> maps_of(const PermutationProfile& profile) {
  std::vector<std::vector<int>> out;
  for (const auto& p : profile.maps()) out.push_back(images_of(p));
  return out;
}

PermutationProfile profile_from(int n, const std::vector<std::vector<int>>& maps) {
  std::vector<Permutation> perms;
  for (const auto& images : maps) perms.emplace_back(images);
  return PermutationProfile(n, std::move(perms));
}

// Symmetric matrices with zero diagonal; only the upper triangle is read.
GraphEnsemble ensemble_from(double rho, const std::vector<Eigen::MatrixXd>& mats) {
  if (mats.empty()) throw std::invalid_argument("need at least one graph");
  const auto n = static_cast<int>(mats.front().rows());
  std::vector<WeightedGraph> graphs;
  for (const auto& a : mats) {
    if (a.rows() != n || a.cols() != n) throw std::invalid_argument("graphs must be n x n");
    WeightedGraph g(n);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) g.set(i, j, a(i, j));
    }
    graphs.push_back(std::move(g));
  }
  return GraphEnsemble(ModelParams{n, static_cast<int>(mats.size()), rho}, std::move(graphs));
}

std::vector<Eigen::MatrixXd> dense_graphs(const GraphEnsemble& ens) {
  std::vector<Eigen::MatrixXd> out;
  for (const auto& g : ens.all()) out.push_back(g.dense());
  return out;
}

StatisticMode mode_from(const std::string& s) {
  if (s == "exact") return StatisticMode::Exact;
  if (s == "heuristic") return StatisticMode::Heuristic;
  if (s == "planted") return StatisticMode::Planted;
  throw std::invalid_argument("mode must be exact, heuristic or planted");
}

py::dict point_dict(const PhasePoint& p) {
  py::dict d;
  d["n"] = p.n;
  d["m"] = p.m;
  d["rho"] = p.rho;
  d["signal_strength"] = p.signal_strength;
  d["type1_rate"] = p.type1_rate;
  d["type2_rate"] = p.type2_rate;
  d["total_error"] = p.total_error;
  d["stderr_total"] = p.stderr_total;
  d["trials"] = p.trials;
  d["mode"] = p.mode;
  return d;
}

}  // namespace

PYBIND11_MODULE(_mgd, m) {
  m.doc() = "Correlation detection across multiple unaligned Gaussian graphs.";

  py::register_exception<BudgetExceeded>(m, "BudgetExceeded", PyExc_RuntimeError);

  py::class_<GraphEnsemble>(m, "GraphEnsemble")
      .def(py::init(&ensemble_from), py::arg("rho"), py::arg("graphs"))
      .def_property_readonly("n", &GraphEnsemble::nodes)
      .def_property_readonly("m", &GraphEnsemble::graphs)
      .def_property_readonly("rho", [](const GraphEnsemble& e) { return e.params().rho; })
      .def("graph", [](const GraphEnsemble& e, int k) { return e.graph(k).dense(); })
      .def("graphs", &dense_graphs)
      .def("__eq__", [](const GraphEnsemble& a, const GraphEnsemble& b) { return a == b; });

  m.def("sample_null", [](int n, int k, double rho, std::uint64_t seed) {
    return sample_null(ModelParams{n, k, rho}, seed);
  }, py::arg("n"), py::arg("m"), py::arg("rho") = 0.0, py::arg("seed") = 0);

  m.def("sample_alternative", [](int n, int k, double rho, std::uint64_t seed) {
    auto planted = sample_alternative(ModelParams{n, k, rho}, seed);
    return py::make_tuple(std::move(planted.ensemble), maps_of(planted.profile));
  }, py::arg("n"), py::arg("m"), py::arg("rho"), py::arg("seed") = 0,
     "Returns (ensemble, maps) with maps[k-1] the images of graph 1's nodes in graph k+1.");

  m.def("sigma_inverse_minus_identity", &sigma_inverse_minus_identity);
  m.def("det_sigma", &det_sigma);
  m.def("effective_rho", &effective_rho);

  m.def("pairwise_overlap", [](const GraphEnsemble& e, const std::vector<std::vector<int>>& maps) {
    return pairwise_overlap(e, profile_from(e.nodes(), maps));
  });
  m.def("profile_count", &profile_count);
  m.def("threshold", [](int n, int k, double rho, double c) {
    return threshold(ModelParams{n, k, rho}, ThresholdParams{c, rho});
  }, py::arg("n"), py::arg("m"), py::arg("rho"), py::arg("c") = kDefaultThresholdExponent);

  m.def("glr_statistic",
        [](const GraphEnsemble& e, const std::string& mode, std::uint64_t budget, int restarts,
           std::uint64_t seed) {
          GlrResult r;
          if (mode == "exact") {
            r = exact_glr(e, budget);
          } else if (mode == "heuristic") {
            r = heuristic_glr(e, HeuristicOptions{restarts, seed});
          } else {
            throw std::invalid_argument("mode must be exact or heuristic");
          }
          return py::make_tuple(r.statistic, maps_of(r.maximizer));
        },
        py::arg("ensemble"), py::arg("mode") = "exact",
        py::arg("budget") = kDefaultProfileBudget, py::arg("restarts") = 10,
        py::arg("seed") = 0);

  m.def("glr_test",
        [](const GraphEnsemble& e, double rho, double c, const std::string& mode,
           std::optional<std::vector<std::vector<int>>> planted, std::uint64_t budget) {
          GlrMode chosen = ExactMode{budget};
          switch (mode_from(mode)) {
            case StatisticMode::Exact:
              break;
            case StatisticMode::Heuristic:
              chosen = HeuristicMode{};
              break;
            case StatisticMode::Planted:
              if (!planted) throw std::invalid_argument("planted mode needs the planted maps");
              chosen = PlantedMode{profile_from(e.nodes(), *planted)};
              break;
          }
          const auto out = glr_test(e, ThresholdParams{c, rho}, chosen);
          py::dict d;
          d["statistic"] = out.statistic;
          d["threshold"] = out.threshold;
          d["decision"] = to_string(out.decision);
          d["mode"] = to_string(out.mode);
          d["maximizer"] = maps_of(out.maximizer);
          return d;
        },
        py::arg("ensemble"), py::arg("rho"), py::arg("c") = kDefaultThresholdExponent,
        py::arg("mode") = "exact", py::arg("planted") = py::none(),
        py::arg("budget") = kDefaultProfileBudget);

  m.def("miss_bound", [](int n, int k, double rho, double c) {
    return miss_bound(ModelParams{n, k, rho}, ThresholdParams{c, rho});
  }, py::arg("n"), py::arg("m"), py::arg("rho"), py::arg("c") = kDefaultThresholdExponent);

  py::class_<QuadFormSpec>(m, "QuadFormSpec")
      .def(py::init([](const std::vector<std::pair<double, std::int64_t>>& eigs) {
        std::vector<Eigenvalue> v;
        for (const auto& [value, mult] : eigs) v.push_back({value, mult});
        return QuadFormSpec(std::move(v));
      }))
      .def_property_readonly("eigenvalues",
                             [](const QuadFormSpec& s) {
                               std::vector<std::pair<double, std::int64_t>> out;
                               for (const auto& e : s.eigenvalues()) {
                                 out.emplace_back(e.value, e.multiplicity);
                               }
                               return out;
                             })
      .def_property_readonly("frobenius_sq", &QuadFormSpec::frobenius_sq)
      .def_property_readonly("spectral", &QuadFormSpec::spectral)
      .def_property_readonly("trace", &QuadFormSpec::trace);

  m.def("lemma2_spec", &lemma2_spec, py::arg("m"), py::arg("rho"));
  m.def("scale_and_replicate", &scale_and_replicate);
  m.def("hw_bound_eq3", &hw_bound_eq3);
  m.def("hw_bound_eq4", &hw_bound_eq4);
  m.def("chernoff_optimized", &chernoff_optimized);
  m.def("sample_quadform", &sample_quadform);
  m.def("false_alarm_exponent", [](int n, int k, double rho, double c) {
    const auto f = false_alarm_exponent(ModelParams{n, k, rho}, ThresholdParams{c, rho});
    py::dict d;
    d["total"] = f.total;
    d["union_term"] = f.union_term;
    d["log_term"] = f.log_term;
    d["stirling_term"] = f.stirling_term;
    d["quad_term"] = f.quad_term;
    d["a_n"] = f.a_n;
    d["b_n"] = f.b_n;
    d["mu"] = f.mu;
    d["tau"] = f.tau;
    d["relaxed_total"] = f.relaxed_total;
    return d;
  }, py::arg("n"), py::arg("m"), py::arg("rho"), py::arg("c") = kDefaultThresholdExponent);

  m.def("log_likelihood_ratio", &log_likelihood_ratio, py::arg("ensemble"), py::arg("rho"),
        py::arg("budget") = kDefaultProfileBudget);
  m.def("estimate_tv",
        [](int n, int k, double rho, std::int64_t trials, std::uint64_t seed,
           const std::string& side) {
          const auto h = side == "alternative" ? Hypothesis::Alternative : Hypothesis::Null;
          if (side != "null" && side != "alternative") {
            throw std::invalid_argument("side must be null or alternative");
          }
          const auto tv = estimate_tv(ModelParams{n, k, rho}, trials, kDefaultProfileBudget,
                                      seed, h);
          return py::make_tuple(tv.value, tv.std_error);
        },
        py::arg("n"), py::arg("m"), py::arg("rho"), py::arg("trials"), py::arg("seed") = 0,
        py::arg("side") = "null");
  m.def("bayes_test_error", [](int n, int k, double rho, std::int64_t trials,
                               std::uint64_t seed) {
    const auto b = bayes_test_error(ModelParams{n, k, rho}, trials, kDefaultProfileBudget, seed);
    py::dict d;
    d["type1"] = b.type1;
    d["type2"] = b.type2;
    d["total"] = b.total;
    d["std_error"] = b.std_error;
    return d;
  }, py::arg("n"), py::arg("m"), py::arg("rho"), py::arg("trials"), py::arg("seed") = 0);

  m.def("signal_strength", &signal_strength);
  m.def("rho_for_strength", &rho_for_strength);
  m.def("run_point",
        [](int n, int k, double rho, std::int64_t trials, double c, const std::string& mode,
           std::uint64_t seed, std::uint64_t budget, int restarts) {
          return point_dict(run_point(n, k, rho, trials, c, mode_from(mode), seed, budget,
                                      restarts));
        },
        py::arg("n"), py::arg("m"), py::arg("rho"), py::arg("trials") = 100,
        py::arg("c") = kDefaultThresholdExponent, py::arg("mode") = "planted",
        py::arg("seed") = 0, py::arg("budget") = kDefaultProfileBudget,
        py::arg("restarts") = 10);

  m.def("write_ensemble", [](const GraphEnsemble& e,
                             std::optional<std::vector<std::vector<int>>> maps) {
    std::ostringstream out;
    std::optional<PermutationProfile> profile;
    if (maps) profile = profile_from(e.nodes(), *maps);
    write_ensemble(out, e, profile);
    return out.str();
  }, py::arg("ensemble"), py::arg("maps") = py::none());
  m.def("read_ensemble", [](const std::string& text) {
    std::istringstream in(text);
    auto file = read_ensemble(in);
    py::object maps = py::none();
    if (file.profile) maps = py::cast(maps_of(*file.profile));
    return py::make_tuple(std::move(file.ensemble), maps);
  });

  m.def("cli", [](const std::vector<std::string>& args) {
    std::vector<const char*> argv{"mgd"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    return py::make_tuple(code, out.str(), err.str());
  }, "Runs the command-line tool in process; returns (exit_code, stdout, stderr).");

  m.attr("__version__") = "0.1.0";
}
