#include "mgd/ensemble_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace mgd {

std::string format_real(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_ensemble(std::ostream& out, const GraphEnsemble& ensemble,
                    const std::optional<PermutationProfile>& profile) {
  const auto& p = ensemble.params();
  out << p.n << ' ' << p.m << ' ' << format_real(p.rho) << '\n';
  if (profile) {
    require_compatible(ensemble, *profile);
    bool first = true;
    for (const auto& pi : profile->maps()) {
      for (int v : pi.images()) {
        if (!first) out << ' ';
        out << v;
        first = false;
      }
    }
    out << '\n';
  } else {
    out << "null\n";
  }
  for (const auto& g : ensemble.all()) {
    bool first = true;
    for (double w : g.weights()) {
      if (!first) out << ' ';
      out << format_real(w);
      first = false;
    }
    out << '\n';
  }
}

void write_ensemble_file(const std::string& path, const GraphEnsemble& ensemble,
                         const std::optional<PermutationProfile>& profile) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_ensemble(out, ensemble, profile);
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

namespace {

std::vector<std::string> tokens_of(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  for (std::string t; ss >> t;) out.push_back(t);
  return out;
}

double parse_real(const std::string& token) {
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0') {
    throw std::runtime_error("ensemble file: bad number '" + token + "'");
  }
  return v;
}

int parse_int(const std::string& token) {
  char* end = nullptr;
  const long v = std::strtol(token.c_str(), &end, 10);
  if (end == token.c_str() || *end != '\0') {
    throw std::runtime_error("ensemble file: bad integer '" + token + "'");
  }
  return static_cast<int>(v);
}

bool next_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
  }
  return false;
}

}  // namespace

EnsembleFile read_ensemble(std::istream& in) {
  std::string line;
  if (!next_line(in, line)) throw std::runtime_error("ensemble file: missing header");
  const auto head = tokens_of(line);
  if (head.size() != 3) throw std::runtime_error("ensemble file: header must be 'n m rho'");
  ModelParams params{parse_int(head[0]), parse_int(head[1]), parse_real(head[2])};
  try {
    params.validate();
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("ensemble file: ") + e.what());
  }

  if (!next_line(in, line)) throw std::runtime_error("ensemble file: missing profile line");
  std::optional<PermutationProfile> profile;
  const auto perm_tokens = tokens_of(line);
  if (!(perm_tokens.size() == 1 && perm_tokens[0] == "null")) {
    const auto expected = static_cast<std::size_t>(params.m - 1) * params.n;
    if (perm_tokens.size() != expected) {
      throw std::runtime_error("ensemble file: profile line needs " +
                               std::to_string(expected) + " entries");
    }
    std::vector<Permutation> maps;
    for (int k = 0; k + 1 < params.m; ++k) {
      std::vector<int> images(static_cast<std::size_t>(params.n));
      for (int i = 0; i < params.n; ++i) {
        images[i] = parse_int(perm_tokens[static_cast<std::size_t>(k) * params.n + i]);
      }
      try {
        maps.emplace_back(std::move(images));
      } catch (const std::invalid_argument& e) {
        throw std::runtime_error(std::string("ensemble file: ") + e.what());
      }
    }
    profile.emplace(params.n, std::move(maps));
  }

  std::vector<WeightedGraph> graphs;
  for (int k = 0; k < params.m; ++k) {
    if (!next_line(in, line)) throw std::runtime_error("ensemble file: missing graph line");
    const auto toks = tokens_of(line);
    if (toks.size() != edge_count(params.n)) {
      throw std::runtime_error("ensemble file: graph line " + std::to_string(k) +
                               " needs " + std::to_string(edge_count(params.n)) +
                               " weights");
    }
    std::vector<double> w;
    w.reserve(toks.size());
    for (const auto& t : toks) w.push_back(parse_real(t));
    graphs.emplace_back(params.n, std::move(w));
  }
  return {GraphEnsemble(params, std::move(graphs)), std::move(profile)};
}

EnsembleFile read_ensemble_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_ensemble(in);
}

}  // namespace mgd
