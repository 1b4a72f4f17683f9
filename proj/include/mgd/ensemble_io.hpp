#pragma once

// Plain-text ensemble files.
//
//   line 1   n m rho
//   line 2   `null`, or the (m-1) * n images of pi_{12}, ..., pi_{1m}
//            (0-based, space separated, pi_{12} first)
//   then     m lines of C(n,2) weights in edge-index order
//
// Reals are written with 17 significant digits, which round-trips every
// double exactly.

#include <iosfwd>
#include <optional>
#include <string>

#include "mgd/model.hpp"

namespace mgd {

struct EnsembleFile {
  GraphEnsemble ensemble;
  std::optional<PermutationProfile> profile;
};

/// Shortest decimal form with 17 significant digits ("%.17g").
std::string format_real(double value);

void write_ensemble(std::ostream& out, const GraphEnsemble& ensemble,
                    const std::optional<PermutationProfile>& profile);
void write_ensemble_file(const std::string& path, const GraphEnsemble& ensemble,
                         const std::optional<PermutationProfile>& profile);

/// Throws std::runtime_error on malformed input.
EnsembleFile read_ensemble(std::istream& in);
EnsembleFile read_ensemble_file(const std::string& path);

}  // namespace mgd
