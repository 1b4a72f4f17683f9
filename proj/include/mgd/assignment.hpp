#pragma once

#include <Eigen/Dense>

#include "mgd/model.hpp"

namespace mgd {

/// Permutation pi maximizing sum_i score(i, pi(i)).
///
/// Solved exactly in O(n^3) by the shortest-augmenting-path Hungarian method.
/// Among optimal assignments the lexicographically smallest image sequence is
/// returned: every optimal assignment uses only edges that are tight for the
/// optimal dual, so the tie-break is a greedy walk over rows that re-routes
/// the current matching along alternating tight paths. Edges within
/// 1e-10 * max|score| of tight count as tight.
///
/// Throws std::invalid_argument on a non-square or non-finite matrix.
Permutation linear_assignment(const Eigen::MatrixXd& score);

/// sum_i score(i, pi(i)).
double assignment_value(const Eigen::MatrixXd& score, const Permutation& pi);

}  // namespace mgd
